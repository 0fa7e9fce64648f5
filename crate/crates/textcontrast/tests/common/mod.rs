//! Fixture corpora and a scripted completion endpoint shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::post;
use axum::{Json, Router};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};
use textcontrast::core::bracketed::serialize_tree;
use textcontrast::core::conllu::serialize_conllu;
use textcontrast::core::corpus::{ConstNode, Corpus, Document, Sentence, Token, Upos};

const WORDS: [&str; 24] = [
    "news", "city", "report", "said", "the", "a", "of", "in", "year", "people", "new", "officials", "he", "she",
    "they", "market", "state", "court", "police", "school", "water", "plan", "week", "vote",
];
const DEPRELS: [&str; 8] = ["nsubj", "obj", "det", "case", "amod", "obl", "advmod", "punct"];
const PHRASES: [&str; 6] = ["NP", "VP", "PP", "S", "ADJP", "SBAR"];

fn bracket(rng: &mut StdRng, from: usize, to: usize, words: &[String]) -> ConstNode {
    if to - from == 1 {
        return ConstNode::leaf("NN", from + 1, &words[from]);
    }
    let cut = rng.gen_range(from + 1..to);
    let label = PHRASES[rng.gen_range(0..PHRASES.len())];
    ConstNode::phrase(label, vec![bracket(rng, from, cut, words), bracket(rng, cut, to, words)])
}

/// Random annotated corpus with a constituency tree per sentence whose
/// leaves match the sentence's tokens.
pub fn random_corpus(name: &str, seed: u64, docs: usize, sentences_per_doc: usize) -> Corpus {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut c = Corpus::new(name);
    for d in 0..docs {
        let doc_id = format!("doc{d:03}");
        let sentences = (0..sentences_per_doc)
            .map(|_| {
                let n = rng.gen_range(1..=45);
                let root = rng.gen_range(1..=n);
                let order: Vec<usize> = {
                    let mut o: Vec<usize> = (1..=n).filter(|&i| i != root).collect();
                    for i in (1..o.len()).rev() {
                        o.swap(i, rng.gen_range(0..=i));
                    }
                    o
                };
                let mut heads = vec![0; n + 1];
                let mut attached = vec![root];
                for &t in &order {
                    heads[t] = attached[rng.gen_range(0..attached.len())];
                    attached.push(t);
                }
                let words: Vec<String> = (0..n).map(|_| WORDS[rng.gen_range(0..WORDS.len())].to_owned()).collect();
                let tokens = (1..=n)
                    .map(|i| {
                        let upos = Upos::ALL[rng.gen_range(0..Upos::ALL.len())];
                        let rel = if heads[i] == 0 { "root" } else { DEPRELS[rng.gen_range(0..DEPRELS.len())] };
                        let w = &words[i - 1];
                        let mut t = Token::new(i, w, w, upos, heads[i], rel);
                        if upos == Upos::Pron {
                            let g = ["Masc", "Masc", "Fem", "Neut"][rng.gen_range(0..4)];
                            t = t.with_feat("Gender", g);
                        }
                        t
                    })
                    .collect();
                let mut s = Sentence::new(&doc_id, tokens);
                s.const_tree = Some(bracket(&mut rng, 0, n, &words));
                s
            })
            .collect();
        c.documents.push(Document {
            doc_id,
            sentences,
            ..Default::default()
        });
    }
    c
}

/// CoNLL-U text and bracketed trees of a corpus.
pub fn corpus_files(c: &Corpus) -> (String, String) {
    let trees: Vec<String> = c
        .sentences()
        .map(|s| serialize_tree(s.const_tree.as_ref().expect("fixture trees")))
        .collect();
    (serialize_conllu(c), trees.join("\n") + "\n")
}

pub fn emotion_jsonl(c: &Corpus, seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let labels = ["anger", "disgust", "fear", "joy", "neutral", "sadness", "surprise"];
    c.documents
        .iter()
        .map(|d| json!({"doc_id": d.doc_id, "label": labels[rng.gen_range(0..7)]}).to_string() + "\n")
        .collect()
}

pub fn embedding_jsonl(c: &Corpus, seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    c.documents
        .iter()
        .map(|d| {
            let v: Vec<f64> = (0..8).map(|_| rng.gen_range(0.1..1.0)).collect();
            json!({"doc_id": d.doc_id, "vector": v}).to_string() + "\n"
        })
        .collect()
}

/// Endpoint behaviour is scripted through the prompt text:
/// `fail...` answers 400, `rate:K ...` answers 429 the first K times,
/// `notext...` answers without a completion, `delay:MS ...` waits first.
/// Anything else is echoed back.
#[derive(Default)]
pub struct MockState {
    pub in_flight: AtomicUsize,
    pub max_in_flight: AtomicUsize,
    pub calls: AtomicUsize,
    pub seen_429: Mutex<HashMap<String, usize>>,
    pub bodies: Mutex<Vec<Value>>,
}

async fn complete(State(state): State<Arc<MockState>>, Json(body): Json<Value>) -> (StatusCode, Json<Value>) {
    state.calls.fetch_add(1, Ordering::SeqCst);
    let now = state.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
    state.max_in_flight.fetch_max(now, Ordering::SeqCst);
    state.bodies.lock().unwrap().push(body.clone());
    let prompt = body["prompt"].as_str().unwrap_or_default().to_owned();
    if let Some(ms) = prompt.strip_prefix("delay:").and_then(|r| r.split_whitespace().next()) {
        tokio::time::sleep(Duration::from_millis(ms.parse().unwrap())).await;
    } else {
        tokio::time::sleep(Duration::from_millis(5)).await;
    }
    let reply = if prompt.starts_with("fail") {
        (StatusCode::BAD_REQUEST, Json(json!({"error": "bad prompt"})))
    } else if prompt.starts_with("notext") {
        (StatusCode::OK, Json(json!({"choices": []})))
    } else if let Some(k) = prompt.strip_prefix("rate:").and_then(|r| r.split_whitespace().next()) {
        let limit: usize = k.parse().unwrap();
        let mut seen = state.seen_429.lock().unwrap();
        let count = seen.entry(prompt.clone()).or_default();
        if *count < limit {
            *count += 1;
            (StatusCode::TOO_MANY_REQUESTS, Json(json!({"error": "slow down"})))
        } else {
            (StatusCode::OK, Json(json!({"choices": [{"text": prompt}]})))
        }
    } else {
        (StatusCode::OK, Json(json!({"choices": [{"text": prompt}]})))
    };
    state.in_flight.fetch_sub(1, Ordering::SeqCst);
    reply
}

/// Starts the mock on an ephemeral port and returns its completion URL.
pub async fn spawn_mock() -> (String, Arc<MockState>) {
    let state = Arc::new(MockState::default());
    let app = Router::new().route("/v1/completions", post(complete)).with_state(state.clone());
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], 0))).await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    (format!("http://{addr}/v1/completions"), state)
}
