mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::{corpus_files, embedding_jsonl, random_corpus, spawn_mock};
use textcontrast::formats::{load_corpus, parse_embeddings, parse_emotion_labels};
use textcontrast::report::{analyze, compare, AnalysisBundle, AnalysisOptions, CompareError, ExternalInputs};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_textcontrast")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sections_follow_inputs() {
    let corpus = random_corpus("human", 11, 6, 4);
    let bare = analyze(&corpus, &ExternalInputs::default(), &AnalysisOptions::default()).unwrap();
    assert!(bare.constituency.is_some());
    assert!(bare.emotions.is_none());
    assert!(bare.similarity.is_none());
    assert_eq!(bare.documents, 6);
    assert_eq!(bare.sentences, 24);

    let (conllu, _) = corpus_files(&corpus);
    let (no_trees, _) = load_corpus(&conllu, None, "human").unwrap();
    let b = analyze(&no_trees, &ExternalInputs::default(), &AnalysisOptions::default()).unwrap();
    assert!(b.constituency.is_none());
    assert_eq!(b.upos, bare.upos);

    // embeddings without a reference side give no similarity section
    let inputs = ExternalInputs {
        embeddings: Some(parse_embeddings(&embedding_jsonl(&corpus, 1)).unwrap()),
        ..ExternalInputs::default()
    };
    assert!(analyze(&corpus, &inputs, &AnalysisOptions::default()).unwrap().similarity.is_none());
}

#[test]
fn partial_inputs() {
    let corpus = random_corpus("model", 12, 8, 3);
    let labels: String = corpus
        .documents
        .iter()
        .take(4)
        .enumerate()
        .map(|(i, d)| {
            let label = if i % 2 == 0 { "joy" } else { "fear" };
            format!("{{\"doc_id\":\"{}\",\"label\":\"{label}\"}}\n", d.doc_id)
        })
        .collect();
    let ours = parse_embeddings(&embedding_jsonl(&corpus, 2)).unwrap();
    let theirs: Vec<_> = parse_embeddings(&embedding_jsonl(&corpus, 3)).unwrap().into_iter().take(5).collect();
    let inputs = ExternalInputs {
        emotions: Some(parse_emotion_labels(&labels).unwrap()),
        embeddings: Some(ours),
        reference_embeddings: Some(theirs),
    };
    let b = analyze(&corpus, &inputs, &AnalysisOptions::default()).unwrap();
    let e = b.emotions.unwrap();
    assert_eq!(e.rows.len(), 7);
    assert!((e.get("joy").unwrap() - 50.0).abs() < 1e-9);
    assert_eq!(e.get("anger"), Some(0.0));
    let sim = b.similarity.unwrap();
    assert_eq!(sim.similarities.len(), 5);
    assert_eq!(sim.unpaired, 3);
    assert_eq!(sim.histogram.total(), 5);
}

#[test]
fn bundle_json_round_trip() {
    let corpus = random_corpus("human", 13, 5, 5);
    let b = analyze(&corpus, &ExternalInputs::default(), &AnalysisOptions::default()).unwrap();
    let back: AnalysisBundle = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
    assert_eq!(back, b);
    assert_eq!(compare(&b, &[], 1.0).unwrap_err(), CompareError::NoModels);
}

#[test]
fn cli_end_to_end_with_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (name, seed) in [("human", 21), ("model", 22)] {
        let (conllu, trees) = corpus_files(&random_corpus(name, seed, 5, 4));
        let c = write(d, &format!("{name}.conllu"), &conllu);
        let t = write(d, &format!("{name}.trees"), &trees);
        let out = d.join(format!("{name}.json"));
        let o = cli(&["analyze", "--conllu", s(&c), "--trees", s(&t), "--out", s(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let report = d.join("report.json");
    let o = cli(&[
        "compare", "--reference", s(&d.join("human.json")), "--model", s(&d.join("model.json")), "--out", s(&report),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let conf = write(d, "render.conf", "# render settings\nformat = tsv\nmin-ref-pct = 5\n");
    let o = cli(&["--config", s(&conf), "render", "--report", s(&report)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let tsv = String::from_utf8(o.stdout).unwrap();
    assert!(tsv.starts_with("# Lexical diversity\n\thuman\tmodel\n"), "{tsv}");
    // the command line beats the file
    let o = cli(&["--config", s(&conf), "render", "--report", s(&report), "--format", "markdown"]);
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("# Comparison against human"));
}

#[test]
fn cli_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let prompts = dir.path().join("prompts.jsonl");
    let summary = dir.path().join("summary.json");
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/archive_month.json");
    let o = cli(&[
        "ingest", fixture, "--prompts-out", s(&prompts), "--summary-out", s(&summary), "--to", "2023-10-30",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&prompts)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1]["text"], "A Quiet Triumph\nBrilliant.");
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert!(summary["section_name"].is_object() || summary["section_name"].is_array());
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.conllu");
    let o = cli(&["analyze", "--conllu", s(&missing)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let o = cli(&["render", "--report", s(&missing), "--format", "pdf"]);
    assert_eq!(o.status.code(), Some(1));

    let conf = write(dir.path(), "bad.conf", "colour = red\n");
    let o = cli(&["--config", s(&conf), "render", "--report", "x"]);
    assert_eq!(o.status.code(), Some(1));

    let prompts = write(dir.path(), "p.jsonl", "{\"doc_id\":\"a\",\"text\":\"hi\",\"short\":false}\n");
    let out = dir.path().join("gen.jsonl");
    let o = cli(&[
        "generate", "--prompts", s(&prompts), "--out", s(&out), "--endpoint", "http://127.0.0.1:9/v1/completions",
        "--model", "m", "--max-attempts", "1",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[tokio::test(flavor = "multi_thread")]
async fn cli_generate_against_mock() {
    let (url, _) = spawn_mock().await;
    let dir = tempfile::tempdir().unwrap();
    let prompts = write(
        dir.path(),
        "p.jsonl",
        "{\"doc_id\":\"a\",\"text\":\"first\",\"short\":false}\n{\"doc_id\":\"b\",\"text\":\"fail\",\"short\":false}\n",
    );
    let out = dir.path().join("gen.jsonl");
    let failures = dir.path().join("fail.jsonl");
    let args: Vec<String> = [
        "generate", "--prompts", s(&prompts), "--out", s(&out), "--failures-out", s(&failures), "--endpoint", &url,
        "--model", "mock", "--backoff-ms", "1",
    ]
    .iter()
    .map(|a| (*a).to_owned())
    .collect();
    let o = tokio::task::spawn_blocking(move || {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        cli(&refs)
    })
    .await
    .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let docs = std::fs::read_to_string(&out).unwrap();
    assert_eq!(docs.lines().count(), 1);
    assert!(docs.contains("\"completion\":\"first\""));
    assert!(std::fs::read_to_string(&failures).unwrap().contains("\"doc_id\":\"b\""));
}
