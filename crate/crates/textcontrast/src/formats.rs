//! File loaders: annotated corpora, emotion labels, embeddings and JSONL.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use textcontrast_core::bracketed::{parse_bracketed, BracketError};
use textcontrast_core::conllu::{parse_conllu, ConlluError};
use textcontrast_core::corpus::{Corpus, TreeAlignment};
use textcontrast_core::semantic::{DocEmbedding, EmotionLabel, SemanticError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Conllu(#[from] ConlluError),
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error("line {line}: {source}")]
    Label { line: usize, source: SemanticError },
    #[error("line {line}: record needs a label or scores")]
    NoLabel { line: usize },
    #[error("line {line}: duplicate doc_id {doc_id:?}")]
    Duplicate { line: usize, doc_id: String },
    #[error("line {line}: vector of dimension {found}, expected {expected}")]
    Dimension { line: usize, expected: usize, found: usize },
    #[error("line {line}: zero or empty vector")]
    ZeroVector { line: usize },
}

pub fn read_text(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), LoadError> {
    fs::write(path, text).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Non-blank lines with their 1-based line numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn parse_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<T>, LoadError> {
    records(text)
        .map(|(line, l)| serde_json::from_str(l).map_err(|source| LoadError::Json { line, source }))
        .collect()
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item).expect("records serialize");
        out.write_all(b"\n").expect("in-memory write");
    }
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// Parses a CoNLL-U corpus and, when given, aligns bracketed trees with its
/// sentences in order. Alignment problems are logged, not fixed.
pub fn load_corpus(conllu: &str, trees: Option<&str>, name: &str) -> Result<(Corpus, Option<TreeAlignment>), LoadError> {
    let mut corpus = parse_conllu(conllu, name)?;
    let alignment = match trees {
        None => None,
        Some(t) => {
            let report = corpus.attach_trees(parse_bracketed(t)?);
            if report.sentences != report.trees {
                log::warn!(
                    "{name}: {} sentences but {} constituency trees",
                    report.sentences,
                    report.trees
                );
            }
            if !report.leaf_mismatches.is_empty() {
                log::warn!(
                    "{name}: {} trees disagree with their sentence's token count (first at sentence {})",
                    report.leaf_mismatches.len(),
                    report.leaf_mismatches[0] + 1
                );
            }
            Some(report)
        }
    };
    Ok((corpus, alignment))
}

#[derive(Deserialize)]
struct EmotionRecord {
    doc_id: String,
    label: Option<String>,
    scores: Option<BTreeMap<String, f64>>,
}

/// `{doc_id, label}` or `{doc_id, scores}` per line; a given label wins
/// over scores.
pub fn parse_emotion_labels(text: &str) -> Result<BTreeMap<String, EmotionLabel>, LoadError> {
    let mut out = BTreeMap::new();
    for (line, l) in records(text) {
        let rec: EmotionRecord = serde_json::from_str(l).map_err(|source| LoadError::Json { line, source })?;
        let label = match (&rec.label, &rec.scores) {
            (Some(name), _) => name.parse(),
            (None, Some(scores)) => EmotionLabel::argmax(scores.iter().map(|(k, &v)| (k.as_str(), v))),
            (None, None) => return Err(LoadError::NoLabel { line }),
        }
        .map_err(|source| LoadError::Label { line, source })?;
        if out.insert(rec.doc_id.clone(), label).is_some() {
            return Err(LoadError::Duplicate {
                line,
                doc_id: rec.doc_id,
            });
        }
    }
    Ok(out)
}

/// `{doc_id, vector}` per line. Every vector must be non-zero and share the
/// first line's dimension.
pub fn parse_embeddings(text: &str) -> Result<Vec<DocEmbedding>, LoadError> {
    let mut out: Vec<DocEmbedding> = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, l) in records(text) {
        let e: DocEmbedding = serde_json::from_str(l).map_err(|source| LoadError::Json { line, source })?;
        if let Some(first) = out.first() {
            if first.vector.len() != e.vector.len() {
                return Err(LoadError::Dimension {
                    line,
                    expected: first.vector.len(),
                    found: e.vector.len(),
                });
            }
        }
        if e.vector.iter().all(|&x| x == 0.0) {
            return Err(LoadError::ZeroVector { line });
        }
        if !seen.insert(e.doc_id.clone()) {
            return Err(LoadError::Duplicate { line, doc_id: e.doc_id });
        }
        out.push(e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emotion_records() {
        let m = parse_emotion_labels(
            "{\"doc_id\":\"a\",\"label\":\"joy\"}\n\n{\"doc_id\":\"b\",\"scores\":{\"joy\":0.4,\"fear\":0.4,\"neutral\":0.2}}\n",
        )
        .unwrap();
        assert_eq!(m["a"], EmotionLabel::Joy);
        assert_eq!(m["b"], EmotionLabel::Fear);
    }

    #[test]
    fn emotion_errors() {
        assert!(matches!(
            parse_emotion_labels("{\"doc_id\":\"a\",\"label\":\"happy\"}"),
            Err(LoadError::Label { line: 1, .. })
        ));
        assert!(matches!(
            parse_emotion_labels("{\"doc_id\":\"a\",\"label\":\"joy\"}\n{\"doc_id\":\"a\",\"label\":\"fear\"}"),
            Err(LoadError::Duplicate { line: 2, .. })
        ));
        assert!(matches!(parse_emotion_labels("{\"doc_id\":\"a\"}"), Err(LoadError::NoLabel { line: 1 })));
    }

    #[test]
    fn embedding_checks() {
        let ok = parse_embeddings("{\"doc_id\":\"a\",\"vector\":[1,0]}\n{\"doc_id\":\"b\",\"vector\":[0.5,0.5]}").unwrap();
        assert_eq!(ok.len(), 2);
        assert!(matches!(
            parse_embeddings("{\"doc_id\":\"a\",\"vector\":[1,0]}\n{\"doc_id\":\"b\",\"vector\":[1]}"),
            Err(LoadError::Dimension { line: 2, .. })
        ));
        assert!(matches!(
            parse_embeddings("{\"doc_id\":\"a\",\"vector\":[0,0]}"),
            Err(LoadError::ZeroVector { line: 1 })
        ));
    }

    #[test]
    fn jsonl_round_trip() {
        let v = vec![(1, "a".to_string()), (2, "b".to_string())];
        let back: Vec<(i32, String)> = parse_jsonl(&to_jsonl(&v)).unwrap();
        assert_eq!(back, v);
    }
}
