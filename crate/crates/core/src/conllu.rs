//! CoNLL-U reader and writer.
//!
//! Only the basic dependency layer is kept. Multiword-token ranges (`3-4`)
//! and empty nodes (`5.1`) are checked for column count and then skipped.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use thiserror::Error;

use crate::corpus::{Corpus, Document, Sentence, Token, Upos};
use crate::validate::{validate, Diagnostic};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConlluError {
    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: invalid token id {value:?}")]
    BadId { line: usize, value: String },
    #[error("line {line}: non-integer head {value:?}")]
    NonIntegerHead { line: usize, value: String },
    #[error("line {line}: unknown UPOS tag {value:?}")]
    UnknownUpos { line: usize, value: String },
    #[error("line {line}: malformed feature {value:?}")]
    BadFeature { line: usize, value: String },
    #[error("sentence {sentence} (ending line {line}): {diagnostic}")]
    InvalidSentence {
        sentence: usize,
        line: usize,
        diagnostic: Diagnostic,
    },
    #[error("duplicate document id {0:?}")]
    DuplicateDocId(String),
}

const IMPLICIT_DOC: &str = "doc1";

fn opt(field: &str) -> Option<String> {
    (field != "_").then(|| field.to_string())
}

/// Splits `Gender=Masc|Number=Sing` into a map.
pub fn parse_feats(field: &str) -> Option<BTreeMap<String, String>> {
    let mut feats = BTreeMap::new();
    if field == "_" || field.is_empty() {
        return Some(feats);
    }
    for pair in field.split('|') {
        let (k, v) = pair.split_once('=')?;
        if k.is_empty() {
            return None;
        }
        feats.insert(k.to_string(), v.to_string());
    }
    Some(feats)
}

fn format_feats(feats: &BTreeMap<String, String>) -> String {
    if feats.is_empty() {
        return "_".into();
    }
    let parts: Vec<String> = feats.iter().map(|(k, v)| format!("{k}={v}")).collect();
    parts.join("|")
}

struct Builder {
    corpus: Corpus,
    seen_ids: BTreeSet<String>,
    current: Option<Document>,
    pending: Vec<Token>,
    sent_id: Option<String>,
    text: Option<String>,
    in_newdoc_block: bool,
    ordinal: usize,
}

impl Builder {
    fn open_doc(&mut self, id: String) -> Result<(), ConlluError> {
        self.close_doc();
        if !self.seen_ids.insert(id.clone()) {
            return Err(ConlluError::DuplicateDocId(id));
        }
        self.current = Some(Document {
            doc_id: id,
            ..Default::default()
        });
        Ok(())
    }

    fn close_doc(&mut self) {
        if let Some(doc) = self.current.take() {
            self.corpus.documents.push(doc);
        }
    }

    fn finish_sentence(&mut self, line: usize) -> Result<(), ConlluError> {
        self.in_newdoc_block = false;
        if self.pending.is_empty() {
            self.sent_id = None;
            self.text = None;
            return Ok(());
        }
        self.ordinal += 1;
        if self.current.is_none() {
            self.open_doc(IMPLICIT_DOC.into())?;
        }
        let doc = self.current.as_mut().expect("document open");
        let sentence = Sentence {
            tokens: core::mem::take(&mut self.pending),
            const_tree: None,
            doc_id: doc.doc_id.clone(),
            sent_id: self.sent_id.take(),
            text: self.text.take(),
        };
        validate(&sentence).map_err(|diagnostic| ConlluError::InvalidSentence {
            sentence: self.ordinal,
            line,
            diagnostic,
        })?;
        doc.sentences.push(sentence);
        Ok(())
    }

    fn comment(&mut self, body: &str) -> Result<(), ConlluError> {
        let (key, value) = match body.split_once('=') {
            Some((k, v)) => (k.trim(), Some(v.trim())),
            None => (body.trim(), None),
        };
        if let Some(rest) = key.strip_prefix("newdoc") {
            let id = match (rest.trim(), value) {
                ("id", Some(v)) => v.to_string(),
                _ => format!("doc{}", self.corpus.documents.len() + 2),
            };
            self.open_doc(id)?;
            self.in_newdoc_block = true;
            return Ok(());
        }
        match (key, value) {
            ("sent_id", Some(v)) => self.sent_id = Some(v.into()),
            ("text", Some(v)) => self.text = Some(v.into()),
            (k, Some(v)) if self.in_newdoc_block => {
                if let Some(doc) = self.current.as_mut() {
                    doc.meta.insert(k.into(), v.into());
                }
            }
            _ => {}
        }
        Ok(())
    }
}

fn parse_token(line_no: usize, cols: &[&str]) -> Result<Token, ConlluError> {
    let index = cols[0].parse::<usize>().map_err(|_| ConlluError::BadId {
        line: line_no,
        value: cols[0].into(),
    })?;
    let upos = cols[3].parse::<Upos>().map_err(|_| ConlluError::UnknownUpos {
        line: line_no,
        value: cols[3].into(),
    })?;
    let feats = parse_feats(cols[5]).ok_or_else(|| ConlluError::BadFeature {
        line: line_no,
        value: cols[5].into(),
    })?;
    let head = cols[6]
        .parse::<usize>()
        .map_err(|_| ConlluError::NonIntegerHead {
            line: line_no,
            value: cols[6].into(),
        })?;
    Ok(Token {
        index,
        form: cols[1].into(),
        lemma: cols[2].into(),
        upos,
        xpos: opt(cols[4]),
        feats,
        head,
        deprel: cols[7].into(),
        misc: opt(cols[9]),
    })
}

/// Parses a CoNLL-U document into a corpus called `name`.
///
/// `# newdoc id = ...` opens a document; sentences before the first such
/// comment land in an implicit document. Comments inside the `newdoc` block
/// become document metadata.
pub fn parse_conllu(input: &str, name: &str) -> Result<Corpus, ConlluError> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    let mut b = Builder {
        corpus: Corpus::new(name),
        seen_ids: BTreeSet::new(),
        current: None,
        pending: Vec::new(),
        sent_id: None,
        text: None,
        in_newdoc_block: false,
        ordinal: 0,
    };
    let mut last_line = 0;
    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            b.finish_sentence(line_no)?;
            continue;
        }
        if let Some(body) = line.strip_prefix('#') {
            if !b.pending.is_empty() {
                // comment inside a token block: treat as a sentence break
                b.finish_sentence(line_no)?;
            }
            b.comment(body)?;
            continue;
        }
        b.in_newdoc_block = false;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ConlluError::ColumnCount {
                line: line_no,
                found: cols.len(),
            });
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        b.pending.push(parse_token(line_no, &cols)?);
    }
    b.finish_sentence(last_line)?;
    b.close_doc();
    Ok(b.corpus)
}

/// Writes `corpus` back to CoNLL-U. Enhanced dependencies are written as `_`.
pub fn serialize_conllu(corpus: &Corpus) -> String {
    let mut out = String::new();
    for doc in &corpus.documents {
        let _ = writeln!(out, "# newdoc id = {}", doc.doc_id);
        for (k, v) in &doc.meta {
            let _ = writeln!(out, "# {k} = {v}");
        }
        for s in &doc.sentences {
            if let Some(id) = &s.sent_id {
                let _ = writeln!(out, "# sent_id = {id}");
            }
            if let Some(text) = &s.text {
                let _ = writeln!(out, "# text = {text}");
            }
            for t in &s.tokens {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t_\t{}",
                    t.index,
                    t.form,
                    t.lemma,
                    t.upos,
                    t.xpos.as_deref().unwrap_or("_"),
                    format_feats(&t.feats),
                    t.head,
                    t.deprel,
                    t.misc.as_deref().unwrap_or("_"),
                );
            }
            out.push('\n');
        }
    }
    out
}
