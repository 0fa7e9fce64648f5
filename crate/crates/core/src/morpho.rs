//! Part-of-speech and dependency-relation frequencies, pronoun gender counts.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::ops::Add;

use thiserror::Error;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Upos};
use crate::table::MetricTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphoError {
    #[error("corpus {0:?} has no tokens")]
    EmptyCorpus(String),
}

fn non_empty(corpus: &Corpus) -> Result<u64, MorphoError> {
    match corpus.token_count() as u64 {
        0 => Err(MorphoError::EmptyCorpus(corpus.name.clone())),
        n => Ok(n),
    }
}

pub fn upos_counts(corpus: &Corpus) -> BTreeMap<Upos, u64> {
    let mut counts: BTreeMap<Upos, u64> = Upos::ALL.iter().map(|&u| (u, 0)).collect();
    for t in corpus.tokens() {
        *counts.entry(t.upos).or_default() += 1;
    }
    counts
}

/// Percentage of tokens per tag, all 17 tags present, sorted by
/// descending value.
pub fn upos_distribution(corpus: &Corpus) -> Result<MetricTable, MorphoError> {
    let total = non_empty(corpus)?;
    let counts = upos_counts(corpus);
    let mut table = MetricTable::percentages(
        "upos",
        Upos::ALL.iter().map(|u| (u.as_str(), counts[u])),
        total,
    );
    table.sort_descending();
    Ok(table)
}

pub fn deprel_counts(corpus: &Corpus) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for t in corpus.tokens() {
        *counts.entry(t.deprel.clone()).or_insert(0) += 1;
    }
    counts
}

/// Percentage of tokens per relation label over every label seen, root
/// included.
pub fn deprel_table(corpus: &Corpus) -> Result<MetricTable, MorphoError> {
    let total = non_empty(corpus)?;
    let counts = deprel_counts(corpus);
    let mut table =
        MetricTable::percentages("deprel", counts.iter().map(|(k, &v)| (k.as_str(), v)), total);
    table.sort_descending();
    Ok(table)
}

/// Relation percentages of `corpus`, restricted to relations above
/// `min_ref_pct` in `reference`.
pub fn deprel_distribution(
    corpus: &Corpus,
    reference: &Corpus,
    min_ref_pct: f64,
) -> Result<MetricTable, MorphoError> {
    let ours = deprel_table(corpus)?;
    let theirs = deprel_table(reference)?;
    Ok(ours.filtered_by_reference(&theirs, min_ref_pct))
}

/// Pronoun tokens marked `Gender=Masc` and `Gender=Fem`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GenderCounts {
    pub masc: u64,
    pub fem: u64,
}

impl GenderCounts {
    /// `masc / fem`, undefined without feminine pronouns.
    pub fn ratio(&self) -> Option<f64> {
        (self.fem > 0).then(|| self.masc as f64 / self.fem as f64)
    }
}

impl Add for GenderCounts {
    type Output = GenderCounts;

    fn add(self, rhs: GenderCounts) -> GenderCounts {
        GenderCounts {
            masc: self.masc + rhs.masc,
            fem: self.fem + rhs.fem,
        }
    }
}

pub fn pronoun_gender_ratio(corpus: &Corpus) -> GenderCounts {
    let mut g = GenderCounts::default();
    for t in corpus.tokens().filter(|t| t.upos == Upos::Pron) {
        match t.feat("Gender") {
            Some("Masc") => g.masc += 1,
            Some("Fem") => g.fem += 1,
            _ => {}
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Sentence, Token};
    use alloc::vec;
    use alloc::vec::Vec;

    fn corpus(tokens: Vec<Token>) -> Corpus {
        let mut c = Corpus::new("c");
        c.documents.push(Document {
            doc_id: "d".into(),
            sentences: vec![Sentence::new("d", tokens)],
            ..Default::default()
        });
        c
    }

    fn tok(i: usize, upos: Upos, rel: &str) -> Token {
        Token::new(i, "w", "w", upos, if i == 1 { 0 } else { 1 }, rel)
    }

    #[test]
    fn single_noun() {
        let t = upos_distribution(&corpus(vec![tok(1, Upos::Noun, "root")])).unwrap();
        assert_eq!(t.rows.len(), 17);
        assert_eq!(t.get("NOUN"), Some(100.0));
        assert_eq!(t.get("X"), Some(0.0));
        assert_eq!(t.rows[0].category, "NOUN");
    }

    #[test]
    fn half_and_half() {
        let c = corpus(vec![
            tok(1, Upos::Noun, "root"),
            tok(2, Upos::Verb, "dep"),
            tok(3, Upos::Noun, "dep"),
            tok(4, Upos::Verb, "dep"),
        ]);
        let t = upos_distribution(&c).unwrap();
        assert_eq!(t.get("NOUN"), Some(50.0));
        assert_eq!(t.get("VERB"), Some(50.0));
    }

    #[test]
    fn empty_corpus() {
        assert!(upos_distribution(&Corpus::new("e")).is_err());
        assert!(deprel_table(&Corpus::new("e")).is_err());
    }

    #[test]
    fn deprel_boundary_is_strict() {
        // 100 tokens: one "iobj" at exactly 1%
        let mut toks = vec![tok(1, Upos::Verb, "root")];
        toks.push(tok(2, Upos::Noun, "iobj"));
        for i in 3..=100 {
            toks.push(tok(i, Upos::Noun, "obj"));
        }
        let c = corpus(toks);
        let t = deprel_distribution(&c, &c, 1.0).unwrap();
        assert_eq!(t.get("iobj"), None);
        assert_eq!(t.get("root"), None);
        assert_eq!(t.get("obj"), Some(98.0));
    }

    #[test]
    fn all_det() {
        let c = corpus(vec![Token::new(1, "the", "the", Upos::Det, 0, "det")]);
        let t = deprel_distribution(&c, &c, 1.0).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.get("det"), Some(100.0));
    }

    #[test]
    fn gender_counts() {
        let c = corpus(vec![
            tok(1, Upos::Verb, "root"),
            tok(2, Upos::Pron, "nsubj").with_feat("Gender", "Masc"),
            tok(3, Upos::Pron, "obj").with_feat("Gender", "Masc"),
            tok(4, Upos::Pron, "obl").with_feat("Gender", "Fem"),
            tok(5, Upos::Noun, "obl").with_feat("Gender", "Masc"),
            tok(6, Upos::Pron, "obl").with_feat("Gender", "Neut"),
        ]);
        let g = pronoun_gender_ratio(&c);
        assert_eq!((g.masc, g.fem), (2, 1));
        assert_eq!(g.ratio(), Some(2.0));
        assert_eq!(GenderCounts { masc: 3, fem: 0 }.ratio(), None);
    }
}
