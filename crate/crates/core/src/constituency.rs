//! Constituent spans: label frequencies and lengths by sentence-length bin.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::corpus::{ConstChildren, ConstNode, Corpus};
use crate::stats::mean_sd;
use crate::table::{bin_of, LengthBin, MetricTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstituencyError {
    #[error("corpus {0:?} has no constituency trees")]
    NoTrees(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Span {
    pub label: String,
    pub length: usize,
}

/// Root labels treated as a parser wrapper rather than a constituent.
pub const WRAPPER_LABELS: [&str; 3] = ["", "TOP", "ROOT"];

/// One span per phrasal node in pre-order. Preterminals are skipped, and so
/// is a wrapper root labelled as in [`WRAPPER_LABELS`].
pub fn constituent_spans(tree: &ConstNode) -> Vec<Span> {
    let mut out = Vec::new();
    match &tree.children {
        ConstChildren::Nodes(kids) if WRAPPER_LABELS.contains(&tree.label.as_str()) => {
            kids.iter().for_each(|k| collect(k, &mut out));
        }
        _ => collect(tree, &mut out),
    }
    out
}

fn collect(node: &ConstNode, out: &mut Vec<Span>) {
    if let ConstChildren::Nodes(kids) = &node.children {
        out.push(Span {
            label: node.label.clone(),
            length: node.leaf_count(),
        });
        kids.iter().for_each(|k| collect(k, out));
    }
}

pub fn span_label_counts(corpus: &Corpus) -> Result<BTreeMap<String, u64>, ConstituencyError> {
    let mut trees = 0;
    let mut counts = BTreeMap::new();
    for t in corpus.sentences().filter_map(|s| s.const_tree.as_ref()) {
        trees += 1;
        for span in constituent_spans(t) {
            *counts.entry(span.label).or_insert(0u64) += 1;
        }
    }
    if trees == 0 {
        return Err(ConstituencyError::NoTrees(corpus.name.clone()));
    }
    Ok(counts)
}

/// Percentage of all spans per label, every label kept.
pub fn span_label_table(corpus: &Corpus) -> Result<MetricTable, ConstituencyError> {
    let counts = span_label_counts(corpus)?;
    let total = counts.values().sum();
    let mut t = MetricTable::percentages("spans", counts.iter().map(|(k, &v)| (k.as_str(), v)), total);
    t.sort_descending();
    Ok(t)
}

/// Span percentages of `corpus` restricted to labels above `min_ref_pct`
/// in `reference`.
pub fn span_label_distribution(
    corpus: &Corpus,
    reference: &Corpus,
    min_ref_pct: f64,
) -> Result<MetricTable, ConstituencyError> {
    let ours = span_label_table(corpus)?;
    let theirs = span_label_table(reference)?;
    Ok(ours.filtered_by_reference(&theirs, min_ref_pct))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SpanLengthBin {
    pub bin: LengthBin,
    pub sentence_count: u64,
    /// Mean span length, absent for an empty bin.
    pub mean: Option<f64>,
    /// Population standard deviation.
    pub sd: Option<f64>,
}

/// Span lengths pooled by the token count of the sentence carrying the
/// tree. Sentences without a tree are ignored.
pub fn binned_constituent_length_stats(
    corpus: &Corpus,
    bins: &[LengthBin],
) -> Result<Vec<SpanLengthBin>, ConstituencyError> {
    let mut pooled: Vec<(u64, Vec<f64>)> = bins.iter().map(|_| (0, Vec::new())).collect();
    let mut trees = 0;
    for s in corpus.sentences() {
        let Some(tree) = &s.const_tree else { continue };
        trees += 1;
        let Some(b) = bin_of(bins, s.len()) else { continue };
        pooled[b].0 += 1;
        pooled[b].1.extend(constituent_spans(tree).iter().map(|sp| sp.length as f64));
    }
    if trees == 0 {
        return Err(ConstituencyError::NoTrees(corpus.name.clone()));
    }
    Ok(bins
        .iter()
        .zip(pooled)
        .map(|(&bin, (sentence_count, lens))| {
            let m = mean_sd(lens.iter().copied());
            SpanLengthBin {
                bin,
                sentence_count,
                mean: m.map(|x| x.0),
                sd: m.map(|x| x.1),
            }
        })
        .collect())
}
