//! Arc direction and length statistics, and the Ω optimality score.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_rational::Ratio;
use thiserror::Error;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Sentence};
use crate::mla::{min_linear_arrangement, FreeTree};
use crate::stats::mean_sd;
use crate::table::{bin_of, Histogram, LengthBin};
use crate::validate::{validate, Diagnostic};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("invalid dependency tree: {0}")]
    InvalidTree(Diagnostic),
    #[error("expected random length needs at least 2 tokens, got {0}")]
    TooShort(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum Direction {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Arc {
    pub dependent: usize,
    pub head: usize,
    pub length: usize,
    pub direction: Direction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GeometryOptions {
    /// Drop punctuation and renumber before measuring.
    pub exclude_punct: bool,
    /// Call an arc Left when the dependent follows its head.
    pub swap_directions: bool,
}

fn prepared<'a>(sentence: &'a Sentence, opts: &GeometryOptions) -> alloc::borrow::Cow<'a, Sentence> {
    if opts.exclude_punct {
        alloc::borrow::Cow::Owned(sentence.without_punct())
    } else {
        alloc::borrow::Cow::Borrowed(sentence)
    }
}

/// Every non-root arc. An arc points Right when the dependent follows its
/// head.
pub fn arcs(sentence: &Sentence) -> Result<Vec<Arc>, GeometryError> {
    arcs_with(sentence, false)
}

fn arcs_with(sentence: &Sentence, swap: bool) -> Result<Vec<Arc>, GeometryError> {
    validate(sentence).map_err(GeometryError::InvalidTree)?;
    Ok(sentence
        .tokens
        .iter()
        .filter(|t| t.head != 0)
        .map(|t| {
            let right = (t.index > t.head) != swap;
            Arc {
                dependent: t.index,
                head: t.head,
                length: t.index.abs_diff(t.head),
                direction: if right { Direction::Right } else { Direction::Left },
            }
        })
        .collect())
}

/// Sum of dependency lengths `D`.
pub fn sum_dep_lengths(sentence: &Sentence) -> Result<u64, GeometryError> {
    Ok(arcs(sentence)?.iter().map(|a| a.length as u64).sum())
}

/// `(n² − 1) / 3`, the mean of `D` over uniformly random orderings.
pub fn expected_random_d(n: usize) -> Result<Ratio<u64>, GeometryError> {
    if n < 2 {
        return Err(GeometryError::TooShort(n));
    }
    let n = n as u64;
    Ok(Ratio::new(n * n - 1, 3))
}

/// Statistics over the arcs of one sentence-length bin.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ArcBin {
    pub bin: LengthBin,
    pub sentence_count: u64,
    pub left_count: u64,
    pub right_count: u64,
    /// Absent when the bin holds no arcs.
    pub stats: Option<ArcBinStats>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ArcBinStats {
    pub pct_left: f64,
    pub pct_right: f64,
    pub mean_len: f64,
    pub sd_len: f64,
    /// `None` without arcs in that direction.
    pub mean_len_left: Option<f64>,
    pub sd_len_left: Option<f64>,
    pub mean_len_right: Option<f64>,
    pub sd_len_right: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct BinnedArcStats {
    pub bins: Vec<ArcBin>,
    /// Length → frequency over every arc of every binned sentence.
    pub length_counts: BTreeMap<usize, u64>,
}

/// Pools arcs by sentence-length bin. Standard deviations are population
/// values; sentences outside every bin are ignored.
pub fn binned_arc_stats(
    corpus: &Corpus,
    bins: &[LengthBin],
    opts: &GeometryOptions,
) -> Result<BinnedArcStats, GeometryError> {
    let mut pooled: Vec<(u64, Vec<Arc>)> = bins.iter().map(|_| (0, Vec::new())).collect();
    let mut length_counts = BTreeMap::new();
    for s in corpus.sentences() {
        let s = prepared(s, opts);
        let Some(b) = bin_of(bins, s.len()) else {
            continue;
        };
        let a = arcs_with(&s, opts.swap_directions)?;
        for arc in &a {
            *length_counts.entry(arc.length).or_insert(0u64) += 1;
        }
        pooled[b].0 += 1;
        pooled[b].1.extend(a);
    }
    let bins = bins
        .iter()
        .zip(pooled)
        .map(|(&bin, (sentence_count, arcs))| {
            let lens = |d: Option<Direction>| {
                arcs.iter()
                    .filter(move |a| d.is_none_or(|d| a.direction == d))
                    .map(|a| a.length as f64)
            };
            let left_count = lens(Some(Direction::Left)).count() as u64;
            let right_count = lens(Some(Direction::Right)).count() as u64;
            let stats = mean_sd(lens(None)).map(|(mean_len, sd_len)| {
                let total = arcs.len() as f64;
                let l = mean_sd(lens(Some(Direction::Left)));
                let r = mean_sd(lens(Some(Direction::Right)));
                ArcBinStats {
                    pct_left: 100.0 * left_count as f64 / total,
                    pct_right: 100.0 * right_count as f64 / total,
                    mean_len,
                    sd_len,
                    mean_len_left: l.map(|x| x.0),
                    sd_len_left: l.map(|x| x.1),
                    mean_len_right: r.map(|x| x.0),
                    sd_len_right: r.map(|x| x.1),
                }
            });
            ArcBin {
                bin,
                sentence_count,
                left_count,
                right_count,
                stats,
            }
        })
        .collect();
    Ok(BinnedArcStats { bins, length_counts })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct OmegaResult {
    pub n: usize,
    pub d: u64,
    pub d_rla: Ratio<u64>,
    pub d_min: u64,
    pub omega: f64,
    /// Token indices (1-based) in an order achieving `d_min`.
    pub witness: Vec<usize>,
}

/// Ω for one sentence; `Ok(None)` for sentences of two tokens or fewer,
/// where it is undefined.
pub fn omega(sentence: &Sentence) -> Result<Option<OmegaResult>, GeometryError> {
    let d = sum_dep_lengths(sentence)?;
    let n = sentence.len();
    if n <= 2 {
        return Ok(None);
    }
    let parents: Vec<Option<usize>> = sentence
        .tokens
        .iter()
        .map(|t| t.head.checked_sub(1))
        .collect();
    let tree = FreeTree::from_parents(&parents).expect("validated sentence is a tree");
    let best = min_linear_arrangement(&tree);
    // Ω = (D_rla − D) / (D_rla − D_min), scaled by 3 to stay in integers
    let n2 = (n as i128) * (n as i128) - 1;
    let num = n2 - 3 * d as i128;
    let den = n2 - 3 * best.cost as i128;
    debug_assert!(den > 0, "D_min < D_rla for n >= 3");
    Ok(Some(OmegaResult {
        n,
        d,
        d_rla: expected_random_d(n)?,
        d_min: best.cost,
        omega: num as f64 / den as f64,
        witness: best.order.iter().map(|&v| v + 1).collect(),
    }))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct OmegaDistribution {
    pub histogram: Histogram,
    pub values: Vec<f64>,
    pub skipped: u64,
    pub mean: Option<f64>,
}

/// Ω of every eligible sentence, binned in right-closed bins of `bin_width`
/// ending at 1.
pub fn omega_distribution(
    corpus: &Corpus,
    bin_width: f64,
    opts: &GeometryOptions,
) -> Result<OmegaDistribution, GeometryError> {
    let mut values = Vec::new();
    let mut skipped = 0;
    for s in corpus.sentences() {
        match omega(&prepared(s, opts))? {
            Some(r) => values.push(r.omega),
            None => skipped += 1,
        }
    }
    let mean = mean_sd(values.iter().copied()).map(|(m, _)| m);
    Ok(OmegaDistribution {
        histogram: Histogram::below_upper(values.iter().copied(), bin_width, 1.0),
        values,
        skipped,
        mean,
    })
}
