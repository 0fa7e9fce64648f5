//! Sentence lengths and lexical diversity (TTR, STTR, MTLD).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Upos};
use crate::stats::mean_sd;
use crate::table::Histogram;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LexicalError {
    #[error("corpus has no sentences")]
    EmptyCorpus,
    #[error("token sequence is empty")]
    EmptySequence,
    #[error("stream of {len} tokens is shorter than one segment of {segment}")]
    TooShort { len: usize, segment: usize },
    #[error("segment size must be positive")]
    ZeroSegment,
    #[error("MTLD threshold {0} outside (0, 1)")]
    BadThreshold(f64),
}

/// Lemma stream of a corpus in document order, case-folded.
///
/// Tokens whose lemma is unannotated (`_`) contribute their form.
pub fn lemma_stream(corpus: &Corpus, exclude_punct: bool) -> Vec<String> {
    corpus
        .tokens()
        .filter(|t| !(exclude_punct && t.upos == Upos::Punct))
        .map(|t| {
            let base = if t.lemma == "_" && t.form != "_" { &t.form } else { &t.lemma };
            base.to_lowercase()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SentenceLengths {
    /// Plot data: lengths up to the cap only.
    pub histogram: Histogram,
    /// Every sentence length with its frequency.
    pub counts: BTreeMap<usize, u64>,
    pub sentence_count: u64,
    pub mean: f64,
    /// Population standard deviation.
    pub sd: f64,
}

/// Length histogram capped at `plot_cap` (`None` = no cap). Mean and sd
/// always cover every sentence.
pub fn sentence_length_histogram(
    corpus: &Corpus,
    plot_cap: Option<usize>,
) -> Result<SentenceLengths, LexicalError> {
    let lengths: Vec<usize> = corpus.sentences().map(|s| s.len()).collect();
    let (mean, sd) = mean_sd(lengths.iter().map(|&l| l as f64)).ok_or(LexicalError::EmptyCorpus)?;
    let mut counts = BTreeMap::new();
    for &l in &lengths {
        *counts.entry(l).or_insert(0u64) += 1;
    }
    let plotted: BTreeMap<usize, u64> = counts
        .iter()
        .filter(|(&l, _)| plot_cap.is_none_or(|cap| l <= cap))
        .map(|(&l, &c)| (l, c))
        .collect();
    Ok(SentenceLengths {
        histogram: Histogram::from_counts(&plotted),
        counts,
        sentence_count: lengths.len() as u64,
        mean,
        sd,
    })
}

/// Types over tokens.
pub fn ttr<S: AsRef<str>>(tokens: &[S]) -> Result<f64, LexicalError> {
    if tokens.is_empty() {
        return Err(LexicalError::EmptySequence);
    }
    let types: BTreeSet<&str> = tokens.iter().map(AsRef::as_ref).collect();
    Ok(types.len() as f64 / tokens.len() as f64)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Sttr {
    pub sttr: f64,
    pub segment_ttrs: Vec<f64>,
}

/// Mean TTR over consecutive complete segments; a trailing partial segment
/// is dropped.
pub fn sttr<S: AsRef<str>>(stream: &[S], segment_size: usize) -> Result<Sttr, LexicalError> {
    if segment_size == 0 {
        return Err(LexicalError::ZeroSegment);
    }
    if stream.len() < segment_size {
        return Err(LexicalError::TooShort {
            len: stream.len(),
            segment: segment_size,
        });
    }
    let segment_ttrs: Vec<f64> = stream
        .chunks_exact(segment_size)
        .map(|seg| ttr(seg).expect("segments are non-empty"))
        .collect();
    let sttr = segment_ttrs.iter().sum::<f64>() / segment_ttrs.len() as f64;
    Ok(Sttr { sttr, segment_ttrs })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MtldOptions {
    pub threshold: f64,
    /// Credit the unfinished window at the end of a pass.
    pub partial_factor: bool,
}

impl Default for MtldOptions {
    fn default() -> Self {
        MtldOptions {
            threshold: 0.72,
            partial_factor: true,
        }
    }
}

/// Factor count of one directional pass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MtldPass {
    pub tokens: usize,
    pub full_factors: usize,
    pub partial: f64,
}

impl MtldPass {
    pub fn factors(&self) -> f64 {
        self.full_factors as f64 + self.partial
    }

    /// Tokens per factor, `None` when no factor was counted.
    pub fn score(&self) -> Option<f64> {
        let f = self.factors();
        (f > 0.0).then(|| self.tokens as f64 / f)
    }
}

/// One MTLD pass in the order the iterator yields tokens.
pub fn mtld_pass<'a>(tokens: impl Iterator<Item = &'a str>, opts: &MtldOptions) -> MtldPass {
    let mut window: BTreeSet<&str> = BTreeSet::new();
    let mut window_len = 0usize;
    let mut pass = MtldPass {
        tokens: 0,
        full_factors: 0,
        partial: 0.0,
    };
    for tok in tokens {
        pass.tokens += 1;
        window.insert(tok);
        window_len += 1;
        let ttr = window.len() as f64 / window_len as f64;
        if ttr < opts.threshold {
            pass.full_factors += 1;
            window.clear();
            window_len = 0;
        }
    }
    if opts.partial_factor && window_len > 0 {
        let ttr = window.len() as f64 / window_len as f64;
        pass.partial = (1.0 - ttr) / (1.0 - opts.threshold);
    }
    pass
}

/// Mean of the forward and backward MTLD scores; `Ok(None)` when either
/// direction counts zero factors.
pub fn mtld<S: AsRef<str>>(stream: &[S], opts: &MtldOptions) -> Result<Option<f64>, LexicalError> {
    if stream.is_empty() {
        return Err(LexicalError::EmptySequence);
    }
    if !(opts.threshold > 0.0 && opts.threshold < 1.0) {
        return Err(LexicalError::BadThreshold(opts.threshold));
    }
    let fwd = mtld_pass(stream.iter().map(AsRef::as_ref), opts);
    let bwd = mtld_pass(stream.iter().rev().map(AsRef::as_ref), opts);
    Ok(match (fwd.score(), bwd.score()) {
        (Some(f), Some(b)) => Some((f + b) / 2.0),
        _ => None,
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct LexicalOptions {
    pub exclude_punct: bool,
    pub segment_size: usize,
    pub plot_cap: Option<usize>,
    pub mtld: MtldOptions,
}

impl Default for LexicalOptions {
    fn default() -> Self {
        LexicalOptions {
            exclude_punct: false,
            segment_size: 1000,
            plot_cap: Some(80),
            mtld: MtldOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct LexicalProfile {
    pub lengths: SentenceLengths,
    pub token_count: u64,
    pub ttr: f64,
    /// Absent when the corpus is shorter than one segment.
    pub sttr: Option<f64>,
    pub segment_ttrs: Vec<f64>,
    /// Absent when undefined.
    pub mtld: Option<f64>,
}

pub fn lexical_profile(corpus: &Corpus, opts: &LexicalOptions) -> Result<LexicalProfile, LexicalError> {
    let lengths = sentence_length_histogram(corpus, opts.plot_cap)?;
    let stream = lemma_stream(corpus, opts.exclude_punct);
    let ttr = ttr(&stream)?;
    let (sttr, segment_ttrs) = match sttr(&stream, opts.segment_size) {
        Ok(s) => (Some(s.sttr), s.segment_ttrs),
        Err(LexicalError::TooShort { .. }) => (None, Vec::new()),
        Err(e) => return Err(e),
    };
    Ok(LexicalProfile {
        lengths,
        token_count: stream.len() as u64,
        ttr,
        sttr,
        segment_ttrs,
        mtld: mtld(&stream, &opts.mtld)?,
    })
}
