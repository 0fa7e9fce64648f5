//! Emotion-label shares and embedding similarity, from externally computed
//! classifier and embedder outputs.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::stats::mean_sd;
use crate::table::{Histogram, MetricTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticError {
    #[error("unknown emotion label {0:?}")]
    UnknownLabel(String),
    #[error("no emotion scores given")]
    NoScores,
    #[error("no documents to summarize")]
    Empty,
    #[error("zero vector")]
    ZeroVector,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("no document ids shared by both embedding sets")]
    NoPairs,
}

/// Ekman's six basic emotions plus neutral, in tie-breaking order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum EmotionLabel {
    Anger,
    Disgust,
    Fear,
    Joy,
    Neutral,
    Sadness,
    Surprise,
}

impl EmotionLabel {
    pub const ALL: [EmotionLabel; 7] = [
        EmotionLabel::Anger,
        EmotionLabel::Disgust,
        EmotionLabel::Fear,
        EmotionLabel::Joy,
        EmotionLabel::Neutral,
        EmotionLabel::Sadness,
        EmotionLabel::Surprise,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EmotionLabel::Anger => "anger",
            EmotionLabel::Disgust => "disgust",
            EmotionLabel::Fear => "fear",
            EmotionLabel::Joy => "joy",
            EmotionLabel::Neutral => "neutral",
            EmotionLabel::Sadness => "sadness",
            EmotionLabel::Surprise => "surprise",
        }
    }

    /// Highest-scoring label; ties go to the label earliest in [`Self::ALL`].
    pub fn argmax<'a>(scores: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self, SemanticError> {
        let mut best: Option<(EmotionLabel, f64)> = None;
        for (name, score) in scores {
            let label: EmotionLabel = name.parse()?;
            best = match best {
                Some((b, s)) if s > score || (s == score && b < label) => Some((b, s)),
                _ => Some((label, score)),
            };
        }
        best.map(|(l, _)| l).ok_or(SemanticError::NoScores)
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmotionLabel {
    type Err = SemanticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EmotionLabel::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| SemanticError::UnknownLabel(s.into()))
    }
}

/// Share of documents per label, all seven labels listed in fixed order.
pub fn emotion_distribution(labels: &BTreeMap<String, EmotionLabel>) -> Result<MetricTable, SemanticError> {
    if labels.is_empty() {
        return Err(SemanticError::Empty);
    }
    let mut counts = [0u64; 7];
    for l in labels.values() {
        counts[*l as usize] += 1;
    }
    Ok(MetricTable::percentages(
        "emotions",
        EmotionLabel::ALL.iter().map(|l| (l.as_str(), counts[*l as usize])),
        labels.len() as u64,
    ))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct DocEmbedding {
    pub doc_id: String,
    pub vector: Vec<f64>,
}

/// Cosine of the angle between `a` and `b`, clamped to `[-1, 1]`.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64, SemanticError> {
    if a.len() != b.len() {
        return Err(SemanticError::DimensionMismatch(a.len(), b.len()));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = libm::sqrt(a.iter().map(|x| x * x).sum());
    let nb = libm::sqrt(b.iter().map(|x| x * x).sum());
    if na == 0.0 || nb == 0.0 {
        return Err(SemanticError::ZeroVector);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SimilarityDistribution {
    pub histogram: Histogram,
    /// doc_id → similarity, for paired documents only.
    pub similarities: BTreeMap<String, f64>,
    /// Documents present on one side only.
    pub unpaired: u64,
    pub mean: f64,
}

/// Cosine similarity between documents sharing a `doc_id`, binned in
/// right-closed bins of `bin_width` ending at 1.
pub fn similarity_distribution(
    human: &[DocEmbedding],
    model: &[DocEmbedding],
    bin_width: f64,
) -> Result<SimilarityDistribution, SemanticError> {
    let h: BTreeMap<&str, &[f64]> = human.iter().map(|e| (e.doc_id.as_str(), e.vector.as_slice())).collect();
    let m: BTreeMap<&str, &[f64]> = model.iter().map(|e| (e.doc_id.as_str(), e.vector.as_slice())).collect();
    let mut similarities = BTreeMap::new();
    for (id, hv) in &h {
        if let Some(mv) = m.get(id) {
            similarities.insert(String::from(*id), cosine_similarity(hv, mv)?);
        }
    }
    let paired = similarities.len();
    let unpaired = (h.len() - paired + m.len() - paired) as u64;
    let (mean, _) = mean_sd(similarities.values().copied()).ok_or(SemanticError::NoPairs)?;
    Ok(SimilarityDistribution {
        histogram: Histogram::below_upper(similarities.values().copied(), bin_width, 1.0),
        similarities,
        unpaired,
        mean,
    })
}
