//! Per-corpus analysis bundles and reference-vs-models comparison reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use textcontrast_core::constituency::{
    binned_constituent_length_stats, span_label_table, ConstituencyError, SpanLengthBin,
};
use textcontrast_core::corpus::Corpus;
use textcontrast_core::geometry::{
    binned_arc_stats, omega_distribution, BinnedArcStats, GeometryError, GeometryOptions, OmegaDistribution,
};
use textcontrast_core::lexical::{lexical_profile, LexicalError, LexicalOptions, LexicalProfile};
use textcontrast_core::morpho::{deprel_table, pronoun_gender_ratio, upos_distribution, GenderCounts, MorphoError};
use textcontrast_core::semantic::{
    emotion_distribution, similarity_distribution, DocEmbedding, EmotionLabel, SemanticError,
    SimilarityDistribution,
};
use textcontrast_core::stats::{pvalue_matrix, relative_difference, PValueMatrix, Summary};
use textcontrast_core::table::{Histogram, LengthBin, MetricTable, Unit};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Lexical(#[from] LexicalError),
    #[error(transparent)]
    Morpho(#[from] MorphoError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Constituency(#[from] ConstituencyError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompareError {
    #[error("need at least one model bundle")]
    NoModels,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub lexical: LexicalOptions,
    pub geometry: GeometryOptions,
    pub bins: Vec<LengthBin>,
    pub omega_bin_width: f64,
    pub similarity_bin_width: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            lexical: LexicalOptions::default(),
            geometry: GeometryOptions::default(),
            bins: LengthBin::defaults(),
            omega_bin_width: 0.05,
            similarity_bin_width: 0.05,
        }
    }
}

/// Optional per-corpus inputs produced outside the toolkit.
#[derive(Clone, Debug, Default)]
pub struct ExternalInputs {
    pub emotions: Option<BTreeMap<String, EmotionLabel>>,
    pub embeddings: Option<Vec<DocEmbedding>>,
    /// Embeddings of the reference corpus, paired with `embeddings` by
    /// doc_id.
    pub reference_embeddings: Option<Vec<DocEmbedding>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstituencySection {
    /// Share of spans per label, unfiltered.
    pub spans: MetricTable,
    pub lengths: Vec<SpanLengthBin>,
}

/// Every per-corpus metric. Sections whose inputs were not supplied are
/// `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisBundle {
    pub corpus: String,
    pub options: AnalysisOptions,
    pub documents: u64,
    pub sentences: u64,
    pub tokens: u64,
    pub lexical: LexicalProfile,
    pub upos: MetricTable,
    pub deprel: MetricTable,
    pub arcs: BinnedArcStats,
    pub omega: OmegaDistribution,
    pub gender: GenderCounts,
    pub constituency: Option<ConstituencySection>,
    pub emotions: Option<MetricTable>,
    pub similarity: Option<SimilarityDistribution>,
}

pub fn analyze(corpus: &Corpus, inputs: &ExternalInputs, options: &AnalysisOptions) -> Result<AnalysisBundle, AnalyzeError> {
    let has_trees = corpus.sentences().any(|s| s.const_tree.is_some());
    let constituency = if has_trees {
        Some(ConstituencySection {
            spans: span_label_table(corpus)?,
            lengths: binned_constituent_length_stats(corpus, &options.bins)?,
        })
    } else {
        None
    };
    let similarity = match (&inputs.embeddings, &inputs.reference_embeddings) {
        (Some(ours), Some(theirs)) => Some(similarity_distribution(theirs, ours, options.similarity_bin_width)?),
        _ => None,
    };
    Ok(AnalysisBundle {
        corpus: corpus.name.clone(),
        options: options.clone(),
        documents: corpus.documents.len() as u64,
        sentences: corpus.sentence_count() as u64,
        tokens: corpus.token_count() as u64,
        lexical: lexical_profile(corpus, &options.lexical)?,
        upos: upos_distribution(corpus)?,
        deprel: deprel_table(corpus)?,
        arcs: binned_arc_stats(corpus, &options.bins, &options.geometry)?,
        omega: omega_distribution(corpus, options.omega_bin_width, &options.geometry)?,
        gender: pronoun_gender_ratio(corpus),
        constituency,
        emotions: inputs.emotions.as_ref().map(emotion_distribution).transpose()?,
        similarity,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Named<T> {
    pub corpus: String,
    pub value: T,
}

fn named<T>(corpus: &str, value: T) -> Named<T> {
    Named {
        corpus: corpus.into(),
        value,
    }
}

/// One category table per corpus, aligned to the reference's categories,
/// plus relative differences of each model against the reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryComparison {
    pub reference: String,
    /// Categories kept only when strictly above this share in the
    /// reference.
    pub min_ref_pct: Option<f64>,
    pub values: Vec<Named<MetricTable>>,
    /// `100 (model − reference) / reference` per category; categories the
    /// reference lacks are left out.
    pub relative: Vec<Named<MetricTable>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LexicalRow {
    pub corpus: String,
    pub tokens: u64,
    pub ttr: f64,
    pub sttr: Option<f64>,
    pub mtld: Option<f64>,
    pub mean_sentence_length: f64,
    pub sd_sentence_length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenderRow {
    pub corpus: String,
    pub masc: u64,
    pub fem: u64,
    pub ratio: Option<f64>,
    /// Relative difference of the ratio against the reference.
    pub relative: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub corpus: String,
    pub mean: Option<f64>,
    pub count: u64,
    pub skipped: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histograms {
    pub sentence_length: Vec<Named<Histogram>>,
    pub omega: Vec<Named<Histogram>>,
    pub similarity: Vec<Named<Histogram>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PValues {
    pub sentence_length: Option<PValueMatrix>,
    pub arc_length: Option<PValueMatrix>,
    pub segment_ttr: Option<PValueMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub reference: String,
    /// Reference first, then models in input order.
    pub corpora: Vec<String>,
    pub lexical: Vec<LexicalRow>,
    pub upos: CategoryComparison,
    pub deprel: CategoryComparison,
    pub spans: CategoryComparison,
    pub emotions: CategoryComparison,
    pub arc_stats: Vec<Named<BinnedArcStats>>,
    pub constituent_stats: Vec<Named<Vec<SpanLengthBin>>>,
    pub omega: Vec<ScoreRow>,
    pub similarity: Vec<ScoreRow>,
    pub histograms: Histograms,
    pub gender: Vec<GenderRow>,
    pub pvalues: PValues,
    /// Sections left out and why.
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
enum Order {
    /// Reference categories by descending reference value.
    ByReference,
    /// Category order of the reference table as stored.
    AsStored,
}

fn compare_tables(
    all: &[&AnalysisBundle],
    pick: impl Fn(&AnalysisBundle) -> Option<&MetricTable>,
    min_ref_pct: Option<f64>,
    order: Order,
) -> CategoryComparison {
    let reference = all[0];
    let ref_table = pick(reference);
    let align = |t: &MetricTable| match (ref_table, order) {
        (None, _) => t.clone(),
        (Some(r), Order::ByReference) => t.filtered_by_reference(r, min_ref_pct.unwrap_or(f64::NEG_INFINITY)),
        (Some(r), Order::AsStored) => {
            let mut out = MetricTable::new(&t.name, t.unit);
            for row in &r.rows {
                out.push(&row.category, t.get(&row.category).unwrap_or(0.0));
            }
            out
        }
    };
    let values: Vec<Named<MetricTable>> = all
        .iter()
        .filter_map(|b| pick(b).map(|t| named(&b.corpus, align(t))))
        .collect();
    let relative = match values.first() {
        Some(r) if ref_table.is_some() => values[1..]
            .iter()
            .map(|m| {
                let mut rel = MetricTable::new(&m.value.name, Unit::Percent);
                for (mr, rr) in m.value.rows.iter().zip(&r.value.rows) {
                    if let Ok(d) = relative_difference(mr.value, rr.value) {
                        rel.push(&rr.category, d);
                    }
                }
                named(&m.corpus, rel)
            })
            .collect(),
        _ => Vec::new(),
    };
    CategoryComparison {
        reference: reference.corpus.clone(),
        min_ref_pct,
        values,
        relative,
    }
}

fn matrix(
    name: &str,
    labels: &[String],
    samples: Vec<Summary>,
    notes: &mut Vec<String>,
) -> Option<PValueMatrix> {
    match pvalue_matrix(labels, &samples) {
        Ok(m) => Some(m),
        Err(e) => {
            notes.push(format!("{name} p-values omitted: {e}"));
            None
        }
    }
}

/// Compares the reference bundle against every model bundle. Deprel and
/// span tables keep the categories above `min_ref_pct` in the reference.
pub fn compare(
    reference: &AnalysisBundle,
    models: &[AnalysisBundle],
    min_ref_pct: f64,
) -> Result<ComparisonReport, CompareError> {
    if models.is_empty() {
        return Err(CompareError::NoModels);
    }
    let all: Vec<&AnalysisBundle> = std::iter::once(reference).chain(models).collect();
    let corpora: Vec<String> = all.iter().map(|b| b.corpus.clone()).collect();
    let mut notes = Vec::new();

    let upos = compare_tables(&all, |b| Some(&b.upos), None, Order::ByReference);
    let deprel = compare_tables(&all, |b| Some(&b.deprel), Some(min_ref_pct), Order::ByReference);
    let spans = compare_tables(
        &all,
        |b| b.constituency.as_ref().map(|c| &c.spans),
        Some(min_ref_pct),
        Order::ByReference,
    );
    let emotions = compare_tables(&all, |b| b.emotions.as_ref(), None, Order::AsStored);
    for (section, cmp) in [("spans", &spans), ("emotions", &emotions)] {
        for b in &all {
            if !cmp.values.iter().any(|v| v.corpus == b.corpus) {
                notes.push(format!("{section}: no input for {}", b.corpus));
            }
        }
    }

    let ref_ratio = reference.gender.ratio();
    let gender = all
        .iter()
        .map(|b| {
            let ratio = b.gender.ratio();
            GenderRow {
                corpus: b.corpus.clone(),
                masc: b.gender.masc,
                fem: b.gender.fem,
                ratio,
                relative: match (ratio, ref_ratio) {
                    (Some(m), Some(r)) => relative_difference(m, r).ok(),
                    _ => None,
                },
            }
        })
        .collect();

    let pvalues = PValues {
        sentence_length: matrix(
            "sentence length",
            &corpora,
            all.iter().map(|b| Summary::from_counts(&b.lexical.lengths.counts)).collect(),
            &mut notes,
        ),
        arc_length: matrix(
            "arc length",
            &corpora,
            all.iter().map(|b| Summary::from_counts(&b.arcs.length_counts)).collect(),
            &mut notes,
        ),
        segment_ttr: matrix(
            "segment TTR",
            &corpora,
            all.iter().map(|b| Summary::from_values(&b.lexical.segment_ttrs)).collect(),
            &mut notes,
        ),
    };

    Ok(ComparisonReport {
        reference: reference.corpus.clone(),
        lexical: all
            .iter()
            .map(|b| LexicalRow {
                corpus: b.corpus.clone(),
                tokens: b.lexical.token_count,
                ttr: b.lexical.ttr,
                sttr: b.lexical.sttr,
                mtld: b.lexical.mtld,
                mean_sentence_length: b.lexical.lengths.mean,
                sd_sentence_length: b.lexical.lengths.sd,
            })
            .collect(),
        upos,
        deprel,
        spans,
        emotions,
        arc_stats: all.iter().map(|b| named(&b.corpus, b.arcs.clone())).collect(),
        constituent_stats: all
            .iter()
            .filter_map(|b| b.constituency.as_ref().map(|c| named(&b.corpus, c.lengths.clone())))
            .collect(),
        omega: all
            .iter()
            .map(|b| ScoreRow {
                corpus: b.corpus.clone(),
                mean: b.omega.mean,
                count: b.omega.values.len() as u64,
                skipped: b.omega.skipped,
            })
            .collect(),
        similarity: all
            .iter()
            .filter_map(|b| {
                b.similarity.as_ref().map(|s| ScoreRow {
                    corpus: b.corpus.clone(),
                    mean: Some(s.mean),
                    count: s.similarities.len() as u64,
                    skipped: s.unpaired,
                })
            })
            .collect(),
        histograms: Histograms {
            sentence_length: all.iter().map(|b| named(&b.corpus, b.lexical.lengths.histogram.clone())).collect(),
            omega: all.iter().map(|b| named(&b.corpus, b.omega.histogram.clone())).collect(),
            similarity: all
                .iter()
                .filter_map(|b| b.similarity.as_ref().map(|s| named(&b.corpus, s.histogram.clone())))
                .collect(),
        },
        gender,
        pvalues,
        corpora,
        notes,
    })
}
