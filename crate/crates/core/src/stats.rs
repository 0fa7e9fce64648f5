//! Welch's t-test, p-value matrices and relative differences.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("sample of size {0} is too small, need at least 2")]
    SampleTooSmall(u64),
    #[error("relative difference against a zero reference")]
    ZeroReference,
    #[error("need at least two corpora, got {0}")]
    TooFewCorpora(usize),
}

const EPS: f64 = 1e-12;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
        + a * libm::log(x)
        + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(x, a, b) / a
    } else {
        1.0 - front * beta_cf(1.0 - x, b, a) / b
    }
}

/// Two-sided tail probability `P(|T| >= |t|)` of Student's t with `df`
/// degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(x, 0.5 * df, 0.5).clamp(0.0, 1.0)
}

/// Size, mean and unbiased variance of a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub n: u64,
    pub mean: f64,
    pub var: f64,
}

impl Summary {
    pub fn from_values(xs: &[f64]) -> Self {
        let n = xs.len() as u64;
        if n == 0 {
            return Summary { n, mean: 0.0, var: 0.0 };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Summary { n, mean, var }
    }

    /// From a value → frequency map, e.g. sentence-length counts.
    pub fn from_counts(counts: &BTreeMap<usize, u64>) -> Self {
        let n: u64 = counts.values().sum();
        if n == 0 {
            return Summary { n, mean: 0.0, var: 0.0 };
        }
        let mean = counts.iter().map(|(&v, &c)| v as f64 * c as f64).sum::<f64>() / n as f64;
        let var = if n > 1 {
            counts
                .iter()
                .map(|(&v, &c)| c as f64 * (v as f64 - mean) * (v as f64 - mean))
                .sum::<f64>()
                / (n - 1) as f64
        } else {
            0.0
        };
        Summary { n, mean, var }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
}

/// Welch's unequal-variance t-test on two raw samples.
pub fn welch_t_test(xs: &[f64], ys: &[f64]) -> Result<TTestResult, StatsError> {
    welch_from_summaries(&Summary::from_values(xs), &Summary::from_values(ys))
}

/// Welch's t-test from sufficient statistics.
///
/// Two constant samples give `p = 1` when their means agree and `p = 0`
/// otherwise.
pub fn welch_from_summaries(a: &Summary, b: &Summary) -> Result<TTestResult, StatsError> {
    for s in [a, b] {
        if s.n < 2 {
            return Err(StatsError::SampleTooSmall(s.n));
        }
    }
    let (na, nb) = (a.n as f64, b.n as f64);
    let va = a.var / na;
    let vb = b.var / nb;
    let se2 = va + vb;
    let diff = a.mean - b.mean;
    if se2 == 0.0 {
        let df = na + nb - 2.0;
        return Ok(if diff == 0.0 {
            TTestResult { t: 0.0, df, p: 1.0 }
        } else {
            TTestResult {
                t: f64::INFINITY.copysign(diff),
                df,
                p: 0.0,
            }
        });
    }
    let t = diff / libm::sqrt(se2);
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let p = student_t_two_sided(t, df);
    Ok(TTestResult { t, df, p })
}

/// Pairwise p-values between corpora; symmetric with a unit diagonal.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PValueMatrix {
    pub labels: Vec<String>,
    pub cells: Vec<Vec<f64>>,
}

impl PValueMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.cells[i][j])
    }
}

/// Runs Welch's test over every pair of `samples`.
pub fn pvalue_matrix(labels: &[String], samples: &[Summary]) -> Result<PValueMatrix, StatsError> {
    assert_eq!(labels.len(), samples.len(), "one sample per label");
    let k = samples.len();
    if k < 2 {
        return Err(StatsError::TooFewCorpora(k));
    }
    let mut cells = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let p = welch_from_summaries(&samples[i], &samples[j])?.p;
            cells[i][j] = p;
            cells[j][i] = p;
        }
    }
    Ok(PValueMatrix {
        labels: labels.to_vec(),
        cells,
    })
}

/// [`pvalue_matrix`] over arbitrary per-corpus data with a sample
/// extractor.
pub fn pvalue_matrix_by<T>(
    corpora: &[(String, T)],
    extract: impl Fn(&T) -> Summary,
) -> Result<PValueMatrix, StatsError> {
    let labels: Vec<String> = corpora.iter().map(|(l, _)| l.clone()).collect();
    let samples: Vec<Summary> = corpora.iter().map(|(_, t)| extract(t)).collect();
    pvalue_matrix(&labels, &samples)
}

/// `100 * (model - reference) / reference`.
pub fn relative_difference(model: f64, reference: f64) -> Result<f64, StatsError> {
    if reference == 0.0 {
        return Err(StatsError::ZeroReference);
    }
    Ok(100.0 * (model - reference) / reference)
}

/// Mean and population standard deviation.
pub fn mean_sd(values: impl IntoIterator<Item = f64> + Clone) -> Option<(f64, f64)> {
    let mut n = 0u64;
    let mut sum = 0.0;
    for v in values.clone() {
        n += 1;
        sum += v;
    }
    if n == 0 {
        return None;
    }
    let mean = sum / n as f64;
    let ss: f64 = values.into_iter().map(|v| (v - mean) * (v - mean)).sum();
    Some((mean, libm::sqrt(ss / n as f64)))
}
