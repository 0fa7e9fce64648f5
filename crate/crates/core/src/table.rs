//! Result containers: category tables, histograms and sentence-length bins.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Unit {
    Percent,
    Ratio,
    Score,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MetricRow {
    pub category: String,
    pub value: f64,
}

/// Category → value for one corpus.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MetricTable {
    pub name: String,
    pub unit: Unit,
    pub rows: Vec<MetricRow>,
}

impl MetricTable {
    pub fn new(name: &str, unit: Unit) -> Self {
        MetricTable {
            name: name.into(),
            unit,
            rows: Vec::new(),
        }
    }

    /// Percentages of `counts` over `total`, in the iteration order of
    /// `counts`.
    pub fn percentages<'a, I>(name: &str, counts: I, total: u64) -> Self
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        let rows = counts
            .into_iter()
            .map(|(c, n)| MetricRow {
                category: c.into(),
                value: if total == 0 {
                    0.0
                } else {
                    100.0 * n as f64 / total as f64
                },
            })
            .collect();
        MetricTable {
            name: name.into(),
            unit: Unit::Percent,
            rows,
        }
    }

    pub fn push(&mut self, category: &str, value: f64) {
        self.rows.push(MetricRow {
            category: category.into(),
            value,
        });
    }

    pub fn get(&self, category: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.category == category)
            .map(|r| r.value)
    }

    pub fn total(&self) -> f64 {
        self.rows.iter().map(|r| r.value).sum()
    }

    /// Sorts rows by descending value; ties keep their current order.
    pub fn sort_descending(&mut self) {
        self.rows
            .sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap_or(core::cmp::Ordering::Equal));
    }

    /// Keeps the categories whose value in `reference` is strictly above
    /// `min_ref`, ordered by descending reference value. Categories missing
    /// from `self` are reported as 0.
    pub fn filtered_by_reference(&self, reference: &MetricTable, min_ref: f64) -> MetricTable {
        let mut kept: Vec<&MetricRow> = reference.rows.iter().filter(|r| r.value > min_ref).collect();
        kept.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap_or(core::cmp::Ordering::Equal));
        MetricTable {
            name: self.name.clone(),
            unit: self.unit,
            rows: kept
                .into_iter()
                .map(|r| MetricRow {
                    category: r.category.clone(),
                    value: self.get(&r.category).unwrap_or(0.0),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct HistogramBin {
    pub bin_start: f64,
    pub bin_end: f64,
    pub count: u64,
}

/// Sparse histogram: only occupied bins are listed, in ascending order.
#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
}

impl Histogram {
    /// Unit-width bins `[k, k+1)` from integer counts.
    pub fn from_counts(counts: &BTreeMap<usize, u64>) -> Self {
        Histogram {
            bins: counts
                .iter()
                .filter(|(_, &c)| c > 0)
                .map(|(&k, &c)| HistogramBin {
                    bin_start: k as f64,
                    bin_end: k as f64 + 1.0,
                    count: c,
                })
                .collect(),
        }
    }

    /// Right-closed bins `(upper - (k+1)w, upper - kw]` hanging below
    /// `upper`. Values above `upper` are clamped onto it.
    pub fn below_upper(values: impl IntoIterator<Item = f64>, width: f64, upper: f64) -> Self {
        assert!(width > 0.0, "bin width must be positive");
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for v in values {
            let k = libm::floor((upper - v.min(upper)) / width);
            let k = if k.is_finite() && k >= 0.0 { k as u64 } else { 0 };
            *counts.entry(k).or_default() += 1;
        }
        Histogram {
            bins: counts
                .iter()
                .rev()
                .map(|(&k, &c)| HistogramBin {
                    bin_start: upper - (k as f64 + 1.0) * width,
                    bin_end: upper - k as f64 * width,
                    count: c,
                })
                .collect(),
        }
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().map(|b| b.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}

/// A closed range of sentence lengths; `max == None` is open-ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct LengthBin {
    pub min: usize,
    pub max: Option<usize>,
}

impl LengthBin {
    pub const fn new(min: usize, max: Option<usize>) -> Self {
        LengthBin { min, max }
    }

    pub fn contains(&self, len: usize) -> bool {
        len >= self.min && self.max.is_none_or(|m| len <= m)
    }

    pub fn label(&self) -> String {
        match self.max {
            Some(m) => format!("{}-{}", self.min, m),
            None => format!("{}+", self.min),
        }
    }

    /// 1-10, 11-20, 21-30, 31-40, 41+.
    pub fn defaults() -> Vec<LengthBin> {
        alloc::vec![
            LengthBin::new(1, Some(10)),
            LengthBin::new(11, Some(20)),
            LengthBin::new(21, Some(30)),
            LengthBin::new(31, Some(40)),
            LengthBin::new(41, None),
        ]
    }
}

/// Index of the first bin containing `len`.
pub fn bin_of(bins: &[LengthBin], len: usize) -> Option<usize> {
    bins.iter().position(|b| b.contains(len))
}
