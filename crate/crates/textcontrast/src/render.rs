//! Report rendering as markdown, TSV or JSON.

use std::fmt::Write as _;
use std::str::FromStr;

use textcontrast_core::stats::PValueMatrix;
use thiserror::Error;

use crate::report::{CategoryComparison, ComparisonReport};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("unknown format {0:?}, expected markdown, tsv or json")]
    UnknownFormat(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Tsv,
    Json,
}

impl FromStr for Format {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(Format::Markdown),
            "tsv" => Ok(Format::Tsv),
            "json" => Ok(Format::Json),
            _ => Err(RenderError::UnknownFormat(s.into())),
        }
    }
}

struct Table {
    title: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn fixed(v: f64, places: usize) -> String {
    format!("{v:.places$}")
}

fn opt(v: Option<f64>, places: usize) -> String {
    v.map_or_else(|| "–".into(), |x| fixed(x, places))
}

fn pvalue(p: f64) -> String {
    if p < 0.001 {
        "<0.001".into()
    } else {
        fixed(p, 3)
    }
}

fn category_tables(title: &str, c: &CategoryComparison) -> Vec<Table> {
    let Some(first) = c.values.first() else {
        return Vec::new();
    };
    let categories: Vec<&str> = first.value.rows.iter().map(|r| r.category.as_str()).collect();
    let mut header = vec![String::new()];
    header.extend(c.values.iter().map(|v| v.corpus.clone()));
    let rows = categories
        .iter()
        .map(|cat| {
            let mut row = vec![(*cat).to_owned()];
            row.extend(c.values.iter().map(|v| opt(v.value.get(cat), 2)));
            row
        })
        .collect();
    let mut out = vec![Table {
        title: format!("{title} (%)"),
        header,
        rows,
    }];
    if !c.relative.is_empty() {
        let mut header = vec![String::new()];
        header.extend(c.relative.iter().map(|v| v.corpus.clone()));
        let rows = categories
            .iter()
            .map(|cat| {
                let mut row = vec![(*cat).to_owned()];
                row.extend(c.relative.iter().map(|v| opt(v.value.get(cat), 2)));
                row
            })
            .collect();
        out.push(Table {
            title: format!("{title}: difference with {} (%)", c.reference),
            header,
            rows,
        });
    }
    out
}

fn pvalue_table(title: &str, m: &PValueMatrix) -> Table {
    let mut header = vec![String::new()];
    header.extend(m.labels.iter().cloned());
    Table {
        title: title.into(),
        header,
        rows: m
            .labels
            .iter()
            .zip(&m.cells)
            .map(|(l, row)| std::iter::once(l.clone()).chain(row.iter().map(|&p| pvalue(p))).collect())
            .collect(),
    }
}

fn tables(r: &ComparisonReport) -> Vec<Table> {
    let mut out = Vec::new();
    let mut header = vec![String::new()];
    header.extend(r.corpora.iter().cloned());
    let row = |name: &str, f: &dyn Fn(&crate::report::LexicalRow) -> String| {
        std::iter::once(name.to_owned()).chain(r.lexical.iter().map(f)).collect::<Vec<_>>()
    };
    out.push(Table {
        title: "Lexical diversity".into(),
        header: header.clone(),
        rows: vec![
            row("Tokens", &|l| l.tokens.to_string()),
            row("TTR", &|l| fixed(l.ttr, 3)),
            row("STTR", &|l| opt(l.sttr, 3)),
            row("MTLD", &|l| opt(l.mtld, 2)),
            row("Mean sentence length", &|l| fixed(l.mean_sentence_length, 2)),
            row("SD sentence length", &|l| fixed(l.sd_sentence_length, 2)),
        ],
    });
    out.extend(category_tables("UPOS", &r.upos));
    out.extend(category_tables("Dependency relations", &r.deprel));

    let mut header = vec!["Corpus".to_owned(), "Bin".to_owned()];
    header.extend(
        ["%L", "%R", "Mean", "SD", "Mean L", "SD L", "Mean R", "SD R", "# Sent"]
            .iter()
            .map(|s| (*s).to_owned()),
    );
    let mut rows = Vec::new();
    for named in &r.arc_stats {
        for b in &named.value.bins {
            let s = b.stats;
            rows.push(vec![
                named.corpus.clone(),
                b.bin.label(),
                opt(s.map(|s| s.pct_left), 2),
                opt(s.map(|s| s.pct_right), 2),
                opt(s.map(|s| s.mean_len), 2),
                opt(s.map(|s| s.sd_len), 2),
                opt(s.and_then(|s| s.mean_len_left), 2),
                opt(s.and_then(|s| s.sd_len_left), 2),
                opt(s.and_then(|s| s.mean_len_right), 2),
                opt(s.and_then(|s| s.sd_len_right), 2),
                b.sentence_count.to_string(),
            ]);
        }
    }
    out.push(Table {
        title: "Dependency arcs by sentence length".into(),
        header,
        rows,
    });

    let score_table = |title: &str, rows: &[crate::report::ScoreRow]| Table {
        title: title.into(),
        header: ["Corpus", "Mean", "N", "Skipped"].iter().map(|s| (*s).to_owned()).collect(),
        rows: rows
            .iter()
            .map(|s| vec![s.corpus.clone(), opt(s.mean, 3), s.count.to_string(), s.skipped.to_string()])
            .collect(),
    };
    out.push(score_table("Dependency length optimality (Ω)", &r.omega));

    out.extend(category_tables("Constituent spans", &r.spans));
    if !r.constituent_stats.is_empty() {
        let mut rows = Vec::new();
        for named in &r.constituent_stats {
            for b in &named.value {
                rows.push(vec![
                    named.corpus.clone(),
                    b.bin.label(),
                    opt(b.mean, 2),
                    opt(b.sd, 2),
                    b.sentence_count.to_string(),
                ]);
            }
        }
        out.push(Table {
            title: "Constituent length by sentence length".into(),
            header: ["Corpus", "Bin", "Mean", "SD", "# Sent"].iter().map(|s| (*s).to_owned()).collect(),
            rows,
        });
    }
    out.extend(category_tables("Emotions", &r.emotions));
    if !r.similarity.is_empty() {
        out.push(score_table("Similarity with the reference", &r.similarity));
    }
    out.push(Table {
        title: "Male-to-female pronoun ratio".into(),
        header: ["Corpus", "Masc", "Fem", "Ratio", "Difference (%)"]
            .iter()
            .map(|s| (*s).to_owned())
            .collect(),
        rows: r
            .gender
            .iter()
            .map(|g| {
                vec![
                    g.corpus.clone(),
                    g.masc.to_string(),
                    g.fem.to_string(),
                    opt(g.ratio, 2),
                    if g.corpus == r.reference { "–".into() } else { opt(g.relative, 2) },
                ]
            })
            .collect(),
    });
    for (title, m) in [
        ("P-values: mean sentence length", &r.pvalues.sentence_length),
        ("P-values: mean arc length", &r.pvalues.arc_length),
        ("P-values: mean TTR per segment", &r.pvalues.segment_ttr),
    ] {
        if let Some(m) = m {
            out.push(pvalue_table(title, m));
        }
    }
    out
}

fn markdown(r: &ComparisonReport) -> String {
    let mut s = format!("# Comparison against {}\n", r.reference);
    for t in tables(r) {
        let _ = write!(s, "\n## {}\n\n| {} |\n|", t.title, t.header.join(" | "));
        for _ in &t.header {
            s.push_str("---|");
        }
        s.push('\n');
        for row in &t.rows {
            let _ = writeln!(s, "| {} |", row.join(" | "));
        }
    }
    if !r.notes.is_empty() {
        s.push_str("\n## Notes\n\n");
        for n in &r.notes {
            let _ = writeln!(s, "- {n}");
        }
    }
    s
}

fn tsv(r: &ComparisonReport) -> String {
    let mut s = String::new();
    for (i, t) in tables(r).iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let _ = writeln!(s, "# {}", t.title);
        let _ = writeln!(s, "{}", t.header.join("\t"));
        for row in &t.rows {
            let _ = writeln!(s, "{}", row.join("\t"));
        }
    }
    s
}

pub fn render(report: &ComparisonReport, format: Format) -> Result<String, RenderError> {
    Ok(match format {
        Format::Markdown => markdown(report),
        Format::Tsv => tsv(report),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            s
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_decimal_percents() {
        assert_eq!(fixed(19.6923, 2), "19.69");
        assert_eq!(opt(None, 2), "–");
        assert_eq!(pvalue(0.0004), "<0.001");
        assert_eq!(pvalue(0.248), "0.248");
    }

    #[test]
    fn formats() {
        assert_eq!("md".parse::<Format>().unwrap(), Format::Markdown);
        assert_eq!("JSON".parse::<Format>().unwrap(), Format::Json);
        assert!("pdf".parse::<Format>().is_err());
    }
}
