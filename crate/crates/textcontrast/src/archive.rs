//! News-archive JSON responses: parsing, filtering, prompts and metadata
//! summaries.

use std::collections::BTreeMap;

use chrono::{DateTime, FixedOffset, NaiveDate};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use textcontrast_core::table::MetricTable;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("malformed archive JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("archive JSON has no response.docs array")]
    MissingDocs,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("article {doc_id}: unparseable pub_date {value:?}")]
    BadDate { doc_id: String, value: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub doc_id: String,
    pub headline: String,
    pub lead_paragraph: String,
    pub section_name: String,
    pub type_of_material: String,
    pub pub_date: String,
    pub url: String,
}

impl ArticleRecord {
    /// Accepts RFC 3339 and the archive's `+0000` offset style.
    pub fn published(&self) -> Result<DateTime<FixedOffset>, ArchiveError> {
        DateTime::parse_from_rfc3339(&self.pub_date)
            .or_else(|_| DateTime::parse_from_str(&self.pub_date, "%Y-%m-%dT%H:%M:%S%z"))
            .map_err(|_| ArchiveError::BadDate {
                doc_id: self.doc_id.clone(),
                value: self.pub_date.clone(),
            })
    }
}

fn text_at<'a>(doc: &'a Value, path: &[&str]) -> &'a str {
    path.iter()
        .try_fold(doc, |v, key| v.get(key))
        .and_then(Value::as_str)
        .unwrap_or("")
}

/// One record per entry of `response.docs`. Missing fields become empty
/// strings; the id falls back from `_id` to `uri`, `web_url` and finally
/// the 1-based ordinal.
pub fn parse_archive_json(bytes: &[u8]) -> Result<Vec<ArticleRecord>, ArchiveError> {
    let root: Value = serde_json::from_slice(bytes)?;
    let docs = root
        .get("response")
        .and_then(|r| r.get("docs"))
        .and_then(Value::as_array)
        .ok_or(ArchiveError::MissingDocs)?;
    Ok(docs
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let url = text_at(d, &["web_url"]);
            let doc_id = ["_id", "uri"]
                .iter()
                .map(|k| text_at(d, &[k]))
                .chain([url])
                .find(|s| !s.is_empty())
                .map_or_else(|| format!("doc{}", i + 1), str::to_owned);
            ArticleRecord {
                doc_id,
                headline: text_at(d, &["headline", "main"]).to_owned(),
                lead_paragraph: text_at(d, &["lead_paragraph"]).to_owned(),
                section_name: text_at(d, &["section_name"]).to_owned(),
                type_of_material: text_at(d, &["type_of_material"]).to_owned(),
                pub_date: text_at(d, &["pub_date"]).to_owned(),
                url: url.to_owned(),
            }
        })
        .collect())
}

/// Drops records whose lead paragraph is blank.
pub fn filter_articles(records: Vec<ArticleRecord>) -> Vec<ArticleRecord> {
    records
        .into_iter()
        .filter(|r| !r.lead_paragraph.trim().is_empty())
        .collect()
}

/// Keeps records published within `from..=to`, judged by the calendar date
/// in the record's own offset.
pub fn filter_dates(
    records: Vec<ArticleRecord>,
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
) -> Result<Vec<ArticleRecord>, ArchiveError> {
    if from.is_none() && to.is_none() {
        return Ok(records);
    }
    let mut kept = Vec::with_capacity(records.len());
    for r in records {
        let day = r.published()?.date_naive();
        if from.is_none_or(|f| day >= f) && to.is_none_or(|t| day <= t) {
            kept.push(r);
        }
    }
    Ok(kept)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub doc_id: String,
    pub text: String,
    /// The lead paragraph had fewer than three words.
    pub short: bool,
}

pub const DEFAULT_SEPARATOR: &str = "\n";
pub const PROMPT_WORDS: usize = 3;

/// Headline, separator, then the first three whitespace-delimited words of
/// the lead paragraph. The headline is passed through verbatim.
pub fn build_prompt(record: &ArticleRecord, separator: &str) -> Prompt {
    let words: Vec<&str> = record.lead_paragraph.split_whitespace().take(PROMPT_WORDS).collect();
    Prompt {
        doc_id: record.doc_id.clone(),
        text: format!("{}{}{}", record.headline, separator, words.join(" ")),
        short: words.len() < PROMPT_WORDS,
    }
}

fn share_table(name: &str, values: impl Iterator<Item = String>, total: u64) -> MetricTable {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    let mut t = MetricTable::percentages(name, counts.iter().map(|(k, &v)| (k.as_str(), v)), total);
    t.sort_descending();
    t
}

/// Percentage of records per `section_name` and per `type_of_material`.
pub fn summarize_metadata(records: &[ArticleRecord]) -> Result<(MetricTable, MetricTable), ArchiveError> {
    if records.is_empty() {
        return Err(ArchiveError::EmptyCorpus);
    }
    let n = records.len() as u64;
    Ok((
        share_table("section_name", records.iter().map(|r| r.section_name.clone()), n),
        share_table("type_of_material", records.iter().map(|r| r.type_of_material.clone()), n),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(headline: &str, lead: &str) -> ArticleRecord {
        ArticleRecord {
            doc_id: "x".into(),
            headline: headline.into(),
            lead_paragraph: lead.into(),
            section_name: String::new(),
            type_of_material: String::new(),
            pub_date: String::new(),
            url: String::new(),
        }
    }

    #[test]
    fn single_doc() {
        let json = br#"{"response":{"docs":[{"headline":{"main":"A"},"lead_paragraph":"B C D E"}]}}"#;
        let r = parse_archive_json(json).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].headline.as_str(), r[0].lead_paragraph.as_str()), ("A", "B C D E"));
        assert_eq!(r[0].doc_id, "doc1");
    }

    #[test]
    fn empty_and_missing_docs() {
        assert!(parse_archive_json(br#"{"response":{"docs":[]}}"#).unwrap().is_empty());
        assert!(matches!(parse_archive_json(br#"{"response":{}}"#), Err(ArchiveError::MissingDocs)));
        assert!(matches!(parse_archive_json(b"{"), Err(ArchiveError::Json(_))));
    }

    #[test]
    fn prompts() {
        let p = build_prompt(&record("Mars Landing", "The rover touched down safely"), DEFAULT_SEPARATOR);
        assert_eq!(p.text, "Mars Landing\nThe rover touched");
        assert!(!p.short);
        let p = build_prompt(&record("H", "one  two\tthree"), " | ");
        assert_eq!((p.text.as_str(), p.short), ("H | one two three", false));
        let p = build_prompt(&record("H", "Two words"), DEFAULT_SEPARATOR);
        assert_eq!((p.text.as_str(), p.short), ("H\nTwo words", true));
    }

    #[test]
    fn blank_leads_dropped() {
        let kept = filter_articles(vec![record("a", ""), record("b", "   "), record("c", "text")]);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].headline, "c");
    }

    #[test]
    fn section_shares() {
        let recs: Vec<_> = ["A", "A", "B", "C"]
            .iter()
            .map(|s| ArticleRecord {
                section_name: (*s).into(),
                ..record("h", "l")
            })
            .collect();
        let (sections, _) = summarize_metadata(&recs).unwrap();
        assert_eq!(sections.get("A"), Some(50.0));
        assert_eq!(sections.get("B"), Some(25.0));
        assert_eq!(sections.get("C"), Some(25.0));
        assert!(matches!(summarize_metadata(&[]), Err(ArchiveError::EmptyCorpus)));
    }

    #[test]
    fn dates() {
        let mut r = record("h", "l");
        r.pub_date = "2023-10-01T04:00:13+0000".into();
        let day = |s| NaiveDate::parse_from_str(s, "%Y-%m-%d").ok();
        assert_eq!(filter_dates(vec![r.clone()], day("2023-10-01"), day("2024-01-24")).unwrap().len(), 1);
        assert!(filter_dates(vec![r.clone()], day("2023-10-02"), None).unwrap().is_empty());
        r.pub_date = "yesterday".into();
        assert!(filter_dates(vec![r], None, day("2024-01-24")).is_err());
    }
}
