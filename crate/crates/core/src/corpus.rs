//! Document ingestion, citation filtering and term extraction.
//!
//! Records arrive one JSON object per line:
//!
//! ```text
//! {"id": "p1", "year": 1991, "citations": 40, "title": "RNA Expression in Mice", "keywords": ["cell line"]}
//! ```
//!
//! Titles are split into single words, keyword phrases are kept whole.
//! Every term counts once per document.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default share of most cited documents kept per year.
pub const DEFAULT_TOP_FRACTION: f64 = 0.10;

/// Frequent but uninformative terms excluded by default.
pub const DEFAULT_STOPLIST: &[&str] = &[
    "support",
    "u.s. gov't",
    "non-u.s. gov't",
    "p.h.s.",
    "receptors",
    "cells",
    "rats",
    "amino acid sequence",
    "base sequence",
    "cultured",
];

/// A normalized token or multiword phrase: lowercase, trimmed, single-spaced.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Term(String);

impl Term {
    /// Normalizes `text`; returns `None` when nothing but whitespace remains.
    pub fn new(text: &str) -> Option<Self> {
        let normalized = text
            .split_whitespace()
            .map(str::to_lowercase)
            .collect::<Vec<_>>()
            .join(" ");
        if normalized.is_empty() {
            None
        } else {
            Some(Term(normalized))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Term {
    type Error = String;

    fn try_from(value: String) -> std::result::Result<Self, Self::Error> {
        Term::new(&value).ok_or_else(|| "empty term".to_string())
    }
}

impl From<Term> for String {
    fn from(term: Term) -> Self {
        term.0
    }
}

impl AsRef<str> for Term {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub year: i32,
    pub citations: u64,
    pub title: String,
    pub keywords: Vec<String>,
}

impl Document {
    pub fn has_title(&self) -> bool {
        !self.title.trim().is_empty()
    }
}

/// Documents plus the calendar year range they span.
///
/// The range is fixed at ingestion and survives filtering, so every yearly
/// series derived from a filtered corpus has the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    documents: Vec<Document>,
    year_min: i32,
    year_max: i32,
}

impl Corpus {
    /// Builds a corpus whose year range is the observed min/max.
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let year_min = documents
            .iter()
            .map(|d| d.year)
            .min()
            .ok_or(Error::EmptyCorpus)?;
        let year_max = documents
            .iter()
            .map(|d| d.year)
            .max()
            .ok_or(Error::EmptyCorpus)?;
        Self::with_range(documents, year_min, year_max)
    }

    /// Builds a corpus over an explicit year range; documents may be empty.
    pub fn with_range(documents: Vec<Document>, year_min: i32, year_max: i32) -> Result<Self> {
        if year_min > year_max {
            return Err(Error::InvalidParameter(format!(
                "year range {year_min}-{year_max} is empty"
            )));
        }
        let mut seen = HashSet::new();
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
            if doc.year < year_min || doc.year > year_max {
                return Err(Error::InvalidParameter(format!(
                    "document `{}` year {} outside {year_min}-{year_max}",
                    doc.id, doc.year
                )));
            }
        }
        Ok(Self {
            documents,
            year_min,
            year_max,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn year_min(&self) -> i32 {
        self.year_min
    }

    pub fn year_max(&self) -> i32 {
        self.year_max
    }

    pub fn years(&self) -> std::ops::RangeInclusive<i32> {
        self.year_min..=self.year_max
    }

    pub fn num_years(&self) -> usize {
        (self.year_max - self.year_min + 1) as usize
    }

    /// Keeps documents matching `keep`; the year range is unchanged.
    pub fn retain(&self, mut keep: impl FnMut(&Document) -> bool) -> Corpus {
        Corpus {
            documents: self.documents.iter().filter(|d| keep(d)).cloned().collect(),
            year_min: self.year_min,
            year_max: self.year_max,
        }
    }
}

#[derive(Deserialize)]
struct RawRecord {
    id: Option<String>,
    year: Option<i64>,
    citations: Option<i64>,
    #[serde(default)]
    title: Option<String>,
    #[serde(default)]
    keywords: Option<Vec<String>>,
}

fn parse_record(line: &str, line_no: usize) -> Result<Document> {
    let err = |message: String| Error::Parse {
        line: line_no,
        message,
    };
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
    let id = raw.id.ok_or_else(|| err("missing field `id`".into()))?;
    let year = raw.year.ok_or_else(|| err("missing field `year`".into()))?;
    let year = i32::try_from(year).map_err(|_| err(format!("year {year} out of range")))?;
    let citations = raw
        .citations
        .ok_or_else(|| err("missing field `citations`".into()))?;
    if citations < 0 {
        return Err(err(format!("negative citation count {citations}")));
    }
    let keywords = raw
        .keywords
        .unwrap_or_default()
        .into_iter()
        .filter(|k| !k.trim().is_empty())
        .collect();
    Ok(Document {
        id,
        year,
        citations: citations as u64,
        title: raw.title.unwrap_or_default(),
        keywords,
    })
}

/// Parses one JSON record per line. Blank lines are skipped; line numbers in
/// errors are 1-based and offset by `first_line - 1`.
pub fn read_records(source: impl BufRead, first_line: usize) -> Result<Vec<Document>> {
    let mut documents = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + first_line;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let doc = parse_record(&line, line_no)?;
        if !seen.insert(doc.id.clone()) {
            return Err(Error::DuplicateId(doc.id));
        }
        documents.push(doc);
    }
    Ok(documents)
}

/// Reads a corpus, one JSON record per line. The year range is the observed
/// min/max; an input without records is an error.
pub fn load_corpus(source: impl BufRead) -> Result<Corpus> {
    Corpus::new(read_records(source, 1)?)
}

/// Removes documents whose title is empty or whitespace.
pub fn filter_titled(corpus: &Corpus) -> Corpus {
    corpus.retain(Document::has_title)
}

/// Citation threshold for one year: the `ceil(fraction * n)`-th highest count.
fn citation_threshold(counts: &mut [u64], fraction: f64) -> u64 {
    counts.sort_unstable_by(|a, b| b.cmp(a));
    // the 1e-9 slack keeps e.g. 0.1 * 30 from rounding up to 4
    let quota = ((fraction * counts.len() as f64) - 1e-9).ceil().max(1.0) as usize;
    counts[quota.min(counts.len()) - 1]
}

/// Keeps, per year, every document cited at least as often as the
/// `ceil(fraction * N_year)`-th most cited one. Ties at the boundary are kept.
pub fn filter_top_cited(corpus: &Corpus, fraction: f64) -> Result<Corpus> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fraction {fraction} not in (0, 1]"
        )));
    }
    let mut by_year: BTreeMap<i32, Vec<u64>> = BTreeMap::new();
    for doc in corpus.documents() {
        by_year.entry(doc.year).or_default().push(doc.citations);
    }
    let thresholds: BTreeMap<i32, u64> = by_year
        .into_iter()
        .map(|(year, mut counts)| (year, citation_threshold(&mut counts, fraction)))
        .collect();
    Ok(corpus.retain(|d| d.citations >= thresholds[&d.year]))
}

/// Terms removed during extraction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplist(BTreeSet<Term>);

impl Stoplist {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Parses one term per line; blank lines are ignored.
    pub fn parse(text: &str) -> Self {
        Stoplist(text.lines().filter_map(Term::new).collect())
    }

    pub fn contains(&self, term: &Term) -> bool {
        self.0.contains(term)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.0.iter()
    }
}

impl FromIterator<Term> for Stoplist {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        Stoplist(iter.into_iter().collect())
    }
}

impl Stoplist {
    pub fn builtin() -> Self {
        DEFAULT_STOPLIST
            .iter()
            .filter_map(|t| Term::new(t))
            .collect()
    }
}

/// Title words plus whole keyword phrases, minus the stoplist.
pub fn extract_terms(doc: &Document, stoplist: &Stoplist) -> BTreeSet<Term> {
    let title_words = doc
        .title
        .split(|c: char| !c.is_alphanumeric())
        .filter_map(Term::new);
    let phrases = doc.keywords.iter().filter_map(|k| Term::new(k));
    title_words
        .chain(phrases)
        .filter(|t| !stoplist.contains(t))
        .collect()
}

/// Per-document term sets of a corpus, computed once and shared by the
/// counting stages.
#[derive(Debug, Clone)]
pub struct TermIndex {
    year_min: i32,
    year_max: i32,
    documents: Vec<(i32, BTreeSet<Term>)>,
}

impl TermIndex {
    pub fn build(corpus: &Corpus, stoplist: &Stoplist) -> Self {
        Self {
            year_min: corpus.year_min(),
            year_max: corpus.year_max(),
            documents: corpus
                .documents()
                .iter()
                .map(|d| (d.year, extract_terms(d, stoplist)))
                .collect(),
        }
    }

    pub fn year_min(&self) -> i32 {
        self.year_min
    }

    pub fn year_max(&self) -> i32 {
        self.year_max
    }

    pub fn num_years(&self) -> usize {
        (self.year_max - self.year_min + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// `(year, terms)` per document, in corpus order.
    pub fn documents(&self) -> &[(i32, BTreeSet<Term>)] {
        &self.documents
    }

    /// Every term occurring in at least one document.
    pub fn vocabulary(&self) -> BTreeSet<Term> {
        self.documents
            .iter()
            .flat_map(|(_, terms)| terms.iter().cloned())
            .collect()
    }
}
