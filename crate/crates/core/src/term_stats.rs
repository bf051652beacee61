//! Yearly document-frequency series and frequency ranking.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::{Stoplist, Term, TermIndex};
use crate::error::{Error, Result};

/// Yearly counts for one term: `r[t]` documents contain the term out of
/// `d[t]` documents published in year `year_min + t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermTimeSeries {
    pub term: Term,
    pub year_min: i32,
    pub r: Vec<u64>,
    pub d: Vec<u64>,
}

impl TermTimeSeries {
    pub fn new(term: Term, year_min: i32, r: Vec<u64>, d: Vec<u64>) -> Result<Self> {
        if r.len() != d.len() || r.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "series for `{term}` has {} counts and {} totals",
                r.len(),
                d.len()
            )));
        }
        if let Some(t) = (0..r.len()).find(|&t| r[t] > d[t]) {
            return Err(Error::InvalidParameter(format!(
                "series for `{term}`: r = {} exceeds d = {} in year {}",
                r[t],
                d[t],
                year_min + t as i32
            )));
        }
        Ok(Self {
            term,
            year_min,
            r,
            d,
        })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn year_max(&self) -> i32 {
        self.year_min + self.r.len() as i32 - 1
    }

    pub fn year(&self, t: usize) -> i32 {
        self.year_min + t as i32
    }

    pub fn total(&self) -> u64 {
        self.r.iter().sum()
    }

    /// Year with the highest count, earliest on ties; `None` if the term
    /// never occurs.
    pub fn peak_year(&self) -> Option<i32> {
        let max = *self.r.iter().max()?;
        if max == 0 {
            return None;
        }
        self.r.iter().position(|&c| c == max).map(|t| self.year(t))
    }
}

/// Documents per year over the index's year range.
pub fn yearly_totals(index: &TermIndex) -> Vec<u64> {
    let mut d = vec![0u64; index.num_years()];
    for (year, _) in index.documents() {
        d[(year - index.year_min()) as usize] += 1;
    }
    d
}

/// Counts, per year, the documents whose term set contains each vocabulary
/// term. Terms absent from the corpus get an all-zero series.
pub fn count_series(
    index: &TermIndex,
    vocabulary: &BTreeSet<Term>,
) -> Result<BTreeMap<Term, TermTimeSeries>> {
    if index.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let years = index.num_years();
    let d = yearly_totals(index);
    let mut counts: BTreeMap<&Term, Vec<u64>> =
        vocabulary.iter().map(|t| (t, vec![0u64; years])).collect();
    for (year, terms) in index.documents() {
        let t = (year - index.year_min()) as usize;
        for term in terms {
            if let Some(r) = counts.get_mut(term) {
                r[t] += 1;
            }
        }
    }
    Ok(counts
        .into_iter()
        .map(|(term, r)| {
            let series = TermTimeSeries {
                term: term.clone(),
                year_min: index.year_min(),
                r,
                d: d.clone(),
            };
            (term.clone(), series)
        })
        .collect())
}

/// Every term ranked by total document count, descending; ties
/// lexicographic ascending. Stoplisted terms are skipped.
pub fn rank_by_frequency(
    series: &BTreeMap<Term, TermTimeSeries>,
    stoplist: &Stoplist,
) -> Vec<Term> {
    let mut ranked: Vec<(&Term, u64)> = series
        .iter()
        .filter(|(term, _)| !stoplist.contains(term))
        .map(|(term, s)| (term, s.total()))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.into_iter().map(|(t, _)| t.clone()).collect()
}

/// First `k` terms of [`rank_by_frequency`]; fewer if the vocabulary is
/// smaller.
pub fn top_k_frequent(
    series: &BTreeMap<Term, TermTimeSeries>,
    k: usize,
    stoplist: &Stoplist,
) -> Result<Vec<Term>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut ranked = rank_by_frequency(series, stoplist);
    ranked.truncate(k);
    Ok(ranked)
}

/// Year-by-term table of counts, parsed back from CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    pub terms: Vec<Term>,
    pub years: Vec<i32>,
    /// `rows[y][c]` is the count of `terms[c]` in `years[y]`.
    pub rows: Vec<Vec<u64>>,
}

/// One row per year, one column per term (input order), header row first.
pub fn export_frequency_table(
    terms: &[Term],
    series: &BTreeMap<Term, TermTimeSeries>,
) -> Result<String> {
    let columns = terms
        .iter()
        .map(|t| {
            series
                .get(t)
                .ok_or_else(|| Error::UnknownTerm(t.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["year".to_string()];
    header.extend(terms.iter().map(|t| t.to_string()));
    out.write_record(&header).map_err(csv_error)?;
    if let Some(first) = columns.first() {
        for t in 0..first.len() {
            let mut row = vec![first.year(t).to_string()];
            row.extend(columns.iter().map(|s| s.r[t].to_string()));
            out.write_record(&row).map_err(csv_error)?;
        }
    }
    let bytes = out
        .into_inner()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_frequency_table(text: &str) -> Result<FrequencyTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?
        .map_err(csv_error)?;
    if header.get(0) != Some("year") {
        return Err(Error::Parse {
            line: 1,
            message: "first column must be `year`".into(),
        });
    }
    let terms = header
        .iter()
        .skip(1)
        .map(|s| {
            Term::new(s).ok_or_else(|| Error::Parse {
                line: 1,
                message: "empty term in header".into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut years = Vec::new();
    let mut rows = Vec::new();
    for (idx, record) in records.enumerate() {
        let line = idx + 2;
        let record = record.map_err(csv_error)?;
        let bad = |message: String| Error::Parse { line, message };
        if record.len() != terms.len() + 1 {
            return Err(bad(format!(
                "expected {} fields, found {}",
                terms.len() + 1,
                record.len()
            )));
        }
        years.push(record[0].parse().map_err(|e| bad(format!("year: {e}")))?);
        rows.push(
            record
                .iter()
                .skip(1)
                .map(|v| v.parse().map_err(|e| bad(format!("count `{v}`: {e}"))))
                .collect::<Result<Vec<u64>>>()?,
        );
    }
    Ok(FrequencyTable { terms, years, rows })
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}
