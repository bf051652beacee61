//! Map vocabulary selection and document-level co-word matrices.

use std::collections::HashMap;

use crate::corpus::{Term, TermIndex};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::term_stats::csv_error;

/// Terms chosen for the map and how deep each ranking had to be read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabularySelection {
    /// Selected terms in frequency-rank order.
    pub terms: Vec<Term>,
    /// Deepest frequency rank (1-based) among the selected terms.
    pub frequency_depth: usize,
    /// Deepest burstiness rank (1-based) among the selected terms.
    pub burst_depth: usize,
}

fn rank_positions(ranking: &[Term], name: &str) -> Result<HashMap<Term, usize>> {
    let mut pos = HashMap::with_capacity(ranking.len());
    for (i, t) in ranking.iter().enumerate() {
        if pos.insert(t.clone(), i + 1).is_some() {
            return Err(Error::InvalidParameter(format!(
                "{name} ranking lists `{t}` twice"
            )));
        }
    }
    Ok(pos)
}

/// Reads both rankings in lockstep, one rank deeper on each side per step,
/// until `target` terms appear in both prefixes.
///
/// When the last step adds two shared terms at once and overshoots, the one
/// with the worse frequency rank is dropped. The reported depths are the
/// deepest ranks actually used, so the two prefixes cut at those depths
/// share exactly the selected terms.
pub fn select_map_vocabulary(
    freq_ranking: &[Term],
    burst_ranking: &[Term],
    target: usize,
) -> Result<VocabularySelection> {
    if target == 0 {
        return Err(Error::InvalidParameter(
            "vocabulary target must be at least 1".into(),
        ));
    }
    let freq_pos = rank_positions(freq_ranking, "frequency")?;
    let burst_pos = rank_positions(burst_ranking, "burstiness")?;

    let mut shared: Vec<&Term> = Vec::new();
    let depth_limit = freq_ranking.len().max(burst_ranking.len());
    for depth in 1..=depth_limit {
        if let Some(f) = freq_ranking.get(depth - 1) {
            if burst_pos.get(f).is_some_and(|&b| b <= depth) {
                shared.push(f);
            }
        }
        if let Some(b) = burst_ranking.get(depth - 1) {
            // a term at the same depth in both rankings was already added
            if freq_pos.get(b).is_some_and(|&f| f < depth) {
                shared.push(b);
            }
        }
        if shared.len() >= target {
            shared.sort_by_key(|t| freq_pos[*t]);
            shared.truncate(target);
            let frequency_depth = shared.iter().map(|t| freq_pos[*t]).max().unwrap_or(0);
            let burst_depth = shared.iter().map(|t| burst_pos[*t]).max().unwrap_or(0);
            return Ok(VocabularySelection {
                terms: shared.into_iter().cloned().collect(),
                frequency_depth,
                burst_depth,
            });
        }
    }
    let achievable = freq_pos
        .keys()
        .filter(|t| burst_pos.contains_key(*t))
        .count();
    Err(Error::VocabularyUnreachable { target, achievable })
}

/// Symmetric co-occurrence counts. Off-diagonal entries count documents
/// containing both terms; the diagonal holds each term's document frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct CoWordMatrix {
    pub terms: Vec<Term>,
    pub counts: SquareMatrix<u64>,
}

impl CoWordMatrix {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn doc_freq(&self, i: usize) -> u64 {
        *self.counts.get(i, i)
    }

    pub fn cooccurrence(&self, i: usize, j: usize) -> u64 {
        if i == j {
            0
        } else {
            *self.counts.get(i, j)
        }
    }

    /// Off-diagonal counts as similarities; the diagonal is zero.
    pub fn similarities(&self) -> SquareMatrix<f64> {
        SquareMatrix::from_fn(self.len(), |i, j| self.cooccurrence(i, j) as f64)
    }

    /// Non-zero off-diagonal entries, counting `(i, j)` and `(j, i)` separately.
    pub fn nonzero_count(&self) -> usize {
        count_off_diagonal(self.len(), |i, j| self.cooccurrence(i, j) != 0)
    }
}

/// Salton cosine strengths `C_ij / sqrt(F_i * F_j)`, diagonal 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCoWordMatrix {
    pub terms: Vec<Term>,
    pub strengths: SquareMatrix<f64>,
}

impl NormalizedCoWordMatrix {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn similarities(&self) -> SquareMatrix<f64> {
        SquareMatrix::from_fn(self.len(), |i, j| {
            if i == j {
                0.0
            } else {
                *self.strengths.get(i, j)
            }
        })
    }

    pub fn nonzero_count(&self) -> usize {
        count_off_diagonal(self.len(), |i, j| *self.strengths.get(i, j) != 0.0)
    }
}

fn count_off_diagonal(n: usize, nonzero: impl Fn(usize, usize) -> bool) -> usize {
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && nonzero(i, j))
        .count()
}

/// Non-zero off-diagonal entries of a raw matrix (both triangles).
pub fn nonzero_count(matrix: &CoWordMatrix) -> usize {
    matrix.nonzero_count()
}

/// Counts, for every pair of `terms`, the documents containing both.
pub fn build_cooccurrence(index: &TermIndex, terms: &[Term]) -> Result<CoWordMatrix> {
    let pos = rank_positions(terms, "vocabulary")?;
    let n = terms.len();
    let mut counts = SquareMatrix::filled(n, 0u64);
    for (_, doc_terms) in index.documents() {
        let present: Vec<usize> = doc_terms
            .iter()
            .filter_map(|t| pos.get(t).map(|&p| p - 1))
            .collect();
        for &i in &present {
            for &j in &present {
                let c = *counts.get(i, j);
                counts.set(i, j, c + 1);
            }
        }
    }
    Ok(CoWordMatrix {
        terms: terms.to_vec(),
        counts,
    })
}

/// Salton cosine normalization. Terms that occur in no document are
/// dropped first.
pub fn cosine_normalize(matrix: &CoWordMatrix) -> NormalizedCoWordMatrix {
    let keep: Vec<usize> = (0..matrix.len())
        .filter(|&i| matrix.doc_freq(i) > 0)
        .collect();
    let strengths = SquareMatrix::from_fn(keep.len(), |a, b| {
        let (i, j) = (keep[a], keep[b]);
        if i == j {
            1.0
        } else {
            // one rounding in the product keeps C = F_i = F_j at exactly 1
            let norm = ((matrix.doc_freq(i) * matrix.doc_freq(j)) as f64).sqrt();
            matrix.cooccurrence(i, j) as f64 / norm
        }
    });
    NormalizedCoWordMatrix {
        terms: keep.iter().map(|&i| matrix.terms[i].clone()).collect(),
        strengths,
    }
}

fn write_matrix<T>(terms: &[Term], cell: impl Fn(usize, usize) -> T) -> String
where
    T: ToString,
{
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["term".to_string()];
    header.extend(terms.iter().map(Term::to_string));
    out.write_record(&header).expect("in-memory write");
    for (i, term) in terms.iter().enumerate() {
        let mut row = vec![term.to_string()];
        row.extend((0..terms.len()).map(|j| cell(i, j).to_string()));
        out.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(out.into_inner().expect("in-memory write")).expect("utf-8")
}

/// Dense count matrix: header of terms, then one row per term. Diagonal
/// entries are document frequencies.
pub fn export_counts(matrix: &CoWordMatrix) -> String {
    write_matrix(&matrix.terms, |i, j| *matrix.counts.get(i, j))
}

/// Dense strength matrix with six decimals.
pub fn export_strengths(matrix: &NormalizedCoWordMatrix) -> String {
    write_matrix(&matrix.terms, |i, j| {
        format!("{:.6}", matrix.strengths.get(i, j))
    })
}

pub fn parse_counts(text: &str) -> Result<CoWordMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(h) => h.map_err(csv_error)?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "missing header".into(),
            })
        }
    };
    let parse_term = |s: &str, line: usize| {
        Term::new(s).ok_or_else(|| Error::Parse {
            line,
            message: "empty term".into(),
        })
    };
    let terms = header
        .iter()
        .skip(1)
        .map(|s| parse_term(s, 1))
        .collect::<Result<Vec<_>>>()?;
    let n = terms.len();
    let mut counts = SquareMatrix::filled(n, 0u64);
    let mut rows = 0;
    for (i, record) in records.enumerate() {
        let line = i + 2;
        let record = record.map_err(csv_error)?;
        if i >= n || record.len() != n + 1 || parse_term(&record[0], line)? != terms[i] {
            return Err(Error::Parse {
                line,
                message: "matrix row does not match header".into(),
            });
        }
        for j in 0..n {
            let v = record[j + 1].parse().map_err(|e| Error::Parse {
                line,
                message: format!("count `{}`: {e}", &record[j + 1]),
            })?;
            counts.set(i, j, v);
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::Parse {
            line: rows + 2,
            message: format!("expected {n} matrix rows, found {rows}"),
        });
    }
    if !counts.is_symmetric() {
        return Err(Error::Parse {
            line: 0,
            message: "count matrix is not symmetric".into(),
        });
    }
    Ok(CoWordMatrix { terms, counts })
}
