//! Burst detection over yearly document-frequency series.
//!
//! Each year is a batch of `d_t` documents of which `r_t` contain the term.
//! A `k`-state automaton emits documents at rate `p_i = min(p_0 * s^i, 1 - eps)`
//! in state `i`, where `p_0 = sum(r) / sum(d)`. Being in state `i` during
//! year `t` costs the binomial negative log-likelihood
//!
//! ```text
//! sigma_i(t) = -( r_t * ln p_i + (d_t - r_t) * ln(1 - p_i) )
//! ```
//!
//! and moving up from `i` to `j > i` costs `(j - i) * gamma * ln n` for `n`
//! batches; moving down is free. The minimum-cost state sequence (starting
//! from state 0) is found by dynamic programming. Maximal runs of years in
//! state `>= i` become level-`i` bursts, weighted by the cost they save
//! against level `i - 1`.

use std::collections::BTreeMap;

use crate::corpus::Term;
use crate::error::{Error, Result};
use crate::term_stats::{csv_error, TermTimeSeries};

/// Automaton parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurstConfig {
    /// Rate ratio between consecutive states, `> 1`.
    pub s: f64,
    /// Transition cost coefficient, `>= 0`.
    pub gamma: f64,
    /// Number of states, `>= 2`.
    pub states: usize,
    /// Rates are capped at `1 - epsilon`.
    pub epsilon: f64,
}

impl Default for BurstConfig {
    fn default() -> Self {
        Self {
            s: 2.0,
            gamma: 1.0,
            states: 2,
            epsilon: 1e-6,
        }
    }
}

impl BurstConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.s > 1.0) || !self.s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "burst s = {} must exceed 1",
                self.s
            )));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "burst gamma = {} must be non-negative",
                self.gamma
            )));
        }
        if self.states < 2 {
            return Err(Error::InvalidParameter(format!(
                "burst automaton needs at least 2 states, got {}",
                self.states
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "burst epsilon = {} not in (0, 0.5)",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// A detected burst. Years are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct BurstInterval {
    pub term: Term,
    pub level: usize,
    pub start_year: i32,
    pub end_year: i32,
    pub weight: f64,
}

/// Optimal state per year and the total cost of that sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePath {
    pub states: Vec<usize>,
    pub cost: f64,
}

/// Emission rate of every state.
pub fn state_rates(series: &TermTimeSeries, config: &BurstConfig) -> Vec<f64> {
    let hits: u64 = series.r.iter().sum();
    let total: u64 = series.d.iter().sum();
    let base = if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    };
    let cap = 1.0 - config.epsilon;
    (0..config.states)
        .map(|i| (base * config.s.powi(i as i32)).min(cap))
        .collect()
}

/// Binomial cost of observing `r` hits out of `d` at rate `p`.
pub fn emission_cost(r: u64, d: u64, p: f64) -> f64 {
    let r = r as f64;
    let d = d as f64;
    -(r * p.ln() + (d - r) * (1.0 - p).ln())
}

fn transition_cost(from: usize, to: usize, gamma: f64, log_n: f64) -> f64 {
    if to > from {
        (to - from) as f64 * gamma * log_n
    } else {
        0.0
    }
}

/// Minimum-cost state sequence, or `None` when the term never occurs.
///
/// On equal cost the back-pointer goes to the lower state, and the final
/// state is the lowest one attaining the minimum.
pub fn optimal_state_sequence(
    series: &TermTimeSeries,
    config: &BurstConfig,
) -> Result<Option<StatePath>> {
    config.validate()?;
    if series.total() == 0 || series.d.iter().sum::<u64>() == 0 {
        return Ok(None);
    }
    let n = series.len();
    let k = config.states;
    let rates = state_rates(series, config);
    let log_n = (n as f64).ln();

    let mut back = vec![vec![0usize; k]; n];
    let mut cost: Vec<f64> = (0..k)
        .map(|j| {
            0.0 + transition_cost(0, j, config.gamma, log_n)
                + emission_cost(series.r[0], series.d[0], rates[j])
        })
        .collect();
    #[allow(clippy::needless_range_loop)]
    for t in 1..n {
        let mut next = vec![0.0; k];
        for j in 0..k {
            let mut best = f64::INFINITY;
            let mut arg = 0;
            for (i, &c) in cost.iter().enumerate() {
                let candidate = c + transition_cost(i, j, config.gamma, log_n);
                if candidate < best {
                    best = candidate;
                    arg = i;
                }
            }
            back[t][j] = arg;
            next[j] = best + emission_cost(series.r[t], series.d[t], rates[j]);
        }
        cost = next;
    }

    let mut last = 0;
    for j in 1..k {
        if cost[j] < cost[last] {
            last = j;
        }
    }
    let total = cost[last];
    let mut states = vec![0usize; n];
    states[n - 1] = last;
    for t in (1..n).rev() {
        states[t - 1] = back[t][states[t]];
    }
    Ok(Some(StatePath {
        states,
        cost: total,
    }))
}

/// Bursts of one term, ordered by level then start year.
///
/// Years with no documents carry no evidence either way; they are trimmed
/// from the ends of each run so no burst starts or ends in an empty year.
pub fn detect_bursts(series: &TermTimeSeries, config: &BurstConfig) -> Result<Vec<BurstInterval>> {
    let Some(path) = optimal_state_sequence(series, config)? else {
        return Ok(Vec::new());
    };
    let rates = state_rates(series, config);
    let n = series.len();
    let mut bursts = Vec::new();
    for level in 1..config.states {
        let mut t = 0;
        while t < n {
            if path.states[t] < level {
                t += 1;
                continue;
            }
            let mut end = t;
            while end + 1 < n && path.states[end + 1] >= level {
                end += 1;
            }
            let (mut lo, mut hi) = (t, end);
            while lo <= hi && series.d[lo] == 0 {
                lo += 1;
            }
            while hi > lo && series.d[hi] == 0 {
                hi -= 1;
            }
            if lo <= hi {
                let weight = (lo..=hi)
                    .map(|y| {
                        emission_cost(series.r[y], series.d[y], rates[level - 1])
                            - emission_cost(series.r[y], series.d[y], rates[level])
                    })
                    .sum();
                bursts.push(BurstInterval {
                    term: series.term.clone(),
                    level,
                    start_year: series.year(lo),
                    end_year: series.year(hi),
                    weight,
                });
            }
            t = end + 1;
        }
    }
    Ok(bursts)
}

/// Per-term aggregate of its bursts.
#[derive(Debug, Clone, PartialEq)]
pub struct BurstSummary {
    /// Number of level-1 bursts.
    pub burst_count: usize,
    pub max_level: usize,
    pub max_weight: f64,
    /// Start of the earliest level-1 burst.
    pub first_start_year: Option<i32>,
    /// Start of the heaviest burst, earliest on ties.
    pub max_weight_start_year: Option<i32>,
}

impl BurstSummary {
    pub fn has_burst(&self) -> bool {
        self.burst_count > 0
    }
}

/// Summarizes the bursts of a single term.
pub fn burst_summary(intervals: &[BurstInterval]) -> Result<BurstSummary> {
    if let Some(first) = intervals.first() {
        if let Some(other) = intervals.iter().find(|b| b.term != first.term) {
            return Err(Error::InvalidParameter(format!(
                "burst summary mixes terms `{}` and `{}`",
                first.term, other.term
            )));
        }
    }
    let level_one = intervals.iter().filter(|b| b.level == 1);
    let heaviest = intervals
        .iter()
        .fold(None::<&BurstInterval>, |best, b| match best {
            Some(cur)
                if cur.weight > b.weight
                    || (cur.weight == b.weight && cur.start_year <= b.start_year) =>
            {
                Some(cur)
            }
            _ => Some(b),
        });
    Ok(BurstSummary {
        burst_count: level_one.clone().count(),
        max_level: intervals.iter().map(|b| b.level).max().unwrap_or(0),
        max_weight: heaviest.map_or(0.0, |b| b.weight),
        first_start_year: level_one.map(|b| b.start_year).min(),
        max_weight_start_year: heaviest.map(|b| b.start_year),
    })
}

/// Groups a mixed burst list by term and summarizes each group.
pub fn summarize_by_term(intervals: &[BurstInterval]) -> BTreeMap<Term, BurstSummary> {
    let mut groups: BTreeMap<Term, Vec<BurstInterval>> = BTreeMap::new();
    for b in intervals {
        groups.entry(b.term.clone()).or_default().push(b.clone());
    }
    groups
        .into_iter()
        .map(|(term, list)| {
            let summary = burst_summary(&list).expect("grouped by term");
            (term, summary)
        })
        .collect()
}

/// Bursting terms by maximum burst weight, descending; ties lexicographic.
pub fn rank_by_burstiness(summaries: &BTreeMap<Term, BurstSummary>) -> Vec<Term> {
    let mut ranked: Vec<(&Term, f64)> = summaries
        .iter()
        .filter(|(_, s)| s.has_burst())
        .map(|(t, s)| (t, s.max_weight))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.into_iter().map(|(t, _)| t.clone()).collect()
}

pub const BURST_LIST_HEADER: [&str; 5] = ["term", "level", "start_year", "end_year", "weight"];

/// Comma-separated burst list, weights with six decimals.
pub fn export_burst_list(intervals: &[BurstInterval]) -> String {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    out.write_record(BURST_LIST_HEADER)
        .expect("in-memory write");
    for b in intervals {
        out.write_record([
            b.term.to_string(),
            b.level.to_string(),
            b.start_year.to_string(),
            b.end_year.to_string(),
            format!("{:.6}", b.weight),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(out.into_inner().expect("in-memory write")).expect("utf-8")
}

pub fn parse_burst_list(text: &str) -> Result<Vec<BurstInterval>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.iter().ne(BURST_LIST_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "unexpected burst list header `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut bursts = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(csv_error)?;
        let bad = |message: String| Error::Parse { line, message };
        let term = Term::new(&record[0]).ok_or_else(|| bad("empty term".into()))?;
        bursts.push(BurstInterval {
            term,
            level: record[1].parse().map_err(|e| bad(format!("level: {e}")))?,
            start_year: record[2]
                .parse()
                .map_err(|e| bad(format!("start_year: {e}")))?,
            end_year: record[3]
                .parse()
                .map_err(|e| bad(format!("end_year: {e}")))?,
            weight: record[4].parse().map_err(|e| bad(format!("weight: {e}")))?,
        });
    }
    Ok(bursts)
}
