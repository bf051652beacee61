//! Stage artifact formats. Files read by a later stage start with a
//! `# schema: <name>/<version>` line (JSON header object for the corpus).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{read_records, Corpus, Term};
use crate::coword::{CoWordMatrix, VocabularySelection};
use crate::error::{Error, Result};
use crate::pathfinder::DissimilarityGraph;
use crate::term_stats::{csv_error, TermTimeSeries};

pub const CORPUS: &str = "corpus.jsonl";
pub const SERIES: &str = "series.csv";
pub const FREQUENCY_TABLE: &str = "frequency_table.csv";
pub const FREQUENCY_CHART: &str = "frequency_chart.svg";
pub const BURSTS: &str = "bursts.csv";
pub const VOCABULARY: &str = "vocabulary.csv";
pub const COOCCURRENCE: &str = "cooccurrence.csv";
pub const COSINE: &str = "cosine.csv";
pub const PFNET_EDGES: &str = "pfnet_edges.csv";
pub const POSITIONS: &str = "positions.csv";
pub const MAP: &str = "map.svg";
pub const PAJEK: &str = "network.net";
pub const MANIFEST: &str = "manifest.csv";

/// Schema tag and version of a stage file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schema {
    pub name: &'static str,
    pub version: u32,
}

impl std::fmt::Display for Schema {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.name, self.version)
    }
}

pub const CORPUS_SCHEMA: Schema = Schema {
    name: "corpus",
    version: 1,
};
pub const SERIES_SCHEMA: Schema = Schema {
    name: "series",
    version: 1,
};
pub const BURSTS_SCHEMA: Schema = Schema {
    name: "bursts",
    version: 1,
};
pub const VOCABULARY_SCHEMA: Schema = Schema {
    name: "vocabulary",
    version: 1,
};
pub const COOCCURRENCE_SCHEMA: Schema = Schema {
    name: "cooccurrence",
    version: 1,
};
pub const PFNET_SCHEMA: Schema = Schema {
    name: "pfnet",
    version: 1,
};
pub const POSITIONS_SCHEMA: Schema = Schema {
    name: "positions",
    version: 1,
};

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Prefixes `body` with the schema line.
pub fn with_schema(schema: Schema, body: &str) -> String {
    format!("# schema: {schema}\n{body}")
}

/// Reads a schema-tagged file and returns the body after the schema line.
pub fn read_tagged(path: &Path, schema: Schema) -> Result<String> {
    let text = read_file(path)?;
    let (first, body) = text.split_once('\n').unwrap_or((text.as_str(), ""));
    let found = first
        .strip_prefix("# schema: ")
        .map(str::trim)
        .unwrap_or("none");
    if found != schema.to_string() {
        return Err(Error::SchemaMismatch {
            path: path.to_path_buf(),
            expected: schema.to_string(),
            found: found.to_string(),
        });
    }
    Ok(body.to_string())
}

fn in_file(path: &Path) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::artifact(path, e.to_string())
}

#[derive(Serialize, Deserialize)]
struct CorpusHeader {
    schema: String,
    year_min: i32,
    year_max: i32,
}

pub fn write_corpus(path: &Path, corpus: &Corpus) -> Result<()> {
    let header = CorpusHeader {
        schema: CORPUS_SCHEMA.to_string(),
        year_min: corpus.year_min(),
        year_max: corpus.year_max(),
    };
    let mut out = serde_json::to_string(&header).expect("serializable");
    out.push('\n');
    for doc in corpus.documents() {
        out.push_str(&serde_json::to_string(doc).expect("serializable"));
        out.push('\n');
    }
    write_file(path, &out)
}

pub fn read_corpus(path: &Path) -> Result<Corpus> {
    let text = read_file(path)?;
    let (first, body) = text.split_once('\n').unwrap_or((text.as_str(), ""));
    let mismatch = |found: String| Error::SchemaMismatch {
        path: path.to_path_buf(),
        expected: CORPUS_SCHEMA.to_string(),
        found,
    };
    let tag = serde_json::from_str::<serde_json::Value>(first)
        .ok()
        .and_then(|v| v.get("schema").and_then(|s| s.as_str()).map(str::to_string));
    match tag {
        Some(tag) if tag == CORPUS_SCHEMA.to_string() => {}
        Some(tag) => return Err(mismatch(tag)),
        None => return Err(mismatch("none".into())),
    }
    let header: CorpusHeader = serde_json::from_str(first)
        .map_err(|e| Error::artifact(path, format!("corpus header: {e}")))?;
    let documents = read_records(body.as_bytes(), 2).map_err(in_file(path))?;
    Corpus::with_range(documents, header.year_min, header.year_max).map_err(in_file(path))
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .flexible(true)
        .from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(writer.into_inner().expect("in-memory write")).expect("utf-8")
}

/// Yearly document totals and every term's yearly counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub year_min: i32,
    pub totals: Vec<u64>,
    pub series: BTreeMap<Term, TermTimeSeries>,
}

/// `kind,term,<years...>`; one `documents` row with the totals, then one
/// `term` row per term.
pub fn format_series(table: &SeriesTable) -> String {
    let mut out = csv_writer();
    let mut header = vec!["kind".to_string(), "term".to_string()];
    header.extend((0..table.totals.len()).map(|t| (table.year_min + t as i32).to_string()));
    out.write_record(&header).expect("in-memory write");
    let mut totals = vec!["documents".to_string(), String::new()];
    totals.extend(table.totals.iter().map(u64::to_string));
    out.write_record(&totals).expect("in-memory write");
    for (term, s) in &table.series {
        let mut row = vec!["term".to_string(), term.to_string()];
        row.extend(s.r.iter().map(u64::to_string));
        out.write_record(&row).expect("in-memory write");
    }
    finish(out)
}

pub fn parse_series(path: &Path) -> Result<SeriesTable> {
    let body = read_tagged(path, SERIES_SCHEMA)?;
    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let header = reader
        .headers()
        .map_err(csv_error)
        .map_err(in_file(path))?
        .clone();
    let years: Vec<i32> = header
        .iter()
        .skip(2)
        .map(|y| {
            y.parse()
                .map_err(|_| Error::artifact(path, format!("bad year column `{y}`")))
        })
        .collect::<Result<_>>()?;
    let year_min = *years
        .first()
        .ok_or_else(|| Error::artifact(path, "no year columns"))?;
    let mut totals = None;
    let mut series = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(csv_error).map_err(in_file(path))?;
        let counts: Vec<u64> = record
            .iter()
            .skip(2)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::artifact(path, format!("bad count `{v}`")))
            })
            .collect::<Result<_>>()?;
        if counts.len() != years.len() {
            return Err(Error::artifact(path, "row length does not match header"));
        }
        match &record[0] {
            "documents" => totals = Some(counts),
            "term" => {
                let d = totals
                    .clone()
                    .ok_or_else(|| Error::artifact(path, "term row before documents row"))?;
                let term =
                    Term::new(&record[1]).ok_or_else(|| Error::artifact(path, "empty term"))?;
                let s = TermTimeSeries::new(term.clone(), year_min, counts, d)
                    .map_err(in_file(path))?;
                series.insert(term, s);
            }
            other => return Err(Error::artifact(path, format!("unknown row kind `{other}`"))),
        }
    }
    let totals = totals.ok_or_else(|| Error::artifact(path, "missing documents row"))?;
    Ok(SeriesTable {
        year_min,
        totals,
        series,
    })
}

/// `rank,term,frequency_rank,burst_rank` per selected term.
pub fn format_vocabulary(selection: &VocabularySelection, freq: &[Term], burst: &[Term]) -> String {
    let position =
        |ranking: &[Term], t: &Term| ranking.iter().position(|x| x == t).map_or(0, |p| p + 1);
    let mut out = csv_writer();
    out.write_record(["rank", "term", "frequency_rank", "burst_rank"])
        .expect("in-memory write");
    for (i, term) in selection.terms.iter().enumerate() {
        out.write_record([
            (i + 1).to_string(),
            term.to_string(),
            position(freq, term).to_string(),
            position(burst, term).to_string(),
        ])
        .expect("in-memory write");
    }
    finish(out)
}

pub fn parse_vocabulary(path: &Path) -> Result<VocabularySelection> {
    let body = read_tagged(path, VOCABULARY_SCHEMA)?;
    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let mut selection = VocabularySelection {
        terms: Vec::new(),
        frequency_depth: 0,
        burst_depth: 0,
    };
    for record in reader.records() {
        let record = record.map_err(csv_error).map_err(in_file(path))?;
        if record.len() != 4 {
            return Err(Error::artifact(path, "vocabulary rows need 4 fields"));
        }
        let rank = |v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| Error::artifact(path, format!("bad rank `{v}`")))
        };
        selection
            .terms
            .push(Term::new(&record[1]).ok_or_else(|| Error::artifact(path, "empty term"))?);
        selection.frequency_depth = selection.frequency_depth.max(rank(&record[2])?);
        selection.burst_depth = selection.burst_depth.max(rank(&record[3])?);
    }
    Ok(selection)
}

/// A retained PFNet link with its co-occurrence count.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub a: Term,
    pub b: Term,
    pub count: u64,
    pub distance: f64,
}

pub fn edge_records(graph: &DissimilarityGraph, counts: &CoWordMatrix) -> Result<Vec<EdgeRecord>> {
    let index: BTreeMap<&Term, usize> = counts
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect();
    let labels = graph.labels();
    graph
        .edges()
        .into_iter()
        .map(|(i, j, distance)| {
            let (a, b) = (&labels[i], &labels[j]);
            let ia = *index
                .get(a)
                .ok_or_else(|| Error::UnknownTerm(a.to_string()))?;
            let ib = *index
                .get(b)
                .ok_or_else(|| Error::UnknownTerm(b.to_string()))?;
            Ok(EdgeRecord {
                a: a.clone(),
                b: b.clone(),
                count: counts.cooccurrence(ia, ib),
                distance,
            })
        })
        .collect()
}

/// `term_a,term_b,count,distance`, distances with six decimals.
pub fn format_edges(edges: &[EdgeRecord]) -> String {
    let mut out = csv_writer();
    out.write_record(["term_a", "term_b", "count", "distance"])
        .expect("in-memory write");
    for e in edges {
        out.write_record([
            e.a.to_string(),
            e.b.to_string(),
            e.count.to_string(),
            format!("{:.6}", e.distance),
        ])
        .expect("in-memory write");
    }
    finish(out)
}

pub fn parse_edges(path: &Path) -> Result<Vec<EdgeRecord>> {
    let body = read_tagged(path, PFNET_SCHEMA)?;
    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let mut edges = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error).map_err(in_file(path))?;
        if record.len() != 4 {
            return Err(Error::artifact(path, "edge rows need 4 fields"));
        }
        let term = |v: &str| Term::new(v).ok_or_else(|| Error::artifact(path, "empty term"));
        edges.push(EdgeRecord {
            a: term(&record[0])?,
            b: term(&record[1])?,
            count: record[2]
                .parse()
                .map_err(|_| Error::artifact(path, format!("bad count `{}`", &record[2])))?,
            distance: record[3]
                .parse()
                .map_err(|_| Error::artifact(path, format!("bad distance `{}`", &record[3])))?,
        });
    }
    Ok(edges)
}

/// Path of artifact `name` inside `dir`.
pub fn artifact_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
