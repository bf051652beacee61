//! End-to-end pipeline as a chain of stages that talk through files.
//!
//! Every stage reads the artifacts of earlier stages from the output
//! directory and writes its own, so running the stages one by one produces
//! the same bytes as [`run_pipeline`]. After each stage `manifest.csv` lists
//! every artifact present with its SHA-256 digest.

pub mod artifacts;
pub mod config;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::burst::{
    detect_bursts, export_burst_list, parse_burst_list, rank_by_burstiness, summarize_by_term,
    BurstInterval,
};
use crate::corpus::{filter_titled, filter_top_cited, load_corpus, Stoplist, Term, TermIndex};
use crate::coword::{
    build_cooccurrence, cosine_normalize, export_counts, export_strengths, parse_counts,
    select_map_vocabulary,
};
use crate::error::{Error, Result};
use crate::layout::{export_positions, fruchterman_reingold, parse_positions};
use crate::map_render::{
    export_pajek, render_frequency_chart, render_svg, style_edges, style_nodes, Frame,
    PeriodPalette, WeightedNetwork,
};
use crate::matrix::SquareMatrix;
use crate::pathfinder::{pfnet, similarity_to_distance, DissimilarityGraph, PfnetParams};
use crate::term_stats::{count_series, export_frequency_table, rank_by_frequency};

use artifacts::*;
pub use config::{MatrixMode, PipelineConfig, StoplistSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Ingest,
    Freq,
    Burst,
    Select,
    Coword,
    Pfnet,
    Layout,
    Render,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Ingest,
        Stage::Freq,
        Stage::Burst,
        Stage::Select,
        Stage::Coword,
        Stage::Pfnet,
        Stage::Layout,
        Stage::Render,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Freq => "freq",
            Stage::Burst => "burst",
            Stage::Select => "select",
            Stage::Coword => "coword",
            Stage::Pfnet => "pfnet",
            Stage::Layout => "layout",
            Stage::Render => "render",
        }
    }

    /// Artifacts this stage writes, in manifest order.
    pub fn outputs(self) -> &'static [&'static str] {
        match self {
            Stage::Ingest => &[CORPUS],
            Stage::Freq => &[SERIES, FREQUENCY_TABLE, FREQUENCY_CHART],
            Stage::Burst => &[BURSTS],
            Stage::Select => &[VOCABULARY],
            Stage::Coword => &[COOCCURRENCE, COSINE],
            Stage::Pfnet => &[PFNET_EDGES],
            Stage::Layout => &[POSITIONS],
            Stage::Render => &[MAP, PAJEK],
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|stage| stage.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown stage `{s}`")))
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtifactStatus {
    Complete,
    /// Written by a stage that then failed.
    Partial,
}

impl ArtifactStatus {
    fn as_str(self) -> &'static str {
        match self {
            ArtifactStatus::Complete => "complete",
            ArtifactStatus::Partial => "partial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub artifact: String,
    pub stage: Stage,
    pub status: ArtifactStatus,
    /// Lowercase hex SHA-256 of the file contents.
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    /// `stage: cause` of the failure that produced partial entries.
    pub failure: Option<String>,
}

impl Manifest {
    pub fn get(&self, artifact: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.artifact == artifact)
    }

    /// `artifact,stage,status,sha256` rows, then a `# failed:` line if a
    /// stage failed.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("artifact,stage,status,sha256\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.artifact,
                e.stage,
                e.status.as_str(),
                e.sha256
            ));
        }
        if let Some(failure) = &self.failure {
            out.push_str(&format!("# failed: {}\n", failure.replace('\n', " ")));
        }
        out
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Scans `dir` for the known artifacts and digests them.
fn collect_manifest(dir: &Path, partial: &[&str], failure: Option<String>) -> Result<Manifest> {
    let mut entries = Vec::new();
    for stage in Stage::ALL {
        for &name in stage.outputs() {
            let path = dir.join(name);
            if !path.is_file() {
                continue;
            }
            let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
            entries.push(ManifestEntry {
                artifact: name.to_string(),
                stage,
                status: if partial.contains(&name) {
                    ArtifactStatus::Partial
                } else {
                    ArtifactStatus::Complete
                },
                sha256: sha256_hex(&bytes),
            });
        }
    }
    let manifest = Manifest { entries, failure };
    write_file(&dir.join(MANIFEST), &manifest.to_csv())?;
    Ok(manifest)
}

/// Records which files a stage has written so far.
struct Outputs<'a> {
    dir: &'a Path,
    written: Vec<&'static str>,
}

impl Outputs<'_> {
    fn write(&mut self, name: &'static str, contents: &str) -> Result<()> {
        write_file(&self.dir.join(name), contents)?;
        self.written.push(name);
        Ok(())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
}

fn remove_stale(dir: &Path, from: Stage) -> Result<()> {
    for stage in Stage::ALL.into_iter().filter(|s| *s >= from) {
        for name in stage.outputs() {
            let path = dir.join(name);
            if path.is_file() {
                std::fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
            }
        }
    }
    Ok(())
}

/// Runs one stage against the artifacts already in the output directory.
/// Outputs of this and every later stage are cleared first.
pub fn run_stage(stage: Stage, config: &PipelineConfig) -> Result<Manifest> {
    let wrap = |source: Error| Error::Stage {
        stage: stage.name(),
        source: Box::new(source),
    };
    config.validate().map_err(wrap)?;
    let dir = config.output.as_path();

    // The input is read before anything touches the output directory, so an
    // unreadable input leaves no trace.
    let input = match stage {
        Stage::Ingest => {
            Some(std::fs::read(&config.input).map_err(|e| wrap(Error::io(&config.input, e)))?)
        }
        _ => None,
    };
    std::fs::create_dir_all(dir).map_err(|e| wrap(Error::io(dir, e)))?;
    remove_stale(dir, stage).map_err(wrap)?;

    let mut out = Outputs {
        dir,
        written: Vec::new(),
    };
    let result = match stage {
        Stage::Ingest => ingest(config, input.as_deref().unwrap_or_default(), &mut out),
        Stage::Freq => freq(config, &mut out),
        Stage::Burst => burst(config, &mut out),
        Stage::Select => select(config, &mut out),
        Stage::Coword => coword(config, &mut out),
        Stage::Pfnet => pfnet_stage(config, &mut out),
        Stage::Layout => layout(config, &mut out),
        Stage::Render => render(config, &mut out),
    };
    match result {
        Ok(()) => collect_manifest(dir, &[], None).map_err(wrap),
        Err(e) => {
            let e = wrap(e);
            let cause = match &e {
                Error::Stage { source, .. } => format!("{stage}: {source}"),
                other => other.to_string(),
            };
            // best effort: the stage error is what the caller needs to see
            let _ = collect_manifest(dir, &out.written, Some(cause));
            Err(e)
        }
    }
}

/// Runs every stage in order, stopping at the first failure.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Manifest> {
    let mut manifest = None;
    for stage in Stage::ALL {
        manifest = Some(run_stage(stage, config)?);
    }
    Ok(manifest.expect("at least one stage"))
}

/// Reads `manifest.csv` from `dir`.
pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let text = read_file(&path)?;
    let mut entries = Vec::new();
    let mut failure = None;
    for line in text.lines().skip(1) {
        if let Some(f) = line.strip_prefix("# failed: ") {
            failure = Some(f.to_string());
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let [artifact, stage, status, sha256] = fields[..] else {
            return Err(Error::artifact(&path, format!("bad manifest row `{line}`")));
        };
        entries.push(ManifestEntry {
            artifact: artifact.to_string(),
            stage: stage.parse()?,
            status: match status {
                "complete" => ArtifactStatus::Complete,
                "partial" => ArtifactStatus::Partial,
                other => return Err(Error::artifact(&path, format!("bad status `{other}`"))),
            },
            sha256: sha256.to_string(),
        });
    }
    Ok(Manifest { entries, failure })
}

fn ingest(config: &PipelineConfig, input: &[u8], out: &mut Outputs) -> Result<()> {
    let corpus = load_corpus(input).map_err(|e| match e {
        Error::Parse { .. } | Error::DuplicateId(_) => {
            Error::artifact(&config.input, e.to_string())
        }
        other => other,
    })?;
    let corpus = filter_top_cited(&filter_titled(&corpus), config.fraction)?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    write_corpus(&out.path(CORPUS), &corpus)?;
    out.written.push(CORPUS);
    Ok(())
}

fn term_index(config: &PipelineConfig, out: &Outputs) -> Result<TermIndex> {
    let corpus = read_corpus(&out.path(CORPUS))?;
    let stoplist = config.stoplist.load()?;
    Ok(TermIndex::build(&corpus, &stoplist))
}

fn palette(config: &PipelineConfig, year_min: i32, year_max: i32) -> Result<PeriodPalette> {
    PeriodPalette::equal_width(year_min, year_max, &config.palette_colors)
}

fn freq(config: &PipelineConfig, out: &mut Outputs) -> Result<()> {
    let index = term_index(config, out)?;
    let series = count_series(&index, &index.vocabulary())?;
    let table = SeriesTable {
        year_min: index.year_min(),
        totals: crate::term_stats::yearly_totals(&index),
        series,
    };
    out.write(SERIES, &with_schema(SERIES_SCHEMA, &format_series(&table)))?;

    let mut top = rank_by_frequency(&table.series, &Stoplist::empty());
    top.truncate(config.chart_terms);
    out.write(
        FREQUENCY_TABLE,
        &export_frequency_table(&top, &table.series)?,
    )?;
    let palette = palette(config, index.year_min(), index.year_max())?;
    out.write(
        FREQUENCY_CHART,
        &render_frequency_chart(&top, &table.series, &palette)?,
    )
}

fn burst(config: &PipelineConfig, out: &mut Outputs) -> Result<()> {
    let table = parse_series(&out.path(SERIES))?;
    let mut intervals = Vec::new();
    for series in table.series.values() {
        intervals.extend(detect_bursts(series, &config.burst)?);
    }
    out.write(
        BURSTS,
        &with_schema(BURSTS_SCHEMA, &export_burst_list(&intervals)),
    )
}

fn read_bursts(out: &Outputs) -> Result<Vec<BurstInterval>> {
    let path = out.path(BURSTS);
    let body = read_tagged(&path, BURSTS_SCHEMA)?;
    parse_burst_list(&body).map_err(|e| Error::artifact(&path, e.to_string()))
}

fn select(config: &PipelineConfig, out: &mut Outputs) -> Result<()> {
    let table = parse_series(&out.path(SERIES))?;
    let intervals = read_bursts(out)?;
    let freq_ranking = rank_by_frequency(&table.series, &Stoplist::empty());
    let burst_ranking = rank_by_burstiness(&summarize_by_term(&intervals));
    let selection = select_map_vocabulary(&freq_ranking, &burst_ranking, config.vocabulary_target)?;
    out.write(
        VOCABULARY,
        &with_schema(
            VOCABULARY_SCHEMA,
            &format_vocabulary(&selection, &freq_ranking, &burst_ranking),
        ),
    )
}

fn coword(config: &PipelineConfig, out: &mut Outputs) -> Result<()> {
    let vocabulary = parse_vocabulary(&out.path(VOCABULARY))?;
    let index = term_index(config, out)?;
    let counts = build_cooccurrence(&index, &vocabulary.terms)?;
    out.write(
        COOCCURRENCE,
        &with_schema(COOCCURRENCE_SCHEMA, &export_counts(&counts)),
    )?;
    out.write(COSINE, &export_strengths(&cosine_normalize(&counts)))
}

fn pfnet_stage(config: &PipelineConfig, out: &mut Outputs) -> Result<()> {
    let path = out.path(COOCCURRENCE);
    let body = read_tagged(&path, COOCCURRENCE_SCHEMA)?;
    let counts = parse_counts(&body).map_err(|e| Error::artifact(&path, e.to_string()))?;
    let (labels, similarities) = match config.matrix {
        MatrixMode::Raw => (counts.terms.clone(), counts.similarities()),
        MatrixMode::Cosine => {
            let normalized = cosine_normalize(&counts);
            let s = normalized.similarities();
            (normalized.terms, s)
        }
    };
    let pruned = match similarity_to_distance(&labels, &similarities, config.distance) {
        Ok(graph) => {
            let params = match config.pfnet_q {
                Some(q) => PfnetParams::new(config.pfnet_r, q),
                None => PfnetParams::full(config.pfnet_r, graph.len()),
            };
            pfnet(&graph, params)?
        }
        Err(Error::NoEdges) => DissimilarityGraph::isolated(labels),
        Err(e) => return Err(e),
    };
    let edges = edge_records(&pruned, &counts)?;
    out.write(
        PFNET_EDGES,
        &with_schema(PFNET_SCHEMA, &format_edges(&edges)),
    )
}

/// The vocabulary as a graph whose links are the retained PFNet edges.
fn network_graph(terms: &[Term], edges: &[EdgeRecord], path: &Path) -> Result<DissimilarityGraph> {
    let index: BTreeMap<&Term, usize> = terms.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut dist =
        SquareMatrix::from_fn(terms.len(), |i, j| if i == j { 0.0 } else { f64::INFINITY });
    for e in edges {
        let (Some(&i), Some(&j)) = (index.get(&e.a), index.get(&e.b)) else {
            return Err(Error::artifact(
                path,
                format!("edge `{}`-`{}` leaves the vocabulary", e.a, e.b),
            ));
        };
        dist.set(i, j, e.distance);
        dist.set(j, i, e.distance);
    }
    DissimilarityGraph::new(terms.to_vec(), dist).map_err(|e| Error::artifact(path, e.to_string()))
}

fn layout(config: &PipelineConfig, out: &mut Outputs) -> Result<()> {
    let vocabulary = parse_vocabulary(&out.path(VOCABULARY))?;
    let edges_path = out.path(PFNET_EDGES);
    let edges = parse_edges(&edges_path)?;
    let graph = network_graph(&vocabulary.terms, &edges, &edges_path)?;
    let positions = fruchterman_reingold(&graph, &config.layout)?;
    out.write(
        POSITIONS,
        &with_schema(POSITIONS_SCHEMA, &export_positions(&positions)),
    )
}

fn render(config: &PipelineConfig, out: &mut Outputs) -> Result<()> {
    let vocabulary = parse_vocabulary(&out.path(VOCABULARY))?;
    let table = parse_series(&out.path(SERIES))?;
    let summaries = summarize_by_term(&read_bursts(out)?);
    let edges = parse_edges(&out.path(PFNET_EDGES))?;
    let positions_path = out.path(POSITIONS);
    let positions = parse_positions(&read_tagged(&positions_path, POSITIONS_SCHEMA)?)
        .map_err(|e| Error::artifact(&positions_path, e.to_string()))?;

    let year_max = table.year_min + table.totals.len() as i32 - 1;
    let palette = palette(config, table.year_min, year_max)?;
    let nodes = style_nodes(
        &vocabulary.terms,
        &summaries,
        &table.series,
        &positions,
        &palette,
        &config.style,
    )?;
    let index: BTreeMap<&Term, usize> = vocabulary
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect();
    let network = WeightedNetwork {
        labels: vocabulary.terms.iter().map(Term::to_string).collect(),
        edges: edges
            .iter()
            .filter_map(|e| Some((*index.get(&e.a)?, *index.get(&e.b)?, e.count)))
            .collect(),
    };
    let glyphs = style_edges(&network, &nodes, &config.style);
    let frame = Frame {
        width: config.layout.width,
        height: config.layout.height,
    };
    out.write(MAP, &render_svg(&nodes, &glyphs, frame, &palette))?;
    out.write(PAJEK, &export_pajek(&network))
}
