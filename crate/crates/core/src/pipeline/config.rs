//! Pipeline configuration: a flat TOML key-value file.
//!
//! ```toml
//! input = "corpus.jsonl"
//! output = "out"
//! fraction = 0.1
//! stoplist = "builtin"        # or "none", or a path to a one-term-per-line file
//! burst_s = 2.0
//! burst_gamma = 1.0
//! burst_states = 2
//! vocabulary_target = 50
//! matrix = "raw"              # or "cosine"
//! distance = "reciprocal"     # or "max-minus"
//! pfnet_r = 6.0               # `inf` for infinite r
//! # pfnet_q = 49              # defaults to n - 1
//! layout_width = 1000.0
//! layout_height = 1000.0
//! layout_iterations = 500
//! seed = 0
//! ```
//!
//! Relative paths resolve against the config file's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::burst::BurstConfig;
use crate::corpus::{Stoplist, DEFAULT_TOP_FRACTION};
use crate::error::{Error, Result};
use crate::layout::LayoutConfig;
use crate::map_render::{
    FillSource, SizeSource, StyleOptions, DEFAULT_PERIOD_COLORS, MAX_CHART_TERMS,
};
use crate::pathfinder::DistanceMode;

/// Which co-word matrix feeds PFNet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixMode {
    #[default]
    Raw,
    Cosine,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StoplistSource {
    Builtin,
    None,
    File(PathBuf),
}

impl StoplistSource {
    pub fn load(&self) -> Result<Stoplist> {
        match self {
            StoplistSource::Builtin => Ok(Stoplist::builtin()),
            StoplistSource::None => Ok(Stoplist::empty()),
            StoplistSource::File(path) => std::fs::read_to_string(path)
                .map(|text| Stoplist::parse(&text))
                .map_err(|e| Error::io(path, e)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub fraction: f64,
    pub stoplist: StoplistSource,
    pub burst: BurstConfig,
    pub vocabulary_target: usize,
    pub matrix: MatrixMode,
    pub distance: DistanceMode,
    pub pfnet_r: f64,
    /// `None` means `n - 1`.
    pub pfnet_q: Option<usize>,
    pub layout: LayoutConfig,
    pub palette_colors: Vec<String>,
    pub style: StyleOptions,
    /// Number of top-frequency terms in the frequency table and chart.
    pub chart_terms: usize,
}

impl PipelineConfig {
    /// Defaults for everything but the input and output paths.
    pub fn new(input: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            output: output.into(),
            fraction: DEFAULT_TOP_FRACTION,
            stoplist: StoplistSource::Builtin,
            burst: BurstConfig::default(),
            vocabulary_target: 50,
            matrix: MatrixMode::Raw,
            distance: DistanceMode::Reciprocal,
            pfnet_r: 6.0,
            pfnet_q: None,
            layout: LayoutConfig::default(),
            palette_colors: DEFAULT_PERIOD_COLORS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            style: StyleOptions::default(),
            chart_terms: 10,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        Self::from_toml_str(&text, base)
    }

    pub fn from_toml_str(text: &str, base: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let resolve = |p: &str| {
            let p = Path::new(p);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        let input = raw
            .input
            .as_deref()
            .map(resolve)
            .ok_or_else(|| Error::Config("missing `input`".into()))?;
        let output = raw
            .output
            .as_deref()
            .map(resolve)
            .unwrap_or_else(|| base.join("out"));
        let mut config = Self::new(input, output);

        if let Some(v) = raw.fraction {
            config.fraction = v;
        }
        if let Some(v) = raw.stoplist {
            config.stoplist = match v.as_str() {
                "builtin" => StoplistSource::Builtin,
                "none" => StoplistSource::None,
                path => StoplistSource::File(resolve(path)),
            };
        }
        let burst = &mut config.burst;
        burst.s = raw.burst_s.unwrap_or(burst.s);
        burst.gamma = raw.burst_gamma.unwrap_or(burst.gamma);
        burst.states = raw.burst_states.unwrap_or(burst.states);
        burst.epsilon = raw.burst_epsilon.unwrap_or(burst.epsilon);
        if let Some(v) = raw.vocabulary_target {
            config.vocabulary_target = v;
        }
        if let Some(v) = raw.matrix {
            config.matrix = match v.as_str() {
                "raw" => MatrixMode::Raw,
                "cosine" => MatrixMode::Cosine,
                other => {
                    return Err(Error::Config(format!(
                        "unknown matrix `{other}` (raw or cosine)"
                    )))
                }
            };
        }
        if let Some(v) = raw.distance {
            config.distance = v.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
        }
        if let Some(v) = raw.pfnet_r {
            config.pfnet_r = v;
        }
        config.pfnet_q = raw.pfnet_q;
        let layout = &mut config.layout;
        layout.width = raw.layout_width.unwrap_or(layout.width);
        layout.height = raw.layout_height.unwrap_or(layout.height);
        layout.iterations = raw.layout_iterations.unwrap_or(layout.iterations);
        layout.c = raw.layout_c.unwrap_or(layout.c);
        layout.seed = raw.seed.unwrap_or(layout.seed);
        if let Some(v) = raw.palette_colors {
            config.palette_colors = v;
        }
        let style = &mut config.style;
        if let Some(v) = raw.size_source {
            style.size_source = match v.as_str() {
                "level" => SizeSource::Level,
                "weight" => SizeSource::Weight,
                other => {
                    return Err(Error::Config(format!(
                        "unknown size_source `{other}` (level or weight)"
                    )))
                }
            };
        }
        if let Some(v) = raw.fill_source {
            style.fill_source = match v.as_str() {
                "first-burst" => FillSource::FirstBurst,
                "max-weight-burst" => FillSource::MaxWeightBurst,
                other => {
                    return Err(Error::Config(format!(
                        "unknown fill_source `{other}` (first-burst or max-weight-burst)"
                    )))
                }
            };
        }
        style.include_burst_free = raw.include_burst_free.unwrap_or(style.include_burst_free);
        if let Some(v) = raw.chart_terms {
            config.chart_terms = v;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |e: Error| Error::Config(e.to_string());
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::Config(format!(
                "fraction {} not in (0, 1]",
                self.fraction
            )));
        }
        self.burst.validate().map_err(invalid)?;
        if self.vocabulary_target == 0 {
            return Err(Error::Config("vocabulary_target must be at least 1".into()));
        }
        if !(self.pfnet_r >= 1.0) {
            return Err(Error::Config(format!(
                "pfnet_r = {} must be >= 1",
                self.pfnet_r
            )));
        }
        if self.pfnet_q == Some(0) {
            return Err(Error::Config("pfnet_q must be at least 1".into()));
        }
        self.layout.validate().map_err(invalid)?;
        if self.palette_colors.is_empty() {
            return Err(Error::Config("palette_colors is empty".into()));
        }
        if self.chart_terms > MAX_CHART_TERMS {
            return Err(Error::Config(format!(
                "chart_terms must be at most {MAX_CHART_TERMS}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    input: Option<String>,
    output: Option<String>,
    fraction: Option<f64>,
    stoplist: Option<String>,
    burst_s: Option<f64>,
    burst_gamma: Option<f64>,
    burst_states: Option<usize>,
    burst_epsilon: Option<f64>,
    vocabulary_target: Option<usize>,
    matrix: Option<String>,
    distance: Option<String>,
    pfnet_r: Option<f64>,
    pfnet_q: Option<usize>,
    layout_width: Option<f64>,
    layout_height: Option<f64>,
    layout_iterations: Option<usize>,
    layout_c: Option<f64>,
    seed: Option<u64>,
    palette_colors: Option<Vec<String>>,
    size_source: Option<String>,
    fill_source: Option<String>,
    include_burst_free: Option<bool>,
    chart_terms: Option<usize>,
}
