//! Topic map rendering and network export.
//!
//! Glyph encoding of the map:
//!
//! * circle radius: maximum burst level or maximum burst weight, mapped
//!   affinely from `[0, max]` onto `[r_min, r_max]`;
//! * inner fill: period color of the year the first burst starts;
//! * ring: period color of the year the term was used most often;
//! * edge width: co-occurrence count, mapped affinely from `[0, max]` onto
//!   `[w_min, w_max]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::burst::BurstSummary;
use crate::corpus::Term;
use crate::coword::CoWordMatrix;
use crate::error::{Error, Result};
use crate::layout::Positions;
use crate::pathfinder::DissimilarityGraph;
use crate::term_stats::TermTimeSeries;

pub const DEFAULT_PERIOD_COLORS: [&str; 5] = ["green", "yellow", "orange", "red", "black"];

/// One period of the palette; years inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodBin {
    pub start: i32,
    pub end: i32,
    pub color: String,
}

/// Contiguous, non-overlapping year bins with a color each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodPalette {
    bins: Vec<PeriodBin>,
}

impl PeriodPalette {
    pub fn new(bins: Vec<PeriodBin>) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::InvalidParameter("palette has no bins".into()));
        }
        for (i, bin) in bins.iter().enumerate() {
            if bin.start > bin.end {
                return Err(Error::InvalidParameter(format!(
                    "palette bin {}-{} is empty",
                    bin.start, bin.end
                )));
            }
            if i > 0 && bin.start != bins[i - 1].end + 1 {
                return Err(Error::InvalidParameter(format!(
                    "palette bin {}-{} does not follow {}-{}",
                    bin.start,
                    bin.end,
                    bins[i - 1].start,
                    bins[i - 1].end
                )));
            }
        }
        Ok(Self { bins })
    }

    /// 1982-85 green, 1986-89 yellow, 1990-93 orange, 1994-97 red,
    /// 1998-2001 black.
    pub fn five_period_1982_2001() -> Self {
        Self::equal_width(1982, 2001, &DEFAULT_PERIOD_COLORS).expect("valid range")
    }

    /// Splits `[year_min, year_max]` into one bin per color (fewer if there
    /// are fewer years than colors). Earlier bins take the remainder years.
    pub fn equal_width<S: AsRef<str>>(year_min: i32, year_max: i32, colors: &[S]) -> Result<Self> {
        if year_min > year_max || colors.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "cannot build a palette over {year_min}-{year_max} with {} colors",
                colors.len()
            )));
        }
        let years = (year_max - year_min + 1) as usize;
        let count = colors.len().min(years);
        let (base, extra) = (years / count, years % count);
        let mut start = year_min;
        let bins = colors[..count]
            .iter()
            .enumerate()
            .map(|(i, color)| {
                let width = (base + usize::from(i < extra)) as i32;
                let bin = PeriodBin {
                    start,
                    end: start + width - 1,
                    color: color.as_ref().to_string(),
                };
                start += width;
                bin
            })
            .collect();
        Self::new(bins)
    }

    pub fn bins(&self) -> &[PeriodBin] {
        &self.bins
    }

    pub fn year_min(&self) -> i32 {
        self.bins[0].start
    }

    pub fn year_max(&self) -> i32 {
        self.bins[self.bins.len() - 1].end
    }

    pub fn color_for(&self, year: i32) -> Result<&str> {
        self.bins
            .iter()
            .find(|b| (b.start..=b.end).contains(&year))
            .map(|b| b.color.as_str())
            .ok_or(Error::YearOutOfRange {
                year,
                min: self.year_min(),
                max: self.year_max(),
            })
    }

    pub fn contains_color(&self, color: &str) -> bool {
        self.bins.iter().any(|b| b.color == color)
    }
}

pub fn assign_period_color(year: i32, palette: &PeriodPalette) -> Result<&str> {
    palette.color_for(year)
}

/// What drives circle size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SizeSource {
    Level,
    #[default]
    Weight,
}

/// Which burst's start year colors the inner fill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FillSource {
    #[default]
    FirstBurst,
    MaxWeightBurst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StyleOptions {
    pub size_source: SizeSource,
    pub fill_source: FillSource,
    pub include_burst_free: bool,
    pub r_min: f64,
    pub r_max: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub neutral_fill: String,
}

impl Default for StyleOptions {
    fn default() -> Self {
        Self {
            size_source: SizeSource::default(),
            fill_source: FillSource::default(),
            include_burst_free: false,
            r_min: 4.0,
            r_max: 20.0,
            w_min: 0.5,
            w_max: 6.0,
            neutral_fill: "lightgray".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeGlyph {
    pub term: Term,
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub fill: String,
    pub ring: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeGlyph {
    pub source: Term,
    pub target: Term,
    pub from: [f64; 2],
    pub to: [f64; 2],
    pub count: u64,
    pub width: f64,
}

fn affine(value: f64, max: f64, lo: f64, hi: f64) -> f64 {
    if max > 0.0 {
        lo + (hi - lo) * (value / max)
    } else {
        lo
    }
}

/// Styles the vocabulary terms as map nodes. Burst-free terms are left out
/// unless `include_burst_free` is set, in which case they get the neutral
/// fill and the minimum radius.
pub fn style_nodes(
    vocabulary: &[Term],
    summaries: &BTreeMap<Term, BurstSummary>,
    series: &BTreeMap<Term, TermTimeSeries>,
    positions: &Positions,
    palette: &PeriodPalette,
    options: &StyleOptions,
) -> Result<Vec<NodeGlyph>> {
    let none = BurstSummary {
        burst_count: 0,
        max_level: 0,
        max_weight: 0.0,
        first_start_year: None,
        max_weight_start_year: None,
    };
    let mut styled = Vec::new();
    for term in vocabulary {
        let s = series
            .get(term)
            .ok_or_else(|| Error::UnknownTerm(term.to_string()))?;
        let peak = s
            .peak_year()
            .ok_or_else(|| Error::ZeroFrequency(term.to_string()))?;
        let summary = summaries.get(term).unwrap_or(&none);
        if !summary.has_burst() && !options.include_burst_free {
            continue;
        }
        let [x, y] = positions
            .get(term)
            .ok_or_else(|| Error::UnknownTerm(term.to_string()))?;
        let size = match options.size_source {
            SizeSource::Level => summary.max_level as f64,
            SizeSource::Weight => summary.max_weight,
        };
        let fill_year = match options.fill_source {
            FillSource::FirstBurst => summary.first_start_year,
            FillSource::MaxWeightBurst => summary.max_weight_start_year,
        };
        let fill = match fill_year.filter(|_| summary.has_burst()) {
            Some(year) => palette.color_for(year)?.to_string(),
            None => options.neutral_fill.clone(),
        };
        let ring = palette.color_for(peak)?.to_string();
        styled.push((term.clone(), x, y, size, fill, ring));
    }
    let max_size = styled.iter().map(|n| n.3).fold(0.0, f64::max);
    Ok(styled
        .into_iter()
        .map(|(term, x, y, size, fill, ring)| NodeGlyph {
            term,
            x,
            y,
            radius: affine(size, max_size, options.r_min, options.r_max),
            fill,
            ring,
        })
        .collect())
}

/// A pruned network with co-occurrence counts on its links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedNetwork {
    pub labels: Vec<String>,
    /// `(i, j, count)` with 0-based node indices.
    pub edges: Vec<(usize, usize, u64)>,
}

impl WeightedNetwork {
    /// Links of `graph`, weighted by the matching counts in `counts`.
    pub fn from_graph(graph: &DissimilarityGraph, counts: &CoWordMatrix) -> Result<Self> {
        let index: HashMap<&Term, usize> = counts
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();
        let lookup = |t: &Term| {
            index
                .get(t)
                .copied()
                .ok_or_else(|| Error::UnknownTerm(t.to_string()))
        };
        let labels = graph.labels();
        let edges = graph
            .edges()
            .into_iter()
            .map(|(i, j, _)| {
                Ok((
                    i,
                    j,
                    counts.cooccurrence(lookup(&labels[i])?, lookup(&labels[j])?),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            labels: labels.iter().map(Term::to_string).collect(),
            edges,
        })
    }
}

/// Edge glyphs for the links whose endpoints are both drawn.
pub fn style_edges(
    network: &WeightedNetwork,
    nodes: &[NodeGlyph],
    options: &StyleOptions,
) -> Vec<EdgeGlyph> {
    let drawn: HashMap<&str, &NodeGlyph> = nodes.iter().map(|n| (n.term.as_str(), n)).collect();
    let visible: Vec<_> = network
        .edges
        .iter()
        .filter_map(|&(i, j, count)| {
            let a = drawn.get(network.labels[i].as_str())?;
            let b = drawn.get(network.labels[j].as_str())?;
            Some((a, b, count))
        })
        .collect();
    let max = visible.iter().map(|e| e.2).max().unwrap_or(0) as f64;
    visible
        .into_iter()
        .map(|(a, b, count)| EdgeGlyph {
            source: a.term.clone(),
            target: b.term.clone(),
            from: [a.x, a.y],
            to: [b.x, b.y],
            count,
            width: affine(count as f64, max, options.w_min, options.w_max),
        })
        .collect()
}

fn escape_xml(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Drawing area of the map, in layout units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub width: f64,
    pub height: f64,
}

const MARGIN: f64 = 40.0;
const LEGEND_HEIGHT: f64 = 70.0;

fn svg_open(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{width:.2}" height="{height:.2}" fill="white"/>"#
    );
}

fn legend_swatch(out: &mut String, x: f64, y: f64, color: &str, label: &str) {
    let _ = writeln!(
        out,
        r##"<rect x="{x:.2}" y="{:.2}" width="14" height="14" fill="{}" stroke="#333333"/>"##,
        y - 11.0,
        escape_xml(color)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{y:.2}">{}</text>"#,
        x + 20.0,
        escape_xml(label)
    );
}

/// Standalone SVG 1.1 topic map: edges beneath nodes, one label per node and
/// a period legend. Identical input gives identical bytes.
pub fn render_svg(
    nodes: &[NodeGlyph],
    edges: &[EdgeGlyph],
    frame: Frame,
    palette: &PeriodPalette,
) -> String {
    let width = frame.width + 2.0 * MARGIN;
    let height = frame.height + 2.0 * MARGIN + LEGEND_HEIGHT;
    let mut out = String::new();
    svg_open(&mut out, width, height);
    let _ = writeln!(out, r#"<g transform="translate({MARGIN:.2},{MARGIN:.2})">"#);

    let _ = writeln!(
        out,
        r##"<g id="edges" stroke="#666666" stroke-opacity="0.7">"##
    );
    for e in edges {
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke-width="{:.2}"><title>{} - {}: {}</title></line>"#,
            e.from[0],
            e.from[1],
            e.to[0],
            e.to[1],
            e.width,
            escape_xml(e.source.as_str()),
            escape_xml(e.target.as_str()),
            e.count
        );
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r#"<g id="nodes" stroke-width="3">"#);
    for n in nodes {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{}" stroke="{}"/>"#,
            n.x,
            n.y,
            n.radius,
            escape_xml(&n.fill),
            escape_xml(&n.ring)
        );
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(
        out,
        r#"<g id="labels" font-family="sans-serif" font-size="11" text-anchor="middle">"#
    );
    for n in nodes {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            n.x,
            n.y - n.radius - 4.0,
            escape_xml(n.term.as_str())
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</g>");

    let _ = writeln!(
        out,
        r#"<g id="legend" font-family="sans-serif" font-size="11">"#
    );
    let top = frame.height + 2.0 * MARGIN;
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN:.2}" y="{:.2}">fill: start of first burst; ring: year of peak frequency</text>"#,
        top + 14.0
    );
    for (i, bin) in palette.bins().iter().enumerate() {
        let label = format!("{}-{}", bin.start, bin.end);
        legend_swatch(
            &mut out,
            MARGIN + 110.0 * i as f64,
            top + 40.0,
            &bin.color,
            &label,
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}

/// Line colors for the frequency chart.
const LINE_COLORS: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939",
];

/// Most terms a frequency chart will draw.
pub const MAX_CHART_TERMS: usize = 12;

/// Yearly counts of up to twelve terms as one polyline each, over period
/// bands tinted with the palette colors.
pub fn render_frequency_chart(
    terms: &[Term],
    series: &BTreeMap<Term, TermTimeSeries>,
    palette: &PeriodPalette,
) -> Result<String> {
    if terms.len() > MAX_CHART_TERMS {
        return Err(Error::InvalidParameter(format!(
            "frequency chart draws at most {MAX_CHART_TERMS} terms, got {}",
            terms.len()
        )));
    }
    let lines = terms
        .iter()
        .map(|t| {
            series
                .get(t)
                .ok_or_else(|| Error::UnknownTerm(t.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (year_min, year_max) = match lines.first() {
        Some(s) => (s.year_min, s.year_max()),
        None => (palette.year_min(), palette.year_max()),
    };
    let y_top = lines
        .iter()
        .flat_map(|s| s.r.iter().copied())
        .max()
        .unwrap_or(0)
        .max(1) as f64;

    let (plot_w, plot_h) = (800.0, 400.0);
    let (left, top) = (60.0, 30.0);
    let legend_w = 220.0;
    let width = left + plot_w + legend_w;
    let height = top + plot_h + 60.0;
    let span = (year_max - year_min).max(1) as f64;
    let x_of = |year: f64| left + (year - year_min as f64) / span * plot_w;
    let y_of = |count: f64| top + plot_h - count / y_top * plot_h;

    let mut out = String::new();
    svg_open(&mut out, width, height);

    let _ = writeln!(out, r#"<g id="periods" fill-opacity="0.12">"#);
    for bin in palette.bins() {
        let lo = (bin.start as f64 - 0.5).max(year_min as f64);
        let hi = (bin.end as f64 + 0.5).min(year_max as f64);
        if hi <= lo {
            continue;
        }
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{plot_h:.2}" fill="{}"/>"#,
            x_of(lo),
            x_of(hi) - x_of(lo),
            escape_xml(&bin.color)
        );
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(
        out,
        r##"<g id="axes" stroke="#000000" font-family="sans-serif" font-size="10">"##
    );
    let _ = writeln!(
        out,
        r#"<line x1="{left:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
        top + plot_h,
        left + plot_w,
        top + plot_h
    );
    let _ = writeln!(
        out,
        r#"<line x1="{left:.2}" y1="{top:.2}" x2="{left:.2}" y2="{:.2}"/>"#,
        top + plot_h
    );
    for year in year_min..=year_max {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" stroke="none" text-anchor="middle">{year}</text>"#,
            x_of(year as f64),
            top + plot_h + 14.0
        );
    }
    for step in 0..=4 {
        let count = y_top * step as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" stroke="none" text-anchor="end">{count:.0}</text>"#,
            left - 6.0,
            y_of(count) + 3.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" stroke="none" text-anchor="middle">year</text>"#,
        left + plot_w / 2.0,
        top + plot_h + 34.0
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.2}" stroke="none" text-anchor="middle" transform="rotate(-90 14 {:.2})">documents</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    );
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r#"<g id="series" fill="none" stroke-width="2">"#);
    for (i, s) in lines.iter().enumerate() {
        let points: Vec<String> =
            s.r.iter()
                .enumerate()
                .map(|(t, &c)| format!("{:.2},{:.2}", x_of(s.year(t) as f64), y_of(c as f64)))
                .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" stroke="{}"/>"#,
            points.join(" "),
            LINE_COLORS[i % LINE_COLORS.len()]
        );
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(
        out,
        r#"<g id="legend" font-family="sans-serif" font-size="11">"#
    );
    for (i, term) in terms.iter().enumerate() {
        legend_swatch(
            &mut out,
            left + plot_w + 20.0,
            top + 14.0 + 20.0 * i as f64,
            LINE_COLORS[i % LINE_COLORS.len()],
            term.as_str(),
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

/// Pajek network text: `*Vertices n`, quoted 1-based labels, then an
/// undirected `*Edges` section with counts as weights. Double quotes inside
/// labels become single quotes since the format has no escape.
pub fn export_pajek(network: &WeightedNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "*Vertices {}", network.labels.len());
    for (i, label) in network.labels.iter().enumerate() {
        let _ = writeln!(out, "{} \"{}\"", i + 1, label.replace('"', "'"));
    }
    let _ = writeln!(out, "*Edges");
    for &(i, j, w) in &network.edges {
        let _ = writeln!(out, "{} {} {w}", i + 1, j + 1);
    }
    out
}

pub fn parse_pajek(text: &str) -> Result<WeightedNetwork> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let bad = |line: usize, message: &str| Error::Parse {
        line,
        message: message.to_string(),
    };
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| bad(1, "missing *Vertices header"))?;
    let count: usize = header
        .strip_prefix("*Vertices")
        .or_else(|| header.strip_prefix("*vertices"))
        .ok_or_else(|| bad(line_no, "expected *Vertices"))?
        .trim()
        .parse()
        .map_err(|_| bad(line_no, "bad vertex count"))?;
    let mut labels = Vec::with_capacity(count);
    for expected in 1..=count {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| bad(line_no, "missing vertex line"))?;
        let (idx, rest) = line
            .split_once(' ')
            .ok_or_else(|| bad(line_no, "bad vertex line"))?;
        if idx.parse::<usize>().ok() != Some(expected) {
            return Err(bad(line_no, "vertex indices must run 1..n"));
        }
        let label = rest
            .trim()
            .strip_prefix('"')
            .and_then(|r| r.strip_suffix('"'))
            .ok_or_else(|| bad(line_no, "vertex label must be quoted"))?;
        labels.push(label.to_string());
    }
    let (line_no, edges_header) = lines
        .next()
        .ok_or_else(|| bad(count + 2, "missing *Edges"))?;
    if !edges_header.eq_ignore_ascii_case("*edges") {
        return Err(bad(line_no, "expected *Edges"));
    }
    let mut edges = Vec::new();
    for (line_no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [a, b, w] = fields[..] else {
            return Err(bad(line_no, "edge line needs three fields"));
        };
        let node = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(v) if (1..=count).contains(&v) => Ok(v - 1),
                _ => Err(bad(line_no, "edge endpoint out of range")),
            }
        };
        let weight = w.parse().map_err(|_| bad(line_no, "bad edge weight"))?;
        edges.push((node(a)?, node(b)?, weight));
    }
    Ok(WeightedNetwork { labels, edges })
}
