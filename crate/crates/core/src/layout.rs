//! Fruchterman-Reingold force-directed layout.
//!
//! With `k = c * sqrt(width * height / n)`, every pair of nodes repels with
//! force `k^2 / d` and every edge attracts with `d^2 / k`. Each iteration
//! moves a node along its net force by at most the current temperature,
//! which starts at `width / 10` and falls linearly to zero. Edge distances
//! are not used; the layout is unweighted.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Term;
use crate::error::{Error, Result};
use crate::pathfinder::DissimilarityGraph;
use crate::term_stats::csv_error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutConfig {
    pub width: f64,
    pub height: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Scales the ideal edge length `k`.
    pub c: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            width: 1000.0,
            height: 1000.0,
            iterations: 500,
            seed: 0,
            c: 1.0,
        }
    }
}

impl LayoutConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.height > 0.0)
            || !self.width.is_finite()
            || !self.height.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "layout frame {}x{} must be positive",
                self.width, self.height
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter(
                "layout needs at least one iteration".into(),
            ));
        }
        if !(self.c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "layout c = {} must be positive",
                self.c
            )));
        }
        Ok(())
    }

    /// Ideal edge length for `n` nodes.
    pub fn ideal_length(&self, n: usize) -> f64 {
        self.c * (self.width * self.height / n as f64).sqrt()
    }

    pub fn initial_temperature(&self) -> f64 {
        self.width / 10.0
    }

    /// Temperature in effect during iteration `i` (0-based).
    pub fn temperature(&self, i: usize) -> f64 {
        self.initial_temperature() * (1.0 - i as f64 / self.iterations as f64)
    }
}

/// Node coordinates, parallel to `labels`.
#[derive(Debug, Clone, PartialEq)]
pub struct Positions {
    pub labels: Vec<Term>,
    pub coords: Vec<[f64; 2]>,
}

impl Positions {
    pub fn get(&self, term: &Term) -> Option<[f64; 2]> {
        self.labels
            .iter()
            .position(|t| t == term)
            .map(|i| self.coords[i])
    }

    pub fn within(&self, width: f64, height: f64) -> bool {
        self.coords.iter().all(|&[x, y]| {
            x.is_finite()
                && y.is_finite()
                && (0.0..=width).contains(&x)
                && (0.0..=height).contains(&y)
        })
    }
}

/// Smallest distance used for force evaluation, relative to `k`.
const DISTANCE_FLOOR: f64 = 1e-9;

fn accumulate_forces(
    graph: &DissimilarityGraph,
    coords: &[[f64; 2]],
    k: f64,
    mut kick: impl FnMut() -> [f64; 2],
) -> Vec<[f64; 2]> {
    let n = coords.len();
    let floor = DISTANCE_FLOOR * k;
    let mut force = vec![[0.0; 2]; n];
    for i in 0..n {
        for j in i + 1..n {
            let dx = coords[i][0] - coords[j][0];
            let dy = coords[i][1] - coords[j][1];
            let dist = dx.hypot(dy);
            let (dir, dist) = if dist < floor {
                (kick(), floor)
            } else {
                ([dx / dist, dy / dist], dist)
            };
            let repulse = k * k / dist;
            force[i][0] += dir[0] * repulse;
            force[i][1] += dir[1] * repulse;
            force[j][0] -= dir[0] * repulse;
            force[j][1] -= dir[1] * repulse;
            if graph.has_edge(i, j) {
                let attract = dist * dist / k;
                force[i][0] -= dir[0] * attract;
                force[i][1] -= dir[1] * attract;
                force[j][0] += dir[0] * attract;
                force[j][1] += dir[1] * attract;
            }
        }
    }
    force
}

/// Net force on every node. Coincident nodes are pushed apart along +x.
pub fn layout_forces(graph: &DissimilarityGraph, coords: &[[f64; 2]], k: f64) -> Vec<[f64; 2]> {
    accumulate_forces(graph, coords, k, || [1.0, 0.0])
}

/// Potential whose negative gradient is the force field:
///
/// ```text
/// U = sum_edges d^3 / (3k) + sum_pairs k^2 * ln(D / d)
/// ```
///
/// where `D` is the frame diagonal, so every term is non-negative for
/// positions inside the frame. Distances are floored like the forces.
pub fn layout_energy(
    graph: &DissimilarityGraph,
    positions: &Positions,
    config: &LayoutConfig,
) -> f64 {
    let coords = &positions.coords;
    let n = coords.len();
    if n == 0 {
        return 0.0;
    }
    let k = config.ideal_length(n);
    let diagonal = config.width.hypot(config.height);
    let floor = DISTANCE_FLOOR * k;
    let mut energy = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = (coords[i][0] - coords[j][0])
                .hypot(coords[i][1] - coords[j][1])
                .max(floor);
            energy += k * k * (diagonal / d).ln();
            if graph.has_edge(i, j) {
                energy += d * d * d / (3.0 * k);
            }
        }
    }
    energy
}

/// Lays out `graph` inside `[0, width] x [0, height]`.
///
/// Initial positions are uniform in the frame, drawn from `config.seed`;
/// the same graph and config always give the same coordinates.
pub fn fruchterman_reingold(
    graph: &DissimilarityGraph,
    config: &LayoutConfig,
) -> Result<Positions> {
    config.validate()?;
    let n = graph.len();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut coords: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            [
                rng.gen::<f64>() * config.width,
                rng.gen::<f64>() * config.height,
            ]
        })
        .collect();
    let mut kicks = ChaCha8Rng::seed_from_u64(config.seed);
    kicks.set_stream(1);
    let k = config.ideal_length(n);

    for iteration in 0..config.iterations {
        let temperature = config.temperature(iteration);
        let force = accumulate_forces(graph, &coords, k, || {
            let angle = kicks.gen::<f64>() * std::f64::consts::TAU;
            [angle.cos(), angle.sin()]
        });
        for (p, f) in coords.iter_mut().zip(&force) {
            let len = f[0].hypot(f[1]);
            if len > 0.0 {
                let step = len.min(temperature) / len;
                p[0] = (p[0] + f[0] * step).clamp(0.0, config.width);
                p[1] = (p[1] + f[1] * step).clamp(0.0, config.height);
            }
        }
    }
    Ok(Positions {
        labels: graph.labels().to_vec(),
        coords,
    })
}

/// Rows `label,x,y` with four decimals, header first.
pub fn export_positions(positions: &Positions) -> String {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    out.write_record(["node", "x", "y"])
        .expect("in-memory write");
    for (label, [x, y]) in positions.labels.iter().zip(&positions.coords) {
        out.write_record([label.to_string(), format!("{x:.4}"), format!("{y:.4}")])
            .expect("in-memory write");
    }
    String::from_utf8(out.into_inner().expect("in-memory write")).expect("utf-8")
}

pub fn parse_positions(text: &str) -> Result<Positions> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let mut labels = Vec::new();
    let mut coords = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(csv_error)?;
        let bad = |message: String| Error::Parse { line, message };
        if record.len() != 3 {
            return Err(bad(format!("expected 3 fields, found {}", record.len())));
        }
        labels.push(Term::new(&record[0]).ok_or_else(|| bad("empty node label".into()))?);
        let x: f64 = record[1].parse().map_err(|e| bad(format!("x: {e}")))?;
        let y: f64 = record[2].parse().map_err(|e| bad(format!("y: {e}")))?;
        coords.push([x, y]);
    }
    Ok(Positions { labels, coords })
}
