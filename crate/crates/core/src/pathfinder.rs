//! Pathfinder network scaling.
//!
//! PFNet(r, q) keeps a link only if no alternative path of at most `q` links
//! is shorter under the Minkowski path weight `(sum d^r)^(1/r)` (the largest
//! link distance when `r` is infinite). Ties keep the link.

use crate::corpus::Term;
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Nodes plus a symmetric distance matrix. Absent edges are `f64::INFINITY`;
/// the diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityGraph {
    labels: Vec<Term>,
    dist: SquareMatrix<f64>,
}

impl DissimilarityGraph {
    pub fn new(labels: Vec<Term>, mut dist: SquareMatrix<f64>) -> Result<Self> {
        let n = labels.len();
        if dist.size() != n {
            return Err(Error::InvalidParameter(format!(
                "{n} labels for a {0}x{0} distance matrix",
                dist.size()
            )));
        }
        for i in 0..n {
            dist.set(i, i, 0.0);
            for j in 0..n {
                let d = *dist.get(i, j);
                if i != j && !(d > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "distance {d} between `{}` and `{}` is not positive",
                        labels[i], labels[j]
                    )));
                }
                if d != *dist.get(j, i) {
                    return Err(Error::InvalidParameter(format!(
                        "distance matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { labels, dist })
    }

    /// A graph with the given nodes and no edges.
    pub fn isolated(labels: Vec<Term>) -> Self {
        let n = labels.len();
        let dist = SquareMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { f64::INFINITY });
        Self { labels, dist }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Term] {
        &self.labels
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        *self.dist.get(i, j)
    }

    pub fn distances(&self) -> &SquareMatrix<f64> {
        &self.dist
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.distance(i, j).is_finite()
    }

    /// Undirected edges `(i, j, distance)` with `i < j`, in row order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.has_edge(i, j))
            .map(|(i, j)| (i, j, self.distance(i, j)))
            .collect()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&j| self.has_edge(i, j))
    }

    /// Edge count in both conventions.
    pub fn edge_count(&self) -> EdgeCount {
        let undirected = self.edges().len();
        EdgeCount {
            undirected,
            matrix_entries: 2 * undirected,
        }
    }
}

/// Number of retained links: unordered pairs, and matrix entries (both
/// triangles).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeCount {
    pub undirected: usize,
    pub matrix_entries: usize,
}

pub fn edge_count(graph: &DissimilarityGraph) -> EdgeCount {
    graph.edge_count()
}

/// How similarities become distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// `d = 1 / s`
    #[default]
    Reciprocal,
    /// `d = (max s + 1) - s`
    MaxMinus,
}

impl std::str::FromStr for DistanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reciprocal" => Ok(Self::Reciprocal),
            "max-minus" => Ok(Self::MaxMinus),
            other => Err(Error::InvalidParameter(format!(
                "unknown distance mode `{other}` (expected reciprocal or max-minus)"
            ))),
        }
    }
}

/// Converts positive off-diagonal similarities into edge distances; zero
/// similarity means no edge.
pub fn similarity_to_distance(
    labels: &[Term],
    similarities: &SquareMatrix<f64>,
    mode: DistanceMode,
) -> Result<DissimilarityGraph> {
    let n = labels.len();
    let max = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| *similarities.get(i, j))
        .fold(0.0_f64, f64::max);
    if !(max > 0.0) {
        return Err(Error::NoEdges);
    }
    let dist = SquareMatrix::from_fn(n, |i, j| {
        let s = *similarities.get(i, j);
        if i == j {
            0.0
        } else if s > 0.0 {
            match mode {
                DistanceMode::Reciprocal => 1.0 / s,
                DistanceMode::MaxMinus => (max + 1.0) - s,
            }
        } else {
            f64::INFINITY
        }
    });
    DissimilarityGraph::new(labels.to_vec(), dist)
}

/// PFNet parameters: Minkowski exponent `r` (`f64::INFINITY` allowed) and
/// the longest alternative path `q`, in links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfnetParams {
    pub r: f64,
    pub q: usize,
}

impl PfnetParams {
    pub fn new(r: f64, q: usize) -> Self {
        Self { r, q }
    }

    /// `q = n - 1`: the triangle inequality holds across the whole network.
    pub fn full(r: f64, n: usize) -> Self {
        Self {
            r,
            q: n.saturating_sub(1).max(1),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.r >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "pfnet r = {} must be >= 1",
                self.r
            )));
        }
        let q_max = n.saturating_sub(1).max(1);
        if self.q < 1 || self.q > q_max {
            return Err(Error::InvalidParameter(format!(
                "pfnet q = {} not in [1, {q_max}]",
                self.q
            )));
        }
        Ok(())
    }
}

/// Minimum path weight over walks of at most `q` links, in the space where
/// weights combine by `+` (finite r, distances raised to r) or `max`.
fn min_path_weights(
    link: &SquareMatrix<f64>,
    q: usize,
    combine: impl Fn(f64, f64) -> f64,
) -> SquareMatrix<f64> {
    let n = link.size();
    let mut best = link.clone();
    for _ in 1..q {
        let next = SquareMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|m| combine(*best.get(i, m), *link.get(m, j)))
                .fold(*best.get(i, j), f64::min)
        });
        if next == best {
            break;
        }
        best = next;
    }
    best
}

/// Prunes `graph` to its PFNet(r, q). Retained links keep their distances.
pub fn pfnet(graph: &DissimilarityGraph, params: PfnetParams) -> Result<DissimilarityGraph> {
    params.validate(graph.len())?;
    let n = graph.len();
    if n < 2 {
        return Ok(graph.clone());
    }
    let (link, best) = if params.r.is_infinite() {
        let link = graph.dist.clone();
        let best = min_path_weights(&link, params.q, f64::max);
        (link, best)
    } else {
        let r = params.r;
        let link = graph
            .dist
            .map(|&d| if d.is_finite() { d.powf(r) } else { d });
        let best = min_path_weights(&link, params.q, |a, b| a + b);
        (link, best)
    };
    let dist = SquareMatrix::from_fn(n, |i, j| {
        let d = graph.distance(i, j);
        if i != j && d.is_finite() && *link.get(i, j) <= *best.get(i, j) {
            d
        } else if i == j {
            0.0
        } else {
            f64::INFINITY
        }
    });
    Ok(DissimilarityGraph {
        labels: graph.labels.clone(),
        dist,
    })
}
