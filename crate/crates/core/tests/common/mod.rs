//! Brute-force reference implementations shared by the integration tests
//! and the acceptance harness.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use topicburst_core::corpus::Term;
use topicburst_core::layout::{layout_energy, LayoutConfig, Positions};
use topicburst_core::matrix::SquareMatrix;
use topicburst_core::pathfinder::DissimilarityGraph;

pub fn term(s: &str) -> Term {
    Term::new(s).expect("non-empty term")
}

pub fn labels(n: usize) -> Vec<Term> {
    (0..n).map(|i| term(&format!("n{i}"))).collect()
}

// ---------------------------------------------------------------- bursts

/// Cost of one year in a state with rate `p`.
fn sigma(r: u64, d: u64, p: f64) -> f64 {
    let hits = r as f64;
    let misses = (d - r) as f64;
    -(hits * p.ln() + misses * (1.0 - p).ln())
}

fn tau(from: usize, to: usize, gamma: f64, n: usize) -> f64 {
    if to <= from {
        return 0.0;
    }
    (to - from) as f64 * gamma * (n as f64).ln()
}

pub struct BurstOracle {
    pub min_cost: f64,
    /// Every state sequence attaining `min_cost`, in lexicographic order.
    pub argmins: Vec<Vec<usize>>,
}

/// Enumerates all `k^n` state sequences, starting from state 0 before the
/// first year. Costs accumulate left to right, transition then emission.
pub fn burst_oracle(
    r: &[u64],
    d: &[u64],
    s: f64,
    gamma: f64,
    k: usize,
    eps: f64,
) -> Option<BurstOracle> {
    let n = r.len();
    let (hits, docs): (u64, u64) = (r.iter().sum(), d.iter().sum());
    if hits == 0 || docs == 0 {
        return None;
    }
    let p0 = hits as f64 / docs as f64;
    let rates: Vec<f64> = (0..k)
        .map(|i| (p0 * s.powi(i as i32)).min(1.0 - eps))
        .collect();
    let mut best = f64::INFINITY;
    let mut argmins = Vec::new();
    let mut seq = vec![0usize; n];
    loop {
        let mut cost = 0.0;
        let mut prev = 0;
        for t in 0..n {
            cost = cost + tau(prev, seq[t], gamma, n) + sigma(r[t], d[t], rates[seq[t]]);
            prev = seq[t];
        }
        if cost < best {
            best = cost;
            argmins.clear();
        }
        if cost == best {
            argmins.push(seq.clone());
        }
        // odometer increment, last position fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Some(BurstOracle {
                    min_cost: best,
                    argmins,
                });
            }
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < k {
                break;
            }
            seq[pos] = 0;
        }
    }
}

/// A random `(r, d)` series with `1 <= n <= max_n` years.
pub fn random_series(rng: &mut impl Rng, max_n: usize, max_d: u64) -> (Vec<u64>, Vec<u64>) {
    let n = rng.gen_range(1..=max_n);
    let d: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=max_d)).collect();
    let r = d.iter().map(|&dt| rng.gen_range(0..=dt)).collect();
    (r, d)
}

// --------------------------------------------------------------- graphs

/// Connected graph on `n` nodes with pairwise distinct distances in (0, 1].
pub fn random_connected_graph(
    rng: &mut impl Rng,
    n: usize,
    extra_edge_prob: f64,
) -> DissimilarityGraph {
    let mut edges = BTreeSet::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        let child = order[i];
        edges.insert((parent.min(child), parent.max(child)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(extra_edge_prob) {
                edges.insert((i, j));
            }
        }
    }
    let mut weights: Vec<u32> = (1..=edges.len() as u32).collect();
    weights.shuffle(rng);
    let scale = edges.len() as f64;
    let mut dist = SquareMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { f64::INFINITY });
    for (&(i, j), &w) in edges.iter().zip(&weights) {
        // jitter keeps distances distinct while avoiding round numbers
        let v = (w as f64 + rng.gen_range(0.0..0.5)) / scale;
        dist.set(i, j, v);
        dist.set(j, i, v);
    }
    DissimilarityGraph::new(labels(n), dist).expect("valid graph")
}

pub fn edge_set(graph: &DissimilarityGraph) -> BTreeSet<(usize, usize)> {
    graph.edges().into_iter().map(|(i, j, _)| (i, j)).collect()
}

/// Minkowski weight of a path given its link distances.
fn path_weight(links: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        links.iter().copied().fold(0.0, f64::max)
    } else {
        links.iter().map(|d| d.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// PFNet by enumerating every simple path of at most `q` links between the
/// endpoints of each edge.
pub fn pfnet_oracle(graph: &DissimilarityGraph, r: f64, q: usize) -> BTreeSet<(usize, usize)> {
    let n = graph.len();
    let mut kept = BTreeSet::new();
    for (i, j, d) in graph.edges() {
        let mut shortest = f64::INFINITY;
        let mut visited = vec![false; n];
        visited[i] = true;
        let mut links = Vec::new();
        walk(graph, i, j, q, r, &mut visited, &mut links, &mut shortest);
        if d <= shortest * (1.0 + 1e-12) {
            kept.insert((i, j));
        }
    }
    kept
}

#[allow(clippy::too_many_arguments)]
fn walk(
    graph: &DissimilarityGraph,
    at: usize,
    target: usize,
    q: usize,
    r: f64,
    visited: &mut [bool],
    links: &mut Vec<f64>,
    shortest: &mut f64,
) {
    if links.len() == q {
        return;
    }
    for next in graph.neighbors(at).collect::<Vec<_>>() {
        if visited[next] {
            continue;
        }
        links.push(graph.distance(at, next));
        if next == target {
            *shortest = shortest.min(path_weight(links, r));
        } else {
            visited[next] = true;
            walk(graph, next, target, q, r, visited, links, shortest);
            visited[next] = false;
        }
        links.pop();
    }
}

/// Kruskal's minimum spanning forest.
pub fn kruskal(graph: &DissimilarityGraph) -> BTreeSet<(usize, usize)> {
    let mut edges = graph.edges();
    edges.sort_by(|a, b| a.2.total_cmp(&b.2));
    let mut parent: Vec<usize> = (0..graph.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        parent[x] = root;
        root
    }
    let mut tree = BTreeSet::new();
    for (i, j, _) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            tree.insert((i, j));
        }
    }
    tree
}

pub fn is_connected(graph: &DissimilarityGraph) -> bool {
    let n = graph.len();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for w in graph.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

// ------------------------------------------------------------- documents

/// Documents containing each term, by brute force over term sets.
pub fn brute_doc_freq(docs: &[BTreeSet<Term>], terms: &[Term]) -> Vec<u64> {
    terms
        .iter()
        .map(|t| docs.iter().filter(|d| d.contains(t)).count() as u64)
        .collect()
}

/// Documents containing both terms of every pair.
pub fn brute_cooccurrence(
    docs: &[BTreeSet<Term>],
    terms: &[Term],
) -> BTreeMap<(usize, usize), u64> {
    let mut out = BTreeMap::new();
    for i in 0..terms.len() {
        for j in 0..terms.len() {
            if i != j {
                let c = docs
                    .iter()
                    .filter(|d| d.contains(&terms[i]) && d.contains(&terms[j]))
                    .count() as u64;
                out.insert((i, j), c);
            }
        }
    }
    out
}

// --------------------------------------------------------------- layout

/// Central-difference gradient of the layout energy, negated.
pub fn numeric_forces(
    graph: &DissimilarityGraph,
    coords: &[[f64; 2]],
    config: &LayoutConfig,
) -> Vec<[f64; 2]> {
    let energy = |c: &[[f64; 2]]| {
        let positions = Positions {
            labels: graph.labels().to_vec(),
            coords: c.to_vec(),
        };
        layout_energy(graph, &positions, config)
    };
    let mut out = vec![[0.0; 2]; coords.len()];
    for v in 0..coords.len() {
        for axis in 0..2 {
            let h = 1e-5 * coords[v][axis].abs().max(1.0);
            let mut plus = coords.to_vec();
            let mut minus = coords.to_vec();
            plus[v][axis] += h;
            minus[v][axis] -= h;
            out[v][axis] = -(energy(&plus) - energy(&minus)) / (2.0 * h);
        }
    }
    out
}

// -------------------------------------------------------------- fixture

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Manifest digests of the bundled fixture under `fixture.toml`.
pub const GOLDEN: &[(&str, &str)] = &[
    (
        "corpus.jsonl",
        "1187a1ae83cfd18c5bdae4dcd8fd88c313844a58b3eb54ebdae505b0ca364bd3",
    ),
    (
        "series.csv",
        "11f78a71919c4d00aabedfc47cbba4b7144d15b58f3ae50089abef45ae109be7",
    ),
    (
        "frequency_table.csv",
        "7384d2d6cf03bc16b0dad0108f1aa42f7c47e5b83f27c8dcbed3dcd9b8ab6675",
    ),
    (
        "frequency_chart.svg",
        "92507d251ccc816e3864df46704e34ad0a5c429357c9716307021d8ab1ad6fc4",
    ),
    (
        "bursts.csv",
        "5e76ff56f0aa0b37f3d72bb3532b3e704038e72e36c7355e6e41ab9f2fda79b3",
    ),
    (
        "vocabulary.csv",
        "c0f5955ecf2769013120a4d40e82bdfdd010537f20e53eca049e4c5636af07ec",
    ),
    (
        "cooccurrence.csv",
        "2b2579c65527a24263d561a905db0a33dbf17c8a1062d9898af0c21f96455332",
    ),
    (
        "cosine.csv",
        "a093ee4f5bc360a869e7814d1fc0fa0781922f415819638494ac7eccc765fc9f",
    ),
    (
        "pfnet_edges.csv",
        "33b21c67757ea8df578c99673b0c2417d04bca4fb3275f464cae3a8bac10ea57",
    ),
    (
        "positions.csv",
        "f389f3919ee90b39e87a03d6b7661bff3570f4be9885a3f847b8406448cc9e89",
    ),
    (
        "map.svg",
        "78f02f2324ff35c41e895593332c96db1ef61735210d29f662fc5b95b9caa878",
    ),
    (
        "network.net",
        "a11dd3dbd4a103ad67176951890f6f07dd92ed51894772c9bd0b2d01517446e6",
    ),
];
