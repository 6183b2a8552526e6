//! Brute-force oracles and random fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use banknet::{BipartiteGraph, EdgeWeight, GraphBuilder, Mode, NodeRef, ProjectedEdge, ProjectedGraph, UnionFind};
use rand::distr::{Distribution, OpenClosed01};
use rand::RngExt;
use rand_chacha::ChaCha8Rng;

/// Random bipartite graph with up to `max_nodes` per mode and a random
/// density. Some nodes may end up isolated; some edges lack a term split.
pub fn random_bipartite(rng: &mut ChaCha8Rng, max_nodes: usize) -> BipartiteGraph {
    let banks = rng.random_range(1..=max_nodes);
    let firms = rng.random_range(1..=max_nodes);
    let density: f64 = rng.random();
    let mut b = GraphBuilder::new();
    for i in 0..banks {
        b.add_bank(format!("b{i}"));
    }
    for j in 0..firms {
        b.add_firm(format!("f{j}"));
    }
    for i in 0..banks {
        for j in 0..firms {
            if rng.random::<f64>() < density {
                let w = if rng.random_bool(0.2) {
                    EdgeWeight::total_only(f64::from(rng.random_range(1..10_000u32)) / 10.0)
                } else {
                    // Arbitrary binary fractions exercise the shortest
                    // round-trip formatting.
                    EdgeWeight::split(rng.random::<f64>() * 1e4, rng.random::<f64>() * 10.0 + 1e-3)
                };
                b.add_edge(format!("b{i}"), format!("f{j}"), w.unwrap());
            }
        }
    }
    b.build().0
}

/// Shared-counterparty counts by comparing every pair of neighbor sets.
pub fn brute_projection(g: &BipartiteGraph, mode: Mode) -> BTreeMap<(usize, usize), u32> {
    let n = g.node_count(mode);
    let sets: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut v: Vec<usize> = g
                .neighbors(NodeRef::new(mode, i))
                .unwrap()
                .into_iter()
                .map(|r| r.index)
                .collect();
            v.sort_unstable();
            v
        })
        .collect();
    let mut out = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            let shared = sets[a].iter().filter(|x| sets[b].contains(x)).count() as u32;
            if shared > 0 {
                out.insert((a, b), shared);
            }
        }
    }
    out
}

pub fn projection_map(p: &ProjectedGraph) -> BTreeMap<(usize, usize), u32> {
    p.edges().iter().map(|e| ((e.i, e.j), e.shared)).collect()
}

/// Random connected weighted graph: a random spanning tree plus `extra`
/// further links, weights in 1..=max_weight.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, extra: usize, max_weight: u32) -> ProjectedGraph {
    let mut pairs = BTreeMap::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        pairs.insert((u, v), rng.random_range(1..=max_weight));
    }
    let possible = n * (n - 1) / 2;
    let target = (n - 1 + extra).min(possible);
    while pairs.len() < target {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            let key = (a.min(b), a.max(b));
            pairs.entry(key).or_insert_with(|| rng.random_range(1..=max_weight));
        }
    }
    let ids = (0..n).map(|i| format!("v{i:02}")).collect();
    let edges = pairs
        .into_iter()
        .map(|((i, j), shared)| ProjectedEdge { i, j, shared })
        .collect();
    ProjectedGraph::new(Mode::Bank, ids, edges, None).unwrap()
}

/// Maximum total weight over all spanning trees, by exhaustive
/// include/exclude search over the links (cycles pruned).
pub fn brute_max_spanning_weight(p: &ProjectedGraph) -> u64 {
    fn search(
        edges: &[ProjectedEdge],
        k: usize,
        uf: &UnionFind,
        picked: usize,
        need: usize,
        weight: u64,
        best: &mut u64,
    ) {
        if picked == need {
            *best = (*best).max(weight);
            return;
        }
        if k == edges.len() || edges.len() - k < need - picked {
            return;
        }
        let e = edges[k];
        let mut with = uf.clone();
        if with.union(e.i, e.j) {
            search(
                edges,
                k + 1,
                &with,
                picked + 1,
                need,
                weight + u64::from(e.shared),
                best,
            );
        }
        search(edges, k + 1, uf, picked, need, weight, best);
    }
    let n = p.node_count();
    let mut best = 0;
    search(p.edges(), 0, &UnionFind::new(n), 0, n.saturating_sub(1), 0, &mut best);
    best
}

/// Kendall tau-b by counting every pair.
pub fn kendall_oracle(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    let (mut conc, mut disc, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = (xs[i] - xs[j]).signum() as i64 * i64::from(xs[i] != xs[j]);
            let dy = (ys[i] - ys[j]).signum() as i64 * i64::from(ys[i] != ys[j]);
            match (dx, dy) {
                (0, 0) => {}
                (0, _) => tx += 1,
                (_, 0) => ty += 1,
                _ if dx == dy => conc += 1,
                _ => disc += 1,
            }
        }
    }
    let denom = (((conc + disc + tx) * (conc + disc + ty)) as f64).sqrt();
    (denom > 0.0).then(|| (conc - disc) as f64 / denom)
}

/// Pareto sample with `P(X ≥ x) = (x / x_min)^(−mu)`.
pub fn pareto_sample(rng: &mut ChaCha8Rng, n: usize, x_min: f64, mu: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u: f64 = OpenClosed01.sample(rng);
            x_min * u.powf(-1.0 / mu)
        })
        .collect()
}

/// Exactly rounded floating-point sum (Shewchuk's partials).
pub fn exact_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut kept = 0;
        for i in 0..partials.len() {
            let mut y = partials[i];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }
    partials.iter().sum()
}

/// Replays forest edges through a fresh union-find; true if none closes a
/// cycle.
pub fn acyclic(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> bool {
    let mut uf = UnionFind::new(node_count);
    edges.into_iter().all(|(i, j)| uf.union(i, j))
}
