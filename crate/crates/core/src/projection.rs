//! One-mode projections: banks linked by the firms they co-finance, firms
//! linked by the banks they share. Edge weight is the number of shared
//! counterparties.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Mode, NodeRef};
use crate::paths::Topology;

/// Above this many pair increments a projection logs a memory warning.
pub const PAIR_WARNING_THRESHOLD: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectedEdge {
    pub i: usize,
    pub j: usize,
    pub shared: u32,
}

/// Weighted one-mode graph. Node ids are sorted; edges are stored once with
/// `i < j`, ordered by `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedGraph {
    mode: Mode,
    ids: Vec<String>,
    edges: Vec<ProjectedEdge>,
    adjacency: Vec<Vec<usize>>,
    source: Option<String>,
}

impl ProjectedGraph {
    /// Validate and assemble a projection. `ids` must be strictly ascending.
    pub fn new(mode: Mode, ids: Vec<String>, mut edges: Vec<ProjectedEdge>, source: Option<String>) -> Result<Self> {
        if let Some(w) = ids.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "projection node ids must be unique and sorted (`{}` then `{}`)",
                w[0], w[1]
            )));
        }
        let n = ids.len();
        for e in &edges {
            if e.i >= e.j || e.j >= n {
                return Err(Error::invalid(format!(
                    "projection edge ({}, {}) needs i < j < {n}",
                    e.i, e.j
                )));
            }
            if e.shared == 0 {
                return Err(Error::invalid(format!(
                    "projection edge ({}, {}) has zero weight",
                    e.i, e.j
                )));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::invalid(format!(
                "duplicate projection edge ({}, {})",
                w[0].i, w[0].j
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.i].push(e.j);
            adjacency[e.j].push(e.i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(ProjectedGraph {
            mode,
            ids,
            edges,
            adjacency,
            source,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn edges(&self) -> &[ProjectedEdge] {
        &self.edges
    }

    /// Fingerprint of the bipartite graph this was projected from, if known.
    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn find(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|p| p.as_str().cmp(id)).ok()
    }

    /// Weight of the link between `a` and `b`, if any.
    pub fn shared(&self, a: usize, b: usize) -> Option<u32> {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by(|e| (e.i, e.j).cmp(&(i, j)))
            .ok()
            .map(|pos| self.edges[pos].shared)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn max_weight(&self) -> Option<u32> {
        self.edges.iter().map(|e| e.shared).max()
    }
}

impl Topology for ProjectedGraph {
    fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    fn vertex(&self, n: NodeRef) -> Result<usize> {
        if n.mode != self.mode {
            return Err(Error::ModeMismatch {
                expected: self.mode,
                actual: n.mode,
            });
        }
        if n.index >= self.ids.len() {
            return Err(Error::InvalidNode {
                mode: n.mode,
                index: n.index,
                count: self.ids.len(),
            });
        }
        Ok(n.index)
    }

    fn node(&self, v: usize) -> NodeRef {
        NodeRef::new(self.mode, v)
    }

    fn for_each_neighbor(&self, v: usize, f: &mut dyn FnMut(usize)) {
        for &u in &self.adjacency[v] {
            f(u);
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProjectionOptions {
    /// Counterparties with more selected neighbors than this contribute no
    /// pairs. `None` keeps every counterparty.
    pub degree_cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProjectionReport {
    /// Σ C(d, 2) over contributing counterparties: the number of pair
    /// increments performed.
    pub pair_increments: u64,
    /// Counterparties skipped by the degree cap.
    pub capped_counterparties: usize,
}

/// Project onto `mode`, keeping every node of that mode.
pub fn project(g: &BipartiteGraph, mode: Mode) -> ProjectedGraph {
    project_with(g, mode, |_| true, ProjectionOptions::default())
        .expect("unfiltered projection")
        .0
}

/// Project onto the nodes of `mode` accepted by `filter`. Counterparties are
/// not filtered.
pub fn project_subset<F>(g: &BipartiteGraph, mode: Mode, filter: F) -> Result<ProjectedGraph>
where
    F: Fn(NodeRef) -> bool,
{
    let (p, _) = project_with(g, mode, filter, ProjectionOptions::default())?;
    if p.node_count() == 0 {
        return Err(Error::invalid("projection filter selected no nodes"));
    }
    Ok(p)
}

/// Hub-centric projection: every opposite-mode node of degree `d` emits its
/// C(d, 2) neighbor pairs. Hubs are processed in parallel chunks whose
/// sorted, run-length-merged outputs are combined by key, so the result does
/// not depend on scheduling.
pub fn project_with<F>(
    g: &BipartiteGraph,
    mode: Mode,
    filter: F,
    options: ProjectionOptions,
) -> Result<(ProjectedGraph, ProjectionReport)>
where
    F: Fn(NodeRef) -> bool,
{
    let n = g.node_count(mode);
    // Map source index -> position among selected nodes.
    let mut position = vec![usize::MAX; n];
    let mut ids = Vec::new();
    for (i, pos) in position.iter_mut().enumerate() {
        if filter(NodeRef::new(mode, i)) {
            *pos = ids.len();
            ids.push(g.ids(mode)[i].clone());
        }
    }
    if ids.len() > u32::MAX as usize {
        return Err(Error::invalid("projection too large for 32-bit node keys"));
    }

    let other = mode.opposite();
    let hubs: Vec<Vec<u32>> = (0..g.node_count(other))
        .map(|h| {
            g.neighbor_indices(NodeRef::new(other, h))
                .filter_map(|i| (position[i] != usize::MAX).then_some(position[i] as u32))
                .collect()
        })
        .collect();

    let mut report = ProjectionReport::default();
    let contributing: Vec<&[u32]> = hubs
        .iter()
        .filter(|nbrs| match options.degree_cap {
            Some(cap) if nbrs.len() > cap => {
                report.capped_counterparties += 1;
                false
            }
            _ => nbrs.len() >= 2,
        })
        .map(Vec::as_slice)
        .collect();
    report.pair_increments = contributing
        .iter()
        .map(|nbrs| {
            let d = nbrs.len() as u64;
            d * (d - 1) / 2
        })
        .sum();
    if report.pair_increments > PAIR_WARNING_THRESHOLD {
        log::warn!(
            "{mode} projection will perform {} pair increments; consider a degree cap",
            report.pair_increments
        );
    }

    let mut runs: Vec<(u64, u32)> = contributing
        .par_chunks(16)
        .flat_map_iter(|chunk| {
            let mut keys = Vec::new();
            for nbrs in chunk {
                // Neighbor lists are ascending, so a < b below.
                for (x, &a) in nbrs.iter().enumerate() {
                    for &b in &nbrs[x + 1..] {
                        keys.push(((a as u64) << 32) | b as u64);
                    }
                }
            }
            keys.sort_unstable();
            run_length(&keys)
        })
        .collect();
    runs.par_sort_unstable_by_key(|&(k, _)| k);

    let mut edges: Vec<ProjectedEdge> = Vec::new();
    for (key, count) in runs {
        let (i, j) = ((key >> 32) as usize, (key & 0xffff_ffff) as usize);
        match edges.last_mut() {
            Some(last) if (last.i, last.j) == (i, j) => last.shared += count,
            _ => edges.push(ProjectedEdge { i, j, shared: count }),
        }
    }
    let p = ProjectedGraph::new(mode, ids, edges, Some(g.fingerprint()))?;
    Ok((p, report))
}

fn run_length(sorted: &[u64]) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    for &k in sorted {
        match out.last_mut() {
            Some((last, c)) if *last == k => *c += 1,
            _ => out.push((k, 1)),
        }
    }
    out
}

/// `n·(n−1)/2`.
pub fn possible_edges(node_count: u64) -> u64 {
    node_count * node_count.saturating_sub(1) / 2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionStats {
    pub node_count: usize,
    /// Nodes with at least one projected link.
    pub linked_nodes: usize,
    pub edge_count: u64,
    pub possible_edges: u64,
    pub density: f64,
    pub mean_degree: f64,
}

impl ProjectionStats {
    pub fn from_counts(node_count: usize, edge_count: u64) -> Result<Self> {
        if node_count < 2 {
            return Err(Error::undefined(format!(
                "density of a projection with {node_count} node(s)"
            )));
        }
        let possible = possible_edges(node_count as u64);
        if edge_count > possible {
            return Err(Error::invalid(format!(
                "{edge_count} edges exceed the {possible} possible among {node_count} nodes"
            )));
        }
        Ok(ProjectionStats {
            node_count,
            linked_nodes: node_count,
            edge_count,
            possible_edges: possible,
            density: edge_count as f64 / possible as f64,
            mean_degree: 2.0 * edge_count as f64 / node_count as f64,
        })
    }
}

pub fn projection_stats(p: &ProjectedGraph) -> Result<ProjectionStats> {
    let mut stats = ProjectionStats::from_counts(p.node_count(), p.edge_count() as u64)?;
    stats.linked_nodes = (0..p.node_count()).filter(|&i| p.degree(i) > 0).count();
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::graph;

    #[test]
    fn two_banks_sharing_one_firm() {
        let g = graph(&[(0, 0, 1.0, 0.0), (1, 0, 1.0, 0.0)]);
        let p = project(&g, Mode::Bank);
        assert_eq!(p.edges(), &[ProjectedEdge { i: 0, j: 1, shared: 1 }]);
        assert_eq!(p.source(), Some(g.fingerprint().as_str()));
    }

    #[test]
    fn shared_count_is_number_of_common_firms() {
        let g = graph(&[
            (0, 1, 1.0, 0.0),
            (0, 2, 1.0, 0.0),
            (0, 3, 1.0, 0.0),
            (1, 1, 1.0, 0.0),
            (1, 2, 1.0, 0.0),
            (1, 3, 1.0, 0.0),
            (1, 4, 1.0, 0.0),
        ]);
        let p = project(&g, Mode::Bank);
        assert_eq!(p.shared(0, 1), Some(3));
        assert_eq!(p.shared(1, 0), Some(3));
        let f = project(&g, Mode::Firm);
        // F1..F3 pairwise share both banks; F4 shares B1 with each.
        assert_eq!(f.edge_count(), 6);
        assert_eq!(f.shared(0, 1), Some(2));
        assert_eq!(f.shared(0, 3), Some(1));
    }

    #[test]
    fn subset_projection() {
        let g = graph(&[(0, 0, 1.0, 0.0), (0, 1, 1.0, 0.0), (0, 2, 1.0, 0.0), (1, 2, 1.0, 0.0)]);
        let all = project_subset(&g, Mode::Firm, |_| true).unwrap();
        assert_eq!(all, project(&g, Mode::Firm));
        let single = project_subset(&g, Mode::Firm, |n| n.index == 1).unwrap();
        assert_eq!(single.node_count(), 1);
        assert_eq!(single.edge_count(), 0);
        let pair = project_subset(&g, Mode::Firm, |n| n.index != 1).unwrap();
        assert_eq!(pair.ids(), &["F0".to_string(), "F2".to_string()]);
        assert_eq!(pair.shared(0, 1), Some(1));
        assert!(project_subset(&g, Mode::Firm, |_| false).is_err());
    }

    #[test]
    fn degree_cap_skips_hubs() {
        let g = graph(&[
            (0, 0, 1.0, 0.0),
            (0, 1, 1.0, 0.0),
            (0, 2, 1.0, 0.0),
            (1, 0, 1.0, 0.0),
            (1, 1, 1.0, 0.0),
        ]);
        let opts = ProjectionOptions { degree_cap: Some(2) };
        let (p, report) = project_with(&g, Mode::Firm, |_| true, opts).unwrap();
        assert_eq!(report.capped_counterparties, 1);
        assert_eq!(report.pair_increments, 1);
        assert_eq!(p.edges(), &[ProjectedEdge { i: 0, j: 1, shared: 1 }]);
    }

    #[test]
    fn full_scale_counts() {
        assert_eq!(possible_edges(2661), 3_539_130);
        let s = ProjectionStats::from_counts(2661, 2_881_763).unwrap();
        assert!(s.density > 0.8 && s.density < 0.815);
    }

    #[test]
    fn stats_examples() {
        let tri = ProjectedGraph::new(
            Mode::Bank,
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                ProjectedEdge { i: 0, j: 1, shared: 1 },
                ProjectedEdge { i: 1, j: 2, shared: 1 },
                ProjectedEdge { i: 0, j: 2, shared: 4 },
            ],
            None,
        )
        .unwrap();
        assert_eq!(projection_stats(&tri).unwrap().density, 1.0);

        let s = ProjectionStats::from_counts(4, 3).unwrap();
        assert_eq!((s.density, s.mean_degree), (0.5, 1.5));
        assert!(ProjectionStats::from_counts(1, 0).is_err());
    }

    #[test]
    fn invalid_projection_edges() {
        let ids = vec!["a".to_string(), "b".to_string()];
        let e = |i, j, shared| ProjectedEdge { i, j, shared };
        assert!(ProjectedGraph::new(Mode::Bank, ids.clone(), vec![e(1, 0, 1)], None).is_err());
        assert!(ProjectedGraph::new(Mode::Bank, ids.clone(), vec![e(0, 2, 1)], None).is_err());
        assert!(ProjectedGraph::new(Mode::Bank, ids.clone(), vec![e(0, 1, 0)], None).is_err());
        assert!(ProjectedGraph::new(Mode::Bank, ids.clone(), vec![e(0, 1, 1), e(0, 1, 2)], None).is_err());
        assert!(ProjectedGraph::new(Mode::Bank, vec!["b".into(), "a".into()], vec![], None).is_err());
    }

    #[test]
    fn projected_distance() {
        use crate::paths::{distance, Distance};
        let g = graph(&[(0, 0, 1.0, 0.0), (0, 1, 1.0, 0.0), (1, 1, 1.0, 0.0), (1, 2, 1.0, 0.0)]);
        let p = project(&g, Mode::Firm);
        assert_eq!(
            distance(&p, NodeRef::firm(0), NodeRef::firm(2)).unwrap(),
            Distance::Hops(2)
        );
        assert!(distance(&p, NodeRef::bank(0), NodeRef::firm(2)).is_err());
    }
}
