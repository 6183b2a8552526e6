//! Spanning-tree backbone of a projected graph.
//!
//! Link weights become distances `d = 1 − w / w_max`; links are taken in
//! ascending distance, skipping any that would close a cycle. Equal distances
//! are taken in `(i, j)` order, i.e. lexicographic order of node ids, which
//! makes the selected tree reproducible.

use std::cmp::Reverse;

use crate::error::{Error, Result};
use crate::graph::Mode;
use crate::paths::components;
use crate::projection::{ProjectedEdge, ProjectedGraph};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceEdge {
    pub i: usize,
    pub j: usize,
    pub weight: u32,
    pub distance: f64,
}

/// `d = 1 − w / w_max` for every link, in the projection's edge order.
pub fn distance_transform(p: &ProjectedGraph) -> Result<Vec<DistanceEdge>> {
    let w_max = p
        .max_weight()
        .ok_or(Error::Empty("distance transform of a projection without links"))?;
    Ok(p.edges().iter().map(|e| to_distance(e, w_max)).collect())
}

fn to_distance(e: &ProjectedEdge, w_max: u32) -> DistanceEdge {
    DistanceEdge {
        i: e.i,
        j: e.j,
        weight: e.shared,
        distance: 1.0 - f64::from(e.shared) / f64::from(w_max),
    }
}

/// One spanning tree per connected component of a projection.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningForest {
    mode: Mode,
    ids: Vec<String>,
    /// Tree edges per component, in selection order. Components are ordered
    /// by their smallest node index; singletons have an empty list.
    pub trees: Vec<Vec<DistanceEdge>>,
    pub component_count: usize,
    pub node_count: usize,
    source: Option<String>,
}

impl SpanningForest {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn edge_count(&self) -> usize {
        self.trees.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = &DistanceEdge> {
        self.trees.iter().flatten()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges().map(|e| u64::from(e.weight)).sum()
    }

    pub fn total_distance(&self) -> f64 {
        self.edges().map(|e| e.distance).sum()
    }

    /// The forest as a projection carrying the original link weights.
    pub fn to_projection(&self) -> ProjectedGraph {
        let edges = self
            .edges()
            .map(|e| {
                let (i, j) = if e.i < e.j { (e.i, e.j) } else { (e.j, e.i) };
                ProjectedEdge { i, j, shared: e.weight }
            })
            .collect();
        ProjectedGraph::new(self.mode, self.ids.clone(), edges, self.source.clone())
            .expect("forest edges form a valid projection")
    }
}

pub fn minimal_spanning_forest(p: &ProjectedGraph) -> SpanningForest {
    let n = p.node_count();
    let w_max = p.max_weight().unwrap_or(1);
    // Distance is strictly decreasing in the integer weight, so ordering by
    // descending weight is the ascending-distance order without float ties.
    let mut order: Vec<&ProjectedEdge> = p.edges().iter().collect();
    order.sort_by_key(|e| (Reverse(e.shared), e.i, e.j));

    let mut uf = UnionFind::new(n);
    let mut selected = Vec::with_capacity(n.saturating_sub(1));
    for e in order {
        if uf.union(e.i, e.j) {
            selected.push(to_distance(e, w_max));
            if selected.len() + 1 == n {
                break;
            }
        }
    }

    let comps = components(p);
    let mut trees = vec![Vec::new(); comps.count()];
    for e in selected {
        trees[comps.label[e.i]].push(e);
    }
    SpanningForest {
        mode: p.mode(),
        ids: p.ids().to_vec(),
        trees,
        component_count: comps.count(),
        node_count: n,
        source: p.source().map(str::to_owned),
    }
}

/// Degree of every node counting forest edges only.
pub fn tree_degrees(f: &SpanningForest) -> Vec<usize> {
    let mut deg = vec![0; f.node_count];
    for e in f.edges() {
        deg[e.i] += 1;
        deg[e.j] += 1;
    }
    deg
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hub {
    pub index: usize,
    pub id: String,
    pub degree: usize,
}

/// The `k` nodes with highest tree degree (ties by index).
pub fn hubs(f: &SpanningForest, k: usize) -> Vec<Hub> {
    let deg = tree_degrees(f);
    let mut order: Vec<usize> = (0..f.node_count).collect();
    order.sort_by_key(|&i| (Reverse(deg[i]), i));
    order
        .into_iter()
        .take(k)
        .map(|i| Hub {
            index: i,
            id: f.ids[i].clone(),
            degree: deg[i],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn projection(n: usize, edges: &[(usize, usize, u32)]) -> ProjectedGraph {
        let ids = (0..n).map(|i| format!("n{i:02}")).collect();
        let edges = edges
            .iter()
            .map(|&(i, j, shared)| ProjectedEdge { i, j, shared })
            .collect();
        ProjectedGraph::new(Mode::Bank, ids, edges, None).unwrap()
    }

    fn edge_set(f: &SpanningForest) -> Vec<(usize, usize, u32)> {
        let mut v: Vec<_> = f.edges().map(|e| (e.i, e.j, e.weight)).collect();
        v.sort();
        v
    }

    #[test]
    fn distance_transform_examples() {
        let single = projection(2, &[(0, 1, 7)]);
        assert_eq!(distance_transform(&single).unwrap()[0].distance, 0.0);

        let p = projection(3, &[(0, 1, 4), (0, 2, 2), (1, 2, 1)]);
        let d: Vec<f64> = distance_transform(&p).unwrap().iter().map(|e| e.distance).collect();
        assert_eq!(d, vec![0.0, 0.5, 0.75]);

        let uniform = projection(3, &[(0, 1, 3), (0, 2, 3), (1, 2, 3)]);
        assert!(distance_transform(&uniform).unwrap().iter().all(|e| e.distance == 0.0));

        assert!(distance_transform(&projection(3, &[])).is_err());
    }

    #[test]
    fn triangle_keeps_two_strongest() {
        let p = projection(3, &[(0, 1, 5), (1, 2, 3), (0, 2, 1)]);
        let f = minimal_spanning_forest(&p);
        assert_eq!(edge_set(&f), vec![(0, 1, 5), (1, 2, 3)]);
        assert_eq!(f.total_weight(), 8);
        assert_eq!(f.component_count, 1);
    }

    #[test]
    fn tree_input_is_returned_unchanged() {
        let p = projection(4, &[(0, 1, 2), (1, 2, 9), (1, 3, 4)]);
        let f = minimal_spanning_forest(&p);
        assert_eq!(f.to_projection(), p);
        assert_eq!(minimal_spanning_forest(&f.to_projection()), f);
    }

    #[test]
    fn disjoint_components_make_a_forest() {
        let p = projection(5, &[(0, 1, 2), (1, 2, 2), (0, 2, 1), (3, 4, 6)]);
        let f = minimal_spanning_forest(&p);
        assert_eq!(f.component_count, 2);
        assert_eq!(f.edge_count(), 5 - 2);
        assert_eq!(f.trees.len(), 2);
        assert_eq!(f.trees[1].len(), 1);
    }

    #[test]
    fn isolated_nodes_are_singleton_components() {
        let p = projection(3, &[]);
        let f = minimal_spanning_forest(&p);
        assert_eq!(f.component_count, 3);
        assert_eq!(f.edge_count(), 0);
        assert!(f.trees.iter().all(Vec::is_empty));
    }

    #[test]
    fn ties_follow_node_order() {
        // Square with equal weights: (0,1), (0,3), (1,2) win over (2,3).
        let p = projection(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)]);
        let f = minimal_spanning_forest(&p);
        assert_eq!(edge_set(&f), vec![(0, 1, 1), (0, 3, 1), (1, 2, 1)]);
    }

    #[test]
    fn tree_degree_examples() {
        let star = projection(5, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1)]);
        let f = minimal_spanning_forest(&star);
        assert_eq!(tree_degrees(&f), vec![4, 1, 1, 1, 1]);
        assert_eq!(hubs(&f, 1)[0].id, "n00");

        let path = projection(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]);
        assert_eq!(tree_degrees(&minimal_spanning_forest(&path)), vec![1, 2, 2, 1]);

        // Two trees on six nodes: 0-1, 0-2, 0-3 and 4-5, with a heavier
        // redundant link inside the first.
        let toy = projection(6, &[(0, 1, 5), (0, 2, 4), (1, 2, 1), (0, 3, 2), (4, 5, 1)]);
        let f = minimal_spanning_forest(&toy);
        assert_eq!(tree_degrees(&f), vec![3, 1, 1, 1, 1, 1]);
        let top: Vec<_> = hubs(&f, 3).into_iter().map(|h| (h.index, h.degree)).collect();
        assert_eq!(top, vec![(0, 3), (1, 1), (2, 1)]);
    }
}
