//! Hop distances, connected components and diameter.
//!
//! Works over any graph exposing [`Topology`]: the bipartite graph (both
//! modes in one vertex space) and one-mode projections.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Mode, NodeRef};

/// Flat vertex view of a graph for breadth-first traversal.
pub trait Topology: Sync {
    fn vertex_count(&self) -> usize;

    /// Map a node reference into the flat vertex space.
    fn vertex(&self, n: NodeRef) -> Result<usize>;

    fn node(&self, v: usize) -> NodeRef;

    fn for_each_neighbor(&self, v: usize, f: &mut dyn FnMut(usize));
}

impl Topology for BipartiteGraph {
    fn vertex_count(&self) -> usize {
        self.bank_count() + self.firm_count()
    }

    fn vertex(&self, n: NodeRef) -> Result<usize> {
        self.check(n)?;
        Ok(match n.mode {
            Mode::Bank => n.index,
            Mode::Firm => self.bank_count() + n.index,
        })
    }

    fn node(&self, v: usize) -> NodeRef {
        if v < self.bank_count() {
            NodeRef::bank(v)
        } else {
            NodeRef::firm(v - self.bank_count())
        }
    }

    fn for_each_neighbor(&self, v: usize, f: &mut dyn FnMut(usize)) {
        let n = self.node(v);
        let offset = match n.mode {
            Mode::Bank => self.bank_count(),
            Mode::Firm => 0,
        };
        for u in self.neighbor_indices(n) {
            f(offset + u);
        }
    }
}

/// Result of a hop-distance query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Distance {
    Hops(usize),
    Unreachable,
}

impl Distance {
    pub fn hops(self) -> Option<usize> {
        match self {
            Distance::Hops(h) => Some(h),
            Distance::Unreachable => None,
        }
    }
}

const UNSEEN: usize = usize::MAX;

/// BFS levels from `source`; `UNSEEN` marks unreachable vertices.
fn bfs_levels<G: Topology + ?Sized>(g: &G, source: usize) -> Vec<usize> {
    let mut level = vec![UNSEEN; g.vertex_count()];
    let mut queue = VecDeque::new();
    level[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let next = level[v] + 1;
        g.for_each_neighbor(v, &mut |u| {
            if level[u] == UNSEEN {
                level[u] = next;
                queue.push_back(u);
            }
        });
    }
    level
}

fn eccentricity<G: Topology + ?Sized>(g: &G, source: usize) -> usize {
    bfs_levels(g, source)
        .into_iter()
        .filter(|&l| l != UNSEEN)
        .max()
        .unwrap_or(0)
}

/// Unweighted shortest-path length between two nodes.
pub fn distance<G: Topology + ?Sized>(g: &G, a: NodeRef, b: NodeRef) -> Result<Distance> {
    let (va, vb) = (g.vertex(a)?, g.vertex(b)?);
    if va == vb {
        return Ok(Distance::Hops(0));
    }
    // Early-exit BFS.
    let mut level = vec![UNSEEN; g.vertex_count()];
    let mut queue = VecDeque::new();
    level[va] = 0;
    queue.push_back(va);
    while let Some(v) = queue.pop_front() {
        let next = level[v] + 1;
        let mut found = false;
        g.for_each_neighbor(v, &mut |u| {
            if level[u] == UNSEEN {
                level[u] = next;
                found |= u == vb;
                queue.push_back(u);
            }
        });
        if found {
            return Ok(Distance::Hops(next));
        }
    }
    Ok(Distance::Unreachable)
}

/// Connected-component labelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Component label per vertex; labels are numbered in order of each
    /// component's smallest vertex.
    pub label: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    /// Label of the largest component (lowest label on ties).
    pub fn giant(&self) -> Option<usize> {
        self.sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(label, _)| label)
    }
}

pub fn components<G: Topology + ?Sized>(g: &G) -> Components {
    let n = g.vertex_count();
    let mut label = vec![UNSEEN; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != UNSEEN {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        label[start] = id;
        stack.push(start);
        while let Some(v) = stack.pop() {
            size += 1;
            g.for_each_neighbor(v, &mut |u| {
                if label[u] == UNSEEN {
                    label[u] = id;
                    stack.push(u);
                }
            });
        }
        sizes.push(size);
    }
    Components { label, sizes }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiameterReport {
    /// Largest finite distance inside the giant component.
    pub diameter: usize,
    pub giant_size: usize,
    pub component_count: usize,
    pub connected: bool,
}

/// Diameter of the largest connected component, with component structure.
///
/// Runs one BFS per giant-component vertex, in parallel.
pub fn diameter<G: Topology + ?Sized>(g: &G) -> Result<DiameterReport> {
    if g.vertex_count() == 0 {
        return Err(Error::Empty("diameter of a graph with no nodes"));
    }
    let comps = components(g);
    let giant = comps.giant().expect("nonempty graph has a component");
    let members: Vec<usize> = (0..g.vertex_count()).filter(|&v| comps.label[v] == giant).collect();
    let diameter = members.par_iter().map(|&v| eccentricity(g, v)).max().unwrap_or(0);
    Ok(DiameterReport {
        diameter,
        giant_size: comps.sizes[giant],
        component_count: comps.count(),
        connected: comps.count() == 1,
    })
}
