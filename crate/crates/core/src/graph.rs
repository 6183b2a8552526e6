//! Two-mode (bank × firm) weighted credit graph.
//!
//! Nodes are identified by stable string ids. At build time ids are sorted
//! and mapped to dense indices, so a graph's index layout depends only on its
//! content and not on the order rows were read in.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Bank,
    Firm,
}

impl Mode {
    pub fn opposite(self) -> Mode {
        match self {
            Mode::Bank => Mode::Firm,
            Mode::Firm => Mode::Bank,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Bank => "bank",
            Mode::Firm => "firm",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bank" | "banks" => Ok(Mode::Bank),
            "firm" | "firms" => Ok(Mode::Firm),
            other => Err(Error::invalid(format!("unknown mode `{other}`"))),
        }
    }
}

/// A node of a given mode, addressed by dense index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef {
    pub mode: Mode,
    pub index: usize,
}

impl NodeRef {
    pub fn new(mode: Mode, index: usize) -> Self {
        NodeRef { mode, index }
    }

    pub fn bank(index: usize) -> Self {
        NodeRef::new(Mode::Bank, index)
    }

    pub fn firm(index: usize) -> Self {
        NodeRef::new(Mode::Firm, index)
    }
}

/// Which loan component a weighted measure reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Term {
    Short,
    Long,
    Total,
}

impl Term {
    pub fn as_str(self) -> &'static str {
        match self {
            Term::Short => "short",
            Term::Long => "long",
            Term::Total => "total",
        }
    }
}

/// Loan amounts on one bank–firm link, in million yen.
///
/// The short/long split is optional: some sources report only the total.
/// When present, `total == short_term + long_term`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeWeight {
    short_term: Option<f64>,
    long_term: Option<f64>,
    total: f64,
}

impl EdgeWeight {
    pub fn split(short_term: f64, long_term: f64) -> Result<Self> {
        for (name, v) in [("short_term", short_term), ("long_term", long_term)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!("{name} must be a nonnegative amount, got {v}")));
            }
        }
        let total = short_term + long_term;
        if total <= 0.0 {
            return Err(Error::invalid("loan total must be positive"));
        }
        Ok(EdgeWeight {
            short_term: Some(short_term),
            long_term: Some(long_term),
            total,
        })
    }

    pub fn total_only(total: f64) -> Result<Self> {
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::invalid(format!("loan total must be positive, got {total}")));
        }
        Ok(EdgeWeight {
            short_term: None,
            long_term: None,
            total,
        })
    }

    pub fn short_term(&self) -> Option<f64> {
        self.short_term
    }

    pub fn long_term(&self) -> Option<f64> {
        self.long_term
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn has_split(&self) -> bool {
        self.short_term.is_some()
    }

    /// The selected component, or `None` when the split is unknown.
    pub fn get(&self, term: Term) -> Option<f64> {
        match term {
            Term::Short => self.short_term,
            Term::Long => self.long_term,
            Term::Total => Some(self.total),
        }
    }

    /// Combine two tranches of the same bank–firm pair.
    pub(crate) fn merge(self, other: EdgeWeight) -> EdgeWeight {
        match (self.short_term, self.long_term, other.short_term, other.long_term) {
            (Some(s1), Some(l1), Some(s2), Some(l2)) => {
                let (s, l) = (s1 + s2, l1 + l2);
                EdgeWeight {
                    short_term: Some(s),
                    long_term: Some(l),
                    total: s + l,
                }
            }
            _ => EdgeWeight {
                short_term: None,
                long_term: None,
                total: self.total + other.total,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub bank: usize,
    pub firm: usize,
    pub weight: EdgeWeight,
}

impl Edge {
    /// The endpoint of this edge in `mode`.
    pub fn endpoint(&self, mode: Mode) -> usize {
        match mode {
            Mode::Bank => self.bank,
            Mode::Firm => self.firm,
        }
    }
}

/// Immutable bipartite credit graph.
///
/// Edges are stored once, sorted by `(bank, firm)`; per-node incidence lists
/// hold edge positions in ascending counterparty order.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    bank_ids: Vec<String>,
    firm_ids: Vec<String>,
    edges: Vec<Edge>,
    bank_edges: Vec<Vec<usize>>,
    firm_edges: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn bank_count(&self) -> usize {
        self.bank_ids.len()
    }

    pub fn firm_count(&self) -> usize {
        self.firm_ids.len()
    }

    pub fn node_count(&self, mode: Mode) -> usize {
        self.ids(mode).len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bank_ids.is_empty() && self.firm_ids.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn ids(&self, mode: Mode) -> &[String] {
        match mode {
            Mode::Bank => &self.bank_ids,
            Mode::Firm => &self.firm_ids,
        }
    }

    pub fn id(&self, n: NodeRef) -> Result<&str> {
        self.check(n)?;
        Ok(&self.ids(n.mode)[n.index])
    }

    /// Look a node up by its string id.
    pub fn find(&self, mode: Mode, id: &str) -> Option<NodeRef> {
        self.ids(mode)
            .binary_search_by(|probe| probe.as_str().cmp(id))
            .ok()
            .map(|index| NodeRef::new(mode, index))
    }

    pub fn check(&self, n: NodeRef) -> Result<()> {
        let count = self.node_count(n.mode);
        if n.index < count {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                mode: n.mode,
                index: n.index,
                count,
            })
        }
    }

    fn incidence(&self, n: NodeRef) -> &[usize] {
        match n.mode {
            Mode::Bank => &self.bank_edges[n.index],
            Mode::Firm => &self.firm_edges[n.index],
        }
    }

    /// Edges touching `n`, ordered by counterparty index.
    pub fn incident_edges(&self, n: NodeRef) -> Result<impl Iterator<Item = &Edge> + '_> {
        self.check(n)?;
        Ok(self.incidence(n).iter().map(move |&e| &self.edges[e]))
    }

    pub fn degree(&self, n: NodeRef) -> Result<usize> {
        self.check(n)?;
        Ok(self.incidence(n).len())
    }

    /// Sum of the selected loan component over all links of `n`.
    ///
    /// Links without a short/long split contribute nothing to the `Short`
    /// and `Long` sums; see [`BipartiteGraph::unsplit_edge_count`].
    pub fn strength(&self, n: NodeRef, term: Term) -> Result<f64> {
        Ok(self.incident_edges(n)?.filter_map(|e| e.weight.get(term)).sum())
    }

    pub fn neighbors(&self, n: NodeRef) -> Result<Vec<NodeRef>> {
        let other = n.mode.opposite();
        Ok(self
            .incident_edges(n)?
            .map(|e| NodeRef::new(other, e.endpoint(other)))
            .collect())
    }

    /// Neighbor indices without allocation; caller guarantees `n` is valid.
    pub(crate) fn neighbor_indices(&self, n: NodeRef) -> impl Iterator<Item = usize> + '_ {
        let other = n.mode.opposite();
        self.incidence(n).iter().map(move |&e| self.edges[e].endpoint(other))
    }

    pub fn degrees(&self, mode: Mode) -> Vec<usize> {
        match mode {
            Mode::Bank => self.bank_edges.iter().map(Vec::len).collect(),
            Mode::Firm => self.firm_edges.iter().map(Vec::len).collect(),
        }
    }

    pub fn strengths(&self, mode: Mode, term: Term) -> Vec<f64> {
        (0..self.node_count(mode))
            .map(|i| {
                self.incidence(NodeRef::new(mode, i))
                    .iter()
                    .filter_map(|&e| self.edges[e].weight.get(term))
                    .sum()
            })
            .collect()
    }

    /// Number of links that only carry a total amount.
    pub fn unsplit_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| !e.weight.has_split()).count()
    }

    /// Content digest (hex SHA-256 prefix) over ids and weights.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for (tag, ids) in [("B", &self.bank_ids), ("F", &self.firm_ids)] {
            for id in ids {
                h.update(tag.as_bytes());
                h.update(id.as_bytes());
                h.update(b"\n");
            }
        }
        for e in &self.edges {
            let w = &e.weight;
            h.update(
                format!(
                    "{} {} {:?} {:?} {}\n",
                    e.bank, e.firm, w.short_term, w.long_term, w.total
                )
                .as_bytes(),
            );
        }
        hex::encode(&h.finalize()[..8])
    }
}

/// Counts reported while assembling a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    /// Rows whose (bank, firm) pair had already been seen and were summed in.
    pub duplicates_merged: usize,
}

/// Accumulates nodes and links, then freezes them into a [`BipartiteGraph`].
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    banks: BTreeSet<String>,
    firms: BTreeSet<String>,
    links: BTreeMap<(String, String), EdgeWeight>,
    duplicates: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a bank that may have no links.
    pub fn add_bank(&mut self, id: impl Into<String>) -> &mut Self {
        self.banks.insert(id.into());
        self
    }

    pub fn add_firm(&mut self, id: impl Into<String>) -> &mut Self {
        self.firms.insert(id.into());
        self
    }

    /// Add a link; a repeated pair is merged into the existing link.
    /// Returns `true` when the row was merged.
    pub fn add_edge(&mut self, bank: impl Into<String>, firm: impl Into<String>, weight: EdgeWeight) -> bool {
        let (bank, firm) = (bank.into(), firm.into());
        self.banks.insert(bank.clone());
        self.firms.insert(firm.clone());
        match self.links.get_mut(&(bank.clone(), firm.clone())) {
            Some(existing) => {
                *existing = existing.merge(weight);
                self.duplicates += 1;
                true
            }
            None => {
                self.links.insert((bank, firm), weight);
                false
            }
        }
    }

    pub fn build(self) -> (BipartiteGraph, BuildReport) {
        let bank_ids: Vec<String> = self.banks.into_iter().collect();
        let firm_ids: Vec<String> = self.firms.into_iter().collect();
        let index_of = |ids: &[String], id: &str| {
            ids.binary_search_by(|p| p.as_str().cmp(id))
                .expect("link endpoint registered as node")
        };
        // BTreeMap order on (bank id, firm id) is (bank index, firm index) order.
        let edges: Vec<Edge> = self
            .links
            .into_iter()
            .map(|((b, f), weight)| Edge {
                bank: index_of(&bank_ids, &b),
                firm: index_of(&firm_ids, &f),
                weight,
            })
            .collect();
        let graph = from_sorted_parts(bank_ids, firm_ids, edges);
        (
            graph,
            BuildReport {
                duplicates_merged: self.duplicates,
            },
        )
    }
}

/// Assemble a graph from index-space parts. `edges` must be sorted by
/// `(bank, firm)` without duplicates, and ids sorted and unique.
pub(crate) fn from_sorted_parts(bank_ids: Vec<String>, firm_ids: Vec<String>, edges: Vec<Edge>) -> BipartiteGraph {
    debug_assert!(edges
        .windows(2)
        .all(|w| (w[0].bank, w[0].firm) < (w[1].bank, w[1].firm)));
    debug_assert!(bank_ids.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(firm_ids.windows(2).all(|w| w[0] < w[1]));
    let mut bank_edges = vec![Vec::new(); bank_ids.len()];
    let mut firm_edges = vec![Vec::new(); firm_ids.len()];
    for (pos, e) in edges.iter().enumerate() {
        bank_edges[e.bank].push(pos);
        firm_edges[e.firm].push(pos);
    }
    // Firm lists are already in bank order because edges are sorted by bank.
    BipartiteGraph {
        bank_ids,
        firm_ids,
        edges,
        bank_edges,
        firm_edges,
    }
}
