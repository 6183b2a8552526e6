//! Analysis of bipartite bank–firm credit networks.
//!
//! A [`BipartiteGraph`] holds lending links between banks and firms, with
//! short- and long-term loan amounts in million yen. On top of it the crate
//! provides elementary measures (degree, strength, participation ratio,
//! assortativity), distributions and correlations, Hill tail fits, one-mode
//! projections, spanning-forest backbones, a synthetic generator, and
//! CSV / DOT / GraphML input and output.
//!
//! ```
//! use banknet::{project, minimal_spanning_forest, GraphBuilder, EdgeWeight, Mode};
//!
//! let mut b = GraphBuilder::new();
//! b.add_edge("B1", "F1", EdgeWeight::split(10.0, 5.0).unwrap());
//! b.add_edge("B1", "F2", EdgeWeight::split(0.0, 3.5).unwrap());
//! b.add_edge("B2", "F1", EdgeWeight::split(2.0, 0.0).unwrap());
//! let (g, _) = b.build();
//!
//! let firms = project(&g, Mode::Firm);
//! assert_eq!(firms.edge_count(), 1);
//! let tree = minimal_spanning_forest(&firms);
//! assert_eq!(tree.edge_count(), 1);
//! ```

pub mod attributes;
pub mod classify;
pub mod error;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod mst;
pub mod paths;
pub mod projection;
pub mod synth;
pub mod tailfit;
pub mod unionfind;

pub use attributes::{BankAttributes, ColorScheme, FirmAttributes, JoinReport, NodeAttributes};
pub use classify::{BankType, Region, Sector, SectorGroup};
pub use error::{Error, LoadError, Result, Violation};
pub use graph::{BipartiteGraph, BuildReport, Edge, EdgeWeight, GraphBuilder, Mode, NodeRef, Term};
pub use mst::{hubs, minimal_spanning_forest, tree_degrees, DistanceEdge, Hub, SpanningForest};
pub use paths::{components, diameter, distance, Components, DiameterReport, Distance, Topology};
pub use projection::{
    possible_edges, project, project_subset, project_with, projection_stats, ProjectedEdge, ProjectedGraph,
    ProjectionOptions, ProjectionReport, ProjectionStats,
};
pub use synth::{generate, GeneratorConfig, SplitRule, SynthReport};
pub use tailfit::{fit_tail, hill_fit, select_cutoff, CutoffStrategy, TailFit};
pub use unionfind::UnionFind;
