mod common;

use banknet::io::{export_to_string, read_edges, read_graph, ExportFormat, Exportable, LoadedGraph};
use banknet::metrics::{cumulative_distribution, kendall_tau, participation_ratio, pearson, quantile_classes};
use banknet::{
    components, hill_fit, minimal_spanning_forest, project, tree_degrees, BipartiteGraph, EdgeWeight, GraphBuilder,
    Mode, NodeRef, ProjectedEdge, ProjectedGraph, Term, UnionFind,
};
use common::*;
use proptest::prelude::*;

fn graph_strategy(max_nodes: usize, max_edges: usize) -> impl Strategy<Value = BipartiteGraph> {
    prop::collection::vec(
        (0..max_nodes, 0..max_nodes, 0u32..5000, 0u32..5000, any::<bool>()),
        0..max_edges,
    )
    .prop_map(|rows| {
        let mut b = GraphBuilder::new();
        for (bank, firm, s, l, split) in rows {
            let (s, l) = (f64::from(s) / 4.0, f64::from(l) / 4.0 + 0.25);
            let w = if split {
                EdgeWeight::split(s, l)
            } else {
                EdgeWeight::total_only(s + l)
            };
            b.add_edge(format!("b{bank}"), format!("f{firm}"), w.unwrap());
        }
        b.build().0
    })
}

fn projection_strategy(max_nodes: usize) -> impl Strategy<Value = ProjectedGraph> {
    (2..=max_nodes)
        .prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let len = pairs.len();
            (
                Just(n),
                Just(pairs),
                prop::collection::vec(prop::option::weighted(0.5, 1u32..8), len),
            )
        })
        .prop_map(|(n, pairs, weights)| {
            let edges = pairs
                .into_iter()
                .zip(weights)
                .filter_map(|((i, j), w)| w.map(|shared| ProjectedEdge { i, j, shared }))
                .collect();
            let ids = (0..n).map(|i| format!("n{i:02}")).collect();
            ProjectedGraph::new(Mode::Firm, ids, edges, None).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn handshake(g in graph_strategy(12, 60)) {
        let kb: usize = g.degrees(Mode::Bank).iter().sum();
        let kf: usize = g.degrees(Mode::Firm).iter().sum();
        prop_assert_eq!(kb, g.edge_count());
        prop_assert_eq!(kf, g.edge_count());
        // Quarter units keep every sum exact.
        let sb: f64 = g.strengths(Mode::Bank, Term::Total).iter().sum();
        let sf: f64 = g.strengths(Mode::Firm, Term::Total).iter().sum();
        prop_assert_eq!(sb, sf);
    }

    #[test]
    fn projection_matches_common_neighbors(g in graph_strategy(10, 50)) {
        for mode in [Mode::Bank, Mode::Firm] {
            let p = project(&g, mode);
            prop_assert_eq!(projection_map(&p), brute_projection(&g, mode));
            prop_assert_eq!(p.node_count(), g.node_count(mode));
        }
    }

    #[test]
    fn participation_ratio_bounds(g in graph_strategy(10, 50)) {
        for mode in [Mode::Bank, Mode::Firm] {
            for (i, k) in g.degrees(mode).into_iter().enumerate() {
                if k > 0 {
                    let y = participation_ratio(&g, NodeRef::new(mode, i), Term::Total).unwrap();
                    prop_assert!(y >= 1.0 / k as f64 - 1e-12 && y <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn forest_is_a_maximum_spanning_forest(p in projection_strategy(8)) {
        let f = minimal_spanning_forest(&p);
        let comps = components(&p);
        prop_assert_eq!(f.edge_count(), p.node_count() - comps.count());
        prop_assert!(acyclic(p.node_count(), f.edges().map(|e| (e.i, e.j))));
        // Per component, brute force over the component's own links.
        let mut total = 0;
        for c in 0..comps.count() {
            let members: Vec<usize> = (0..p.node_count()).filter(|&v| comps.label[v] == c).collect();
            let local = |v: usize| members.binary_search(&v).unwrap();
            let edges = p
                .edges()
                .iter()
                .filter(|e| comps.label[e.i] == c)
                .map(|e| ProjectedEdge { i: local(e.i), j: local(e.j), shared: e.shared })
                .collect();
            let ids = members.iter().map(|v| p.ids()[*v].clone()).collect();
            total += brute_max_spanning_weight(&ProjectedGraph::new(Mode::Firm, ids, edges, None).unwrap());
        }
        prop_assert_eq!(f.total_weight(), total);
        prop_assert_eq!(tree_degrees(&f).iter().sum::<usize>(), 2 * f.edge_count());
    }

    #[test]
    fn forest_is_idempotent(p in projection_strategy(10)) {
        let f = minimal_spanning_forest(&p);
        let again = minimal_spanning_forest(&f.to_projection());
        prop_assert_eq!(again.to_projection(), f.to_projection());
    }

    #[test]
    fn union_find_counts_components(p in projection_strategy(12)) {
        let mut uf = UnionFind::new(p.node_count());
        for e in p.edges() {
            uf.union(e.i, e.j);
        }
        prop_assert_eq!(uf.set_count(), components(&p).count());
    }

    #[test]
    fn kendall_matches_pair_counting(
        pairs in prop::collection::vec((0i32..6, 0i32..6), 2..40)
    ) {
        let xs: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
        match (kendall_oracle(&xs, &ys), kendall_tau(&xs, &ys)) {
            (Some(t), Ok(r)) => {
                prop_assert!((r.coefficient - t).abs() < 1e-12);
                let flipped: Vec<f64> = ys.iter().map(|y| -y).collect();
                prop_assert!((kendall_tau(&xs, &flipped).unwrap().coefficient + t).abs() < 1e-12);
                prop_assert!((kendall_tau(&ys, &xs).unwrap().coefficient - t).abs() < 1e-12);
            }
            (None, Err(_)) => {}
            (o, r) => prop_assert!(false, "oracle {:?} vs {:?}", o, r.map(|r| r.coefficient)),
        }
    }

    #[test]
    fn pearson_is_bounded_and_affine_invariant(
        xs in prop::collection::vec(-1e3f64..1e3, 3..30),
        ys in prop::collection::vec(-1e3f64..1e3, 3..30),
        a in 0.5f64..10.0,
        b in -100.0f64..100.0,
    ) {
        let n = xs.len().min(ys.len());
        let (xs, ys) = (&xs[..n], &ys[..n]);
        if let Ok(r) = pearson(xs, ys) {
            prop_assert!((-1.0..=1.0).contains(&r.coefficient));
            let p = r.p_value().unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            let scaled: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let r2 = pearson(&scaled, ys).unwrap();
            prop_assert!((r2.coefficient - r.coefficient).abs() < 1e-9);
        }
    }

    #[test]
    fn hill_fit_is_scale_invariant(
        xs in prop::collection::vec(1.0f64..1e6, 2..200),
        c in 0.01f64..100.0,
    ) {
        let cutoff = 1.0;
        if let Ok(fit) = hill_fit(&xs, cutoff) {
            let scaled: Vec<f64> = xs.iter().map(|x| x * c).collect();
            let other = hill_fit(&scaled, cutoff * c).unwrap();
            prop_assert_eq!(fit.tail_count, other.tail_count);
            prop_assert!((fit.mu_hat - other.mu_hat).abs() <= 1e-9 * fit.mu_hat);
            prop_assert!((fit.std_error - fit.mu_hat / (fit.tail_count as f64).sqrt()).abs() < 1e-12 * fit.mu_hat);
        }
    }

    #[test]
    fn quantile_classes_are_balanced(
        values in prop::collection::vec(0u8..20, 1..100),
        k in 1usize..10,
    ) {
        let values: Vec<f64> = values.into_iter().map(f64::from).collect();
        prop_assume!(k <= values.len());
        let classes = quantile_classes(&values, k).unwrap();
        let mut sizes = vec![0usize; k];
        for &c in &classes {
            sizes[c] += 1;
        }
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        prop_assert!(hi - lo <= 1);
        // Class order follows value order.
        for i in 0..values.len() {
            for j in 0..values.len() {
                if values[i] < values[j] {
                    prop_assert!(classes[i] <= classes[j]);
                }
            }
        }
    }

    #[test]
    fn cumulative_distribution_shape(values in prop::collection::vec(1u16..500, 1..200)) {
        let values: Vec<f64> = values.into_iter().map(f64::from).collect();
        let d = cumulative_distribution(&values).unwrap();
        prop_assert_eq!(d.points[0].1, 1.0);
        for w in d.points.windows(2) {
            prop_assert!(w[0].0 < w[1].0 && w[0].1 > w[1].1);
        }
        for &(x, p) in &d.points {
            let ge = values.iter().filter(|v| **v >= x).count() as f64 / values.len() as f64;
            prop_assert_eq!(p, ge);
        }
    }

    #[test]
    fn edge_csv_round_trip(g in graph_strategy(12, 60)) {
        let text = export_to_string(Exportable::Bipartite(&g), ExportFormat::EdgeCsv, &Default::default()).unwrap();
        let back = read_edges(text.as_bytes(), "prop.csv").unwrap();
        prop_assert_eq!(&back.graph, &g);
        prop_assert_eq!(back.report.duplicates_merged, 0);
        for format in [ExportFormat::Dot, ExportFormat::GraphMl] {
            let text = export_to_string(Exportable::Bipartite(&g), format, &Default::default()).unwrap();
            prop_assert_eq!(read_graph(&text, format, "prop").unwrap(), LoadedGraph::Bipartite(g.clone()));
        }
    }

    #[test]
    fn row_order_does_not_change_the_graph(g in graph_strategy(8, 30), seed in any::<u64>()) {
        let mut rows: Vec<_> = g.edges().to_vec();
        let mut s = seed | 1;
        for i in (1..rows.len()).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            rows.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let mut b = GraphBuilder::new();
        for e in rows {
            b.add_edge(g.ids(Mode::Bank)[e.bank].clone(), g.ids(Mode::Firm)[e.firm].clone(), e.weight);
        }
        prop_assert_eq!(b.build().0, g);
    }
}
