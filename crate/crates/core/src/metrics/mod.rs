//! Node-level and population statistics on the credit graph.

mod correlation;
pub mod financial;

pub use correlation::{kendall_tau, linear_regression, pearson, CorrelationResult, RegressionResult, Significance};

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Mode, NodeRef, Term};

/// Concentration of a node's weight over its links: Σ (w / s)².
///
/// Ranges from `1/k` (all links equal) to 1 (a single link). Links without a
/// short/long split are skipped for `Term::Short` and `Term::Long`.
pub fn participation_ratio(g: &BipartiteGraph, n: NodeRef, term: Term) -> Result<f64> {
    let weights: Vec<f64> = g.incident_edges(n)?.filter_map(|e| e.weight.get(term)).collect();
    if weights.is_empty() {
        return Err(Error::undefined(format!(
            "participation ratio of isolated {} {}",
            n.mode, n.index
        )));
    }
    let s: f64 = weights.iter().sum();
    if s <= 0.0 {
        return Err(Error::undefined(format!(
            "participation ratio of {} {} with zero {} strength",
            n.mode,
            n.index,
            term.as_str()
        )));
    }
    Ok(weights.iter().map(|w| (w / s) * (w / s)).sum())
}

/// Mean degree of the neighbors of `n`.
pub fn assortativity(g: &BipartiteGraph, n: NodeRef) -> Result<f64> {
    let k = g.degree(n)?;
    if k == 0 {
        return Err(Error::undefined(format!(
            "assortativity of isolated {} {}",
            n.mode, n.index
        )));
    }
    let other = n.mode.opposite();
    let sum: usize = g
        .neighbor_indices(n)
        .map(|j| g.degree(NodeRef::new(other, j)).expect("neighbor in range"))
        .sum();
    Ok(sum as f64 / k as f64)
}

/// Assortativity for every node of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct AssortativitySummary {
    /// `None` for isolated nodes.
    pub values: Vec<Option<f64>>,
    /// Isolated nodes left out of the mean.
    pub excluded: usize,
    pub mean: Option<f64>,
}

pub fn assortativity_summary(g: &BipartiteGraph, mode: Mode) -> AssortativitySummary {
    let values: Vec<Option<f64>> = (0..g.node_count(mode))
        .map(|i| assortativity(g, NodeRef::new(mode, i)).ok())
        .collect();
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    AssortativitySummary {
        excluded: values.len() - present.len(),
        mean: (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64),
        values,
    }
}

/// Empirical complementary distribution P(X ≥ x) at each distinct sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeDistribution {
    /// `(value, fraction of samples ≥ value)`, ascending in value.
    pub points: Vec<(f64, f64)>,
    pub sample_count: usize,
}

pub fn cumulative_distribution(values: &[f64]) -> Result<CumulativeDistribution> {
    if values.is_empty() {
        return Err(Error::Empty("cumulative distribution of no samples"));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v <= 0.0) {
        return Err(Error::invalid(format!(
            "distribution samples must be positive, got {bad}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut points = Vec::new();
    let mut i = 0;
    while i < n {
        let v = sorted[i];
        points.push((v, (n - i) as f64 / n as f64));
        while i < n && sorted[i] == v {
            i += 1;
        }
    }
    Ok(CumulativeDistribution {
        points,
        sample_count: n,
    })
}

/// Short- and long-term fractions of a firm's borrowing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermShare {
    pub short: f64,
    pub long: f64,
    /// Links skipped because they carry only a total.
    pub skipped_links: usize,
}

pub fn term_share(g: &BipartiteGraph, f: NodeRef) -> Result<TermShare> {
    if f.mode != Mode::Firm {
        return Err(Error::ModeMismatch {
            expected: Mode::Firm,
            actual: f.mode,
        });
    }
    let (mut short, mut long, mut skipped) = (0.0, 0.0, 0);
    for e in g.incident_edges(f)? {
        match (e.weight.short_term(), e.weight.long_term()) {
            (Some(s), Some(l)) => {
                short += s;
                long += l;
            }
            _ => skipped += 1,
        }
    }
    let total = short + long;
    if total <= 0.0 {
        return Err(Error::undefined(format!(
            "term share of firm {} with no split borrowing",
            f.index
        )));
    }
    let short_share = short / total;
    Ok(TermShare {
        short: short_share,
        long: 1.0 - short_share,
        skipped_links: skipped,
    })
}

/// Assign each value to one of `k` equally populated classes (0 = smallest).
///
/// Values are ranked ascending with ties kept in input order; rank `r` of `n`
/// goes to class `⌊r·k/n⌋`, so class sizes differ by at most one.
pub fn quantile_classes(values: &[f64], k: usize) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::invalid("class count must be at least 1"));
    }
    if k > values.len() {
        return Err(Error::invalid(format!(
            "cannot split {} values into {k} nonempty classes",
            values.len()
        )));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("NaN value in quantile classes"));
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut class = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        class[i] = rank * k / n;
    }
    Ok(class)
}

/// Degree distribution of the firms in each class.
///
/// `assignment[f]` is the class of firm `f`; firms without links are
/// ignored, and every firm with links must be assigned.
pub fn conditional_degree_distributions(
    g: &BipartiteGraph,
    assignment: &[Option<usize>],
    class_count: usize,
) -> Result<Vec<CumulativeDistribution>> {
    if assignment.len() != g.firm_count() {
        return Err(Error::invalid(format!(
            "class assignment covers {} firms, graph has {}",
            assignment.len(),
            g.firm_count()
        )));
    }
    let degrees = g.degrees(Mode::Firm);
    let mut per_class = vec![Vec::new(); class_count];
    for (f, (&k, class)) in degrees.iter().zip(assignment).enumerate() {
        if k == 0 {
            continue;
        }
        match class {
            Some(c) if *c < class_count => per_class[*c].push(k as f64),
            Some(c) => {
                return Err(Error::invalid(format!(
                    "firm {f} assigned to class {c} of {class_count}"
                )))
            }
            None => return Err(Error::invalid(format!("firm {f} has borrowing but no class"))),
        }
    }
    per_class
        .iter()
        .enumerate()
        .map(|(c, ks)| {
            if ks.is_empty() {
                Err(Error::invalid(format!("class {c} has no firms with borrowing")))
            } else {
                cumulative_distribution(ks)
            }
        })
        .collect()
}

/// Headline counts for one mode of the graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSummary {
    pub mode: Mode,
    pub node_count: usize,
    /// Nodes with at least one link.
    pub linked_count: usize,
    pub mean_degree: f64,
    pub max_degree: usize,
    pub mean_strength: f64,
    pub max_strength: f64,
}

pub fn mode_summary(g: &BipartiteGraph, mode: Mode) -> ModeSummary {
    let degrees = g.degrees(mode);
    let strengths = g.strengths(mode, Term::Total);
    let n = degrees.len();
    let mean = |sum: f64| if n == 0 { 0.0 } else { sum / n as f64 };
    ModeSummary {
        mode,
        node_count: n,
        linked_count: degrees.iter().filter(|&&k| k > 0).count(),
        mean_degree: mean(degrees.iter().sum::<usize>() as f64),
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        mean_strength: mean(strengths.iter().sum()),
        max_strength: strengths.iter().copied().fold(0.0, f64::max),
    }
}

/// Pearson correlation between strength and degree over linked nodes of
/// `mode`, on raw values and on logarithms.
pub fn strength_degree_correlation(g: &BipartiteGraph, mode: Mode) -> Result<(CorrelationResult, CorrelationResult)> {
    let (ks, ss): (Vec<f64>, Vec<f64>) = g
        .degrees(mode)
        .into_iter()
        .zip(g.strengths(mode, Term::Total))
        .filter(|&(k, _)| k > 0)
        .map(|(k, s)| (k as f64, s))
        .unzip();
    let raw = pearson(&ss, &ks)?;
    let log_s: Vec<f64> = ss.iter().map(|s| s.ln()).collect();
    let log_k: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    Ok((raw, pearson(&log_s, &log_k)?))
}

/// Empirical quantile with the lower convention: the smallest sample `x`
/// such that at least `q·n` samples are ≤ `x` (for `q` in (0, 1)).
pub(crate) fn lower_quantile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::graph;

    #[test]
    fn participation_ratio_examples() {
        let even = graph(&[(0, 0, 1.0, 0.0), (1, 0, 1.0, 0.0), (2, 0, 0.5, 0.5), (3, 0, 0.0, 1.0)]);
        assert_eq!(participation_ratio(&even, NodeRef::firm(0), Term::Total).unwrap(), 0.25);
        let single = graph(&[(0, 0, 7.5, 1.0)]);
        assert_eq!(
            participation_ratio(&single, NodeRef::firm(0), Term::Total).unwrap(),
            1.0
        );
        let skew = graph(&[(0, 0, 3.0, 0.0), (1, 0, 1.0, 0.0)]);
        assert_eq!(
            participation_ratio(&skew, NodeRef::firm(0), Term::Total).unwrap(),
            0.625
        );
    }

    #[test]
    fn participation_ratio_errors() {
        let mut b = crate::graph::GraphBuilder::new();
        b.add_firm("F9");
        b.add_edge("B0", "F0", crate::graph::EdgeWeight::split(0.0, 2.0).unwrap());
        let (g, _) = b.build();
        let isolated = g.find(Mode::Firm, "F9").unwrap();
        assert!(matches!(
            participation_ratio(&g, isolated, Term::Total),
            Err(Error::Undefined(_))
        ));
        // Zero short-term strength.
        assert!(matches!(
            participation_ratio(&g, NodeRef::firm(0), Term::Short),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn assortativity_examples() {
        let star: Vec<_> = (0..5).map(|f| (0, f, 1.0, 0.0)).collect();
        let g = graph(&star);
        assert_eq!(assortativity(&g, NodeRef::bank(0)).unwrap(), 1.0);
        assert_eq!(assortativity(&g, NodeRef::firm(3)).unwrap(), 5.0);
        // B0 links F0 (degree 2) and F1 (degree 4).
        let g = graph(&[
            (0, 0, 1.0, 0.0),
            (1, 0, 1.0, 0.0),
            (0, 1, 1.0, 0.0),
            (1, 1, 1.0, 0.0),
            (2, 1, 1.0, 0.0),
            (3, 1, 1.0, 0.0),
        ]);
        assert_eq!(assortativity(&g, NodeRef::bank(0)).unwrap(), 3.0);
    }

    #[test]
    fn assortativity_summary_excludes_isolated() {
        let mut b = crate::graph::GraphBuilder::new();
        b.add_bank("B9");
        b.add_edge("B0", "F0", crate::graph::EdgeWeight::split(1.0, 0.0).unwrap());
        let (g, _) = b.build();
        let s = assortativity_summary(&g, Mode::Bank);
        assert_eq!(s.excluded, 1);
        assert_eq!(s.mean, Some(1.0));
        assert_eq!(s.values, vec![Some(1.0), None]);
    }

    #[test]
    fn cumulative_distribution_examples() {
        assert_eq!(cumulative_distribution(&[5.0]).unwrap().points, vec![(5.0, 1.0)]);
        assert_eq!(
            cumulative_distribution(&[2.0, 4.0, 1.0, 2.0]).unwrap().points,
            vec![(1.0, 1.0), (2.0, 0.75), (4.0, 0.25)]
        );
        let ties = cumulative_distribution(&[3.5, 3.5, 3.5]).unwrap();
        assert_eq!(ties.points, vec![(3.5, 1.0)]);
        assert_eq!(ties.sample_count, 3);
        assert!(matches!(cumulative_distribution(&[]), Err(Error::Empty(_))));
        assert!(cumulative_distribution(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn term_share_examples() {
        let g = graph(&[(0, 0, 0.0, 5.0), (0, 1, 3.0, 3.0), (0, 2, 2.0, 0.0), (1, 2, 0.0, 6.0)]);
        let s = term_share(&g, NodeRef::firm(0)).unwrap();
        assert_eq!((s.short, s.long), (0.0, 1.0));
        let s = term_share(&g, NodeRef::firm(1)).unwrap();
        assert_eq!((s.short, s.long), (0.5, 0.5));
        let s = term_share(&g, NodeRef::firm(2)).unwrap();
        assert_eq!((s.short, s.long), (0.25, 0.75));
        assert!(term_share(&g, NodeRef::bank(0)).is_err());
    }

    #[test]
    fn term_share_with_only_unsplit_links_is_undefined() {
        let mut b = crate::graph::GraphBuilder::new();
        b.add_edge("B0", "F0", crate::graph::EdgeWeight::total_only(3.0).unwrap());
        let (g, _) = b.build();
        assert!(matches!(term_share(&g, NodeRef::firm(0)), Err(Error::Undefined(_))));
    }

    fn class_sizes(classes: &[usize], k: usize) -> Vec<usize> {
        let mut sizes = vec![0; k];
        for &c in classes {
            sizes[c] += 1;
        }
        sizes
    }

    #[test]
    fn quantile_class_examples() {
        let vals: Vec<f64> = (0..10).map(|i| (i * 7 % 10) as f64).collect();
        assert_eq!(class_sizes(&quantile_classes(&vals, 5).unwrap(), 5), vec![2; 5]);
        assert_eq!(quantile_classes(&vals, 1).unwrap(), vec![0; 10]);
        let ties = quantile_classes(&[1.0, 1.0, 1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(ties, vec![0, 0, 0, 1, 1, 1]);
        // Ties straddling a boundary split by input order.
        let ties = quantile_classes(&[1.0, 1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(ties, vec![0, 0, 1, 1]);
        assert!(quantile_classes(&[1.0, 2.0], 3).is_err());
        assert!(quantile_classes(&[1.0], 0).is_err());
    }

    #[test]
    fn conditional_distributions() {
        // F0: degree 1, F1: degree 2, F2: degree 3.
        let g = graph(&[
            (0, 0, 1.0, 0.0),
            (0, 1, 1.0, 0.0),
            (1, 1, 1.0, 0.0),
            (0, 2, 1.0, 0.0),
            (1, 2, 1.0, 0.0),
            (2, 2, 1.0, 0.0),
        ]);
        let one = conditional_degree_distributions(&g, &[Some(0); 3], 1).unwrap();
        let all: Vec<f64> = g.degrees(Mode::Firm).into_iter().map(|k| k as f64).collect();
        assert_eq!(one, vec![cumulative_distribution(&all).unwrap()]);

        let split = conditional_degree_distributions(&g, &[Some(0), Some(1), Some(1)], 2).unwrap();
        assert_eq!(split[0].points, vec![(1.0, 1.0)]);
        assert_eq!(split[1].points, vec![(2.0, 1.0), (3.0, 0.5)]);

        assert!(conditional_degree_distributions(&g, &[Some(0), Some(0), Some(0)], 2).is_err());
        assert!(conditional_degree_distributions(&g, &[Some(0), None, Some(0)], 1).is_err());
    }

    #[test]
    fn mode_summary_means_are_edges_over_nodes() {
        let g = graph(&[(0, 0, 1.0, 1.0), (0, 1, 2.0, 0.0), (1, 1, 0.0, 4.0)]);
        let b = mode_summary(&g, Mode::Bank);
        assert_eq!(b.mean_degree, 1.5);
        assert_eq!(b.max_degree, 2);
        assert_eq!(b.mean_strength, 4.0);
        assert_eq!(b.max_strength, 4.0);
        let f = mode_summary(&g, Mode::Firm);
        assert_eq!(f.mean_degree, 1.5);
        assert_eq!(f.max_strength, 6.0);
    }

    #[test]
    fn lower_quantile_convention() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(lower_quantile(&v, 0.5), 50.0);
        assert_eq!(lower_quantile(&[4.0; 10], 0.9), 4.0);
    }
}
