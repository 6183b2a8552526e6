use std::path::{Path, PathBuf};

use banknet::io::{
    export_to_string, read_attributes, read_edges, read_graph, read_numeric_columns, write_bank_attributes,
    write_firm_attributes, ExportFormat, ExportOptions, Exportable, LoadedGraph,
};
use banknet::metrics::financial::{bank_capital_ratio_points, capital_normalized_weights, firm_financial_rows};
use banknet::metrics::{
    assortativity_summary, cumulative_distribution, kendall_tau, mode_summary, participation_ratio, pearson,
    strength_degree_correlation, term_share, CorrelationResult,
};
use banknet::{
    components, diameter, fit_tail, generate, hubs, minimal_spanning_forest, project_with, projection_stats,
    tree_degrees, BankType, BipartiteGraph, CutoffStrategy, GeneratorConfig, Mode, NodeAttributes, NodeRef,
    ProjectedGraph, ProjectionOptions, SectorGroup, SplitRule, Term,
};

use crate::error::CliError;
use crate::output::{num, opt_num, Done, Outputs, RunContext};
use crate::{CorrArgs, FitArgs, Method, MstArgs, ProjectArgs, StatsArgs, SynthArgs, Transform};

type Rows = Vec<Vec<String>>;

const MODES: [Mode; 2] = [Mode::Bank, Mode::Firm];
const TERMS: [Term; 3] = [Term::Total, Term::Short, Term::Long];

fn load_graph(ctx: &mut RunContext, path: &Path) -> Result<BipartiteGraph, CliError> {
    let text = ctx.read_input(path)?;
    let loaded = read_edges(text.as_bytes(), &path.display().to_string())?;
    let r = loaded.report;
    log::info!(
        "{}: {} rows, {} duplicates merged, {} zero rows dropped, {} rows without a term split",
        path.display(),
        r.rows,
        r.duplicates_merged,
        r.zero_rows_dropped,
        r.unsplit_rows
    );
    if loaded.graph.edge_count() == 0 {
        return Err(CliError::Validation(format!(
            "{}: edge list has no links",
            path.display()
        )));
    }
    Ok(loaded.graph)
}

fn load_attributes(
    ctx: &mut RunContext,
    paths: &[PathBuf],
    g: Option<&BipartiteGraph>,
) -> Result<NodeAttributes, CliError> {
    let mut attrs = NodeAttributes::default();
    for p in paths {
        let text = ctx.read_input(p)?;
        attrs.extend(read_attributes(text.as_bytes(), &p.display().to_string())?);
    }
    if let (Some(g), false) = (g, attrs.is_empty()) {
        let j = attrs.join(g);
        if j.bank_orphans + j.firm_orphans > 0 {
            log::warn!(
                "{} bank and {} firm attribute records match no node",
                j.bank_orphans,
                j.firm_orphans
            );
        }
        log::info!(
            "{} banks and {} firms lack attributes",
            j.banks_missing,
            j.firms_missing
        );
    }
    Ok(attrs)
}

fn metric(rows: &mut Rows, name: impl Into<String>, value: impl ToString) {
    rows.push(vec![name.into(), value.to_string()]);
}

fn ccdf_rows(values: &[f64]) -> Option<Rows> {
    let d = cumulative_distribution(values).ok()?;
    Some(d.points.iter().map(|&(x, p)| vec![num(x), num(p)]).collect())
}

fn fit_row(rows: &mut Rows, quantity: &str, mode: &str, values: &[f64], strategy: CutoffStrategy) {
    let mut row = vec![quantity.to_owned(), mode.to_owned(), format!("{strategy:?}")];
    match fit_tail(values, strategy) {
        Ok(f) => row.extend([
            num(f.cutoff),
            num(f.mu_hat),
            num(f.std_error),
            f.tail_count.to_string(),
            values.len().to_string(),
            String::new(),
        ]),
        Err(e) => row.extend(
            ["NA", "NA", "NA", "0"]
                .map(String::from)
                .into_iter()
                .chain([values.len().to_string(), e.to_string()]),
        ),
    }
    rows.push(row);
}

fn corr_metrics(rows: &mut Rows, prefix: &str, r: Result<CorrelationResult, String>) {
    match r {
        Ok(r) => {
            metric(rows, format!("{prefix}_r"), num(r.coefficient));
            metric(rows, format!("{prefix}_p"), opt_num(r.p_value()));
            metric(rows, format!("{prefix}_n"), r.sample_count);
        }
        Err(e) => {
            log::warn!("{prefix}: {e}");
            metric(rows, format!("{prefix}_r"), "NA");
            metric(rows, format!("{prefix}_p"), "NA");
        }
    }
}

pub fn stats(a: &StatsArgs) -> Result<Done, CliError> {
    if !(a.cutoff_quantile > 0.0 && a.cutoff_quantile < 1.0) {
        return Err(CliError::Validation(format!(
            "--cutoff-quantile must be in (0, 1), got {}",
            a.cutoff_quantile
        )));
    }
    let mut ctx = RunContext::new("stats", a);
    let g = load_graph(&mut ctx, &a.input.edges)?;
    let attrs = load_attributes(&mut ctx, &a.input.attrs, Some(&g))?;
    let mut out = Outputs::new(ctx.run_id());
    let q = a.cutoff_quantile;

    let mut summary = Rows::new();
    metric(&mut summary, "edges", g.edge_count());
    metric(&mut summary, "edges_without_split", g.unsplit_edge_count());
    let mut fits = Rows::new();
    let mut participation = Rows::new();
    let mut assortativity = Rows::new();
    for mode in MODES {
        let m = mode.as_str();
        let s = mode_summary(&g, mode);
        metric(&mut summary, format!("{m}_nodes"), s.node_count);
        metric(&mut summary, format!("{m}_linked"), s.linked_count);
        metric(&mut summary, format!("{m}_mean_degree"), num(s.mean_degree));
        metric(&mut summary, format!("{m}_max_degree"), s.max_degree);
        metric(&mut summary, format!("{m}_mean_strength"), num(s.mean_strength));
        metric(&mut summary, format!("{m}_max_strength"), num(s.max_strength));

        let degrees = g.degrees(mode);
        let linked: Vec<f64> = degrees.iter().filter(|&&k| k > 0).map(|&k| k as f64).collect();
        if let Some(rows) = ccdf_rows(&linked) {
            out.table(&format!("degree_ccdf_{m}.csv"), &["degree", "ccdf"], rows)?;
        }
        fit_row(&mut fits, "degree", m, &linked, CutoffStrategy::DiscreteQuantile(q));
        for term in TERMS {
            let t = term.as_str();
            let positive: Vec<f64> = g.strengths(mode, term).into_iter().filter(|s| *s > 0.0).collect();
            if let Some(rows) = ccdf_rows(&positive) {
                out.table(&format!("strength_ccdf_{m}_{t}.csv"), &["strength", "ccdf"], rows)?;
            }
            fit_row(
                &mut fits,
                &format!("strength_{t}"),
                m,
                &positive,
                CutoffStrategy::FixedQuantile(q),
            );
        }

        let (raw, log) = match strength_degree_correlation(&g, mode) {
            Ok((raw, log)) => (Ok(raw), Ok(log)),
            Err(e) => (Err(e.to_string()), Err(e.to_string())),
        };
        corr_metrics(&mut summary, &format!("{m}_strength_degree"), raw);
        corr_metrics(&mut summary, &format!("{m}_log_strength_log_degree"), log);

        let asr = assortativity_summary(&g, mode);
        metric(&mut summary, format!("{m}_mean_assortativity"), opt_num(asr.mean));
        metric(&mut summary, format!("{m}_assortativity_excluded"), asr.excluded);
        for (i, v) in asr.values.iter().enumerate() {
            assortativity.push(vec![
                m.into(),
                g.ids(mode)[i].clone(),
                degrees[i].to_string(),
                opt_num(*v),
            ]);
        }
        for (i, &k) in degrees.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let mut row = vec![m.into(), g.ids(mode)[i].clone(), k.to_string(), num(1.0 / k as f64)];
            for term in TERMS {
                row.push(opt_num(participation_ratio(&g, NodeRef::new(mode, i), term).ok()));
            }
            participation.push(row);
        }
    }

    let weights: Vec<f64> = g.edges().iter().map(|e| e.weight.total()).collect();
    if let Some(rows) = ccdf_rows(&weights) {
        out.table("weight_ccdf.csv", &["weight", "ccdf"], rows)?;
    }
    fit_row(&mut fits, "weight", "", &weights, CutoffStrategy::FixedQuantile(q));

    let comps = components(&g);
    metric(&mut summary, "components", comps.count());
    let d = diameter(&g)?;
    metric(&mut summary, "giant_component_nodes", d.giant_size);
    metric(&mut summary, "giant_component_diameter", d.diameter);

    let mut shares = Rows::new();
    for f in 0..g.firm_count() {
        if let Ok(t) = term_share(&g, NodeRef::firm(f)) {
            let k = g.degree(NodeRef::firm(f))?;
            shares.push(vec![
                g.ids(Mode::Firm)[f].clone(),
                k.to_string(),
                num(t.short),
                num(t.long),
                t.skipped_links.to_string(),
            ]);
        }
    }

    if !attrs.firms.is_empty() {
        let rows = firm_financial_rows(&g, &attrs, a.asset_basis);
        metric(&mut summary, "firms_with_financials", rows.len());
        let (ks, dars): (Vec<f64>, Vec<f64>) = rows.iter().map(|r| (r.degree as f64, r.dar)).unzip();
        match kendall_tau(&ks, &dars) {
            Ok(r) => {
                metric(&mut summary, "degree_dar_kendall_tau", num(r.coefficient));
                metric(&mut summary, "degree_dar_kendall_sigma", opt_num(r.sigma_multiple()));
            }
            Err(e) => {
                log::warn!("degree-DAR correlation: {e}");
                metric(&mut summary, "degree_dar_kendall_tau", "NA");
            }
        }
        let table = rows
            .iter()
            .map(|r| {
                vec![
                    g.ids(Mode::Firm)[r.firm].clone(),
                    r.degree.to_string(),
                    num(r.debt),
                    num(r.asset),
                    num(r.dar),
                ]
            })
            .collect();
        out.table(
            "firm_financials.csv",
            &["firm_id", "degree", "debt", "asset", "dar"],
            table,
        )?;
    }
    if !attrs.banks.is_empty() {
        let degrees = g.degrees(Mode::Bank);
        let table = (0..g.bank_count())
            .filter_map(|b| {
                let ba = attrs.bank(&g, b)?;
                Some(vec![
                    g.ids(Mode::Bank)[b].clone(),
                    ba.bank_type.code().to_string(),
                    degrees[b].to_string(),
                    opt_num(ba.capital_to_asset()),
                ])
            })
            .collect();
        out.table(
            "bank_capital.csv",
            &["bank_id", "bank_type", "degree", "capital_to_asset"],
            table,
        )?;
        let all_types = [1, 2, 3, 4, 5, 6].map(|c| BankType::from_code(c).expect("valid code"));
        let (lk, car): (Vec<f64>, Vec<f64>) = bank_capital_ratio_points(&g, &attrs, &all_types).into_iter().unzip();
        corr_metrics(
            &mut summary,
            "log_degree_capital_ratio",
            pearson(&lk, &car).map_err(|e| e.to_string()),
        );
    }
    if !attrs.is_empty() {
        let (normalized, skipped) = capital_normalized_weights(&g, &attrs, a.capital_owner);
        metric(&mut summary, "capital_normalized_links", normalized.len());
        metric(&mut summary, "capital_normalized_skipped", skipped);
        let positive: Vec<f64> = normalized.into_iter().filter(|v| *v > 0.0).collect();
        if let Some(rows) = ccdf_rows(&positive) {
            out.table("weight_over_capital_ccdf.csv", &["ratio", "ccdf"], rows)?;
        }
        fit_row(
            &mut fits,
            "weight_over_capital",
            "",
            &positive,
            CutoffStrategy::FixedQuantile(q),
        );
    }

    let headline = format!(
        "{} links, {} banks (mean degree {:.2}), {} firms (mean degree {:.2})",
        g.edge_count(),
        g.bank_count(),
        mode_summary(&g, Mode::Bank).mean_degree,
        g.firm_count(),
        mode_summary(&g, Mode::Firm).mean_degree
    );
    out.table("summary.csv", &["metric", "value"], summary)?;
    out.table_noted(
        "fits.csv",
        &[banknet::tailfit::EXPONENT_CONVENTION],
        &[
            "quantity",
            "mode",
            "strategy",
            "cutoff",
            "mu",
            "std_error",
            "tail_count",
            "sample_count",
            "note",
        ],
        fits,
    )?;
    out.table(
        "participation.csv",
        &["mode", "id", "degree", "inverse_degree", "y_total", "y_short", "y_long"],
        participation,
    )?;
    out.table(
        "assortativity.csv",
        &["mode", "id", "degree", "mean_neighbor_degree"],
        assortativity,
    )?;
    out.table(
        "term_share.csv",
        &["firm_id", "degree", "short_share", "long_share", "unsplit_links"],
        shares,
    )?;
    out.commit(&ctx, &a.out.out, headline)
}

fn component_metrics(rows: &mut Rows, p: &ProjectedGraph) {
    let comps = components(p);
    metric(rows, "components", comps.count());
    let giant = comps.giant().map(|c| comps.sizes[c]).unwrap_or(0);
    metric(rows, "giant_component_nodes", giant);
}

pub fn project(a: &ProjectArgs) -> Result<Done, CliError> {
    let mut ctx = RunContext::new("project", a);
    let g = load_graph(&mut ctx, &a.input.edges)?;
    let attrs = load_attributes(&mut ctx, &a.input.attrs, Some(&g))?;
    let filter: Box<dyn Fn(NodeRef) -> bool + '_> = match (a.sector_group, a.bank_type) {
        (Some(code), _) => {
            let group = SectorGroup::from_code(code)?;
            if a.mode != Mode::Firm || attrs.firms.is_empty() {
                return Err(CliError::Validation(
                    "--sector-group needs --mode firm and a firm attribute file".into(),
                ));
            }
            Box::new(attrs.firms_in_group(&g, group))
        }
        (None, Some(code)) => {
            let t = BankType::from_code(code)?;
            if a.mode != Mode::Bank || attrs.banks.is_empty() {
                return Err(CliError::Validation(
                    "--bank-type needs --mode bank and a bank attribute file".into(),
                ));
            }
            let (g, attrs) = (&g, &attrs);
            Box::new(move |n: NodeRef| attrs.bank(g, n.index).is_some_and(|b| b.bank_type == t))
        }
        (None, None) => Box::new(|_| true),
    };
    let options = ProjectionOptions {
        degree_cap: a.degree_cap,
    };
    let (p, report) = project_with(&g, a.mode, filter, options)?;
    if p.node_count() == 0 {
        return Err(CliError::Validation("the filter selected no nodes".into()));
    }

    let mut out = Outputs::new(ctx.run_id());
    let comments = [out.run_comment()];
    let opts = ExportOptions {
        comments: &comments,
        ..Default::default()
    };
    let format = a.format.export();
    let text = export_to_string(Exportable::Projected(&p), format, &opts)?;
    out.add(format!("projection.{}", format.extension()), text.into_bytes());

    let mut rows = Rows::new();
    metric(&mut rows, "mode", a.mode);
    metric(&mut rows, "nodes", p.node_count());
    metric(&mut rows, "edges", p.edge_count());
    match projection_stats(&p) {
        Ok(s) => {
            metric(&mut rows, "linked_nodes", s.linked_nodes);
            metric(&mut rows, "possible_edges", s.possible_edges);
            metric(&mut rows, "density", num(s.density));
            metric(&mut rows, "mean_degree", num(s.mean_degree));
        }
        Err(e) => {
            log::warn!("projection statistics: {e}");
            for m in ["linked_nodes", "possible_edges", "density", "mean_degree"] {
                metric(&mut rows, m, "NA");
            }
        }
    }
    metric(
        &mut rows,
        "max_shared",
        p.max_weight().map(|w| w.to_string()).unwrap_or("NA".into()),
    );
    component_metrics(&mut rows, &p);
    metric(&mut rows, "pair_increments", report.pair_increments);
    metric(&mut rows, "capped_counterparties", report.capped_counterparties);
    out.table("projection_stats.csv", &["metric", "value"], rows)?;
    let headline = format!(
        "{} projection: {} nodes, {} links",
        a.mode,
        p.node_count(),
        p.edge_count()
    );
    out.commit(&ctx, &a.out.out, headline)
}

pub fn mst(a: &MstArgs) -> Result<Done, CliError> {
    let mut ctx = RunContext::new("mst", a);
    let p = match (&a.projection, &a.edges, a.mode) {
        (Some(path), _, _) => {
            let text = ctx.read_input(path)?;
            let format = ExportFormat::from_path(path)?;
            match read_graph(&text, format, &path.display().to_string())? {
                LoadedGraph::Projected(p) => p,
                LoadedGraph::Bipartite(_) => {
                    return Err(CliError::Validation(format!(
                        "{} holds a bipartite graph; use --edges with --mode",
                        path.display()
                    )))
                }
            }
        }
        (None, Some(edges), Some(mode)) => {
            let g = load_graph(&mut ctx, edges)?;
            project_with(&g, mode, |_| true, ProjectionOptions::default())?.0
        }
        _ => return Err(CliError::Validation("give --projection, or --edges with --mode".into())),
    };
    let attrs = load_attributes(&mut ctx, &a.attrs, None)?;
    if p.edge_count() == 0 {
        return Err(CliError::Computation(
            "the projection has no links, so link distances are undefined".into(),
        ));
    }
    let forest = minimal_spanning_forest(&p);

    let mut out = Outputs::new(ctx.run_id());
    let comments = [out.run_comment()];
    let opts = ExportOptions {
        comments: &comments,
        attributes: (!attrs.is_empty()).then_some(&attrs),
        scheme: a.color,
    };
    for format in [ExportFormat::EdgeCsv, ExportFormat::Dot, ExportFormat::GraphMl] {
        let text = export_to_string(Exportable::Forest(&forest), format, &opts)?;
        out.add(format!("forest.{}", format.extension()), text.into_bytes());
    }

    let deg = tree_degrees(&forest);
    let top = hubs(&forest, a.hubs)
        .into_iter()
        .enumerate()
        .map(|(rank, h)| {
            vec![
                (rank + 1).to_string(),
                h.id,
                h.degree.to_string(),
                p.degree(h.index).to_string(),
            ]
        })
        .collect();
    out.table("hubs.csv", &["rank", "id", "tree_degree", "projected_degree"], top)?;

    let mut rows = Rows::new();
    metric(&mut rows, "mode", forest.mode());
    metric(&mut rows, "nodes", forest.node_count);
    metric(&mut rows, "edges", forest.edge_count());
    metric(&mut rows, "components", forest.component_count);
    metric(&mut rows, "total_shared", forest.total_weight());
    metric(&mut rows, "total_distance", num(forest.total_distance()));
    metric(&mut rows, "max_shared", p.max_weight().expect("projection has links"));
    metric(&mut rows, "leaves", deg.iter().filter(|&&d| d == 1).count());
    metric(&mut rows, "max_tree_degree", deg.iter().max().copied().unwrap_or(0));
    let d = diameter(&forest.to_projection())?;
    metric(&mut rows, "giant_tree_nodes", d.giant_size);
    metric(&mut rows, "giant_tree_diameter", d.diameter);
    out.table("mst_summary.csv", &["metric", "value"], rows)?;
    let headline = format!(
        "{} spanning forest: {} nodes, {} links, {} components",
        forest.mode(),
        forest.node_count,
        forest.edge_count(),
        forest.component_count
    );
    out.commit(&ctx, &a.out.out, headline)
}

pub fn fit(a: &FitArgs) -> Result<Done, CliError> {
    let mut ctx = RunContext::new("fit", a);
    let text = ctx.read_input(&a.input)?;
    let table = read_numeric_columns(&text, &a.input.display().to_string(), &[a.column.as_str()])?;
    let values: Vec<f64> = table.complete_rows().map(|r| r[0]).collect();
    let missing = table.rows.len() - values.len();
    if missing > 0 {
        log::info!("{missing} rows without a value in `{}` skipped", a.column);
    }
    let strategy = match (a.cutoff, a.cutoff_quantile, a.discrete) {
        (Some(c), _, _) => CutoffStrategy::Explicit(c),
        (None, q, true) => CutoffStrategy::DiscreteQuantile(q.unwrap_or(0.5)),
        (None, q, false) => CutoffStrategy::FixedQuantile(q.unwrap_or(0.5)),
    };
    let f = fit_tail(&values, strategy)?;

    let mut out = Outputs::new(ctx.run_id());
    let row = vec![
        a.column.clone(),
        format!("{strategy:?}"),
        num(f.cutoff),
        num(f.mu_hat),
        num(f.std_error),
        f.tail_count.to_string(),
        values.len().to_string(),
        banknet::tailfit::EXPONENT_CONVENTION.into(),
    ];
    out.table(
        "fit.csv",
        &[
            "column",
            "strategy",
            "cutoff",
            "mu",
            "std_error",
            "tail_count",
            "sample_count",
            "convention",
        ],
        vec![row],
    )?;
    let headline = format!(
        "{}: mu = {:.4} +/- {:.4} from {} of {} samples above {}",
        a.column,
        f.mu_hat,
        f.std_error,
        f.tail_count,
        values.len(),
        num(f.cutoff)
    );
    out.commit(&ctx, &a.out.out, headline)
}

fn transform_name(t: Transform) -> &'static str {
    match t {
        Transform::None => "none",
        Transform::Log => "log",
    }
}

pub fn corr(a: &CorrArgs) -> Result<Done, CliError> {
    let mut ctx = RunContext::new("corr", a);
    let text = ctx.read_input(&a.input)?;
    let table = read_numeric_columns(&text, &a.input.display().to_string(), &[a.x.as_str(), a.y.as_str()])?;
    let complete: Vec<Vec<f64>> = table.complete_rows().collect();
    let incomplete = table.rows.len() - complete.len();
    let apply = |v: f64, t: Transform| match t {
        Transform::None => Some(v),
        Transform::Log => (v > 0.0).then(|| v.ln()),
    };
    let (xs, ys): (Vec<f64>, Vec<f64>) = complete
        .iter()
        .filter_map(|r| Some((apply(r[0], a.x_transform)?, apply(r[1], a.y_transform)?)))
        .unzip();
    let nonpositive = complete.len() - xs.len();
    if nonpositive > 0 {
        log::warn!("{nonpositive} rows with nonpositive values dropped before the log transform");
    }
    let r = match a.method {
        Method::Pearson => pearson(&xs, &ys)?,
        Method::Kendall => kendall_tau(&xs, &ys)?,
    };

    let mut out = Outputs::new(ctx.run_id());
    let row = vec![
        a.x.clone(),
        a.y.clone(),
        match a.method {
            Method::Pearson => "pearson".into(),
            Method::Kendall => "kendall".into(),
        },
        transform_name(a.x_transform).into(),
        transform_name(a.y_transform).into(),
        r.sample_count.to_string(),
        incomplete.to_string(),
        nonpositive.to_string(),
        num(r.coefficient),
        opt_num(r.p_value()),
        opt_num(r.sigma_multiple()),
        match a.method {
            Method::Pearson => "two-sided Student-t p-value".into(),
            Method::Kendall => "tau-b; sigma from the no-ties null variance".into(),
        },
    ];
    let headline = format!(
        "{} {} vs {}: {:.4} over {} rows",
        row[2], a.x, a.y, r.coefficient, r.sample_count
    );
    out.table(
        "correlation.csv",
        &[
            "x",
            "y",
            "method",
            "x_transform",
            "y_transform",
            "sample_count",
            "incomplete_rows",
            "nonpositive_rows",
            "coefficient",
            "p_value",
            "sigma",
            "significance",
        ],
        vec![row],
    )?;
    out.commit(&ctx, &a.out.out, headline)
}

pub fn synth(a: &SynthArgs) -> Result<Done, CliError> {
    let ctx = RunContext::new("synth", a);
    let cfg = GeneratorConfig {
        bank_count: a.banks,
        firm_count: a.firms,
        firm_degree_exponent: a.mu,
        mean_firm_degree: a.mean_degree,
        weight_exponent: a.weight_exponent,
        weight_min: a.weight_min,
        split: a.short_share.map_or(SplitRule::Uniform, SplitRule::Fixed),
        seed: a.seed,
        scale: a.scale,
    };
    let (g, attrs, report) = generate(&cfg)?;

    let mut out = Outputs::new(ctx.run_id());
    let comments = [out.run_comment(), format!("synthetic network, seed {}", a.seed)];
    let opts = ExportOptions {
        comments: &comments,
        ..Default::default()
    };
    let edges = export_to_string(Exportable::Bipartite(&g), ExportFormat::EdgeCsv, &opts)?;
    out.add("edges.csv", edges.into_bytes());
    let header = format!("# {}\n", out.run_comment()).into_bytes();
    let mut banks = header.clone();
    write_bank_attributes(&attrs, &mut banks).map_err(CliError::computation)?;
    out.add("banks.csv", banks);
    let mut firms = header;
    write_firm_attributes(&attrs, &mut firms).map_err(CliError::computation)?;
    out.add("firms.csv", firms);

    let mut rows = Rows::new();
    metric(&mut rows, "banks", report.bank_count);
    metric(&mut rows, "firms", report.firm_count);
    metric(&mut rows, "links", g.edge_count());
    metric(&mut rows, "requested_links", report.requested_links);
    metric(&mut rows, "resampled_draws", report.resampled);
    metric(&mut rows, "dropped_links", report.dropped_links);
    metric(&mut rows, "fingerprint", g.fingerprint());
    out.table("synth_report.csv", &["metric", "value"], rows)?;
    let headline = format!(
        "synthetic network: {} banks, {} firms, {} links (seed {})",
        g.bank_count(),
        g.firm_count(),
        g.edge_count(),
        a.seed
    );
    out.commit(&ctx, &a.out.out, headline)
}
