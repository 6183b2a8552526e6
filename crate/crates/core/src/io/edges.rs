use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use crate::error::{Error, LoadError, Result, Violation};
use crate::graph::{BipartiteGraph, EdgeWeight, GraphBuilder, Mode};
use crate::mst::tree_degrees;
use crate::projection::{ProjectedEdge, ProjectedGraph};

use super::{fmt_amount, header_line, read_text, ExportOptions, Exportable, LineIndex};

pub const UNIT_COMMENT: &str = "amounts in million yen";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeLoadReport {
    /// Data rows read (comments and header excluded).
    pub rows: usize,
    pub duplicates_merged: usize,
    /// Rows with a zero total, dropped.
    pub zero_rows_dropped: usize,
    /// Rows with a total but no short/long split.
    pub unsplit_rows: usize,
    /// Rows declaring a node with no links.
    pub isolated_nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedEdges {
    pub graph: BipartiteGraph,
    pub report: EdgeLoadReport,
}

pub fn load_edges(path: &Path) -> Result<LoadedEdges> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_edges(file, &path.display().to_string())
}

const EDGE_COLUMNS: [&str; 5] = ["bank_id", "firm_id", "short_term", "long_term", "total"];

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r)
}

struct Columns {
    index: [Option<usize>; 5],
    width: usize,
}

fn parse_header(
    headers: &csv::StringRecord,
    line: u64,
    known: &[&str],
    required: &[&str],
    violations: &mut Vec<Violation>,
) -> Option<Columns> {
    if headers.iter().all(str::is_empty) {
        violations.push(Violation {
            line,
            message: format!("missing header row (expected {})", required.join(",")),
        });
        return None;
    }
    let mut index = [None; 5];
    for (pos, name) in headers.iter().enumerate() {
        let name = name.trim_start_matches('\u{feff}');
        match known.iter().position(|k| *k == name) {
            Some(k) if index[k].is_some() => violations.push(Violation {
                line,
                message: format!("duplicate column `{name}`"),
            }),
            Some(k) => index[k] = Some(pos),
            None => violations.push(Violation {
                line,
                message: format!("unknown column `{name}`"),
            }),
        }
    }
    for req in required {
        let k = known.iter().position(|k| k == req).expect("required column is known");
        if index[k].is_none() {
            violations.push(Violation {
                line,
                message: format!("missing column `{req}`"),
            });
        }
    }
    Some(Columns {
        index,
        width: headers.len(),
    })
}

fn amount(field: &str, name: &str) -> std::result::Result<Option<f64>, String> {
    if field.is_empty() {
        return Ok(None);
    }
    let v: f64 = field.parse().map_err(|_| format!("{name} `{field}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("{name} `{field}` is not finite"));
    }
    if v < 0.0 {
        return Err(format!("negative {name} {field}"));
    }
    Ok(Some(v))
}

enum Row {
    Link(String, String, Option<EdgeWeight>),
    Bank(String),
    Firm(String),
}

fn parse_edge_row(rec: &csv::StringRecord, cols: &Columns) -> std::result::Result<Row, String> {
    if rec.len() != cols.width {
        return Err(format!("expected {} fields, found {}", cols.width, rec.len()));
    }
    let get = |k: usize| cols.index[k].map(|i| &rec[i]).unwrap_or("");
    let (bank, firm) = (get(0), get(1));
    let short = amount(get(2), "short_term")?;
    let long = amount(get(3), "long_term")?;
    let total = amount(get(4), "total")?;
    let no_amounts = short.is_none() && long.is_none() && total.is_none();
    match (bank.is_empty(), firm.is_empty()) {
        (true, true) => return Err("row has neither bank_id nor firm_id".into()),
        (false, true) if no_amounts => return Ok(Row::Bank(bank.into())),
        (true, false) if no_amounts => return Ok(Row::Firm(firm.into())),
        (false, false) => {}
        _ => return Err("loan amounts given without both bank_id and firm_id".into()),
    }
    let weight = match (short, long, total) {
        (Some(s), Some(l), t) => {
            let sum = s + l;
            if let Some(t) = t {
                if (t - sum).abs() > 1e-9 * t.abs().max(1.0) {
                    return Err(format!("total {t} differs from short_term + long_term = {sum}"));
                }
            }
            if sum == 0.0 {
                None
            } else {
                Some(EdgeWeight::split(s, l).map_err(|e| e.to_string())?)
            }
        }
        (None, None, Some(0.0)) => None,
        (None, None, Some(t)) => Some(EdgeWeight::total_only(t).map_err(|e| e.to_string())?),
        (None, None, None) => return Err("missing loan amounts".into()),
        _ => return Err("short_term and long_term must be given together".into()),
    };
    Ok(Row::Link(bank.into(), firm.into(), weight))
}

/// Read a bank–firm edge list. The whole input is validated before any graph
/// is returned; all problems are reported together.
pub fn read_edges<R: Read>(r: R, source_name: &str) -> Result<LoadedEdges> {
    let text = read_text(r, source_name)?;
    let lines = LineIndex::new(&text);
    let mut rdr = csv_reader(text.as_bytes());
    let mut violations = Vec::new();
    let headers = rdr
        .headers()
        .map_err(|e| LoadError::single(source_name, 1, e.to_string()))?
        .clone();
    let header_line = header_line(&text);
    let cols = parse_header(
        &headers,
        header_line,
        &EDGE_COLUMNS,
        &["bank_id", "firm_id"],
        &mut violations,
    );
    if let Some(c) = &cols {
        let has_split = c.index[2].is_some() && c.index[3].is_some();
        if !has_split && c.index[4].is_none() {
            violations.push(Violation {
                line: header_line,
                message: "need short_term and long_term columns, or a total column".into(),
            });
        }
    }
    if !violations.is_empty() {
        return Err(LoadError {
            source_name: source_name.into(),
            violations,
        }
        .into());
    }
    let cols = cols.expect("header parsed");

    let mut builder = GraphBuilder::new();
    let mut report = EdgeLoadReport::default();
    for rec in rdr.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = lines.of_error(&e);
                violations.push(Violation {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = lines.of_record(&rec);
        report.rows += 1;
        match parse_edge_row(&rec, &cols) {
            Ok(Row::Link(bank, firm, Some(w))) => {
                if !w.has_split() {
                    report.unsplit_rows += 1;
                }
                builder.add_edge(bank, firm, w);
            }
            Ok(Row::Link(bank, firm, None)) => {
                report.zero_rows_dropped += 1;
                // The pair still names real nodes.
                builder.add_bank(bank).add_firm(firm);
            }
            Ok(Row::Bank(id)) => {
                report.isolated_nodes += 1;
                builder.add_bank(id);
            }
            Ok(Row::Firm(id)) => {
                report.isolated_nodes += 1;
                builder.add_firm(id);
            }
            Err(message) => violations.push(Violation { line, message }),
        }
    }
    if !violations.is_empty() {
        return Err(LoadError {
            source_name: source_name.into(),
            violations,
        }
        .into());
    }
    let (graph, build) = builder.build();
    report.duplicates_merged = build.duplicates_merged;
    if report.duplicates_merged > 0 {
        log::warn!(
            "{source_name}: merged {} duplicate bank-firm rows",
            report.duplicates_merged
        );
    }
    Ok(LoadedEdges { graph, report })
}

/// `# key: value` comment lines.
fn metadata<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| {
        let rest = l.trim().strip_prefix('#')?.trim();
        let (k, v) = rest.split_once(':')?;
        (k.trim() == key).then(|| v.trim())
    })
}

const PROJECTION_COLUMNS: [&str; 4] = ["source_id", "target_id", "shared_count", "distance"];

/// Read a projection or forest edge list. The mode comes from the
/// `# mode:` comment, falling back to `mode`.
pub fn read_projection_csv(text: &str, source_name: &str, mode: Option<Mode>) -> Result<ProjectedGraph> {
    let single = |line, msg: String| Error::from(LoadError::single(source_name, line, msg));
    let mode = match metadata(text, "mode") {
        Some(m) => m.parse().map_err(|e: Error| single(0, e.to_string()))?,
        None => mode.ok_or_else(|| single(0, "projection file has no `# mode:` line".into()))?,
    };
    let source = metadata(text, "source_graph").map(str::to_owned);

    let lines = LineIndex::new(text);
    let mut rdr = csv_reader(text.as_bytes());
    let mut violations = Vec::new();
    let headers = rdr
        .headers()
        .map_err(|e| LoadError::single(source_name, 1, e.to_string()))?
        .clone();
    let header_line = header_line(text);
    let cols = parse_header(
        &headers,
        header_line,
        &PROJECTION_COLUMNS,
        &["source_id", "target_id", "shared_count"],
        &mut violations,
    );
    if !violations.is_empty() {
        return Err(LoadError {
            source_name: source_name.into(),
            violations,
        }
        .into());
    }
    let cols = cols.expect("header parsed");

    let mut nodes = BTreeSet::new();
    let mut raw_edges = Vec::new();
    for rec in rdr.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = lines.of_error(&e);
                violations.push(Violation {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = lines.of_record(&rec);
        if rec.len() != cols.width {
            violations.push(Violation {
                line,
                message: format!("expected {} fields, found {}", cols.width, rec.len()),
            });
            continue;
        }
        let get = |k: usize| cols.index[k].map(|i| &rec[i]).unwrap_or("");
        let (s, t, w) = (get(0), get(1), get(2));
        match (s.is_empty(), t.is_empty(), w.is_empty()) {
            (false, true, true) => {
                nodes.insert(s.to_owned());
            }
            (false, false, false) => match w.parse::<u32>() {
                Ok(0) => violations.push(Violation {
                    line,
                    message: "shared_count must be at least 1".into(),
                }),
                Ok(n) if s != t => {
                    nodes.insert(s.to_owned());
                    nodes.insert(t.to_owned());
                    raw_edges.push((line, s.to_owned(), t.to_owned(), n));
                }
                Ok(_) => violations.push(Violation {
                    line,
                    message: format!("self-loop on `{s}`"),
                }),
                Err(_) => violations.push(Violation {
                    line,
                    message: format!("shared_count `{w}` is not a positive integer"),
                }),
            },
            _ => violations.push(Violation {
                line,
                message: "row needs source_id, target_id and shared_count (or only source_id)".into(),
            }),
        }
    }
    let ids: Vec<String> = nodes.into_iter().collect();
    let index = |id: &str| ids.binary_search_by(|p| p.as_str().cmp(id)).expect("node collected");
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (line, s, t, shared) in raw_edges {
        let (a, b) = (index(&s), index(&t));
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        if !seen.insert((i, j)) {
            violations.push(Violation {
                line,
                message: format!("duplicate link {s} -- {t}"),
            });
        }
        edges.push(ProjectedEdge { i, j, shared });
    }
    if !violations.is_empty() {
        return Err(LoadError {
            source_name: source_name.into(),
            violations,
        }
        .into());
    }
    ProjectedGraph::new(mode, ids, edges, source).map_err(|e| single(0, e.to_string()))
}

pub(super) fn write_csv<W: Write>(item: Exportable<'_>, opts: &ExportOptions<'_>, mut out: W) -> io::Result<()> {
    let comment = |out: &mut W, line: &str| writeln!(out, "# {line}");
    match item {
        Exportable::Bipartite(g) => {
            comment(&mut out, UNIT_COMMENT)?;
            for c in opts.comments {
                comment(&mut out, c)?;
            }
            let with_total = g.unsplit_edge_count() > 0;
            let mut w = csv::WriterBuilder::new().from_writer(&mut out);
            if with_total {
                w.write_record(EDGE_COLUMNS)?;
            } else {
                w.write_record(&EDGE_COLUMNS[..4])?;
            }
            let opt = |v: Option<f64>| v.map(fmt_amount).unwrap_or_default();
            for e in g.edges() {
                let mut row = vec![
                    g.ids(Mode::Bank)[e.bank].clone(),
                    g.ids(Mode::Firm)[e.firm].clone(),
                    opt(e.weight.short_term()),
                    opt(e.weight.long_term()),
                ];
                if with_total {
                    row.push(fmt_amount(e.weight.total()));
                }
                w.write_record(&row)?;
            }
            let width = if with_total { 5 } else { 4 };
            for mode in [Mode::Bank, Mode::Firm] {
                for (i, k) in g.degrees(mode).into_iter().enumerate() {
                    if k == 0 {
                        let mut row = vec![String::new(); width];
                        row[if mode == Mode::Bank { 0 } else { 1 }] = g.ids(mode)[i].clone();
                        w.write_record(&row)?;
                    }
                }
            }
            w.flush()
        }
        Exportable::Projected(p) => {
            comment(&mut out, "kind: projection")?;
            comment(&mut out, &format!("mode: {}", p.mode()))?;
            if let Some(src) = p.source() {
                comment(&mut out, &format!("source_graph: {src}"))?;
            }
            for c in opts.comments {
                comment(&mut out, c)?;
            }
            let mut w = csv::WriterBuilder::new().from_writer(&mut out);
            w.write_record(&PROJECTION_COLUMNS[..3])?;
            for e in p.edges() {
                w.write_record([p.ids()[e.i].as_str(), p.ids()[e.j].as_str(), &e.shared.to_string()])?;
            }
            for i in (0..p.node_count()).filter(|&i| p.degree(i) == 0) {
                w.write_record([p.ids()[i].as_str(), "", ""])?;
            }
            w.flush()
        }
        Exportable::Forest(f) => {
            comment(&mut out, "kind: forest")?;
            comment(&mut out, &format!("mode: {}", f.mode()))?;
            if let Some(src) = f.source() {
                comment(&mut out, &format!("source_graph: {src}"))?;
            }
            comment(&mut out, &format!("components: {}", f.component_count))?;
            for c in opts.comments {
                comment(&mut out, c)?;
            }
            let mut w = csv::WriterBuilder::new().from_writer(&mut out);
            w.write_record(PROJECTION_COLUMNS)?;
            for e in f.edges() {
                w.write_record([
                    f.ids()[e.i].as_str(),
                    f.ids()[e.j].as_str(),
                    &e.weight.to_string(),
                    &fmt_amount(e.distance),
                ])?;
            }
            for (i, d) in tree_degrees(f).into_iter().enumerate() {
                if d == 0 {
                    w.write_record([f.ids()[i].as_str(), "", "", ""])?;
                }
            }
            w.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{export_to_string, ExportFormat};

    fn load(text: &str) -> Result<LoadedEdges> {
        read_edges(text.as_bytes(), "test.csv")
    }

    fn violations(err: Error) -> Vec<Violation> {
        match err {
            Error::Load(l) => l.violations,
            other => panic!("expected load error, got {other}"),
        }
    }

    #[test]
    fn header_only_is_an_empty_graph() {
        let l = load("bank_id,firm_id,short_term,long_term\n").unwrap();
        assert!(l.graph.is_empty());
        assert_eq!(l.report.rows, 0);
    }

    #[test]
    fn three_row_fixture() {
        let text =
            "# amounts in million yen\nbank_id,firm_id,short_term,long_term\nB1,F1,10,5\nB1,F2,0,3.5\nB2,F1,2,0\n";
        let l = load(text).unwrap();
        assert_eq!(
            (l.graph.bank_count(), l.graph.firm_count(), l.graph.edge_count()),
            (2, 2, 3)
        );
    }

    #[test]
    fn negative_amount_reports_line() {
        let text = "bank_id,firm_id,short_term,long_term\nB1,F1,1,1\nB1,F2,1,-4\n";
        let v = violations(load(text).unwrap_err());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].line, 3);
        assert!(v[0].message.contains("long_term"), "{}", v[0].message);
    }

    #[test]
    fn all_violations_are_collected() {
        let text = "bank_id,firm_id,short_term,long_term\nB1,F1,x,1\n# note\nB1,F2,1\n,,,\nB3,F3,1,\n";
        let v = violations(load(text).unwrap_err());
        let lines: Vec<u64> = v.iter().map(|v| v.line).collect();
        assert_eq!(lines, vec![2, 4, 5, 6]);
    }

    #[test]
    fn unknown_and_missing_columns() {
        let v = violations(load("bank_id,firm,short_term,long_term\n").unwrap_err());
        assert!(v.iter().any(|v| v.message.contains("unknown column `firm`")));
        assert!(v.iter().any(|v| v.message.contains("missing column `firm_id`")));
        assert!(load("bank_id,firm_id\n").is_err());
        assert!(load("").is_err());
    }

    #[test]
    fn zero_rows_dropped_and_duplicates_merged() {
        let text = "bank_id,firm_id,short_term,long_term\nB1,F1,0,0\nB1,F2,1,1\nB1,F2,2,0\n";
        let l = load(text).unwrap();
        assert_eq!(l.report.zero_rows_dropped, 1);
        assert_eq!(l.report.duplicates_merged, 1);
        assert_eq!(l.graph.edge_count(), 1);
        assert_eq!(l.graph.edges()[0].weight.total(), 4.0);
        // F1 is still a node, just without links.
        assert_eq!(l.graph.firm_count(), 2);
    }

    #[test]
    fn total_only_rows() {
        let text = "bank_id,firm_id,short_term,long_term,total\nB1,F1,,,7\nB1,F2,1,2,3\nB2,F2,1,2,4\n";
        let v = violations(load(text).unwrap_err());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].line, 4);
        let l = load("bank_id,firm_id,total\nB1,F1,7\n").unwrap();
        assert_eq!(l.report.unsplit_rows, 1);
        assert_eq!(l.graph.unsplit_edge_count(), 1);
    }

    #[test]
    fn csv_round_trip_with_isolated_nodes_and_quoting() {
        let mut b = GraphBuilder::new();
        b.add_bank("Bank, Ltd.");
        b.add_firm("lonely");
        b.add_edge("B1", "F \"1\"", EdgeWeight::split(0.1, 1e-3).unwrap());
        b.add_edge("B1", "F2", EdgeWeight::total_only(12345.678).unwrap());
        let (g, _) = b.build();
        let text = export_to_string(Exportable::Bipartite(&g), ExportFormat::EdgeCsv, &Default::default()).unwrap();
        let back = load(&text).unwrap();
        assert_eq!(back.graph, g);
        assert_eq!(back.report.isolated_nodes, 2);
    }

    #[test]
    fn projection_csv_round_trip() {
        let p = ProjectedGraph::new(
            Mode::Firm,
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                ProjectedEdge { i: 0, j: 2, shared: 3 },
                ProjectedEdge { i: 1, j: 2, shared: 1 },
            ],
            Some("abc123".into()),
        )
        .unwrap();
        let text = export_to_string(Exportable::Projected(&p), ExportFormat::EdgeCsv, &Default::default()).unwrap();
        assert_eq!(read_projection_csv(&text, "p.csv", None).unwrap(), p);
    }

    #[test]
    fn projection_csv_errors() {
        let hdr = "# mode: bank\nsource_id,target_id,shared_count\n";
        assert!(read_projection_csv(&format!("{hdr}a,b,0\n"), "p", None).is_err());
        assert!(read_projection_csv(&format!("{hdr}a,a,2\n"), "p", None).is_err());
        assert!(read_projection_csv(&format!("{hdr}a,b,2\nb,a,1\n"), "p", None).is_err());
        assert!(read_projection_csv("source_id,target_id,shared_count\na,b,1\n", "p", None).is_err());
        let p = read_projection_csv("source_id,target_id,shared_count\na,b,1\n", "p", Some(Mode::Bank)).unwrap();
        assert_eq!(p.mode(), Mode::Bank);
    }
}
