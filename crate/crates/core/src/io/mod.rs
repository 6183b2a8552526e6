//! File formats: edge-list CSV, attribute CSV, DOT and GraphML.
//!
//! Every writer is deterministic: the same object and options produce the
//! same bytes. Every loader reads back what the writers produce.

mod attributes;
mod dot;
mod edges;
mod graphml;
mod table;

pub use attributes::{load_attributes, read_attributes, write_bank_attributes, write_firm_attributes};
pub use edges::{load_edges, read_edges, read_projection_csv, EdgeLoadReport, LoadedEdges};
pub use table::{read_numeric_columns, NumericColumns};

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use crate::attributes::{ColorScheme, NodeAttributes};
use crate::error::{Error, LoadError, Result};
use crate::graph::{BipartiteGraph, Mode};
use crate::mst::SpanningForest;
use crate::projection::ProjectedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    EdgeCsv,
    Dot,
    GraphMl,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::EdgeCsv => "csv",
            ExportFormat::Dot => "dot",
            ExportFormat::GraphMl => "graphml",
        }
    }

    /// Guess a format from a file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        path.extension()
            .and_then(|e| e.to_str())
            .ok_or_else(|| Error::invalid(format!("cannot infer format of {}", path.display())))?
            .parse()
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" | "edge-csv" | "edgecsv" => Ok(ExportFormat::EdgeCsv),
            "dot" | "gv" => Ok(ExportFormat::Dot),
            "graphml" | "xml" => Ok(ExportFormat::GraphMl),
            other => Err(Error::invalid(format!("unknown export format `{other}`"))),
        }
    }
}

/// Anything the exporters can write.
#[derive(Debug, Clone, Copy)]
pub enum Exportable<'a> {
    Bipartite(&'a BipartiteGraph),
    Projected(&'a ProjectedGraph),
    Forest(&'a SpanningForest),
}

/// A graph read back from any supported format. Forests load as the
/// projection made of their tree links.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedGraph {
    Bipartite(BipartiteGraph),
    Projected(ProjectedGraph),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExportOptions<'a> {
    /// Free-text lines written as comments at the top of the file.
    pub comments: &'a [String],
    pub attributes: Option<&'a NodeAttributes>,
    pub scheme: ColorScheme,
}

impl ExportOptions<'_> {
    /// `(class code, color)` of a node, when attributes are loaded.
    pub(crate) fn node_class(&self, mode: Mode, id: &str) -> Option<(u8, &'static str)> {
        let attrs = self.attributes?;
        let scheme = match (mode, self.scheme) {
            (Mode::Firm, _) => ColorScheme::SectorGroup,
            (Mode::Bank, ColorScheme::SectorGroup) => ColorScheme::BankType,
            (Mode::Bank, s) => s,
        };
        Some((attrs.class_code(mode, id, scheme)?, attrs.color(mode, id, scheme)?))
    }
}

pub fn export_graph<W: Write>(
    item: Exportable<'_>,
    format: ExportFormat,
    opts: &ExportOptions<'_>,
    out: W,
) -> Result<()> {
    let res = match format {
        ExportFormat::EdgeCsv => edges::write_csv(item, opts, out),
        ExportFormat::Dot => dot::write_dot(item, opts, out),
        ExportFormat::GraphMl => graphml::write_graphml(item, opts, out),
    };
    res.map_err(|e| Error::io("<export>", e))
}

pub fn export_to_string(item: Exportable<'_>, format: ExportFormat, opts: &ExportOptions<'_>) -> Result<String> {
    let mut buf = Vec::new();
    export_graph(item, format, opts, &mut buf)?;
    Ok(String::from_utf8(buf).expect("exporters write UTF-8"))
}

pub fn export_to_path(item: Exportable<'_>, format: ExportFormat, opts: &ExportOptions<'_>, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = io::BufWriter::new(file);
    export_graph(item, format, opts, &mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Parse a graph from text in the given format.
pub fn read_graph(text: &str, format: ExportFormat, source_name: &str) -> Result<LoadedGraph> {
    match format {
        ExportFormat::EdgeCsv => {
            let kind = first_header(text);
            if kind.as_deref().is_some_and(|h| h.starts_with("bank_id")) {
                Ok(LoadedGraph::Bipartite(read_edges(text.as_bytes(), source_name)?.graph))
            } else {
                Ok(LoadedGraph::Projected(read_projection_csv(text, source_name, None)?))
            }
        }
        ExportFormat::Dot => dot::read_dot(text, source_name),
        ExportFormat::GraphMl => graphml::read_graphml(text, source_name),
    }
}

pub fn load_graph(path: &Path, format: Option<ExportFormat>) -> Result<LoadedGraph> {
    let format = match format {
        Some(f) => f,
        None => ExportFormat::from_path(path)?,
    };
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_graph(&text, format, &path.display().to_string())
}

/// First non-comment, non-blank line.
pub(crate) fn first_header(text: &str) -> Option<String> {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.trim_start_matches('\u{feff}').to_owned())
}

/// Shared helper for the graph-document formats (DOT, GraphML): build an
/// object from parsed nodes and edges.
/// `(key, value)` attribute pairs in document order.
pub(crate) type Attrs = Vec<(String, String)>;

pub(crate) struct GraphDocument {
    pub kind: Option<String>,
    pub mode: Option<String>,
    pub source: Option<String>,
    /// `(node name, attributes)`.
    pub nodes: Vec<(String, Attrs)>,
    /// `(source name, target name, attributes)`.
    pub edges: Vec<(String, String, Attrs)>,
}

fn attr<'a>(attrs: &'a [(String, String)], key: &str) -> Option<&'a str> {
    attrs.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

impl GraphDocument {
    pub fn into_graph(self, source_name: &str) -> Result<LoadedGraph> {
        let fail = |msg: String| Error::from(LoadError::single(source_name, 0, msg));
        match self.kind.as_deref() {
            Some("bipartite") => {
                let mut b = crate::graph::GraphBuilder::new();
                let split = |name: &str| -> Result<(Mode, String)> {
                    let (mode, id) = name
                        .split_once(':')
                        .ok_or_else(|| fail(format!("node `{name}` lacks a bank:/firm: prefix")))?;
                    Ok((mode.parse().map_err(|e: Error| fail(e.to_string()))?, id.to_owned()))
                };
                for (name, _) in &self.nodes {
                    match split(name)? {
                        (Mode::Bank, id) => b.add_bank(id),
                        (Mode::Firm, id) => b.add_firm(id),
                    };
                }
                for (s, t, attrs) in &self.edges {
                    let (ms, is) = split(s)?;
                    let (mt, it) = split(t)?;
                    let (bank, firm) = match (ms, mt) {
                        (Mode::Bank, Mode::Firm) => (is, it),
                        (Mode::Firm, Mode::Bank) => (it, is),
                        _ => return Err(fail(format!("edge {s} -- {t} joins nodes of one mode"))),
                    };
                    let num = |key: &str| -> Result<Option<f64>> {
                        attr(attrs, key)
                            .map(|v| {
                                v.parse::<f64>()
                                    .map_err(|_| fail(format!("bad {key} `{v}` on {s} -- {t}")))
                            })
                            .transpose()
                    };
                    let weight = match (num("short_term")?, num("long_term")?, num("total")?) {
                        (Some(sh), Some(lo), _) => crate::graph::EdgeWeight::split(sh, lo),
                        (None, None, Some(total)) => crate::graph::EdgeWeight::total_only(total),
                        _ => return Err(fail(format!("edge {s} -- {t} lacks loan amounts"))),
                    }
                    .map_err(|e| fail(format!("edge {s} -- {t}: {e}")))?;
                    if b.add_edge(bank, firm, weight) {
                        return Err(fail(format!("duplicate edge {s} -- {t}")));
                    }
                }
                Ok(LoadedGraph::Bipartite(b.build().0))
            }
            Some("projection") | Some("forest") => {
                let mode: Mode = self
                    .mode
                    .as_deref()
                    .ok_or_else(|| fail("projection without a mode".into()))?
                    .parse()
                    .map_err(|e: Error| fail(e.to_string()))?;
                let mut ids: Vec<String> = self.nodes.iter().map(|(n, _)| n.clone()).collect();
                ids.sort();
                ids.dedup();
                let index = |name: &str| -> Result<usize> {
                    ids.binary_search_by(|p| p.as_str().cmp(name))
                        .map_err(|_| fail(format!("edge endpoint `{name}` is not a declared node")))
                };
                let mut edges = Vec::with_capacity(self.edges.len());
                for (s, t, attrs) in &self.edges {
                    let (a, b) = (index(s)?, index(t)?);
                    let w = attr(attrs, "weight").ok_or_else(|| fail(format!("edge {s} -- {t} lacks a weight")))?;
                    let shared: u32 = w.parse().map_err(|_| fail(format!("bad weight `{w}` on {s} -- {t}")))?;
                    let (i, j) = if a < b { (a, b) } else { (b, a) };
                    edges.push(crate::projection::ProjectedEdge { i, j, shared });
                }
                let p = ProjectedGraph::new(mode, ids, edges, self.source).map_err(|e| fail(e.to_string()))?;
                Ok(LoadedGraph::Projected(p))
            }
            other => Err(fail(format!("unknown graph kind {other:?}"))),
        }
    }
}

/// Shortest round-trip decimal rendering of an amount.
pub(crate) fn fmt_amount(v: f64) -> String {
    format!("{v}")
}

/// Maps byte offsets to 1-based line numbers. The csv reader does not count
/// comment lines, so line numbers are taken from byte positions instead.
pub(crate) struct LineIndex {
    starts: Vec<u64>,
    /// Comment or blank line, which the csv reader skips.
    skipped: Vec<bool>,
}

impl LineIndex {
    pub fn new(text: &str) -> Self {
        let starts = std::iter::once(0)
            .chain(
                text.bytes()
                    .enumerate()
                    .filter(|&(_, b)| b == b'\n')
                    .map(|(i, _)| i as u64 + 1),
            )
            .collect();
        let skipped = text
            .split('\n')
            .map(|l| {
                let l = l.trim();
                l.is_empty() || l.starts_with('#')
            })
            .collect();
        LineIndex { starts, skipped }
    }

    /// Line of the first record starting at or after `byte`.
    pub fn line(&self, byte: u64) -> u64 {
        let mut line = self.starts.partition_point(|&s| s <= byte).max(1);
        while self.skipped.get(line - 1).copied().unwrap_or(false) && line < self.skipped.len() {
            line += 1;
        }
        line as u64
    }

    pub fn of_record(&self, rec: &csv::StringRecord) -> u64 {
        rec.position().map(|p| self.line(p.byte())).unwrap_or(0)
    }

    pub fn of_error(&self, e: &csv::Error) -> u64 {
        e.position().map(|p| self.line(p.byte())).unwrap_or(0)
    }
}

pub(crate) fn read_text<R: std::io::Read>(mut r: R, source_name: &str) -> Result<String> {
    let mut text = String::new();
    r.read_to_string(&mut text)
        .map_err(|e| LoadError::single(source_name, 0, format!("cannot read input: {e}")))?;
    Ok(text)
}

/// Line number of the header row, for header-level errors.
pub(crate) fn header_line(text: &str) -> u64 {
    text.lines()
        .position(|l| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .map_or(1, |i| i as u64 + 1)
}
