use std::collections::HashMap;
use std::io::{self, Write};

use quick_xml::escape::{escape, unescape};
use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, XmlVersion};

use crate::error::{Error, LoadError, Result};
use crate::graph::Mode;
use crate::mst::tree_degrees;

use super::{fmt_amount, ExportOptions, Exportable, GraphDocument, LoadedGraph};

const KEYS: [(&str, &str, &str); 12] = [
    ("kind", "graph", "string"),
    ("mode", "graph", "string"),
    ("source", "graph", "string"),
    ("label", "node", "string"),
    ("class", "node", "int"),
    ("color", "node", "string"),
    ("tree_degree", "node", "int"),
    ("short_term", "edge", "double"),
    ("long_term", "edge", "double"),
    ("total", "edge", "double"),
    ("weight", "edge", "int"),
    ("distance", "edge", "double"),
];

fn data(out: &mut impl Write, indent: &str, key: &str, value: &str) -> io::Result<()> {
    writeln!(out, "{indent}<data key=\"{key}\">{}</data>", escape(value))
}

fn node(out: &mut impl Write, id: &str, attrs: &[(&str, String)]) -> io::Result<()> {
    writeln!(out, "    <node id=\"{}\">", escape(id))?;
    for (k, v) in attrs {
        data(out, "      ", k, v)?;
    }
    writeln!(out, "    </node>")
}

fn edge(out: &mut impl Write, s: &str, t: &str, attrs: &[(&str, String)]) -> io::Result<()> {
    writeln!(out, "    <edge source=\"{}\" target=\"{}\">", escape(s), escape(t))?;
    for (k, v) in attrs {
        data(out, "      ", k, v)?;
    }
    writeln!(out, "    </edge>")
}

fn node_attrs(opts: &ExportOptions<'_>, mode: Mode, id: &str) -> Vec<(&'static str, String)> {
    let mut attrs = vec![("label", id.to_owned())];
    if let Some((class, color)) = opts.node_class(mode, id) {
        attrs.push(("class", class.to_string()));
        attrs.push(("color", color.into()));
    }
    attrs
}

pub(super) fn write_graphml<W: Write>(item: Exportable<'_>, opts: &ExportOptions<'_>, mut out: W) -> io::Result<()> {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    for c in opts.comments {
        // `--` may not appear inside an XML comment.
        writeln!(out, "<!-- {} -->", c.replace("--", "- -"))?;
    }
    writeln!(out, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#)?;
    for (name, domain, ty) in KEYS {
        writeln!(
            out,
            r#"  <key id="{name}" for="{domain}" attr.name="{name}" attr.type="{ty}"/>"#
        )?;
    }
    writeln!(out, r#"  <graph id="credit" edgedefault="undirected">"#)?;
    match item {
        Exportable::Bipartite(g) => {
            data(&mut out, "    ", "kind", "bipartite")?;
            for mode in [Mode::Bank, Mode::Firm] {
                for id in g.ids(mode) {
                    node(&mut out, &format!("{mode}:{id}"), &node_attrs(opts, mode, id))?;
                }
            }
            for e in g.edges() {
                let mut attrs = Vec::new();
                if let (Some(s), Some(l)) = (e.weight.short_term(), e.weight.long_term()) {
                    attrs.push(("short_term", fmt_amount(s)));
                    attrs.push(("long_term", fmt_amount(l)));
                }
                attrs.push(("total", fmt_amount(e.weight.total())));
                let bank = format!("bank:{}", g.ids(Mode::Bank)[e.bank]);
                let firm = format!("firm:{}", g.ids(Mode::Firm)[e.firm]);
                edge(&mut out, &bank, &firm, &attrs)?;
            }
        }
        Exportable::Projected(p) => {
            graph_data(&mut out, "projection", p.mode(), p.source())?;
            for id in p.ids() {
                node(&mut out, id, &node_attrs(opts, p.mode(), id))?;
            }
            for e in p.edges() {
                edge(
                    &mut out,
                    &p.ids()[e.i],
                    &p.ids()[e.j],
                    &[("weight", e.shared.to_string())],
                )?;
            }
        }
        Exportable::Forest(f) => {
            graph_data(&mut out, "forest", f.mode(), f.source())?;
            for (id, d) in f.ids().iter().zip(tree_degrees(f)) {
                let mut attrs = node_attrs(opts, f.mode(), id);
                attrs.push(("tree_degree", d.to_string()));
                node(&mut out, id, &attrs)?;
            }
            for e in f.edges() {
                let attrs = [("weight", e.weight.to_string()), ("distance", fmt_amount(e.distance))];
                edge(&mut out, &f.ids()[e.i], &f.ids()[e.j], &attrs)?;
            }
        }
    }
    writeln!(out, "  </graph>")?;
    writeln!(out, "</graphml>")
}

fn graph_data(out: &mut impl Write, kind: &str, mode: Mode, source: Option<&str>) -> io::Result<()> {
    data(out, "    ", "kind", kind)?;
    data(out, "    ", "mode", mode.as_str())?;
    if let Some(s) = source {
        data(out, "    ", "source", s)?;
    }
    Ok(())
}

fn attribute(e: &BytesStart<'_>, name: &str) -> std::result::Result<Option<String>, String> {
    for a in e.attributes() {
        let a = a.map_err(|e| e.to_string())?;
        if a.key.as_ref() == name {
            let v = a.normalized_value(XmlVersion::Implicit1_0).map_err(|e| e.to_string())?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

enum Owner {
    Graph,
    Node,
    Edge,
}

pub(super) fn read_graphml(text: &str, source_name: &str) -> Result<LoadedGraph> {
    let line_at = |pos: u64| {
        1 + text.as_bytes()[..(pos as usize).min(text.len())]
            .iter()
            .filter(|&&b| b == b'\n')
            .count() as u64
    };
    let mut reader = Reader::from_str(text);
    let mut doc = GraphDocument {
        kind: None,
        mode: None,
        source: None,
        nodes: Vec::new(),
        edges: Vec::new(),
    };
    // key id -> attribute name
    let mut keys: HashMap<String, String> = HashMap::new();
    let mut owner = None;
    let mut graphs = 0;
    let result: std::result::Result<(), String> = (|| loop {
        let ev = reader.read_event().map_err(|e| e.to_string())?;
        match ev {
            Event::Eof => return Ok(()),
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(ev, Event::Empty(_));
                match e.local_name().as_ref() {
                    "key" => {
                        let id = attribute(e, "id")?.ok_or("key without id")?;
                        let name = attribute(e, "attr.name")?.unwrap_or_else(|| id.clone());
                        keys.insert(id, name);
                    }
                    "graph" => {
                        graphs += 1;
                        if graphs > 1 {
                            return Err("nested or multiple graphs are not supported".into());
                        }
                        if attribute(e, "edgedefault")?.as_deref() == Some("directed") {
                            return Err("directed graphs are not supported".into());
                        }
                        owner = Some(Owner::Graph);
                    }
                    "node" => {
                        let id = attribute(e, "id")?.ok_or("node without id")?;
                        doc.nodes.push((id, Vec::new()));
                        if !empty {
                            owner = Some(Owner::Node);
                        }
                    }
                    "edge" => {
                        let s = attribute(e, "source")?.ok_or("edge without source")?;
                        let t = attribute(e, "target")?.ok_or("edge without target")?;
                        doc.edges.push((s, t, Vec::new()));
                        if !empty {
                            owner = Some(Owner::Edge);
                        }
                    }
                    "data" => {
                        let key = attribute(e, "key")?.ok_or("data without key")?;
                        let name = keys.get(&key).cloned().unwrap_or(key);
                        let value = if empty {
                            String::new()
                        } else {
                            let raw = reader.read_text(e.name()).map_err(|e| e.to_string())?;
                            let raw = raw.into_inner();
                            unescape(&raw).map_err(|e| e.to_string())?.trim().to_owned()
                        };
                        match owner {
                            Some(Owner::Graph) => match name.as_str() {
                                "kind" => doc.kind = Some(value),
                                "mode" => doc.mode = Some(value),
                                "source" => doc.source = Some(value),
                                _ => {}
                            },
                            Some(Owner::Node) => doc.nodes.last_mut().expect("open node").1.push((name, value)),
                            Some(Owner::Edge) => doc.edges.last_mut().expect("open edge").2.push((name, value)),
                            None => {}
                        }
                    }
                    _ => {}
                }
            }
            Event::End(ref e) => match e.local_name().as_ref() {
                "node" | "edge" => owner = Some(Owner::Graph),
                "graph" => owner = None,
                _ => {}
            },
            _ => {}
        }
    })();
    if let Err(msg) = result {
        let line = line_at(reader.buffer_position());
        return Err(Error::from(LoadError::single(source_name, line, msg)));
    }
    if graphs == 0 {
        return Err(Error::from(LoadError::single(source_name, 1, "no <graph> element")));
    }
    doc.into_graph(source_name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeWeight, GraphBuilder};
    use crate::io::{export_to_string, read_graph, ExportFormat};

    #[test]
    fn bipartite_round_trip_with_escapes() {
        let mut b = GraphBuilder::new();
        b.add_edge("A&B <bank>", "F\"1\"", EdgeWeight::split(1.25, 0.0).unwrap());
        b.add_edge("A&B <bank>", "F2", EdgeWeight::total_only(3.0).unwrap());
        b.add_firm("idle");
        let (g, _) = b.build();
        let comments = vec!["run: x -- y".to_owned()];
        let opts = ExportOptions {
            comments: &comments,
            ..Default::default()
        };
        let text = export_to_string(Exportable::Bipartite(&g), ExportFormat::GraphMl, &opts).unwrap();
        assert!(!text.contains("x -- y"));
        assert_eq!(
            read_graph(&text, ExportFormat::GraphMl, "g.graphml").unwrap(),
            LoadedGraph::Bipartite(g)
        );
    }

    #[test]
    fn foreign_key_ids_are_mapped_by_name() {
        let text = r#"<?xml version="1.0"?>
<graphml xmlns="http://graphml.graphdrawing.org/xmlns">
  <key id="d0" for="graph" attr.name="kind" attr.type="string"/>
  <key id="d1" for="graph" attr.name="mode" attr.type="string"/>
  <key id="d2" for="edge" attr.name="weight" attr.type="int"/>
  <graph edgedefault="undirected">
    <data key="d0">projection</data><data key="d1">bank</data>
    <node id="x"/><node id="y"/>
    <edge source="x" target="y"><data key="d2">5</data></edge>
  </graph>
</graphml>"#;
        let LoadedGraph::Projected(p) = read_graph(text, ExportFormat::GraphMl, "f.graphml").unwrap() else {
            panic!("expected a projection");
        };
        assert_eq!(p.shared(0, 1), Some(5));
    }

    #[test]
    fn malformed_xml_reports_line() {
        let text = "<graphml>\n<graph>\n<node id=\"a\">\n</edge>\n</graphml>";
        let err = read_graphml(text, "m.graphml").unwrap_err();
        match err {
            Error::Load(l) => assert!(l.violations[0].line >= 3, "{l}"),
            other => panic!("unexpected {other}"),
        }
    }
}
