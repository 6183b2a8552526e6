use std::io::{self, Write};

use crate::error::{Error, LoadError, Result};
use crate::graph::Mode;
use crate::mst::tree_degrees;

use super::{fmt_amount, Attrs, ExportOptions, Exportable, GraphDocument, LoadedGraph};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn attr_list(attrs: &[(&str, String)]) -> String {
    let body: Vec<String> = attrs.iter().map(|(k, v)| format!("{k}={}", quote(v))).collect();
    format!("[{}]", body.join(", "))
}

fn node_attrs(opts: &ExportOptions<'_>, mode: Mode, id: &str) -> Vec<(&'static str, String)> {
    let mut attrs = vec![("label", id.to_owned())];
    if let Some((class, color)) = opts.node_class(mode, id) {
        attrs.push(("class", class.to_string()));
        attrs.push(("style", "filled".into()));
        attrs.push(("fillcolor", color.into()));
    }
    attrs
}

pub(super) fn write_dot<W: Write>(item: Exportable<'_>, opts: &ExportOptions<'_>, mut out: W) -> io::Result<()> {
    for c in opts.comments {
        writeln!(out, "// {c}")?;
    }
    writeln!(out, "graph \"credit\" {{")?;
    match item {
        Exportable::Bipartite(g) => {
            writeln!(out, "  graph [kind=\"bipartite\"];")?;
            for mode in [Mode::Bank, Mode::Firm] {
                for id in g.ids(mode) {
                    let mut attrs = node_attrs(opts, mode, id);
                    attrs.insert(1, ("mode", mode.as_str().into()));
                    writeln!(out, "  {} {};", quote(&format!("{mode}:{id}")), attr_list(&attrs))?;
                }
            }
            for e in g.edges() {
                let mut attrs = Vec::new();
                if let (Some(s), Some(l)) = (e.weight.short_term(), e.weight.long_term()) {
                    attrs.push(("short_term", fmt_amount(s)));
                    attrs.push(("long_term", fmt_amount(l)));
                }
                attrs.push(("total", fmt_amount(e.weight.total())));
                writeln!(
                    out,
                    "  {} -- {} {};",
                    quote(&format!("bank:{}", g.ids(Mode::Bank)[e.bank])),
                    quote(&format!("firm:{}", g.ids(Mode::Firm)[e.firm])),
                    attr_list(&attrs)
                )?;
            }
        }
        Exportable::Projected(p) => {
            write_graph_attrs(&mut out, "projection", p.mode(), p.source())?;
            for id in p.ids() {
                writeln!(out, "  {} {};", quote(id), attr_list(&node_attrs(opts, p.mode(), id)))?;
            }
            for e in p.edges() {
                let attrs = [("weight", e.shared.to_string())];
                writeln!(
                    out,
                    "  {} -- {} {};",
                    quote(&p.ids()[e.i]),
                    quote(&p.ids()[e.j]),
                    attr_list(&attrs)
                )?;
            }
        }
        Exportable::Forest(f) => {
            write_graph_attrs(&mut out, "forest", f.mode(), f.source())?;
            let degrees = tree_degrees(f);
            for (id, d) in f.ids().iter().zip(degrees) {
                let mut attrs = node_attrs(opts, f.mode(), id);
                attrs.push(("tree_degree", d.to_string()));
                writeln!(out, "  {} {};", quote(id), attr_list(&attrs))?;
            }
            for e in f.edges() {
                let attrs = [("weight", e.weight.to_string()), ("distance", fmt_amount(e.distance))];
                writeln!(
                    out,
                    "  {} -- {} {};",
                    quote(&f.ids()[e.i]),
                    quote(&f.ids()[e.j]),
                    attr_list(&attrs)
                )?;
            }
        }
    }
    writeln!(out, "}}")
}

fn write_graph_attrs<W: Write>(out: &mut W, kind: &str, mode: Mode, source: Option<&str>) -> io::Result<()> {
    let mut attrs = vec![("kind", kind.to_owned()), ("mode", mode.as_str().to_owned())];
    if let Some(s) = source {
        attrs.push(("source", s.to_owned()));
    }
    writeln!(out, "  graph {};", attr_list(&attrs))
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Id(String),
    Edge,
    Punct(char),
}

fn tokenize(text: &str) -> std::result::Result<Vec<(Token, u64)>, (u64, String)> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line) = (0, 1u64);
    let mut line_start = true;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            line_start = true;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let at_line_start = std::mem::replace(&mut line_start, false);
        match c {
            '#' if at_line_start => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'*') => {
                let start = line;
                i += 2;
                loop {
                    match chars.get(i) {
                        None => return Err((start, "unterminated comment".into())),
                        Some('*') if chars.get(i + 1) == Some(&'/') => {
                            i += 2;
                            break;
                        }
                        Some('\n') => line += 1,
                        _ => {}
                    }
                    i += 1;
                }
            }
            '"' => {
                let start = line;
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err((start, "unterminated string".into())),
                        Some('"') => break,
                        Some('\\') => {
                            match chars.get(i + 1) {
                                Some('"') => s.push('"'),
                                Some('\\') => s.push('\\'),
                                Some('n') => s.push('\n'),
                                Some('\n') => line += 1,
                                Some(&other) => {
                                    s.push('\\');
                                    s.push(other);
                                }
                                None => return Err((start, "unterminated string".into())),
                            }
                            i += 1;
                        }
                        Some(&ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                        }
                    }
                    i += 1;
                }
                i += 1;
                tokens.push((Token::Id(s), start));
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                tokens.push((Token::Edge, line));
                i += 2;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                return Err((line, "directed edges are not supported".into()));
            }
            '{' | '}' | '[' | ']' | ';' | ',' | '=' | ':' => {
                tokens.push((Token::Punct(c), line));
                i += 1;
            }
            c if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_alphanumeric() || matches!(chars[i], '_' | '.')) {
                    i += 1;
                }
                tokens.push((Token::Id(chars[start..i].iter().collect()), line));
            }
            other => return Err((line, format!("unexpected character `{other}`"))),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, u64)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> u64 {
        self.tokens
            .get(self.pos)
            .or(self.tokens.last())
            .map(|(_, l)| *l)
            .unwrap_or(1)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, c: char) -> std::result::Result<(), String> {
        match self.next() {
            Some(Token::Punct(p)) if p == c => Ok(()),
            other => Err(format!("expected `{c}`, found {other:?}")),
        }
    }

    fn id(&mut self) -> std::result::Result<String, String> {
        match self.next() {
            Some(Token::Id(s)) => Ok(s),
            other => Err(format!("expected an identifier, found {other:?}")),
        }
    }

    fn attr_lists(&mut self) -> std::result::Result<Attrs, String> {
        let mut attrs = Vec::new();
        while self.peek() == Some(&Token::Punct('[')) {
            self.pos += 1;
            loop {
                match self.peek() {
                    Some(Token::Punct(']')) => {
                        self.pos += 1;
                        break;
                    }
                    Some(Token::Punct(',' | ';')) => self.pos += 1,
                    _ => {
                        let k = self.id()?;
                        self.expect('=')?;
                        attrs.push((k, self.id()?));
                    }
                }
            }
        }
        Ok(attrs)
    }

    /// Node id, ignoring any `:port` suffix.
    fn node_id(&mut self) -> std::result::Result<String, String> {
        let id = self.id()?;
        while self.peek() == Some(&Token::Punct(':')) {
            self.pos += 1;
            self.id()?;
        }
        Ok(id)
    }

    fn document(&mut self) -> std::result::Result<GraphDocument, String> {
        let mut doc = GraphDocument {
            kind: None,
            mode: None,
            source: None,
            nodes: Vec::new(),
            edges: Vec::new(),
        };
        let mut graph_attrs: Attrs = Vec::new();
        let mut kw = self.id()?;
        if kw.eq_ignore_ascii_case("strict") {
            kw = self.id()?;
        }
        if !kw.eq_ignore_ascii_case("graph") {
            return Err(format!("expected `graph`, found `{kw}`"));
        }
        if let Some(Token::Id(_)) = self.peek() {
            self.pos += 1;
        }
        self.expect('{')?;
        let mut declared = std::collections::HashSet::new();
        loop {
            match self.peek() {
                None => return Err("missing closing `}`".into()),
                Some(Token::Punct('}')) => {
                    self.pos += 1;
                    break;
                }
                Some(Token::Punct(';')) => self.pos += 1,
                Some(Token::Id(kw)) if ["graph", "node", "edge"].contains(&kw.to_ascii_lowercase().as_str()) => {
                    let is_graph = kw.eq_ignore_ascii_case("graph");
                    self.pos += 1;
                    let attrs = self.attr_lists()?;
                    if is_graph {
                        graph_attrs.extend(attrs);
                    }
                }
                Some(Token::Id(_)) => {
                    let first = self.node_id()?;
                    if self.peek() == Some(&Token::Punct('=')) {
                        self.pos += 1;
                        graph_attrs.push((first, self.id()?));
                        continue;
                    }
                    let mut chain = vec![first];
                    while self.peek() == Some(&Token::Edge) {
                        self.pos += 1;
                        chain.push(self.node_id()?);
                    }
                    let attrs = self.attr_lists()?;
                    if chain.len() == 1 {
                        let id = chain.pop().expect("one node");
                        if declared.insert(id.clone()) {
                            doc.nodes.push((id, attrs));
                        }
                    } else {
                        for id in &chain {
                            if declared.insert(id.clone()) {
                                doc.nodes.push((id.clone(), Vec::new()));
                            }
                        }
                        for pair in chain.windows(2) {
                            doc.edges.push((pair[0].clone(), pair[1].clone(), attrs.clone()));
                        }
                    }
                }
                Some(other) => return Err(format!("unexpected {other:?}")),
            }
        }
        if self.pos < self.tokens.len() {
            return Err("content after the closing `}`".into());
        }
        let get = |k: &str| {
            graph_attrs
                .iter()
                .rev()
                .find(|(key, _)| key == k)
                .map(|(_, v)| v.clone())
        };
        doc.kind = get("kind");
        doc.mode = get("mode");
        doc.source = get("source");
        Ok(doc)
    }
}

pub(super) fn read_dot(text: &str, source_name: &str) -> Result<LoadedGraph> {
    let fail = |line: u64, msg: String| Error::from(LoadError::single(source_name, line, msg));
    let tokens = tokenize(text).map_err(|(l, m)| fail(l, m))?;
    let mut parser = Parser { tokens, pos: 0 };
    let doc = parser.document().map_err(|m| fail(parser.line(), m))?;
    doc.into_graph(source_name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attributes::{BankAttributes, NodeAttributes};
    use crate::classify::{BankType, Region};
    use crate::io::{export_to_string, read_graph, ExportFormat};
    use crate::mst::minimal_spanning_forest;
    use crate::projection::{ProjectedEdge, ProjectedGraph};

    fn tree() -> ProjectedGraph {
        ProjectedGraph::new(
            Mode::Bank,
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                ProjectedEdge { i: 0, j: 1, shared: 4 },
                ProjectedEdge { i: 1, j: 2, shared: 2 },
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn colored_tree_has_three_nodes_and_two_edges() {
        let mut attrs = NodeAttributes::default();
        for (id, t) in [("a", 1), ("b", 2), ("c", 6)] {
            attrs.banks.insert(
                id.into(),
                BankAttributes {
                    name: id.to_uppercase(),
                    bank_type: BankType::from_code(t).unwrap(),
                    region: Region::from_code(0).unwrap(),
                    capital: None,
                    asset: None,
                },
            );
        }
        let f = minimal_spanning_forest(&tree());
        let opts = ExportOptions {
            attributes: Some(&attrs),
            ..Default::default()
        };
        let text = export_to_string(Exportable::Forest(&f), ExportFormat::Dot, &opts).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.iter().filter(|l| l.contains("tree_degree")).count(), 3);
        assert_eq!(lines.iter().filter(|l| l.contains(" -- ")).count(), 2);
        assert!(text.contains("fillcolor=\"blue\""));
        assert_eq!(
            read_graph(&text, ExportFormat::Dot, "t.dot").unwrap(),
            LoadedGraph::Projected(tree())
        );
    }

    #[test]
    fn hand_written_dot_with_comments() {
        let text = r#"
# leading hash comment
/* block
   comment */
strict graph g {
  graph [kind=projection]; mode = firm
  node [shape=box]
  x -- y -- "z w" [weight=2] // trailing
  lone;
}
"#;
        let LoadedGraph::Projected(p) = read_graph(text, ExportFormat::Dot, "g.dot").unwrap() else {
            panic!("expected a projection");
        };
        assert_eq!(p.mode(), Mode::Firm);
        assert_eq!(p.node_count(), 4);
        assert_eq!(p.edge_count(), 2);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = read_dot("graph {\n  a -- b [weight=1\n", "bad.dot").unwrap_err();
        assert!(err.to_string().contains("bad.dot"), "{err}");
        assert!(read_dot("digraph { a -> b }", "d.dot").is_err());
        assert!(read_dot("graph { \"a -- b }", "d.dot").is_err());
    }

    #[test]
    fn quoting_round_trips() {
        assert_eq!(tokenize(&quote("a\"b\\c")).unwrap()[0].0, Token::Id("a\"b\\c".into()));
    }
}
