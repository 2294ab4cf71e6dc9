//! Text format for problem instances.
//!
//! ```text
//! # optional comments
//! dag <n> <m>
//! source <id>
//! sink <id>
//! <tail> <head> <q>      (m lines)
//! ```
//!
//! Vertex ids are arbitrary whitespace-free strings, mapped to dense
//! indices in order of first appearance.

use crate::instance::RawInstance;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {0}: expected `{1}`")]
    Expected(usize, &'static str),
    #[error("line {0}: malformed number `{1}`")]
    BadNumber(usize, String),
    #[error("header announced {0} vertices but {1} distinct ids appeared")]
    VertexCountMismatch(usize, usize),
    #[error("header announced {0} edges but {1} edge lines appeared")]
    EdgeCountMismatch(usize, usize),
    #[error("missing {0} declaration")]
    Missing(&'static str),
    #[error("trailing content at line {0}")]
    Trailing(usize),
}

pub fn parse_instance(text: &str) -> Result<RawInstance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, header) = lines.next().ok_or(ParseError::Missing("dag"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("dag") {
        return Err(ParseError::Expected(ln, "dag <n> <m>"));
    }
    let n: usize = parse_num(ln, parts.next().ok_or(ParseError::Expected(ln, "dag <n> <m>"))?)?;
    let m: usize = parse_num(ln, parts.next().ok_or(ParseError::Expected(ln, "dag <n> <m>"))?)?;
    if parts.next().is_some() {
        return Err(ParseError::Expected(ln, "dag <n> <m>"));
    }

    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut intern = |id: &str| -> usize {
        *ids.entry(id.to_string()).or_insert_with(|| {
            labels.push(id.to_string());
            labels.len() - 1
        })
    };

    // Source and sink are interned only after all edge endpoints, so that
    // indices follow first appearance in the edge list; this makes
    // parse ∘ render the identity on rendered instances.
    let source_label = expect_decl(&mut lines, "source")?;
    let sink_label = expect_decl(&mut lines, "sink")?;

    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = lines
            .next()
            .ok_or(ParseError::EdgeCountMismatch(m, edges.len()))?;
        let mut parts = line.split_whitespace();
        let (tail, head, q) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c), None) => (a, b, c),
            _ => return Err(ParseError::Expected(ln, "<tail> <head> <q>")),
        };
        let q: f64 = parse_num(ln, q)?;
        edges.push((intern(tail), intern(head), q));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(ParseError::Trailing(ln));
    }
    let source = intern(&source_label);
    let sink = intern(&sink_label);
    if labels.len() != n {
        return Err(ParseError::VertexCountMismatch(n, labels.len()));
    }
    Ok(RawInstance { labels, edges, s: source, t: sink })
}

fn parse_num<T: std::str::FromStr>(line: usize, token: &str) -> Result<T, ParseError> {
    token
        .parse()
        .map_err(|_| ParseError::BadNumber(line, token.to_string()))
}

fn expect_decl<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    keyword: &'static str,
) -> Result<String, ParseError> {
    let (ln, line) = lines.next().ok_or(ParseError::Missing(keyword))?;
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(id), None) if k == keyword => Ok(id.to_string()),
        _ => Err(ParseError::Expected(ln, "source|sink <id>")),
    }
}

pub fn render_instance(raw: &RawInstance) -> String {
    let mut out = String::new();
    out.push_str(&format!("dag {} {}\n", raw.labels.len(), raw.edges.len()));
    out.push_str(&format!("source {}\n", raw.labels[raw.s]));
    out.push_str(&format!("sink {}\n", raw.labels[raw.t]));
    for &(u, v, q) in &raw.edges {
        out.push_str(&format!("{} {} {}\n", raw.labels[u], raw.labels[v], q));
    }
    out
}

/// Bipartite graph format, for the independent-set reduction input:
///
/// ```text
/// bipartite <L> <R> <m>
/// <left index> <right index>    (m lines)
/// ```
pub fn parse_bipartite(text: &str) -> Result<crate::reductions::Bipartite, ParseError> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or(ParseError::Missing("bipartite"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let (left, right, m) = match toks.as_slice() {
        ["bipartite", l, r, m] => (
            parse_num(ln, l)?,
            parse_num(ln, r)?,
            parse_num::<usize>(ln, m)?,
        ),
        _ => return Err(ParseError::Expected(ln, "bipartite <L> <R> <m>")),
    };
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = lines.next().ok_or(ParseError::EdgeCountMismatch(m, edges.len()))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [u, v] => edges.push((parse_num(ln, u)?, parse_num(ln, v)?)),
            _ => return Err(ParseError::Expected(ln, "<left> <right>")),
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(ParseError::Trailing(ln));
    }
    Ok(crate::reductions::Bipartite { left, right, edges })
}

pub fn render_bipartite(g: &crate::reductions::Bipartite) -> String {
    let mut out = format!("bipartite {} {} {}\n", g.left, g.right, g.edges.len());
    for &(u, v) in &g.edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Vertex-failure instance format (edges never fail):
///
/// ```text
/// vdag <n> <m>
/// source <id>
/// sink <id>
/// fail <id> <p>                 (zero or more; default 0)
/// <tail> <head>                 (m lines)
/// ```
pub fn parse_vertex_instance(
    text: &str,
) -> Result<crate::reductions::VertexFailureInstance, ParseError> {
    let mut lines = content_lines(text).peekable();
    let (ln, header) = lines.next().ok_or(ParseError::Missing("vdag"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let (n, m) = match toks.as_slice() {
        ["vdag", n, m] => (parse_num::<usize>(ln, n)?, parse_num::<usize>(ln, m)?),
        _ => return Err(ParseError::Expected(ln, "vdag <n> <m>")),
    };
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut next_id = 0usize;
    let mut intern = |id: &str| -> usize {
        *ids.entry(id.to_string()).or_insert_with(|| {
            next_id += 1;
            next_id - 1
        })
    };
    let source_label = expect_decl(&mut lines, "source")?;
    let sink_label = expect_decl(&mut lines, "sink")?;
    let mut fails: Vec<(String, f64)> = Vec::new();
    while let Some((_, line)) = lines.peek() {
        if !line.starts_with("fail ") {
            break;
        }
        let (ln, line) = lines.next().unwrap();
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["fail", id, p] => fails.push((id.to_string(), parse_num(ln, p)?)),
            _ => return Err(ParseError::Expected(ln, "fail <id> <p>")),
        }
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = lines.next().ok_or(ParseError::EdgeCountMismatch(m, edges.len()))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [u, v] => edges.push((intern(u), intern(v))),
            _ => return Err(ParseError::Expected(ln, "<tail> <head>")),
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(ParseError::Trailing(ln));
    }
    let s = intern(&source_label);
    let t = intern(&sink_label);
    let fail_ids: Vec<(usize, f64)> = fails.iter().map(|(l, p)| (intern(l), *p)).collect();
    if next_id != n {
        return Err(ParseError::VertexCountMismatch(n, next_id));
    }
    let mut fail = vec![0.0; n];
    for (v, p) in fail_ids {
        fail[v] = p;
    }
    Ok(crate::reductions::VertexFailureInstance { n, edges, s, t, fail })
}

pub fn render_vertex_instance(inst: &crate::reductions::VertexFailureInstance) -> String {
    let name = |v: usize| format!("u{v}");
    let mut out = format!("vdag {} {}\n", inst.n, inst.edges.len());
    out.push_str(&format!("source {}\n", name(inst.s)));
    out.push_str(&format!("sink {}\n", name(inst.t)));
    for (v, &p) in inst.fail.iter().enumerate() {
        if p > 0.0 {
            out.push_str(&format!("fail {} {}\n", name(v), p));
        }
    }
    for &(u, v) in &inst.edges {
        out.push_str(&format!("{} {}\n", name(u), name(v)));
    }
    out
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}
