//! Instance file formats.
//!
//! * Hypergraph text (hMETIS-compatible): header `m n` (edge count, vertex
//!   count), then `m` lines of 1-indexed vertex ids. Lines starting with `%`
//!   are comments.
//! * Hypergraph JSON: `{"n": …, "edges": [[0-indexed ids], …], "anchors": …?}`.
//! * Graph text: header `n m` (vertex count, edge count), then `m` lines
//!   `u v` with 0-indexed endpoints; `%` comments as above.

use crate::hypergraph::{Graph, Hypergraph, HypergraphError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    Validation(#[from] HypergraphError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

/// Content lines with original 1-based line numbers, comments/blanks removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn parse_fields(line_no: usize, line: &str, expect: usize) -> Result<Vec<u64>, FormatError> {
    let fields: Result<Vec<u64>, _> = line.split_whitespace().map(str::parse).collect();
    let fields = fields.map_err(|e| parse_err(line_no, format!("expected integers: {e}")))?;
    if expect > 0 && fields.len() != expect {
        return Err(parse_err(
            line_no,
            format!("expected {expect} fields, found {}", fields.len()),
        ));
    }
    Ok(fields)
}

/// Parse the hMETIS-style hypergraph text format.
pub fn parse_hypergraph_text(text: &str) -> Result<Hypergraph, FormatError> {
    let mut lines = content_lines(text);
    let (line_no, header) =
        lines.next().ok_or_else(|| parse_err(0, "missing header line 'm n'"))?;
    let header = parse_fields(line_no, header, 2)?;
    let (m, n) = (header[0] as usize, header[1] as usize);
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line_no, line) =
            lines.next().ok_or_else(|| parse_err(0, format!("expected {m} edge lines")))?;
        let ids = parse_fields(line_no, line, 0)?;
        let mut edge = Vec::with_capacity(ids.len());
        for id in ids {
            if id == 0 || id > n as u64 {
                return Err(parse_err(line_no, format!("vertex id {id} outside 1..={n}")));
            }
            edge.push((id - 1) as u32);
        }
        edges.push(edge);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(parse_err(line_no, "trailing content after edge lines"));
    }
    Ok(Hypergraph::new(n, edges)?)
}

/// Serialize to the hypergraph text format; `comments` go first as `%` lines.
pub fn write_hypergraph_text(h: &Hypergraph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("% {c}\n"));
    }
    out.push_str(&format!("{} {}\n", h.num_edges(), h.num_vertices()));
    for e in h.edges() {
        let ids: Vec<String> = e.iter().map(|v| (v + 1).to_string()).collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct HypergraphJson {
    n: usize,
    edges: Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    anchors: Option<Vec<Vec<u32>>>,
}

/// Parse the JSON hypergraph format (0-indexed, optional anchors).
pub fn parse_hypergraph_json(text: &str) -> Result<Hypergraph, FormatError> {
    let parsed: HypergraphJson = serde_json::from_str(text)?;
    let h = match parsed.anchors {
        Some(anchors) => Hypergraph::with_anchors(parsed.n, parsed.edges, anchors)?,
        None => Hypergraph::new(parsed.n, parsed.edges)?,
    };
    Ok(h)
}

/// Serialize to the JSON hypergraph format; anchors are included only when
/// they differ from the default `e° = e`.
pub fn write_hypergraph_json(h: &Hypergraph) -> String {
    let anchors = (h.anchors() != h.edges()).then(|| h.anchors().to_vec());
    let doc = HypergraphJson { n: h.num_vertices(), edges: h.edges().to_vec(), anchors };
    serde_json::to_string(&doc).expect("plain data serializes")
}

/// Parse either hypergraph format, sniffing JSON by a leading `{`.
pub fn parse_hypergraph_auto(text: &str) -> Result<Hypergraph, FormatError> {
    if text.trim_start().starts_with('{') {
        parse_hypergraph_json(text)
    } else {
        parse_hypergraph_text(text)
    }
}

/// Parse the graph text format.
pub fn parse_graph_text(text: &str) -> Result<Graph, FormatError> {
    let mut lines = content_lines(text);
    let (line_no, header) =
        lines.next().ok_or_else(|| parse_err(0, "missing header line 'n m'"))?;
    let header = parse_fields(line_no, header, 2)?;
    let (n, m) = (header[0] as usize, header[1] as usize);
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line_no, line) =
            lines.next().ok_or_else(|| parse_err(0, format!("expected {m} edge lines")))?;
        let pair = parse_fields(line_no, line, 2)?;
        let (u, v) = (pair[0], pair[1]);
        if u >= n as u64 || v >= n as u64 {
            return Err(parse_err(line_no, format!("vertex id outside 0..{n}")));
        }
        edges.push((u as u32, v as u32));
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(parse_err(line_no, "trailing content after edge lines"));
    }
    Ok(Graph::new(n, edges)?)
}

/// Serialize to the graph text format; `comments` go first as `%` lines.
pub fn write_graph_text(g: &Graph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("% {c}\n"));
    }
    out.push_str(&format!("{} {}\n", g.num_vertices(), g.num_edges()));
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
