use std::fmt::Write as _;
use std::io::BufRead;

use serde_json::Value;

use super::cleanse::{ArcSemantics, RawGraph};
use super::Graph;
use crate::error::{CoreError, Result};

/// Token separator for edge-list files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeListDialect {
    /// SNAP style, any run of spaces or tabs.
    #[default]
    Whitespace,
    /// One comma between the two ids, surrounding blanks ignored.
    Comma,
}

/// Reads raw edge records in file order. Lines starting with `#` and blank
/// lines are skipped; every other line must hold exactly two ids.
pub fn parse_edge_list<R: BufRead>(reader: R, dialect: EdgeListDialect) -> Result<Vec<(String, String)>> {
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = match dialect {
            EdgeListDialect::Whitespace => trimmed.split_whitespace().collect(),
            EdgeListDialect::Comma => trimmed.split(',').map(str::trim).collect(),
        };
        match tokens.as_slice() {
            [u, v] if !u.is_empty() && !v.is_empty() => edges.push(((*u).to_owned(), (*v).to_owned())),
            _ => {
                return Err(CoreError::Parse {
                    line: i + 1,
                    message: format!("expected two vertex ids, found {} token(s)", tokens.len()),
                })
            }
        }
    }
    Ok(edges)
}

pub fn parse_edge_list_str(text: &str) -> Result<Vec<(String, String)>> {
    parse_edge_list(text.as_bytes(), EdgeListDialect::Whitespace)
}

/// Reads an adjacency document (`{"id": [neighbour, ...], ...}`) without
/// cleansing it.
pub fn read_adjacency_json(text: &str) -> Result<RawGraph> {
    let root: Value = serde_json::from_str(text).map_err(|e| CoreError::Adjacency(e.to_string()))?;
    let Value::Object(map) = root else {
        return Err(CoreError::Adjacency("root must be an object".into()));
    };
    let mut raw = RawGraph { declared: Vec::with_capacity(map.len()), arcs: Vec::new() };
    for (key, value) in map {
        let Value::Array(items) = value else {
            return Err(CoreError::Adjacency(format!("value of {key:?} is not an array")));
        };
        for item in items {
            let neighbour = item.as_u64().ok_or_else(|| {
                CoreError::Adjacency(format!("neighbour {item} of {key:?} is not a non-negative integer"))
            })?;
            raw.arcs.push((key.clone(), neighbour.to_string()));
        }
        raw.declared.push(key);
    }
    Ok(raw)
}

/// Parses and cleanses an adjacency document.
pub fn parse_adjacency_json(text: &str) -> Result<Graph> {
    Ok(read_adjacency_json(text)?.cleanse(ArcSemantics::Adjacency).0)
}

/// Serializes to the adjacency format with keys in ascending vertex order.
///
/// Neighbour values must be numbers, so graphs whose labels are not all
/// numeric are written with their dense indices instead.
pub fn write_adjacency_json(graph: &Graph) -> String {
    let numeric = graph.numeric_labels();
    let name = |v: super::VertexId| -> String {
        if numeric {
            graph.label(v).to_owned()
        } else {
            v.0.to_string()
        }
    };
    let mut out = String::with_capacity(16 * (graph.n() + graph.m()));
    out.push('{');
    for (i, v) in graph.vertices().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "\"{}\":[", name(v));
        for (j, &w) in graph.neighbors(v).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&name(w));
        }
        out.push(']');
    }
    out.push('}');
    out
}

/// Serializes each undirected edge once as `u v`, using external labels.
/// Isolated vertices cannot be represented and are dropped.
pub fn write_edge_list(graph: &Graph) -> String {
    let mut out = format!("# n={} m={}\n", graph.n(), graph.m());
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "{} {}", graph.label(u), graph.label(v));
    }
    out
}
