//! Simple undirected graphs over dense integer vertex ids.
//!
//! Every [`Graph`] is produced by [`data_cleanse`] (directly or through one of
//! the parsers and generators), so the invariants below hold for any value of
//! the type:
//!
//! * no self-loops,
//! * symmetric adjacency,
//! * no duplicate neighbours, each neighbour list sorted ascending,
//! * `m` equals half the total adjacency length.
//!
//! External vertex labels are interned to `0..n` in a canonical order
//! (numerically when every label is a non-negative integer, lexicographically
//! otherwise) and the original label is kept for reporting.

mod cleanse;
mod generate;
mod parse;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use cleanse::{data_cleanse, data_cleanse_indexed, ArcSemantics, CleanseReport, RawGraph};
pub use generate::{gen_complete, gen_cycle, gen_path};
pub use parse::{
    parse_adjacency_json, parse_edge_list, parse_edge_list_str, read_adjacency_json, write_adjacency_json,
    write_edge_list, EdgeListDialect,
};

/// Dense vertex index inside one [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Immutable cleansed graph in compressed sparse row form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    labels: Vec<String>,
    numeric_labels: bool,
}

impl Graph {
    /// Builds a graph from already-cleansed adjacency. Callers inside the crate
    /// guarantee the invariants; this is not exposed.
    pub(crate) fn from_parts(offsets: Vec<usize>, targets: Vec<VertexId>, labels: Vec<String>) -> Self {
        debug_assert_eq!(offsets.len(), labels.len() + 1);
        debug_assert_eq!(*offsets.last().unwrap_or(&0), targets.len());
        let numeric_labels = labels.iter().all(|l| cleanse::numeric_label(l).is_some());
        Graph { offsets, targets, labels, numeric_labels }
    }

    pub fn empty() -> Self {
        Graph { offsets: vec![0], targets: Vec::new(), labels: Vec::new(), numeric_labels: true }
    }

    /// Number of vertices.
    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of undirected edges.
    #[inline]
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let i = v.index();
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let i = v.index();
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        (0..self.n() as u32).map(VertexId)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Original external label of a vertex.
    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Looks a vertex up by its external label.
    pub fn find(&self, label: &str) -> Option<VertexId> {
        // Labels are stored in canonical order, so a binary search works.
        if self.numeric_labels && cleanse::numeric_label(label).is_none() {
            return None;
        }
        self.labels
            .binary_search_by(|probe| cleanse::label_cmp(probe, label, self.numeric_labels))
            .ok()
            .map(|i| VertexId(i as u32))
    }

    /// True when every label is a plain non-negative integer.
    pub fn numeric_labels(&self) -> bool {
        self.numeric_labels
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Full scan of the structural invariants. Returns a description of the
    /// first violation found.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.targets.len() % 2 != 0 {
            return Err("odd adjacency length".into());
        }
        for u in self.vertices() {
            let adj = self.neighbors(u);
            for w in adj.windows(2) {
                if w[0] >= w[1] {
                    return Err(format!("neighbours of {u} not strictly ascending"));
                }
            }
            for &v in adj {
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if v.index() >= self.n() {
                    return Err(format!("neighbour {v} of {u} out of range"));
                }
                if self.neighbors(v).binary_search(&u).is_err() {
                    return Err(format!("edge {u}-{v} is not symmetric"));
                }
            }
        }
        Ok(())
    }
}

/// Summary statistics in the shape of the dataset tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    /// `2m / n`, or 0 for the empty graph.
    pub avg_degree: f64,
    pub max_degree: usize,
    pub max_core: Option<u32>,
}

pub fn stats(graph: &Graph) -> GraphStats {
    let n = graph.n();
    let m = graph.m();
    GraphStats {
        n,
        m,
        avg_degree: if n == 0 { 0.0 } else { (2 * m) as f64 / n as f64 },
        max_degree: graph.max_degree(),
        max_core: None,
    }
}

impl fmt::Display for GraphStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} m={} avg_degree={:.4} max_degree={}", self.n, self.m, self.avg_degree, self.max_degree)?;
        if let Some(k) = self.max_core {
            write!(f, " max_core={k}")?;
        }
        Ok(())
    }
}
