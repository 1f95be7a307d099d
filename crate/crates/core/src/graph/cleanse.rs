use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{Graph, VertexId};

/// How repeated arcs between the same pair are counted as duplicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcSemantics {
    /// Every record names an undirected edge: any record beyond the first
    /// for a pair is a duplicate, whichever direction it points.
    EdgeList,
    /// Records come from adjacency lists where each edge is expected in both
    /// directions: only exact repeats of a directed arc are duplicates.
    Adjacency,
}

/// Repair counters emitted by [`data_cleanse`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanseReport {
    pub loops_removed: usize,
    pub dups_removed: usize,
    /// Edges present in only one direction that were mirrored.
    pub edges_symmetrized: usize,
    /// Vertices that only appeared as a neighbour and were materialized.
    pub nodes_added: usize,
}

impl CleanseReport {
    pub fn is_clean(&self) -> bool {
        *self == CleanseReport::default()
    }
}

/// Unprocessed input: declared vertices plus raw directed arcs.
#[derive(Debug, Clone, Default)]
pub struct RawGraph {
    /// Vertices the input names explicitly (adjacency keys, edge sources).
    pub declared: Vec<String>,
    pub arcs: Vec<(String, String)>,
}

impl RawGraph {
    /// Edge-list view: the first token of every record declares a vertex.
    pub fn from_edge_list<S: AsRef<str>>(edges: &[(S, S)]) -> Self {
        RawGraph {
            declared: edges.iter().map(|(u, _)| u.as_ref().to_owned()).collect(),
            arcs: edges.iter().map(|(u, v)| (u.as_ref().to_owned(), v.as_ref().to_owned())).collect(),
        }
    }

    pub fn cleanse(self, semantics: ArcSemantics) -> (Graph, CleanseReport) {
        let declared: HashSet<&str> = self.declared.iter().map(String::as_str).collect();
        let mut all: HashSet<&str> = declared.clone();
        for (u, v) in &self.arcs {
            all.insert(u);
            all.insert(v);
        }
        let nodes_added = all.len() - declared.len();

        let numeric = all.iter().all(|l| numeric_label(l).is_some());
        let mut labels: Vec<String> = all.into_iter().map(str::to_owned).collect();
        labels.sort_unstable_by(|a, b| label_cmp(a, b, numeric));

        let index: HashMap<&str, u32> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i as u32)).collect();
        let arcs: Vec<(u32, u32)> = self.arcs.iter().map(|(u, v)| (index[u.as_str()], index[v.as_str()])).collect();
        drop(index);

        let (graph, mut report) = assemble(labels, arcs, semantics);
        report.nodes_added = nodes_added;
        (graph, report)
    }
}

/// Turns raw edge records into a cleansed [`Graph`].
///
/// Self-loops are dropped, parallel records collapse to one edge, one-way
/// edges are mirrored, and endpoints that never appear as a record source are
/// added as vertices. Never fails.
pub fn data_cleanse<S: AsRef<str>>(raw_edges: &[(S, S)]) -> (Graph, CleanseReport) {
    RawGraph::from_edge_list(raw_edges).cleanse(ArcSemantics::EdgeList)
}

/// Cleanses arcs over vertices `0..n` with decimal labels. Endpoints at or
/// beyond `n` grow the vertex set and are counted as added nodes.
pub fn data_cleanse_indexed<I>(n: usize, arcs: I, semantics: ArcSemantics) -> (Graph, CleanseReport)
where
    I: IntoIterator<Item = (u32, u32)>,
{
    let arcs: Vec<(u32, u32)> = arcs.into_iter().collect();
    let top = arcs.iter().map(|&(u, v)| u.max(v) as usize + 1).max().unwrap_or(0);
    let total = n.max(top);
    let labels = (0..total).map(|i| i.to_string()).collect();
    let (graph, mut report) = assemble(labels, arcs, semantics);
    report.nodes_added = total - n;
    (graph, report)
}

fn assemble(labels: Vec<String>, arcs: Vec<(u32, u32)>, semantics: ArcSemantics) -> (Graph, CleanseReport) {
    let n = labels.len();
    let mut report = CleanseReport::default();

    // (low, high, direction bit) so both orientations of a pair sort together.
    let mut keyed: Vec<(u32, u32, u8)> = Vec::with_capacity(arcs.len());
    for (u, v) in arcs {
        match u.cmp(&v) {
            Ordering::Equal => report.loops_removed += 1,
            Ordering::Less => keyed.push((u, v, 1)),
            Ordering::Greater => keyed.push((v, u, 2)),
        }
    }
    keyed.sort_unstable();

    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut i = 0;
    while i < keyed.len() {
        let (lo, hi, _) = keyed[i];
        let mut j = i;
        let mut mask = 0u8;
        let mut directed_distinct = 0usize;
        while j < keyed.len() && keyed[j].0 == lo && keyed[j].1 == hi {
            if mask & keyed[j].2 == 0 {
                directed_distinct += 1;
            }
            mask |= keyed[j].2;
            j += 1;
        }
        let count = j - i;
        report.dups_removed += match semantics {
            ArcSemantics::EdgeList => count - 1,
            ArcSemantics::Adjacency => count - directed_distinct,
        };
        if mask != 3 {
            report.edges_symmetrized += 1;
        }
        pairs.push((lo, hi));
        i = j;
    }

    let mut degree = vec![0usize; n];
    for &(u, v) in &pairs {
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    }
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    for d in &degree {
        offsets.push(offsets.last().unwrap() + d);
    }
    let mut cursor: Vec<usize> = offsets[..n].to_vec();
    let mut targets = vec![VertexId(0); 2 * pairs.len()];
    // Pairs are sorted by (low, high): for any vertex the smaller neighbours
    // arrive first and ascending, then the larger ones ascending.
    for &(u, v) in &pairs {
        targets[cursor[u as usize]] = VertexId(v);
        cursor[u as usize] += 1;
        targets[cursor[v as usize]] = VertexId(u);
        cursor[v as usize] += 1;
    }

    (Graph::from_parts(offsets, targets, labels), report)
}

pub(crate) fn numeric_label(label: &str) -> Option<u64> {
    if label.is_empty() || !label.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    label.parse().ok()
}

/// Canonical label order: by value when the whole label set is numeric,
/// bytewise otherwise.
pub(crate) fn label_cmp(a: &str, b: &str, numeric: bool) -> Ordering {
    if numeric {
        if let (Some(x), Some(y)) = (numeric_label(a), numeric_label(b)) {
            return x.cmp(&y).then_with(|| a.cmp(b));
        }
    }
    a.cmp(b)
}
