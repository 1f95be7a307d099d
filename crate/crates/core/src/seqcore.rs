//! Sequential reference decomposition and the checks built on it.
//!
//! [`bz_decompose`] is the bucket-based peeling algorithm: vertices sit in
//! bins indexed by their current degree, the lowest bin is repeatedly
//! emptied, and every removal moves the affected neighbours one bin down by
//! swapping them to the front of their bin. Each vertex and each edge is
//! touched a constant number of times.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::graph::{Graph, VertexId};

/// Core number of every vertex of one graph, indexed by [`VertexId`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreMap {
    cores: Vec<u32>,
}

impl CoreMap {
    pub fn new(cores: Vec<u32>) -> Self {
        CoreMap { cores }
    }

    #[inline]
    pub fn get(&self, v: VertexId) -> u32 {
        self.cores[v.index()]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.cores
    }

    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    pub fn max_core(&self) -> u32 {
        self.cores.iter().copied().max().unwrap_or(0)
    }

    /// `vertex,core` table sorted by vertex, using the graph's external labels.
    pub fn to_table(&self, graph: &Graph) -> String {
        let mut out = String::from("vertex,core\n");
        for v in graph.vertices() {
            let _ = writeln!(out, "{},{}", graph.label(v), self.get(v));
        }
        out
    }

    /// Maps a parsed table onto `graph`. The table must name every vertex
    /// exactly once and nothing else.
    pub fn from_rows(graph: &Graph, rows: &[(String, u32)]) -> std::result::Result<CoreMap, VertexSetMismatch> {
        let mut cores: Vec<Option<u32>> = vec![None; graph.n()];
        let mut mismatch = VertexSetMismatch::default();
        for (label, core) in rows {
            match graph.find(label) {
                Some(v) if cores[v.index()].is_none() => cores[v.index()] = Some(*core),
                Some(_) => mismatch.duplicated.push(label.clone()),
                None => mismatch.only_in_table.push(label.clone()),
            }
        }
        for v in graph.vertices() {
            if cores[v.index()].is_none() {
                mismatch.only_in_graph.push(graph.label(v).to_owned());
            }
        }
        if mismatch.is_empty() {
            Ok(CoreMap::new(cores.into_iter().map(|c| c.unwrap_or(0)).collect()))
        } else {
            Err(mismatch)
        }
    }
}

/// Parses a `vertex,core` table. The header row is required.
pub fn parse_core_table(text: &str) -> Result<Vec<(String, u32)>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CoreError::Parse { line: 1, message: e.to_string() })?;
    if headers.len() != 2 || &headers[0] != "vertex" || &headers[1] != "core" {
        return Err(CoreError::Parse { line: 1, message: "expected header `vertex,core`".into() });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| CoreError::Parse { line, message: e.to_string() })?;
        let core = record[1]
            .trim()
            .parse::<u32>()
            .map_err(|e| CoreError::Parse { line, message: format!("bad core number: {e}") })?;
        rows.push((record[0].trim().to_owned(), core));
    }
    Ok(rows)
}

/// Vertex-set disagreement between a graph and a core table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VertexSetMismatch {
    pub only_in_graph: Vec<String>,
    pub only_in_table: Vec<String>,
    pub duplicated: Vec<String>,
}

impl VertexSetMismatch {
    pub fn is_empty(&self) -> bool {
        self.only_in_graph.is_empty() && self.only_in_table.is_empty() && self.duplicated.is_empty()
    }
}

impl std::fmt::Display for VertexSetMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "only in graph: [{}]; only in table: [{}]; duplicated: [{}]",
            self.only_in_graph.join(" "),
            self.only_in_table.join(" "),
            self.duplicated.join(" ")
        )
    }
}

/// Exact core numbers by bucket peeling in `O(n + m)`.
///
/// Vertices of equal degree are peeled in ascending id order.
pub fn bz_decompose(graph: &Graph) -> CoreMap {
    let n = graph.n();
    let mut deg: Vec<usize> = graph.vertices().map(|v| graph.degree(v)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // bin[d] = first position of degree d in `vert`.
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0u32; n];
    {
        let mut next = bin.clone();
        for v in 0..n {
            pos[v] = next[deg[v]];
            vert[pos[v]] = v as u32;
            next[deg[v]] += 1;
        }
    }

    for i in 0..n {
        let v = vert[i] as usize;
        for &u in graph.neighbors(VertexId(v as u32)) {
            let u = u.index();
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw] as usize;
                if u != w {
                    vert.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    CoreMap::new(deg.into_iter().map(|d| d as u32).collect())
}

/// One vertex whose core number disagrees with its neighbours' cores.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityViolation {
    pub vertex: VertexId,
    pub core: u32,
    /// Neighbours with core >= `core`.
    pub support_at_core: usize,
    /// Neighbours with core >= `core + 1`.
    pub support_above: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityReport {
    pub violations: Vec<LocalityViolation>,
}

impl LocalityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every vertex's core `k` has at least `k` neighbours with
/// core `>= k` and fewer than `k + 1` neighbours with core `>= k + 1`.
pub fn verify_locality(graph: &Graph, cores: &CoreMap) -> Result<LocalityReport> {
    if cores.len() != graph.n() {
        return Err(CoreError::contract(format!("core map covers {} vertices, graph has {}", cores.len(), graph.n())));
    }
    let mut report = LocalityReport::default();
    for u in graph.vertices() {
        let k = cores.get(u);
        let (mut at_core, mut above) = (0usize, 0usize);
        for &v in graph.neighbors(u) {
            let c = cores.get(v);
            if c >= k {
                at_core += 1;
                if c > k {
                    above += 1;
                }
            }
        }
        if (k as usize) > at_core || (k as usize) < above {
            report.violations.push(LocalityViolation {
                vertex: u,
                core: k,
                support_at_core: at_core,
                support_above: above,
            });
        }
    }
    Ok(report)
}

/// Number of vertices per core value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreHistogram {
    pub counts: BTreeMap<u32, usize>,
}

impl CoreHistogram {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("core,count\n");
        for (k, c) in &self.counts {
            let _ = writeln!(out, "{k},{c}");
        }
        out
    }
}

pub fn core_distribution(cores: &CoreMap) -> CoreHistogram {
    let mut counts = BTreeMap::new();
    for &k in cores.as_slice() {
        *counts.entry(k).or_insert(0) += 1;
    }
    CoreHistogram { counts }
}
