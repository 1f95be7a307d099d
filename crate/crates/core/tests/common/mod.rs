#![allow(dead_code)]

use std::path::PathBuf;

use corekit::graph::{data_cleanse, data_cleanse_indexed, parse_edge_list_str, ArcSemantics};
use corekit::{Graph, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Core numbers straight from the definition: for each k, repeatedly delete
/// vertices with fewer than k surviving neighbours; whatever survives is the
/// k-core.
pub fn oracle_cores(g: &Graph) -> Vec<u32> {
    let n = g.n();
    let mut core = vec![0u32; n];
    let mut k = 1u32;
    loop {
        let mut alive = vec![true; n];
        let mut deg: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] < k as usize).collect();
        for &v in &stack {
            alive[v] = false;
        }
        while let Some(v) = stack.pop() {
            for w in g.neighbors(VertexId(v as u32)) {
                let w = w.index();
                if alive[w] {
                    deg[w] -= 1;
                    if deg[w] < k as usize {
                        alive[w] = false;
                        stack.push(w);
                    }
                }
            }
        }
        if !alive.iter().any(|&a| a) {
            return core;
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k;
            }
        }
        k += 1;
    }
}

/// `max{k <= current : at least k values >= k}` by trying every k.
pub fn oracle_update(values: &[u32], current: u32) -> u32 {
    (0..=current).rev().find(|&k| values.iter().filter(|&&x| x >= k).count() >= k as usize).unwrap_or(0)
}

/// Erdos-Renyi graph on `0..n`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    data_cleanse_indexed(n, arcs, ArcSemantics::EdgeList).0
}

/// `count` random graphs with up to `max_n` vertices and mixed densities.
pub fn random_family(count: usize, max_n: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=max_n);
            let avg = rng.gen_range(0.5..12.0f64);
            let p = (avg / n.max(2) as f64).min(1.0);
            random_graph(n, p, seed.wrapping_mul(1_000_003).wrapping_add(i as u64))
        })
        .collect()
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn example_graph() -> Graph {
    let text = std::fs::read_to_string(data_dir().join("example.edges")).expect("example.edges");
    data_cleanse(&parse_edge_list_str(&text).expect("valid edge list")).0
}

/// Expected cores of the example graph, by label.
pub const EXAMPLE_CORES: [(&str, u32); 8] =
    [("A", 3), ("B", 3), ("C", 1), ("D", 1), ("E", 3), ("F", 3), ("G", 2), ("H", 2)];
