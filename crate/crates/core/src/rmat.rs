//! Seeded recursive-matrix (RMAT) graph generator.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::graph::{data_cleanse_indexed, ArcSemantics, Graph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmatParams {
    pub n_target: usize,
    pub edge_factor: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub seed: u64,
}

impl RmatParams {
    /// Graph500 quadrant weights, edge factor 8.
    pub fn new(n_target: usize, seed: u64) -> Self {
        RmatParams { n_target, edge_factor: 8, a: 0.57, b: 0.19, c: 0.19, d: 0.05, seed }
    }

    pub fn with_edge_factor(mut self, edge_factor: usize) -> Self {
        self.edge_factor = edge_factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_target < 2 {
            return Err(CoreError::invalid(format!("rmat needs at least 2 vertices, got {}", self.n_target)));
        }
        if u32::try_from(self.n_target).is_err() {
            return Err(CoreError::invalid("rmat vertex count exceeds 32-bit ids"));
        }
        let probs = [self.a, self.b, self.c, self.d];
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(CoreError::invalid("rmat probabilities must be non-negative"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(CoreError::invalid(format!("rmat probabilities sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// Depth of the quadrant descent: the square side is `2^scale`.
    pub fn scale(&self) -> u32 {
        self.n_target.next_power_of_two().trailing_zeros()
    }

    /// Number of arcs sampled before cleansing.
    pub fn arc_count(&self) -> usize {
        self.n_target * self.edge_factor
    }
}

/// One endpoint pair by quadrant descent over the `2^scale` square.
fn sample_pair(params: &RmatParams, scale: u32, rng: &mut ChaCha8Rng) -> (u64, u64) {
    let (ab, abc) = (params.a + params.b, params.a + params.b + params.c);
    let (mut row, mut col) = (0u64, 0u64);
    for _ in 0..scale {
        let r: f64 = rng.gen();
        let (dr, dc) = if r < params.a {
            (0, 0)
        } else if r < ab {
            (0, 1)
        } else if r < abc {
            (1, 0)
        } else {
            (1, 1)
        };
        row = row << 1 | dr;
        col = col << 1 | dc;
    }
    (row, col)
}

/// The raw arc stream: `n_target * edge_factor` arcs, emitted as mirrored
/// pairs of in-range samples. Samples that fall in the padding are redrawn.
pub fn rmat_raw_arcs(params: &RmatParams) -> Result<Vec<(u32, u32)>> {
    params.validate()?;
    let scale = params.scale();
    let n = params.n_target as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let total = params.arc_count();
    let mut arcs = Vec::with_capacity(total);
    while arcs.len() < total {
        let (u, v) = sample_pair(params, scale, &mut rng);
        if u >= n || v >= n {
            continue;
        }
        let (u, v) = (u as u32, v as u32);
        arcs.push((u, v));
        if arcs.len() < total {
            arcs.push((v, u));
        }
    }
    Ok(arcs)
}

/// Samples and cleanses an RMAT graph on exactly `n_target` vertices.
pub fn rmat_generate(params: &RmatParams) -> Result<Graph> {
    let arcs = rmat_raw_arcs(params)?;
    let (graph, report) = data_cleanse_indexed(params.n_target, arcs, ArcSemantics::Adjacency);
    log::debug!(
        "rmat n={} seed={}: {} loops, {} duplicates removed",
        params.n_target,
        params.seed,
        report.loops_removed,
        report.dups_removed
    );
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{stats, write_adjacency_json};

    #[test]
    fn rejects_bad_params() {
        assert!(rmat_generate(&RmatParams::new(1, 0)).is_err());
        let mut p = RmatParams::new(16, 0);
        p.d = 0.2;
        assert!(p.validate().is_err());
        p.d = -0.05;
        p.a = 0.67;
        assert!(p.validate().is_err());
    }

    #[test]
    fn sample_count_before_cleansing() {
        let p = RmatParams::new(1000, 3);
        assert_eq!(p.scale(), 10);
        let arcs = rmat_raw_arcs(&p).unwrap();
        assert_eq!(arcs.len(), 8000);
        assert!(arcs.iter().all(|&(u, v)| u < 1000 && v < 1000));
    }

    #[test]
    fn deterministic_under_seed() {
        let p = RmatParams::new(500, 7);
        let a = write_adjacency_json(&rmat_generate(&p).unwrap());
        let b = write_adjacency_json(&rmat_generate(&p).unwrap());
        assert_eq!(a, b);
        let other = write_adjacency_json(&rmat_generate(&RmatParams::new(500, 8)).unwrap());
        assert_ne!(a, other);
    }

    #[test]
    fn exact_size_and_degree_range() {
        for n in [1000, 4096] {
            let g = rmat_generate(&RmatParams::new(n, 1)).unwrap();
            g.check_invariants().unwrap();
            let s = stats(&g);
            assert_eq!(s.n, n);
            assert!((6.0..=8.0).contains(&s.avg_degree), "avg degree {}", s.avg_degree);
        }
    }
}
