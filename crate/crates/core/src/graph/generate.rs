//! Small deterministic test graphs.

use super::cleanse::{data_cleanse_indexed, ArcSemantics};
use super::Graph;
use crate::error::{CoreError, Result};

/// Ring over `0..n`. Requires `n >= 3`.
pub fn gen_cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(CoreError::invalid(format!("cycle needs at least 3 vertices, got {n}")));
    }
    let n32 = n as u32;
    Ok(indexed(n, (0..n32).map(|i| (i, (i + 1) % n32))))
}

/// Line `0 - 1 - ... - (n-1)`. Requires `n >= 2`.
pub fn gen_path(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(CoreError::invalid(format!("path needs at least 2 vertices, got {n}")));
    }
    Ok(indexed(n, (0..n as u32 - 1).map(|i| (i, i + 1))))
}

/// Clique on `0..n`. Requires `n >= 1`.
pub fn gen_complete(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(CoreError::invalid("complete graph needs at least 1 vertex"));
    }
    let n32 = n as u32;
    Ok(indexed(n, (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v)))))
}

fn indexed(n: usize, arcs: impl Iterator<Item = (u32, u32)>) -> Graph {
    data_cleanse_indexed(n, arcs, ArcSemantics::EdgeList).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_degrees() {
        let g = gen_cycle(5).unwrap();
        assert_eq!(g.m(), 5);
        assert!(g.vertices().all(|v| g.degree(v) == 2));
        assert!(gen_cycle(2).is_err());
    }

    #[test]
    fn path_shape() {
        let g = gen_path(2).unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        let g = gen_path(5).unwrap();
        assert_eq!(g.m(), 4);
        let degrees: Vec<_> = g.vertices().map(|v| g.degree(v)).collect();
        assert_eq!(degrees, [1, 2, 2, 2, 1]);
        assert!(gen_path(1).is_err());
    }

    #[test]
    fn complete_degrees() {
        let g = gen_complete(4).unwrap();
        assert_eq!(g.m(), 6);
        assert!(g.vertices().all(|v| g.degree(v) == 3));
        let single = gen_complete(1).unwrap();
        assert_eq!((single.n(), single.m()), (1, 0));
        assert!(gen_complete(0).is_err());
    }
}
