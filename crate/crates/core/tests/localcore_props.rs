mod common;

use corekit::localcore::{handle_message, init_state, Action};
use corekit::{bz_decompose, update_core, Graph, Message, VertexId, VertexState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every multiset of `len` values from `0..=max`, as sorted vectors.
fn multisets(len: usize, max: u32) -> Vec<Vec<u32>> {
    fn go(len: usize, lo: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in lo..=max {
            cur.push(v);
            go(len, v, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(len, 0, max, &mut Vec::new(), &mut out);
    out
}

#[test]
fn update_core_exhaustive() {
    let mut checked = 0;
    for len in 0..=6 {
        for set in multisets(len, 6) {
            for current in 0..=6 {
                assert_eq!(
                    update_core(set.iter().copied(), current),
                    common::oracle_update(&set, current),
                    "{set:?} {current}"
                );
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 7 * (1..=6).map(|l| binomial(l + 6, 6)).sum::<usize>() + 7);
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #[test]
    fn update_core_bounded_and_monotone(
        mut values in prop::collection::vec(0u32..20, 0..12),
        current in 0u32..20,
        pick in any::<prop::sample::Index>(),
        bump in 1u32..5,
    ) {
        let base = update_core(values.iter().copied(), current);
        prop_assert!(base <= current);
        prop_assert_eq!(base, common::oracle_update(&values, current));
        if !values.is_empty() {
            let i = pick.index(values.len());
            values[i] += bump;
            prop_assert!(update_core(values.iter().copied(), current) >= base);
        }
    }

    #[test]
    fn transitions_are_pure(values in prop::collection::vec(1u32..8, 1..8), probe in 0u32..8) {
        let degree = values.len();
        let nbrs: Vec<VertexId> = (1..=degree as u32).map(VertexId).collect();
        let mut state = init_state(VertexId(0), degree);
        for (i, &v) in values.iter().enumerate() {
            state.handle(&nbrs, Message { sender: nbrs[i], core_number: v }).unwrap();
        }
        let msg = Message { sender: nbrs[0], core_number: probe };
        let before = state.clone();
        let a = handle_message(&state, &nbrs, msg).unwrap();
        let b = handle_message(&state, &nbrs, msg).unwrap();
        prop_assert_eq!(&state, &before);
        prop_assert_eq!(a, b);
    }

    /// Drives every vertex by hand with messages delivered in a random order
    /// (including reordering between the same pair of vertices).
    #[test]
    fn random_delivery_order_converges(n in 1usize..40, p in 0.0f64..0.5, seed in any::<u64>()) {
        let g = common::random_graph(n, p, seed);
        let truth = bz_decompose(&g);
        let finals = drive(&g, seed, &truth);
        prop_assert_eq!(&finals[..], truth.as_slice());
    }
}

fn drive(g: &Graph, seed: u64, truth: &corekit::CoreMap) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states: Vec<VertexState> = g.vertices().map(|v| init_state(v, g.degree(v))).collect();
    let mut pending: Vec<(VertexId, Message)> = Vec::new();
    let send = |pending: &mut Vec<(VertexId, Message)>, v: VertexId, k: u32| {
        for &w in g.neighbors(v) {
            pending.push((w, Message { sender: v, core_number: k }));
        }
    };
    for v in g.vertices() {
        send(&mut pending, v, g.degree(v) as u32);
    }
    let mut sent = pending.len();
    while !pending.is_empty() {
        let (to, msg) = pending.swap_remove(rng.gen_range(0..pending.len()));
        let before = states[to.index()].estimate;
        let t = states[to.index()].handle(g.neighbors(to), msg).unwrap();
        let after = states[to.index()].estimate;
        assert!(after <= before, "estimate rose at {to}");
        assert!(after >= truth.get(to), "estimate of {to} fell below its core");
        if let Action::Broadcast(k) = t.action {
            assert_eq!(k, after);
            send(&mut pending, to, k);
            sent += g.degree(to);
        }
    }
    let expected: usize = states.iter().map(|s| s.degree * (1 + s.decreases as usize)).sum();
    assert_eq!(sent, expected);
    states.iter().map(|s| s.estimate).collect()
}

#[test]
fn non_neighbour_message_is_rejected() {
    let nbrs = [VertexId(1), VertexId(2)];
    let state = init_state(VertexId(0), 2);
    assert!(handle_message(&state, &nbrs, Message { sender: VertexId(5), core_number: 1 }).is_err());
}

#[test]
fn equal_or_higher_reports_are_ignored() {
    let nbrs = [VertexId(1), VertexId(2)];
    let mut s = init_state(VertexId(0), 2);
    s.handle(&nbrs, Message { sender: VertexId(1), core_number: 1 }).unwrap();
    let t = s.handle(&nbrs, Message { sender: VertexId(2), core_number: 1 }).unwrap();
    assert_eq!(t.action, Action::Broadcast(1));
    for value in [1, 3] {
        let t = s.handle(&nbrs, Message { sender: VertexId(1), core_number: value }).unwrap();
        assert_eq!(t.action, Action::None);
        assert!(!t.recomputed);
    }
}
