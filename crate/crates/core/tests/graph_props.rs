mod common;

use corekit::graph::{
    data_cleanse, gen_complete, gen_cycle, gen_path, parse_adjacency_json, parse_edge_list_str, stats,
    write_adjacency_json, write_edge_list,
};
use corekit::Graph;
use proptest::prelude::*;

fn arcs() -> impl Strategy<Value = Vec<(String, String)>> {
    prop::collection::vec((0u32..40, 0u32..40), 0..120)
        .prop_map(|v| v.into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect())
}

fn label_arcs() -> impl Strategy<Value = Vec<(String, String)>> {
    prop::collection::vec(("[a-e]{1,2}", "[a-e]{1,2}"), 0..60)
}

/// Full scan for symmetry, loops, duplicates and sortedness.
fn assert_clean(g: &Graph) {
    g.check_invariants().unwrap();
    for v in g.vertices() {
        let nb = g.neighbors(v);
        assert!(nb.windows(2).all(|w| w[0] < w[1]), "neighbours of {v} not strictly sorted");
        assert!(!nb.contains(&v), "loop at {v}");
        for &w in nb {
            assert!(g.neighbors(w).binary_search(&v).is_ok(), "{v}-{w} not mirrored");
        }
    }
    let degree_sum: usize = g.vertices().map(|v| g.degree(v)).sum();
    assert_eq!(degree_sum, 2 * g.m());
}

fn edge_pairs(g: &Graph) -> Vec<(String, String)> {
    g.edges().map(|(u, v)| (g.label(u).to_owned(), g.label(v).to_owned())).collect()
}

proptest! {
    #[test]
    fn cleansed_graphs_are_simple(raw in arcs()) {
        let (g, report) = data_cleanse(&raw);
        assert_clean(&g);
        let distinct: std::collections::BTreeSet<(u32, u32)> = raw
            .iter()
            .map(|(a, b)| (a.parse::<u32>().unwrap(), b.parse::<u32>().unwrap()))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        prop_assert_eq!(g.m(), distinct.len());
        let loops = raw.iter().filter(|(a, b)| a == b).count();
        prop_assert_eq!(report.loops_removed, loops);
    }

    #[test]
    fn cleansing_is_idempotent(raw in label_arcs()) {
        let (g, _) = data_cleanse(&raw);
        let (again, report) = data_cleanse(&edge_pairs(&g));
        // Isolated vertices only survive through the adjacency format.
        let non_isolated = g.vertices().filter(|&v| g.degree(v) > 0).count();
        prop_assert_eq!(again.n(), non_isolated);
        prop_assert_eq!(again.m(), g.m());
        prop_assert_eq!(report.loops_removed + report.dups_removed, 0);
        prop_assert_eq!(edge_pairs(&again), edge_pairs(&g));
    }

    #[test]
    fn adjacency_round_trip(raw in arcs()) {
        let (g, _) = data_cleanse(&raw);
        let text = write_adjacency_json(&g);
        let back = parse_adjacency_json(&text).unwrap();
        prop_assert_eq!(back.n(), g.n());
        prop_assert_eq!(edge_pairs(&back), edge_pairs(&g));
        prop_assert_eq!(write_adjacency_json(&back), text);
    }

    #[test]
    fn edge_list_round_trip(raw in label_arcs()) {
        let (g, _) = data_cleanse(&raw);
        let back = data_cleanse(&parse_edge_list_str(&write_edge_list(&g)).unwrap()).0;
        prop_assert_eq!(edge_pairs(&back), edge_pairs(&g));
    }

    #[test]
    fn stats_agree_with_scan(raw in arcs()) {
        let (g, _) = data_cleanse(&raw);
        let s = stats(&g);
        prop_assert_eq!(s.n, g.n());
        prop_assert_eq!(s.m, g.m());
        prop_assert_eq!(s.max_degree, g.vertices().map(|v| g.degree(v)).max().unwrap_or(0));
        if g.n() > 0 {
            prop_assert!((s.avg_degree - 2.0 * g.m() as f64 / g.n() as f64).abs() < 1e-12);
        }
    }
}

#[test]
fn generator_stats() {
    for n in 3..60 {
        let c = gen_cycle(n).unwrap();
        assert_clean(&c);
        assert_eq!(stats(&c).avg_degree, 2.0);
        let p = gen_path(n).unwrap();
        assert_clean(&p);
        assert_eq!(p.m(), n - 1);
    }
    for n in 1..25 {
        let k = gen_complete(n).unwrap();
        assert_clean(&k);
        assert_eq!(stats(&k).max_degree, n - 1);
        assert_eq!(k.m(), n * (n - 1) / 2);
    }
}

#[test]
fn example_file_matches_json_twin() {
    let from_edges = common::example_graph();
    let text = std::fs::read_to_string(common::data_dir().join("example.json")).unwrap();
    let from_json = parse_adjacency_json(&text).unwrap();
    assert_eq!(from_edges.n(), 8);
    assert_eq!(from_edges.m(), 11);
    let relabel: Vec<(usize, usize)> = from_edges.edges().map(|(u, v)| (u.index(), v.index())).collect();
    let json_edges: Vec<(usize, usize)> = from_json.edges().map(|(u, v)| (u.index(), v.index())).collect();
    assert_eq!(relabel, json_edges);
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(parse_edge_list_str("1 2\n3\n").is_err());
    assert!(parse_edge_list_str("1 2 3\n").is_err());
    for bad in ["[]", "{\"0\": 1}", "{\"0\": [-1]}", "{\"0\": [1.5]}", "{\"0\": [\"x\"]}", "{"] {
        assert!(parse_adjacency_json(bad).is_err(), "{bad} accepted");
    }
}
