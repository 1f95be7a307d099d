mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use corekit::cli::RunManifest;
use corekit::metrics::import_structured;

fn corekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corekit")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    common::data_dir().join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn decompose_example_graph() {
    let o = corekit(&["decompose", &data("example.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "vertex,core\n0,3\n1,3\n2,1\n3,1\n4,3\n5,3\n6,2\n7,2\n");

    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("d");
    let o = corekit(&["decompose", &data("k4.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read(&out, "cores.csv"), "vertex,core\n0,3\n1,3\n2,3\n3,3\n");
    assert_eq!(read(&out, "histogram.csv"), "core,count\n3,4\n");
    let manifest = RunManifest::load(&out.join("manifest.json")).unwrap();
    assert_eq!(manifest.command, "decompose");
    assert_eq!(manifest.outputs.len(), 2);
}

#[test]
fn decompose_bad_input_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, "{\"0\": [\"x\"]}").unwrap();
    assert_eq!(corekit(&["decompose", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(corekit(&["decompose", "/nonexistent/graph.json"]).status.code(), Some(2));
    assert_eq!(corekit(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn simulate_writes_report_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("p3");
    let o =
        corekit(&["simulate", &data("path3.json"), "--engine", "event", "--seed", "1", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let totals = read(&out, "totals.csv");
    let row: Vec<&str> = totals.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[4], "6");
    assert_eq!(read(&out, "messages_per_bin.csv").lines().count(), 9);
    assert_eq!(read(&out, "active_per_bin.csv").lines().count(), 9);
    let report = import_structured(&read(&out, "report.json")).unwrap();
    assert_eq!(report.total_core_messages, 6);
    assert_eq!(report.duration_unit, "ticks");
    let manifest = RunManifest::load(&out.join("manifest.json")).unwrap();
    assert_eq!(manifest.verified, Some(true));
    assert_eq!(manifest.seeds, vec![1]);
    assert_eq!(manifest.config.unwrap().rng_seed, 1);
}

#[test]
fn simulate_example_graph_threaded() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("f1");
    let o = corekit(&[
        "simulate",
        &data("example.edges"),
        "--heartbeat-ms",
        "10",
        "--watchdog-ms",
        "200",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let cores = read(&out, "cores.csv");
    for (label, core) in common::EXAMPLE_CORES {
        assert!(cores.contains(&format!("\n{label},{core}\n")), "{label} in {cores}");
    }
}

#[test]
fn simulate_rejects_bad_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x");
    let o = out.to_str().unwrap();
    assert_eq!(corekit(&["simulate", &data("k4.json"), "--bins", "0", "-o", o]).status.code(), Some(2));
    assert_eq!(corekit(&["simulate", &data("k4.json"), "--latency", "uniform:5:1", "-o", o]).status.code(), Some(2));
    assert_eq!(corekit(&["simulate", &data("k4.json"), "--engine", "quantum", "-o", o]).status.code(), Some(2));
}

#[test]
fn simulate_against_wrong_oracle_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let oracle = tmp.path().join("wrong.csv");
    fs::write(&oracle, "vertex,core\n0,1\n1,1\n2,1\n3,1\n").unwrap();
    let out = tmp.path().join("x");
    let o = corekit(&[
        "simulate",
        &data("k4.json"),
        "--engine",
        "event",
        "--oracle",
        oracle.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let manifest = RunManifest::load(&out.join("manifest.json")).unwrap();
    assert_eq!(manifest.verified, Some(false));

    let o = corekit(&["simulate", &data("k4.json"), "--engine", "event", "--no-verify", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(RunManifest::load(&out.join("manifest.json")).unwrap().verified, None);
}

#[test]
fn generate_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.json");
    let b = tmp.path().join("b.json");
    for f in [&a, &b] {
        let o = corekit(&["generate", "rmat", "1000", "8", "--seed", "7", "-o", f.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).starts_with("n=1000 "));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let o = corekit(&["generate", "complete", "4"]);
    assert_eq!(stdout(&o), "{\"0\":[1,2,3],\"1\":[0,2,3],\"2\":[0,1,3],\"3\":[0,1,2]}\n");
    let o = corekit(&["generate", "cycle", "5", "-o", tmp.path().join("c.json").to_str().unwrap()]);
    assert!(stdout(&o).contains("avg_degree=2.0000"));
    let o = corekit(&["generate", "path", "3", "--format", "csv"]);
    assert_eq!(stdout(&o), "# n=3 m=2\n0,1\n1,2\n");
    assert_eq!(corekit(&["generate", "rmat", "1"]).status.code(), Some(2));
    assert_eq!(corekit(&["generate", "cycle", "2"]).status.code(), Some(2));
}

#[test]
fn verify_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let good = tmp.path().join("good.csv");
    let bad = tmp.path().join("bad.csv");
    let short = tmp.path().join("short.csv");
    let table = stdout(&corekit(&["decompose", &data("example.edges")]));
    fs::write(&good, &table).unwrap();
    fs::write(&bad, table.replace("G,2", "G,3")).unwrap();
    fs::write(&short, table.replace("H,2\n", "")).unwrap();
    let g = data("example.edges");

    assert_eq!(corekit(&["verify", &g, good.to_str().unwrap(), good.to_str().unwrap()]).status.code(), Some(0));
    let o = corekit(&["verify", &g, good.to_str().unwrap(), bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("G: 2 vs 3"));
    let o = corekit(&["verify", &g, good.to_str().unwrap(), short.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("H"));
}

#[test]
fn verify_simulation_against_peeling() {
    let tmp = tempfile::tempdir().unwrap();
    let g = data("example.json");
    let seq = tmp.path().join("seq");
    let sim = tmp.path().join("sim");
    assert_eq!(corekit(&["decompose", &g, "-o", seq.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(corekit(&["simulate", &g, "--engine", "event", "-o", sim.to_str().unwrap()]).status.code(), Some(0));
    let o = corekit(&["verify", &g, seq.join("cores.csv").to_str().unwrap(), sim.join("cores.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn bench_event_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("b");
    let o = corekit(&[
        "bench",
        &data("k4.json"),
        "--runs",
        "3",
        "--engine",
        "event",
        "--seed",
        "1",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report = import_structured(&read(&out, "report.json")).unwrap();
    assert_eq!(report.runs, 3);
    assert_eq!(report.duration_ci, Some(0.0));
    assert_eq!(read(&out, "runs.csv").lines().count(), 4);
    let manifest = RunManifest::load(&out.join("manifest.json")).unwrap();
    assert_eq!(manifest.seeds, vec![1, 2, 3]);

    let out2 = tmp.path().join("p");
    let o = corekit(&["bench", &data("path3.json"), "--runs", "2", "--engine", "event", "-o", out2.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let runs = read(&out2, "runs.csv");
    assert!(runs.lines().skip(1).all(|l| l.split(',').nth(4) == Some("6")), "{runs}");

    assert_eq!(
        corekit(&["bench", &data("k4.json"), "--runs", "0", "-o", out.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn rerun_reproduces_event_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    let o = corekit(&[
        "simulate",
        &data("example.json"),
        "--engine",
        "event",
        "--latency",
        "uniform:1:4",
        "--watchdog-ms",
        "20",
        "--seed",
        "9",
        "-o",
        first.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = corekit(&["rerun", first.join("manifest.json").to_str().unwrap(), "-o", second.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["report.json", "messages_per_bin.csv", "active_per_bin.csv", "totals.csv", "cores.csv"] {
        assert_eq!(read(&first, f), read(&second, f), "{f}");
    }
}

#[test]
fn stats_line() {
    let o = corekit(&["stats", &data("example.edges")]);
    assert_eq!(stdout(&o), "n=8 m=11 avg_degree=2.7500 max_degree=4 max_core=3\n");
}
