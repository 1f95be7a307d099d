use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use super::manifest::RunManifest;
use super::{
    BenchArgs, Cli, CliError, Command, DecomposeArgs, GenerateArgs, GenerateKind, GraphFormat, GraphInput, RerunArgs,
    SimulateArgs, StatsArgs, VerifyArgs,
};
use crate::engine::{self, SimConfig, SimResult};
use crate::graph::{
    self, data_cleanse, gen_complete, gen_cycle, gen_path, parse_adjacency_json, parse_edge_list, write_adjacency_json,
    write_edge_list, EdgeListDialect, Graph,
};
use crate::metrics::{aggregate, export_report, MetricsReport, ReportFormat};
use crate::rmat::{rmat_generate, RmatParams};
use crate::seqcore::{bz_decompose, core_distribution, parse_core_table, verify_locality, CoreMap};

type CmdResult<T = ()> = std::result::Result<T, CliError>;

pub(super) fn execute(command: Command, argv: &[String]) -> CmdResult {
    let cwd = std::env::current_dir()?;
    run_command(command, argv, cwd)
}

fn run_command(command: Command, argv: &[String], cwd: PathBuf) -> CmdResult {
    match command {
        Command::Decompose(a) => decompose(a, argv, cwd),
        Command::Simulate(a) => simulate(a, argv, cwd),
        Command::Generate(a) => generate(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a, argv, cwd),
        Command::Stats(a) => stats(a),
        Command::Rerun(a) => rerun(a),
    }
}

fn detect_format(input: &GraphInput) -> GraphFormat {
    if let Some(f) = input.format {
        return f;
    }
    match input.input.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => GraphFormat::Json,
        Some(e) if e.eq_ignore_ascii_case("csv") => GraphFormat::Csv,
        _ => GraphFormat::Edgelist,
    }
}

pub(crate) fn load_graph(input: &GraphInput) -> CmdResult<Graph> {
    let path = &input.input;
    let context = |e: crate::error::CoreError| CliError::Usage(format!("{}: {e}", path.display()));
    let file = fs::File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let graph = match detect_format(input) {
        GraphFormat::Json => {
            let text =
                std::io::read_to_string(file).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            parse_adjacency_json(&text).map_err(context)?
        }
        f => {
            let dialect = if f == GraphFormat::Csv { EdgeListDialect::Comma } else { EdgeListDialect::Whitespace };
            let edges = parse_edge_list(BufReader::new(file), dialect).map_err(context)?;
            let (graph, report) = data_cleanse(&edges);
            if !report.is_clean() {
                log::info!("{}: cleansed {report:?}", path.display());
            }
            graph
        }
    };
    log::info!("{}: {}", path.display(), graph::stats(&graph));
    Ok(graph)
}

fn prepare_dir(dir: &Path) -> CmdResult {
    fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str, outputs: &mut Vec<PathBuf>) -> CmdResult {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    outputs.push(path);
    Ok(())
}

fn absolute(cwd: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        cwd.join(p)
    }
}

fn decompose(args: DecomposeArgs, argv: &[String], cwd: PathBuf) -> CmdResult {
    let graph = load_graph(&args.graph)?;
    let cores = bz_decompose(&graph);
    log::info!("max core {}", cores.max_core());
    let Some(dir) = args.out else {
        print!("{}", cores.to_table(&graph));
        return Ok(());
    };
    prepare_dir(&dir)?;
    let mut manifest = RunManifest::begin("decompose", argv, cwd.clone());
    manifest.inputs.push(absolute(&cwd, &args.graph.input));
    write_file(&dir, "cores.csv", &cores.to_table(&graph), &mut manifest.outputs)?;
    write_file(&dir, "histogram.csv", &core_distribution(&cores).to_csv(), &mut manifest.outputs)?;
    manifest.finish(&dir)?;
    println!("n={} m={} max_core={}", graph.n(), graph.m(), cores.max_core());
    Ok(())
}

/// Vertices whose cores differ, by label.
fn differences(graph: &Graph, got: &CoreMap, want: &CoreMap) -> Vec<String> {
    graph
        .vertices()
        .filter(|&v| got.get(v) != want.get(v))
        .map(|v| format!("{} (got {}, expected {})", graph.label(v), got.get(v), want.get(v)))
        .collect()
}

fn load_core_table(graph: &Graph, path: &Path) -> CmdResult<CoreMap> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let rows = parse_core_table(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    CoreMap::from_rows(graph, &rows).map_err(|m| CliError::Mismatch(format!("{}: {m}", path.display())))
}

fn describe_mismatch(diffs: &[String]) -> String {
    const SHOWN: usize = 20;
    let mut msg = format!("{} vertex core(s) differ:", diffs.len());
    for d in diffs.iter().take(SHOWN) {
        let _ = write!(msg, "\n  {d}");
    }
    if diffs.len() > SHOWN {
        let _ = write!(msg, "\n  ... {} more", diffs.len() - SHOWN);
    }
    msg
}

/// Reference cores for a simulate or bench command, if verification is on.
fn reference(graph: &Graph, no_verify: bool, oracle: Option<&Path>) -> CmdResult<Option<CoreMap>> {
    if no_verify {
        return Ok(None);
    }
    match oracle {
        Some(path) => load_core_table(graph, path).map(Some),
        None => Ok(Some(bz_decompose(graph))),
    }
}

fn check(graph: &Graph, result: &SimResult, reference: Option<&CoreMap>) -> Option<Vec<String>> {
    if result.early_fire {
        log::warn!("run terminated with {} message(s) undelivered", result.undelivered_at_termination);
    }
    reference.map(|want| differences(graph, &result.final_cores, want))
}

fn run_engine(graph: &Graph, config: &SimConfig) -> CmdResult<SimResult> {
    config.validate()?;
    engine::run(graph, config).map_err(|e| CliError::Usage(e.to_string()))
}

fn export_all(dir: &Path, report: &MetricsReport, outputs: &mut Vec<PathBuf>) -> CmdResult {
    for format in [ReportFormat::Structured, ReportFormat::Tabular] {
        for file in export_report(report, format)? {
            write_file(dir, file.name, &file.contents, outputs)?;
        }
    }
    Ok(())
}

fn graph_name(input: &GraphInput) -> String {
    input.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn simulate(args: SimulateArgs, argv: &[String], cwd: PathBuf) -> CmdResult {
    let config = args.sim.to_config();
    config.validate()?;
    let graph = load_graph(&args.graph)?;
    let want = reference(&graph, args.no_verify, args.oracle.as_deref())?;
    let result = run_engine(&graph, &config)?;

    prepare_dir(&args.out)?;
    let mut manifest = RunManifest::begin("simulate", argv, cwd.clone());
    manifest.inputs.push(absolute(&cwd, &args.graph.input));
    if let Some(o) = &args.oracle {
        manifest.inputs.push(absolute(&cwd, o));
    }
    manifest.config = Some(config.clone());
    manifest.seeds.push(config.rng_seed);

    let report = MetricsReport::from_run(&graph_name(&args.graph), &graph, &result);
    export_all(&args.out, &report, &mut manifest.outputs)?;
    write_file(&args.out, "cores.csv", &result.final_cores.to_table(&graph), &mut manifest.outputs)?;

    let diffs = check(&graph, &result, want.as_ref());
    manifest.verified = diffs.as_ref().map(Vec::is_empty);
    manifest.finish(&args.out)?;

    println!(
        "engine={} messages={} heartbeats={} duration={}{} max_core={} verified={}",
        result.engine,
        result.total_core_messages,
        result.total_heartbeats,
        report.duration,
        report.duration_unit,
        result.final_cores.max_core(),
        match &diffs {
            None => "skipped",
            Some(d) if d.is_empty() => "yes",
            Some(_) => "NO",
        }
    );
    match diffs {
        Some(d) if !d.is_empty() => Err(CliError::Mismatch(describe_mismatch(&d))),
        _ => Ok(()),
    }
}

fn edge_list_csv(graph: &Graph) -> String {
    write_edge_list(graph)
        .lines()
        .map(|l| if l.starts_with('#') { format!("{l}\n") } else { format!("{}\n", l.replacen(' ', ",", 1)) })
        .collect()
}

fn generate(args: GenerateArgs) -> CmdResult {
    let graph = match args.kind {
        GenerateKind::Rmat { n, edge_factor, seed, a, b, c, d } => {
            rmat_generate(&RmatParams { n_target: n, edge_factor, a, b, c, d, seed })?
        }
        GenerateKind::Cycle { n } => gen_cycle(n)?,
        GenerateKind::Path { n } => gen_path(n)?,
        GenerateKind::Complete { n } => gen_complete(n)?,
    };
    let text = match args.format {
        GraphFormat::Json => {
            let mut s = write_adjacency_json(&graph);
            s.push('\n');
            s
        }
        GraphFormat::Edgelist => write_edge_list(&graph),
        GraphFormat::Csv => edge_list_csv(&graph),
    };
    let line = graph::stats(&graph).to_string();
    match args.out {
        Some(path) => {
            fs::write(&path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            println!("{line}");
        }
        None => {
            print!("{text}");
            eprintln!("{line}");
        }
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> CmdResult {
    let graph = load_graph(&args.graph)?;
    let a = load_core_table(&graph, &args.cores_a)?;
    let b = load_core_table(&graph, &args.cores_b)?;
    for (path, cores) in [(&args.cores_a, &a), (&args.cores_b, &b)] {
        let report = verify_locality(&graph, cores)?;
        if report.holds() {
            println!("{}: locality holds", path.display());
        } else {
            println!("{}: {} locality violation(s)", path.display(), report.violations.len());
            for v in report.violations.iter().take(20) {
                println!(
                    "  {} core {} (support {} at k, {} at k+1)",
                    graph.label(v.vertex),
                    v.core,
                    v.support_at_core,
                    v.support_above
                );
            }
        }
    }
    let diffs: Vec<String> = graph
        .vertices()
        .filter(|&v| a.get(v) != b.get(v))
        .map(|v| format!("{}: {} vs {}", graph.label(v), a.get(v), b.get(v)))
        .collect();
    if diffs.is_empty() {
        println!("tables agree on all {} vertices", graph.n());
        Ok(())
    } else {
        Err(CliError::Mismatch(describe_mismatch(&diffs)))
    }
}

fn bench(args: BenchArgs, argv: &[String], cwd: PathBuf) -> CmdResult {
    if args.runs < 1 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    let base = args.sim.to_config();
    base.validate()?;
    let graph = load_graph(&args.graph)?;
    let want = reference(&graph, args.no_verify, None)?;
    let name = graph_name(&args.graph);

    let mut manifest = RunManifest::begin("bench", argv, cwd.clone());
    manifest.inputs.push(absolute(&cwd, &args.graph.input));
    manifest.config = Some(base.clone());

    let mut reports = Vec::with_capacity(args.runs);
    let mut rows = String::from("run,seed,duration,unit,total_core_messages,total_heartbeats,verified\n");
    let mut failures = Vec::new();
    for i in 0..args.runs {
        let seed = base.rng_seed.wrapping_add(i as u64 * args.seed_stride);
        let config = base.clone().with_seed(seed);
        let result = run_engine(&graph, &config)?;
        let diffs = check(&graph, &result, want.as_ref());
        let report = MetricsReport::from_run(&name, &graph, &result);
        let verified = match &diffs {
            None => "skipped",
            Some(d) if d.is_empty() => "yes",
            Some(d) => {
                failures.push((i, d.clone()));
                "no"
            }
        };
        let _ = writeln!(
            rows,
            "{i},{seed},{},{},{},{},{verified}",
            report.duration, report.duration_unit, report.total_core_messages, report.total_heartbeats
        );
        manifest.seeds.push(seed);
        reports.push(report);
    }

    prepare_dir(&args.out)?;
    let summary = aggregate(&reports)?;
    write_file(&args.out, "runs.csv", &rows, &mut manifest.outputs)?;
    export_all(&args.out, &summary, &mut manifest.outputs)?;
    manifest.verified = want.as_ref().map(|_| failures.is_empty());
    manifest.finish(&args.out)?;

    println!(
        "runs={} duration_mean={:.3}{} ci95={}",
        summary.runs,
        summary.duration_mean.unwrap_or(f64::NAN),
        summary.duration_unit,
        summary.duration_ci.map_or("n/a".to_owned(), |c| format!("{c:.3}"))
    );
    match failures.first() {
        Some((run, d)) => Err(CliError::Mismatch(format!(
            "{} of {} runs disagree with the oracle; run {run}: {}",
            failures.len(),
            args.runs,
            describe_mismatch(d)
        ))),
        None => Ok(()),
    }
}

fn stats(args: StatsArgs) -> CmdResult {
    let graph = load_graph(&args.graph)?;
    let mut s = graph::stats(&graph);
    s.max_core = Some(bz_decompose(&graph).max_core());
    println!("{s}");
    Ok(())
}

impl Command {
    /// Resolves relative paths against `base`.
    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| *p = absolute(base, p);
        match self {
            Command::Decompose(a) => {
                fix(&mut a.graph.input);
                a.out.as_mut().map(fix);
            }
            Command::Simulate(a) => {
                fix(&mut a.graph.input);
                fix(&mut a.out);
                a.oracle.as_mut().map(fix);
            }
            Command::Bench(a) => {
                fix(&mut a.graph.input);
                fix(&mut a.out);
            }
            Command::Generate(a) => {
                a.out.as_mut().map(fix);
            }
            Command::Verify(a) => {
                fix(&mut a.graph.input);
                fix(&mut a.cores_a);
                fix(&mut a.cores_b);
            }
            Command::Stats(a) => fix(&mut a.graph.input),
            Command::Rerun(a) => {
                fix(&mut a.manifest);
                a.out.as_mut().map(fix);
            }
        }
    }
}

fn rerun(args: RerunArgs) -> CmdResult {
    use clap::Parser as _;

    let recorded = RunManifest::load(&args.manifest)?;
    let mut argv = recorded.argv.clone();
    if let Some(out) = &args.out {
        let cwd = std::env::current_dir()?;
        argv.push("--out".into());
        argv.push(absolute(&cwd, out).to_string_lossy().into_owned());
    }
    let cli = Cli::try_parse_from(&argv)
        .map_err(|e| CliError::Usage(format!("{}: unusable command line: {e}", args.manifest.display())))?;
    let mut command = cli.command;
    if matches!(command, Command::Rerun(_)) {
        return Err(CliError::Usage("manifest records another rerun".into()));
    }
    command.rebase(&recorded.cwd);
    run_command(command, &argv, recorded.cwd)
}
