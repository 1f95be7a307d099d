//! C ABI for corekit.
//!
//! Objects cross the boundary as opaque handles created by `ck_*` constructors
//! and released with the matching `*_free`. Every fallible call returns a
//! [`CkStatus`]; on failure [`ck_last_error`] describes what went wrong on the
//! calling thread. Strings returned by the library are owned by the caller and
//! released with [`ck_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use corekit::graph::{
    data_cleanse, gen_complete, gen_cycle, gen_path, parse_adjacency_json, parse_edge_list_str, write_adjacency_json,
};
use corekit::metrics::{export_report, MetricsReport, ReportFormat};
use corekit::{
    bz_decompose, rmat_generate, run, verify_locality, CoreError, CoreMap, EngineKind, Graph, LatencyModel, RmatParams,
    SimConfig, SimResult, VertexId,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Contract = 4,
    Engine = 5,
    Io = 6,
    InvalidUtf8 = 7,
    OutOfRange = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkEngine {
    Threaded = 0,
    Event = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkLatencyKind {
    Zero = 0,
    /// Constant delay `a`.
    Fixed = 1,
    /// Uniform in `[a, b]`.
    Uniform = 2,
}

/// Simulation parameters; fill with [`ck_sim_config_default`] and adjust.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CkSimConfig {
    pub engine: CkEngine,
    /// Milliseconds (threaded) or ticks (event).
    pub heartbeat_period: u64,
    pub watchdog_quiet_period: u64,
    pub bins: u32,
    pub latency_kind: CkLatencyKind,
    pub latency_a: u64,
    pub latency_b: u64,
    pub seed: u64,
    /// Worker threads for the threaded engine; 0 picks the default.
    pub threads: u32,
}

pub struct CkGraph(Graph);
pub struct CkCoreMap(CoreMap);
pub struct CkSimResult(SimResult);

struct Failure(CkStatus, String);

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let status = match e {
            CoreError::Parse { .. } | CoreError::Adjacency(_) => CkStatus::Parse,
            CoreError::InvalidArgument(_) => CkStatus::InvalidArgument,
            CoreError::Contract(_) => CkStatus::Contract,
            CoreError::Engine(_) => CkStatus::Engine,
            CoreError::Io(_) => CkStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> CkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CkStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            CkStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CkStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(CkStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let c = CString::new(s).map_err(|e| Failure(CkStatus::InvalidArgument, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = value;
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next `ck_*` call on the same thread.
#[no_mangle]
pub extern "C" fn ck_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ck_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- graphs ----

/// Parses an adjacency JSON document (`{"0":[1,2],...}`).
#[no_mangle]
pub unsafe extern "C" fn ck_graph_from_adjacency_json(json: *const c_char, out: *mut *mut CkGraph) -> CkStatus {
    guard(|| {
        let g = parse_adjacency_json(text(json, "json")?)?;
        put(out, CkGraph(g))
    })
}

/// Parses a whitespace-separated edge list with `#` comments.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_from_edge_list(edges: *const c_char, out: *mut *mut CkGraph) -> CkStatus {
    guard(|| {
        let raw = parse_edge_list_str(text(edges, "edge list")?)?;
        put(out, CkGraph(data_cleanse(&raw).0))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ck_graph_cycle(n: usize, out: *mut *mut CkGraph) -> CkStatus {
    guard(|| put(out, CkGraph(gen_cycle(n)?)))
}

#[no_mangle]
pub unsafe extern "C" fn ck_graph_path(n: usize, out: *mut *mut CkGraph) -> CkStatus {
    guard(|| put(out, CkGraph(gen_path(n)?)))
}

#[no_mangle]
pub unsafe extern "C" fn ck_graph_complete(n: usize, out: *mut *mut CkGraph) -> CkStatus {
    guard(|| put(out, CkGraph(gen_complete(n)?)))
}

/// RMAT graph with the default quadrant weights.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_rmat(n: usize, edge_factor: usize, seed: u64, out: *mut *mut CkGraph) -> CkStatus {
    guard(|| {
        let params = RmatParams::new(n, seed).with_edge_factor(edge_factor);
        put(out, CkGraph(rmat_generate(&params)?))
    })
}

/// Number of vertices; 0 for null.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_vertex_count(g: *const CkGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Number of undirected edges; 0 for null.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_edge_count(g: *const CkGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.m())
}

/// Dense index of the vertex with external id `label`.
#[no_mangle]
pub unsafe extern "C" fn ck_graph_find(g: *const CkGraph, label: *const c_char, out: *mut u32) -> CkStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        let label = text(label, "label")?;
        let v = g.0.find(label).ok_or_else(|| Failure(CkStatus::OutOfRange, format!("no vertex {label:?}")))?;
        write(out, v.0)
    })
}

#[no_mangle]
pub unsafe extern "C" fn ck_graph_to_adjacency_json(g: *const CkGraph, out: *mut *mut c_char) -> CkStatus {
    guard(|| put_string(out, write_adjacency_json(&borrow(g, "graph")?.0)))
}

#[no_mangle]
pub unsafe extern "C" fn ck_graph_free(g: *mut CkGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

// ---- core maps ----

/// Sequential decomposition.
#[no_mangle]
pub unsafe extern "C" fn ck_decompose(g: *const CkGraph, out: *mut *mut CkCoreMap) -> CkStatus {
    guard(|| put(out, CkCoreMap(bz_decompose(&borrow(g, "graph")?.0))))
}

#[no_mangle]
pub unsafe extern "C" fn ck_core_map_len(map: *const CkCoreMap) -> usize {
    map.as_ref().map_or(0, |m| m.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn ck_core_map_max(map: *const CkCoreMap) -> u32 {
    map.as_ref().map_or(0, |m| m.0.max_core())
}

#[no_mangle]
pub unsafe extern "C" fn ck_core_map_get(map: *const CkCoreMap, vertex: u32, out: *mut u32) -> CkStatus {
    guard(|| {
        let m = borrow(map, "core map")?;
        if vertex as usize >= m.0.len() {
            return Err(Failure(CkStatus::OutOfRange, format!("vertex {vertex} >= {}", m.0.len())));
        }
        write(out, m.0.get(VertexId(vertex)))
    })
}

/// Counts vertices whose core number breaks the locality conditions.
#[no_mangle]
pub unsafe extern "C" fn ck_verify_locality(
    g: *const CkGraph,
    map: *const CkCoreMap,
    violations: *mut usize,
) -> CkStatus {
    guard(|| {
        let report = verify_locality(&borrow(g, "graph")?.0, &borrow(map, "core map")?.0)?;
        write(violations, report.violations.len())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ck_core_map_free(map: *mut CkCoreMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

// ---- simulation ----

fn to_config(c: &CkSimConfig) -> Result<SimConfig, Failure> {
    let engine = match c.engine {
        CkEngine::Threaded => EngineKind::Threaded,
        CkEngine::Event => EngineKind::Event,
    };
    let latency = match c.latency_kind {
        CkLatencyKind::Zero => LatencyModel::Zero,
        CkLatencyKind::Fixed => LatencyModel::Fixed { delay: c.latency_a },
        CkLatencyKind::Uniform => LatencyModel::Uniform { lo: c.latency_a, hi: c.latency_b },
    };
    let mut config = SimConfig::for_engine(engine)
        .with_seed(c.seed)
        .with_latency(latency)
        .with_bins(c.bins as usize)
        .with_periods(c.heartbeat_period, c.watchdog_quiet_period);
    config.threads = (c.threads > 0).then_some(c.threads as usize);
    config.validate()?;
    Ok(config)
}

/// Default parameters for `engine`.
#[no_mangle]
pub unsafe extern "C" fn ck_sim_config_default(engine: CkEngine, out: *mut CkSimConfig) -> CkStatus {
    guard(|| {
        let c = match engine {
            CkEngine::Threaded => SimConfig::threaded(),
            CkEngine::Event => SimConfig::event(),
        };
        let (latency_kind, latency_a, latency_b) = match c.latency {
            LatencyModel::Zero => (CkLatencyKind::Zero, 0, 0),
            LatencyModel::Fixed { delay } => (CkLatencyKind::Fixed, delay, delay),
            LatencyModel::Uniform { lo, hi } => (CkLatencyKind::Uniform, lo, hi),
        };
        write(
            out,
            CkSimConfig {
                engine,
                heartbeat_period: c.heartbeat_period,
                watchdog_quiet_period: c.watchdog_quiet_period,
                bins: c.bins as u32,
                latency_kind,
                latency_a,
                latency_b,
                seed: c.rng_seed,
                threads: 0,
            },
        )
    })
}

/// Runs the distributed decomposition to quiescence.
#[no_mangle]
pub unsafe extern "C" fn ck_simulate(
    g: *const CkGraph,
    config: *const CkSimConfig,
    out: *mut *mut CkSimResult,
) -> CkStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        let config = to_config(borrow(config, "config")?)?;
        put(out, CkSimResult(run(&g.0, &config)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ck_sim_result_total_messages(r: *const CkSimResult) -> u64 {
    r.as_ref().map_or(0, |r| r.0.total_core_messages)
}

#[no_mangle]
pub unsafe extern "C" fn ck_sim_result_total_heartbeats(r: *const CkSimResult) -> u64 {
    r.as_ref().map_or(0, |r| r.0.total_heartbeats)
}

/// Microseconds (threaded) or ticks (event).
#[no_mangle]
pub unsafe extern "C" fn ck_sim_result_duration(r: *const CkSimResult) -> u64 {
    r.as_ref().map_or(0, |r| r.0.duration)
}

#[no_mangle]
pub unsafe extern "C" fn ck_sim_result_final_active(r: *const CkSimResult) -> u64 {
    r.as_ref().map_or(0, |r| r.0.final_active)
}

/// Non-zero if the watchdog fired with messages still undelivered.
#[no_mangle]
pub unsafe extern "C" fn ck_sim_result_early_fire(r: *const CkSimResult) -> bool {
    r.as_ref().is_some_and(|r| r.0.early_fire)
}

#[no_mangle]
pub unsafe extern "C" fn ck_sim_result_bins(r: *const CkSimResult) -> usize {
    r.as_ref().map_or(0, |r| r.0.per_bin_messages.len())
}

#[no_mangle]
pub unsafe extern "C" fn ck_sim_result_bin(
    r: *const CkSimResult,
    bin: usize,
    messages: *mut u64,
    active: *mut u64,
) -> CkStatus {
    guard(|| {
        let r = &borrow(r, "result")?.0;
        if bin >= r.per_bin_messages.len() {
            return Err(Failure(CkStatus::OutOfRange, format!("bin {bin} >= {}", r.per_bin_messages.len())));
        }
        write(messages, r.per_bin_messages[bin])?;
        write(active, r.per_bin_active[bin])
    })
}

/// Copy of the final core numbers.
#[no_mangle]
pub unsafe extern "C" fn ck_sim_result_cores(r: *const CkSimResult, out: *mut *mut CkCoreMap) -> CkStatus {
    guard(|| put(out, CkCoreMap(borrow(r, "result")?.0.final_cores.clone())))
}

/// Structured metrics report for a run on `g`.
#[no_mangle]
pub unsafe extern "C" fn ck_sim_result_report_json(
    g: *const CkGraph,
    r: *const CkSimResult,
    name: *const c_char,
    out: *mut *mut c_char,
) -> CkStatus {
    guard(|| {
        let name = if name.is_null() { "" } else { text(name, "name")? };
        let report = MetricsReport::from_run(name, &borrow(g, "graph")?.0, &borrow(r, "result")?.0);
        let file = export_report(&report, ReportFormat::Structured)?.remove(0);
        put_string(out, file.contents)
    })
}

#[no_mangle]
pub unsafe extern "C" fn ck_sim_result_free(r: *mut CkSimResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
