//! Executors for the combined decomposition and termination protocol.
//!
//! Both engines run one logical worker per vertex with a private mailbox.
//! Every worker starts by broadcasting its degree, then feeds incoming
//! messages through [`VertexState::handle`](crate::localcore::VertexState::handle)
//! and broadcasts each lowered estimate. Active workers send heartbeats to a
//! single watchdog, which only remembers whether a heartbeat arrived; after a
//! full quiet period without one it signals every worker to stop.
//!
//! * [`EngineKind::Threaded`]: one tokio task per vertex, real time,
//!   nondeterministic interleaving.
//! * [`EngineKind::Event`]: a single-threaded discrete-event loop over a
//!   virtual clock. Deliveries are ordered by `(time, sequence)` so a run is a
//!   pure function of graph, configuration and seed.

mod event;
mod latency;
mod threaded;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use latency::{latency_sample, LatencyModel};

use crate::error::{CoreError, Result};
use crate::graph::{Graph, VertexId};
use crate::localcore::{update_core, VertexState};
use crate::metrics::{self, ActivityInterval};
use crate::seqcore::CoreMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Threaded,
    Event,
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineKind::Threaded => "threaded",
            EngineKind::Event => "event",
        })
    }
}

impl FromStr for EngineKind {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "threaded" => Ok(EngineKind::Threaded),
            "event" => Ok(EngineKind::Event),
            other => Err(CoreError::invalid(format!("unknown engine {other:?}"))),
        }
    }
}

/// When a worker reports liveness besides its periodic heartbeat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeartbeatPolicy {
    /// On every received report that triggers a recomputation.
    #[default]
    OnRecompute,
    /// Only when the estimate actually drops.
    OnDecrease,
}

/// Unit of every duration in a [`SimConfig`] and [`SimResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    /// Virtual clock of the event engine.
    Ticks,
    /// Wall clock of the threaded engine, microsecond resolution.
    Micros,
}

/// Simulation parameters.
///
/// Periods and latencies are virtual ticks for the event engine and
/// milliseconds for the threaded engine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub engine: EngineKind,
    pub heartbeat_period: u64,
    pub watchdog_quiet_period: u64,
    pub bins: usize,
    pub latency: LatencyModel,
    pub rng_seed: u64,
    #[serde(default)]
    pub heartbeat_policy: HeartbeatPolicy,
    /// Worker-thread cap for the threaded engine. `None` reads
    /// `COREKIT_THREADS`, then falls back to the available parallelism.
    #[serde(default)]
    pub threads: Option<usize>,
}

impl SimConfig {
    /// 100 ms heartbeats, 2 s watchdog, no added latency.
    pub fn threaded() -> Self {
        SimConfig {
            engine: EngineKind::Threaded,
            heartbeat_period: 100,
            watchdog_quiet_period: 2_000,
            bins: 8,
            latency: LatencyModel::Zero,
            rng_seed: 0,
            heartbeat_policy: HeartbeatPolicy::OnRecompute,
            threads: None,
        }
    }

    /// 1-tick heartbeats, 10-tick watchdog, 1-tick message latency.
    pub fn event() -> Self {
        SimConfig {
            engine: EngineKind::Event,
            heartbeat_period: 1,
            watchdog_quiet_period: 10,
            bins: 8,
            latency: LatencyModel::Fixed { delay: 1 },
            rng_seed: 0,
            heartbeat_policy: HeartbeatPolicy::OnRecompute,
            threads: None,
        }
    }

    pub fn for_engine(engine: EngineKind) -> Self {
        match engine {
            EngineKind::Threaded => Self::threaded(),
            EngineKind::Event => Self::event(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_latency(mut self, latency: LatencyModel) -> Self {
        self.latency = latency;
        self
    }

    pub fn with_periods(mut self, heartbeat: u64, quiet: u64) -> Self {
        self.heartbeat_period = heartbeat;
        self.watchdog_quiet_period = quiet;
        self
    }

    pub fn with_bins(mut self, bins: usize) -> Self {
        self.bins = bins;
        self
    }

    pub fn time_unit(&self) -> TimeUnit {
        match self.engine {
            EngineKind::Threaded => TimeUnit::Micros,
            EngineKind::Event => TimeUnit::Ticks,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins == 0 {
            return Err(CoreError::invalid("bins must be at least 1"));
        }
        if self.heartbeat_period == 0 {
            return Err(CoreError::invalid("heartbeat period must be positive"));
        }
        if self.watchdog_quiet_period <= self.heartbeat_period {
            return Err(CoreError::invalid(format!(
                "watchdog quiet period {} must exceed heartbeat period {}",
                self.watchdog_quiet_period, self.heartbeat_period
            )));
        }
        self.latency.validate()?;
        // A message in flight longer than the quiet period could be overtaken
        // by the termination signal.
        if self.watchdog_quiet_period <= self.latency.max() {
            return Err(CoreError::invalid(format!(
                "watchdog quiet period {} must exceed the maximum latency {}",
                self.watchdog_quiet_period,
                self.latency.max()
            )));
        }
        if self.threads == Some(0) {
            return Err(CoreError::invalid("threads must be at least 1"));
        }
        Ok(())
    }
}

/// Outcome of one simulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimResult {
    pub engine: EngineKind,
    pub final_cores: CoreMap,
    pub total_core_messages: u64,
    pub total_heartbeats: u64,
    pub heartbeats_per_vertex: Vec<u32>,
    /// Core messages by send time, `bins` equal slices of the run.
    pub per_bin_messages: Vec<u64>,
    /// Active workers sampled at the start of each slice.
    pub per_bin_active: Vec<u64>,
    /// Workers still active after termination.
    pub final_active: u64,
    /// Start to watchdog firing.
    pub duration: u64,
    pub time_unit: TimeUnit,
    /// SHA-256 of the ordered event log; event engine only.
    pub trace_digest: Option<String>,
    /// Estimate decreases per vertex.
    pub decreases: Vec<u32>,
    pub messages_delivered: u64,
    /// Messages still queued or in flight when the workers stopped.
    pub undelivered_at_termination: u64,
    pub termination_signals: u64,
    /// Vertices whose final stored neighbour values are stale, or for which
    /// recomputing from them would still lower the estimate.
    pub fixed_point_violations: u64,
    /// The watchdog fired while work was still pending.
    pub early_fire: bool,
}

/// Runs the distributed decomposition on `graph` to quiescence.
pub fn run(graph: &Graph, config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    if u32::try_from(graph.n()).is_err() {
        return Err(CoreError::invalid("graph too large for 32-bit vertex ids"));
    }
    let raw = match config.engine {
        EngineKind::Event => event::run_event(graph, config)?,
        EngineKind::Threaded => threaded::run_threaded(graph, config)?,
    };
    finish(graph, config, raw)
}

/// Engine-independent raw output assembled into a [`SimResult`].
pub(crate) struct RawRun {
    pub states: Vec<VertexState>,
    pub send_times: Vec<u64>,
    pub activity: Vec<ActivityInterval>,
    pub heartbeats_per_vertex: Vec<u32>,
    pub duration: u64,
    pub messages_sent: u64,
    pub messages_delivered: u64,
    pub termination_signals: u64,
    pub trace_digest: Option<String>,
}

fn finish(graph: &Graph, config: &SimConfig, raw: RawRun) -> Result<SimResult> {
    let per_bin_messages = metrics::bin_events(&raw.send_times, 0, raw.duration, config.bins)?;
    let active = metrics::active_series(&raw.activity, 0, raw.duration, config.bins)?;

    let fixed_point_violations = audit_fixed_point(graph, &raw.states);
    let final_active = raw.states.iter().filter(|s| s.active).count() as u64;
    let undelivered = raw.messages_sent - raw.messages_delivered;
    let early_fire = undelivered > 0;
    if early_fire {
        log::warn!("watchdog fired with {undelivered} core message(s) undelivered; results may be incomplete");
    }
    debug_assert_eq!(raw.messages_sent, raw.send_times.len() as u64);

    Ok(SimResult {
        engine: config.engine,
        final_cores: CoreMap::new(raw.states.iter().map(|s| s.estimate).collect()),
        total_core_messages: raw.messages_sent,
        total_heartbeats: raw.heartbeats_per_vertex.iter().map(|&h| h as u64).sum(),
        heartbeats_per_vertex: raw.heartbeats_per_vertex,
        per_bin_messages,
        per_bin_active: active.per_bin,
        final_active: final_active.max(active.final_sample),
        duration: raw.duration,
        time_unit: config.time_unit(),
        trace_digest: raw.trace_digest,
        decreases: raw.states.iter().map(|s| s.decreases).collect(),
        messages_delivered: raw.messages_delivered,
        undelivered_at_termination: undelivered,
        termination_signals: raw.termination_signals,
        fixed_point_violations,
        early_fire,
    })
}

/// Counts vertices that are not at a fixed point of the local rule given
/// what they last heard.
fn audit_fixed_point(graph: &Graph, states: &[VertexState]) -> u64 {
    let mut bad = 0;
    for (i, state) in states.iter().enumerate() {
        let v = VertexId(i as u32);
        let nbrs = graph.neighbors(v);
        let stale = nbrs.iter().zip(state.stored()).any(|(w, slot)| *slot != Some(states[w.index()].estimate));
        let settled = update_core(state.stored_values(), state.estimate) == state.estimate;
        if stale || !settled {
            bad += 1;
        }
    }
    bad
}

/// Capacity of a threaded-engine mailbox: one slot for every message the
/// vertex can ever receive, which is at least its degree.
pub fn mailbox_capacity(graph: &Graph, v: VertexId) -> usize {
    graph.neighbors(v).iter().map(|&w| graph.degree(w) + 1).sum::<usize>().max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_complete;

    #[test]
    fn config_validation() {
        assert!(SimConfig::event().validate().is_ok());
        assert!(SimConfig::threaded().validate().is_ok());
        assert!(SimConfig::event().with_bins(0).validate().is_err());
        assert!(SimConfig::event().with_periods(5, 5).validate().is_err());
        assert!(SimConfig::event().with_periods(0, 5).validate().is_err());
        let slow = SimConfig::event().with_latency(LatencyModel::Uniform { lo: 1, hi: 10 });
        assert!(slow.validate().is_err());
        assert!(slow.with_periods(1, 11).validate().is_ok());
        let bad = SimConfig::event().with_latency(LatencyModel::Uniform { lo: 2, hi: 1 });
        assert!(matches!(run(&gen_complete(3).unwrap(), &bad), Err(CoreError::InvalidArgument(_))));
    }

    #[test]
    fn mailbox_holds_at_least_degree() {
        let g = gen_complete(5).unwrap();
        for v in g.vertices() {
            assert!(mailbox_capacity(&g, v) >= g.degree(v));
        }
    }

    #[test]
    fn engine_names() {
        assert_eq!("event".parse::<EngineKind>().unwrap(), EngineKind::Event);
        assert_eq!(EngineKind::Threaded.to_string(), "threaded");
        assert!("fast".parse::<EngineKind>().is_err());
    }
}
