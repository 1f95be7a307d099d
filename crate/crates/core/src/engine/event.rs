//! Deterministic discrete-event executor.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{HeartbeatPolicy, RawRun, SimConfig};
use crate::error::Result;
use crate::graph::{Graph, VertexId};
use crate::localcore::{Action, Message, VertexState};
use crate::metrics::ActivityInterval;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Deliver { to: u32, msg: Message },
    HeartbeatTimer { vertex: u32 },
}

#[derive(Debug, PartialEq, Eq)]
struct Event {
    time: u64,
    seq: u64,
    kind: Kind,
}

// Min-heap on (time, seq); seq is unique so the order is total.
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        (other.time, other.seq).cmp(&(self.time, self.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Sim<'g> {
    graph: &'g Graph,
    config: &'g SimConfig,
    rng: ChaCha8Rng,
    queue: BinaryHeap<Event>,
    seq: u64,
    states: Vec<VertexState>,
    active_since: Vec<Option<u64>>,
    activity: Vec<ActivityInterval>,
    send_times: Vec<u64>,
    heartbeats: Vec<u32>,
    last_heartbeat: u64,
    delivered: u64,
    trace: Sha256,
}

impl<'g> Sim<'g> {
    fn push(&mut self, time: u64, kind: Kind) {
        self.seq += 1;
        self.queue.push(Event { time, seq: self.seq, kind });
    }

    fn broadcast(&mut self, now: u64, v: VertexId, value: u32) {
        let msg = Message { sender: v, core_number: value };
        for &w in self.graph.neighbors(v) {
            let at = now + self.config.latency.draw(&mut self.rng);
            self.push(at, Kind::Deliver { to: w.0, msg });
            self.send_times.push(now);
        }
    }

    fn heartbeat(&mut self, now: u64, v: VertexId) {
        self.heartbeats[v.index()] += 1;
        self.last_heartbeat = now;
        self.record(now, 2, v.0, 0);
    }

    fn record(&mut self, time: u64, tag: u8, a: u32, b: u32) {
        self.trace.update(time.to_le_bytes());
        self.trace.update([tag]);
        self.trace.update(a.to_le_bytes());
        self.trace.update(b.to_le_bytes());
    }

    fn close_activity(&mut self, now: u64, v: VertexId) {
        if let Some(start) = self.active_since[v.index()].take() {
            if now > start {
                self.activity.push(ActivityInterval { start, end: Some(now) });
            }
        }
    }
}

pub(crate) fn run_event(graph: &Graph, config: &SimConfig) -> Result<RawRun> {
    let n = graph.n();
    let mut sim = Sim {
        graph,
        config,
        rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
        queue: BinaryHeap::new(),
        seq: 0,
        states: graph.vertices().map(|v| VertexState::new(v, graph.degree(v))).collect(),
        active_since: vec![None; n],
        activity: Vec::new(),
        send_times: Vec::with_capacity(2 * graph.m()),
        heartbeats: vec![0; n],
        last_heartbeat: 0,
        delivered: 0,
        trace: Sha256::new(),
    };

    // Start: every worker is active, reports liveness and broadcasts its degree.
    for v in graph.vertices() {
        let degree = graph.degree(v);
        if degree == 0 {
            sim.states[v.index()].settle();
            continue;
        }
        sim.active_since[v.index()] = Some(0);
        sim.heartbeat(0, v);
        sim.broadcast(0, v, degree as u32);
        sim.push(config.heartbeat_period, Kind::HeartbeatTimer { vertex: v.0 });
    }

    let fire_at = loop {
        let deadline = sim.last_heartbeat + config.watchdog_quiet_period;
        match sim.queue.peek() {
            Some(ev) if ev.time <= deadline => {}
            _ => break deadline,
        }
        let ev = sim.queue.pop().expect("peeked");
        let now = ev.time;
        match ev.kind {
            Kind::Deliver { to, msg } => {
                sim.delivered += 1;
                sim.record(now, 0, to, msg.sender.0);
                sim.record(now, 1, msg.core_number, 0);
                let v = VertexId(to);
                let was_active = sim.states[v.index()].active;
                let t = sim.states[v.index()].handle(graph.neighbors(v), msg)?;
                let beat = match config.heartbeat_policy {
                    HeartbeatPolicy::OnRecompute => t.recomputed,
                    HeartbeatPolicy::OnDecrease => matches!(t.action, Action::Broadcast(_)),
                };
                if beat {
                    sim.heartbeat(now, v);
                }
                if let Action::Broadcast(k) = t.action {
                    sim.broadcast(now, v, k);
                }
                let state = &mut sim.states[v.index()];
                state.settle();
                if was_active && !state.active {
                    sim.close_activity(now, v);
                }
            }
            Kind::HeartbeatTimer { vertex } => {
                let v = VertexId(vertex);
                if sim.states[v.index()].active {
                    sim.heartbeat(now, v);
                    sim.push(now + config.heartbeat_period, Kind::HeartbeatTimer { vertex });
                }
            }
        }
    };

    // Termination: one signal per worker; whatever is still queued was never
    // delivered.
    sim.record(fire_at, 3, n as u32, 0);
    for v in graph.vertices() {
        if sim.states[v.index()].active {
            if let Some(start) = sim.active_since[v.index()] {
                sim.activity.push(ActivityInterval { start, end: None });
            }
        }
    }

    let Sim { states, send_times, activity, heartbeats, delivered, trace, .. } = sim;
    let digest = trace.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(RawRun {
        messages_sent: send_times.len() as u64,
        states,
        send_times,
        activity,
        heartbeats_per_vertex: heartbeats,
        duration: fire_at,
        messages_delivered: delivered,
        termination_signals: n as u64,
        trace_digest: Some(hex),
    })
}
