//! One tokio task per vertex, real-time heartbeats and watchdog.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tokio::sync::{mpsc, oneshot};
use tokio::time::{Instant, MissedTickBehavior};

use super::{mailbox_capacity, HeartbeatPolicy, LatencyModel, RawRun, SimConfig};
use crate::error::{CoreError, Result};
use crate::graph::{Graph, VertexId};
use crate::localcore::{Action, Message, VertexState};
use crate::metrics::ActivityInterval;

pub const THREADS_ENV: &str = "COREKIT_THREADS";

struct Shared {
    graph: Graph,
    mailboxes: Vec<mpsc::Sender<Message>>,
    heartbeat: mpsc::UnboundedSender<()>,
    start: Instant,
    latency: LatencyModel,
    policy: HeartbeatPolicy,
    heartbeat_period: Duration,
    seed: u64,
    sent: AtomicU64,
    delivered: AtomicU64,
}

impl Shared {
    fn micros(&self) -> u64 {
        self.start.elapsed().as_micros() as u64
    }
}

struct WorkerReport {
    state: VertexState,
    send_times: Vec<u64>,
    activity: Vec<ActivityInterval>,
    heartbeats: u32,
}

fn worker_threads(config: &SimConfig) -> usize {
    if let Some(t) = config.threads {
        return t;
    }
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        match raw.trim().parse::<usize>() {
            Ok(t) if t > 0 => return t,
            _ => log::warn!("ignoring {THREADS_ENV}={raw:?}: expected a positive integer"),
        }
    }
    std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)
}

pub(crate) fn run_threaded(graph: &Graph, config: &SimConfig) -> Result<RawRun> {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(worker_threads(config))
        .enable_time()
        .build()
        .map_err(|e| CoreError::Engine(format!("cannot start runtime: {e}")))?;
    runtime.block_on(simulate(graph.clone(), config.clone()))
}

async fn simulate(graph: Graph, config: SimConfig) -> Result<RawRun> {
    let n = graph.n();
    let mut inboxes = Vec::with_capacity(n);
    let mut mailboxes = Vec::with_capacity(n);
    for v in graph.vertices() {
        let (tx, rx) = mpsc::channel(mailbox_capacity(&graph, v));
        mailboxes.push(tx);
        inboxes.push(Some(rx));
    }
    let (hb_tx, hb_rx) = mpsc::unbounded_channel();
    let mut stop_tx = Vec::with_capacity(n);
    let mut stop_rx = Vec::with_capacity(n);
    for _ in 0..n {
        let (tx, rx) = oneshot::channel::<()>();
        stop_tx.push(tx);
        stop_rx.push(Some(rx));
    }

    let shared = Arc::new(Shared {
        graph,
        mailboxes,
        heartbeat: hb_tx,
        start: Instant::now(),
        latency: config.latency,
        policy: config.heartbeat_policy,
        heartbeat_period: Duration::from_millis(config.heartbeat_period),
        seed: config.rng_seed,
        sent: AtomicU64::new(0),
        delivered: AtomicU64::new(0),
    });

    let watchdog =
        tokio::spawn(watchdog(hb_rx, stop_tx, Duration::from_millis(config.watchdog_quiet_period), shared.start));

    // Seeded spawn order so different seeds exercise different schedules.
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.rng_seed));
    let mut handles = Vec::with_capacity(n);
    for &v in &order {
        let inbox = inboxes[v as usize].take().expect("each inbox taken once");
        let stop = stop_rx[v as usize].take().expect("each stop signal taken once");
        handles.push((v, tokio::spawn(worker(VertexId(v), inbox, stop, Arc::clone(&shared)))));
    }

    let mut reports: Vec<Option<WorkerReport>> = (0..n).map(|_| None).collect();
    let mut failure = None;
    for (v, handle) in handles {
        match handle.await {
            Ok(Ok(report)) => reports[v as usize] = Some(report),
            Ok(Err(e)) => failure = failure.or(Some(e)),
            Err(join) => {
                failure = failure.or(Some(CoreError::Engine(format!("worker {v} failed: {join}"))));
            }
        }
    }
    let (fire_at, signals) = watchdog.await.map_err(|e| CoreError::Engine(format!("watchdog failed: {e}")))?;
    if let Some(e) = failure {
        return Err(match e {
            CoreError::Engine(_) => e,
            other => CoreError::Engine(other.to_string()),
        });
    }

    let mut states = Vec::with_capacity(n);
    let mut send_times = Vec::new();
    let mut activity = Vec::new();
    let mut heartbeats = Vec::with_capacity(n);
    for report in reports.into_iter().map(|r| r.expect("every worker reported")) {
        states.push(report.state);
        send_times.extend(report.send_times.into_iter().map(|t| t.min(fire_at)));
        activity.extend(report.activity);
        heartbeats.push(report.heartbeats);
    }
    send_times.sort_unstable();

    Ok(RawRun {
        states,
        send_times,
        activity,
        heartbeats_per_vertex: heartbeats,
        duration: fire_at,
        messages_sent: shared.sent.load(Ordering::SeqCst),
        messages_delivered: shared.delivered.load(Ordering::SeqCst),
        termination_signals: signals,
        trace_digest: None,
    })
}

/// Keeps a single "heard anything" flag in the form of a resettable
/// timeout; fires once after a full quiet period.
async fn watchdog(
    mut heartbeats: mpsc::UnboundedReceiver<()>,
    stops: Vec<oneshot::Sender<()>>,
    quiet: Duration,
    start: Instant,
) -> (u64, u64) {
    while let Ok(Some(())) = tokio::time::timeout(quiet, heartbeats.recv()).await {}
    let fired = start.elapsed().as_micros() as u64;
    let mut signals = 0;
    for stop in stops {
        // A worker that already failed has dropped its receiver.
        if stop.send(()).is_ok() {
            signals += 1;
        }
    }
    (fired, signals)
}

async fn worker(
    v: VertexId,
    mut inbox: mpsc::Receiver<Message>,
    mut stop: oneshot::Receiver<()>,
    shared: Arc<Shared>,
) -> Result<WorkerReport> {
    let graph = &shared.graph;
    let neighbours = graph.neighbors(v);
    let mut state = VertexState::new(v, neighbours.len());
    let mut rng = ChaCha8Rng::seed_from_u64(shared.seed ^ (u64::from(v.0) << 20));
    let mut send_times = Vec::new();
    let mut activity = Vec::new();
    let mut heartbeats = 0u32;
    let mut active_since = None;

    let beat = |count: &mut u32| {
        *count += 1;
        let _ = shared.heartbeat.send(());
    };

    if !neighbours.is_empty() {
        active_since = Some(shared.micros());
        beat(&mut heartbeats);
        broadcast(&shared, v, neighbours.len() as u32, &mut rng, &mut send_times).await;
    }
    state.settle();
    if !state.active {
        close(&mut active_since, &mut activity, shared.micros());
    }

    let mut ticker = tokio::time::interval_at(shared.start + shared.heartbeat_period, shared.heartbeat_period);
    ticker.set_missed_tick_behavior(MissedTickBehavior::Delay);

    loop {
        tokio::select! {
            biased;
            _ = &mut stop => break,
            received = inbox.recv() => {
                let Some(msg) = received else { break };
                shared.delivered.fetch_add(1, Ordering::SeqCst);
                let was_active = state.active;
                let t = state.handle(neighbours, msg)?;
                if t.recomputed && !was_active {
                    active_since = Some(shared.micros());
                }
                let send_beat = match shared.policy {
                    HeartbeatPolicy::OnRecompute => t.recomputed,
                    HeartbeatPolicy::OnDecrease => matches!(t.action, Action::Broadcast(_)),
                };
                if send_beat {
                    beat(&mut heartbeats);
                }
                if let Action::Broadcast(k) = t.action {
                    broadcast(&shared, v, k, &mut rng, &mut send_times).await;
                }
                state.settle();
                if !state.active {
                    close(&mut active_since, &mut activity, shared.micros());
                }
            }
            _ = ticker.tick(), if state.active => beat(&mut heartbeats),
        }
    }

    if state.active {
        if let Some(start) = active_since {
            activity.push(ActivityInterval { start, end: None });
        }
    }
    Ok(WorkerReport { state, send_times, activity, heartbeats })
}

fn close(active_since: &mut Option<u64>, activity: &mut Vec<ActivityInterval>, now: u64) {
    if let Some(start) = active_since.take() {
        if now > start {
            activity.push(ActivityInterval { start, end: Some(now) });
        }
    }
}

async fn broadcast(shared: &Arc<Shared>, v: VertexId, value: u32, rng: &mut ChaCha8Rng, send_times: &mut Vec<u64>) {
    let msg = Message { sender: v, core_number: value };
    for &w in shared.graph.neighbors(v) {
        shared.sent.fetch_add(1, Ordering::SeqCst);
        send_times.push(shared.micros());
        let delay = shared.latency.draw(rng);
        let mailbox = &shared.mailboxes[w.index()];
        if delay == 0 {
            // Capacity covers every message the receiver can ever get, so
            // this never waits; a closed mailbox means the run is over.
            let _ = mailbox.send(msg).await;
        } else {
            // Forwarding task standing in for a slow link.
            let mailbox = mailbox.clone();
            tokio::spawn(async move {
                tokio::time::sleep(Duration::from_millis(delay)).await;
                let _ = mailbox.send(msg).await;
            });
        }
    }
}
