//! Simulation toolkit for distributed k-core decomposition.
//!
//! Every vertex runs as an independent worker that only knows its own
//! neighbours. Workers start from their degree, exchange core estimates, and
//! lower them until no estimate changes anywhere in the graph. A central
//! watchdog fed by heartbeats detects global quiescence and stops the run.
//!
//! The crate is split into:
//!
//! * [`graph`]: ingestion, cleansing, statistics and small synthetic graphs.
//! * [`seqcore`]: the sequential bucket-peeling decomposition used as the
//!   reference answer, plus the locality check.
//! * [`localcore`]: the per-vertex state machine.
//! * [`engine`]: the threaded and the discrete-event executors.
//! * [`metrics`]: message and activity series, the message bound and report
//!   export.
//! * [`rmat`]: the seeded recursive-matrix graph generator.
//! * [`cli`]: the `corekit` command-line front end.

pub mod cli;
pub mod engine;
pub mod error;
pub mod graph;
pub mod localcore;
pub mod metrics;
pub mod rmat;
pub mod seqcore;

pub use engine::{run, EngineKind, HeartbeatPolicy, LatencyModel, SimConfig, SimResult};
pub use error::{CoreError, Result};
pub use graph::{Graph, GraphStats, VertexId};
pub use localcore::{update_core, Message, VertexState};
pub use metrics::MetricsReport;
pub use rmat::{rmat_generate, RmatParams};
pub use seqcore::{bz_decompose, core_distribution, verify_locality, CoreHistogram, CoreMap};
