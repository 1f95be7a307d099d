//! Time-binned message and activity series, the message bound, and report
//! export.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::engine::{SimResult, TimeUnit};
use crate::error::{CoreError, Result};
use crate::graph::Graph;
use crate::seqcore::CoreMap;

/// Half-open activity span `[start, end)` of one worker. `end == None` means
/// the worker was still active when the run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityInterval {
    pub start: u64,
    pub end: Option<u64>,
}

/// Counts events per slice of `[start, end]`.
///
/// An event at `t` lands in slice `floor(bins * (t - start) / (end - start))`,
/// with `t == end` folded into the last slice. A zero-length run puts every
/// event in the first slice.
pub fn bin_events(times: &[u64], start: u64, end: u64, bins: usize) -> Result<Vec<u64>> {
    if bins == 0 {
        return Err(CoreError::invalid("bins must be at least 1"));
    }
    if end < start {
        return Err(CoreError::invalid(format!("run ends at {end} before it starts at {start}")));
    }
    let mut counts = vec![0u64; bins];
    let span = u128::from(end - start);
    for &t in times {
        if t < start || t > end {
            return Err(CoreError::contract(format!("event at {t} outside run [{start}, {end}]")));
        }
        let b =
            (bins as u128 * u128::from(t - start)).checked_div(span).map_or(0, |b| b.min(bins as u128 - 1) as usize);
        counts[b] += 1;
    }
    Ok(counts)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSeries {
    /// Active workers at the start instant of each slice.
    pub per_bin: Vec<u64>,
    /// Active workers after termination.
    pub final_sample: u64,
}

/// Samples the number of active workers at each slice start
/// `start + b * (end - start) / bins`.
pub fn active_series(intervals: &[ActivityInterval], start: u64, end: u64, bins: usize) -> Result<ActiveSeries> {
    if bins == 0 {
        return Err(CoreError::invalid("bins must be at least 1"));
    }
    if end < start {
        return Err(CoreError::invalid(format!("run ends at {end} before it starts at {start}")));
    }
    let scale = bins as u128;
    let span = u128::from(end - start);
    let mut per_bin = vec![0u64; bins];
    let mut final_sample = 0;
    for iv in intervals {
        if iv.end.is_none() {
            final_sample += 1;
        }
        // Compare in units of 1/bins to keep the sample instants exact.
        let a = u128::from(iv.start.saturating_sub(start)) * scale;
        let e = iv.end.map(|e| u128::from(e.saturating_sub(start)) * scale);
        for (b, slot) in per_bin.iter_mut().enumerate() {
            let s = b as u128 * span;
            if a <= s && e.map_or(true, |e| s < e) {
                *slot += 1;
            }
        }
    }
    Ok(ActiveSeries { per_bin, final_sample })
}

/// `sum over u of deg(u) * (deg(u) - core(u) + 1)`: the initial broadcast
/// plus one broadcast per unit of estimate decrease.
pub fn message_bound(graph: &Graph, cores: &CoreMap) -> u64 {
    graph
        .vertices()
        .map(|v| {
            let d = graph.degree(v) as u64;
            d * (d.saturating_sub(u64::from(cores.get(v))) + 1)
        })
        .sum()
}

/// Everything reported about one run or one batch of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub graph_name: String,
    pub engine: String,
    pub n: usize,
    pub m: usize,
    pub total_core_messages: u64,
    pub total_heartbeats: u64,
    pub per_bin_messages: Vec<u64>,
    pub per_bin_active: Vec<u64>,
    pub final_active: u64,
    pub duration: f64,
    /// `ms` for wall-clock runs, `ticks` for virtual ones.
    pub duration_unit: String,
    pub bound_value: u64,
    pub max_core: u32,
    pub runs: usize,
    pub duration_mean: Option<f64>,
    /// Half-width of the 95% Student-t interval around `duration_mean`.
    pub duration_ci: Option<f64>,
}

impl MetricsReport {
    pub fn from_run(graph_name: &str, graph: &Graph, result: &SimResult) -> Self {
        let (duration, unit) = match result.time_unit {
            TimeUnit::Ticks => (result.duration as f64, "ticks"),
            TimeUnit::Micros => (result.duration as f64 / 1000.0, "ms"),
        };
        MetricsReport {
            graph_name: graph_name.to_owned(),
            engine: result.engine.to_string(),
            n: graph.n(),
            m: graph.m(),
            total_core_messages: result.total_core_messages,
            total_heartbeats: result.total_heartbeats,
            per_bin_messages: result.per_bin_messages.clone(),
            per_bin_active: result.per_bin_active.clone(),
            final_active: result.final_active,
            duration,
            duration_unit: unit.to_owned(),
            bound_value: message_bound(graph, &result.final_cores),
            max_core: result.final_cores.max_core(),
            runs: 1,
            duration_mean: Some(duration),
            duration_ci: None,
        }
    }

    /// Internal consistency of the series against the totals.
    pub fn is_consistent(&self) -> bool {
        self.per_bin_messages.iter().sum::<u64>() == self.total_core_messages
            && self.per_bin_messages.len() == self.per_bin_active.len()
    }
}

/// Mean and 95% confidence half-width (Student-t, `n - 1` degrees of
/// freedom). Needs at least two samples for an interval.
pub fn mean_ci95(samples: &[f64]) -> (Option<f64>, Option<f64>) {
    let n = samples.len();
    if n == 0 {
        return (None, None);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (Some(mean), None);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return (Some(mean), Some(0.0));
    }
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("positive degrees of freedom").inverse_cdf(0.975);
    (Some(mean), Some(t * var.sqrt() / (n as f64).sqrt()))
}

/// Batch report: counters and series of the first run, duration statistics
/// over all of them.
pub fn aggregate(reports: &[MetricsReport]) -> Result<MetricsReport> {
    let first = reports.first().ok_or_else(|| CoreError::invalid("no runs to aggregate"))?;
    if reports.iter().any(|r| r.duration_unit != first.duration_unit) {
        return Err(CoreError::invalid("cannot aggregate runs with different time units"));
    }
    let durations: Vec<f64> = reports.iter().map(|r| r.duration).collect();
    let (mean, ci) = mean_ci95(&durations);
    Ok(MetricsReport { runs: reports.len(), duration_mean: mean, duration_ci: ci, ..first.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// A single JSON object.
    Structured,
    /// Three CSV files: per-bin messages, per-bin active workers, totals.
    Tabular,
}

impl FromStr for ReportFormat {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "structured" | "json" => Ok(ReportFormat::Structured),
            "tabular" | "csv" => Ok(ReportFormat::Tabular),
            other => Err(CoreError::invalid(format!("unknown report format {other:?}"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Structured => "structured",
            ReportFormat::Tabular => "tabular",
        })
    }
}

/// One exported file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportFile {
    pub name: &'static str,
    pub contents: String,
}

pub fn export_report(report: &MetricsReport, format: ReportFormat) -> Result<Vec<ExportFile>> {
    match format {
        ReportFormat::Structured => {
            let mut contents = serde_json::to_string_pretty(report).map_err(|e| CoreError::Engine(e.to_string()))?;
            contents.push('\n');
            Ok(vec![ExportFile { name: "report.json", contents }])
        }
        ReportFormat::Tabular => Ok(vec![
            ExportFile { name: "messages_per_bin.csv", contents: series_csv("messages", &report.per_bin_messages)? },
            ExportFile { name: "active_per_bin.csv", contents: series_csv("active", &report.per_bin_active)? },
            ExportFile { name: "totals.csv", contents: totals_csv(report)? },
        ]),
    }
}

pub fn import_structured(text: &str) -> Result<MetricsReport> {
    serde_json::from_str(text).map_err(|e| CoreError::Parse { line: e.line(), message: e.to_string() })
}

fn series_csv(column: &str, values: &[u64]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["bin", column]).map_err(csv_err)?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([i.to_string(), v.to_string()]).map_err(csv_err)?;
    }
    finish_csv(w)
}

const TOTALS_HEADER: [&str; 14] = [
    "graph_name",
    "engine",
    "n",
    "m",
    "total_core_messages",
    "total_heartbeats",
    "bound_value",
    "max_core",
    "final_active",
    "duration",
    "unit",
    "runs",
    "duration_mean",
    "duration_ci",
];

fn totals_csv(r: &MetricsReport) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(TOTALS_HEADER).map_err(csv_err)?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    w.write_record([
        r.graph_name.clone(),
        r.engine.clone(),
        r.n.to_string(),
        r.m.to_string(),
        r.total_core_messages.to_string(),
        r.total_heartbeats.to_string(),
        r.bound_value.to_string(),
        r.max_core.to_string(),
        r.final_active.to_string(),
        r.duration.to_string(),
        r.duration_unit.clone(),
        r.runs.to_string(),
        opt(r.duration_mean),
        opt(r.duration_ci),
    ])
    .map_err(csv_err)?;
    finish_csv(w)
}

fn csv_err(e: csv::Error) -> CoreError {
    CoreError::Engine(format!("csv: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| CoreError::Engine(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CoreError::Engine(e.to_string()))
}
