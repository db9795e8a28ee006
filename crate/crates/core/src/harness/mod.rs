//! Experiment orchestration: configs, seeded ensembles, output files,
//! replays and the self-test.

mod config;
mod experiments;
mod output;
mod selftest;

pub use config::{Experiment, ExperimentConfig};
pub use experiments::{analyse_paths, collapse_scores, compute, mi_table, observations, path_table, MiTable, PercolationAnalysis};
pub use output::{embedded_hash, FileEntry, OutputFile, Outputs, RunManifest};
pub use selftest::{fit_oracle, percolation_oracle, selftest, stabilizer_oracle, zx_oracle, Check};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::circuit::CircuitRecord;
use crate::error::{Error, Result};
use crate::zx::{clifford_simplify, diagram_from_circuit, events_to_csv, to_graph_like, ZxDiagram};

/// Runs `f` on a pool of `workers` threads, or on the global pool for 0.
/// Results never depend on the choice: seeds are indexed by realization.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Computes the experiment and writes its files and manifest into
/// `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunManifest> {
    let started = output::unix_now();
    let outputs = with_workers(cfg.workers, || compute(cfg))??;
    outputs.commit(&cfg.output_dir, cfg.experiment.name(), started)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Raw,
    Graphlike,
    Simplified,
}

impl Stage {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "raw" => Some(Stage::Raw),
            "graphlike" | "graph_like" | "graph-like" => Some(Stage::Graphlike),
            "simplified" => Some(Stage::Simplified),
            _ => None,
        }
    }
}

/// Re-derives a pipeline stage from a circuit record, a harness sample dump
/// wrapping one, or an earlier replay. Wrapped inputs carry a config hash;
/// when `expected_hash` is given they must match it. A replay can only move
/// forward through the stages.
///
/// The result is `{stage, source_hash, diagram, events}` where `events` is
/// the rewrite log (CSV text) of the simplification, empty otherwise.
pub fn replay(input: &str, stage: Stage, expected_hash: Option<&str>) -> Result<Value> {
    let value: Value = serde_json::from_str(input)?;
    let source_hash = value.get("config_hash").and_then(Value::as_str).map(str::to_string);
    if let (Some(want), Some(got)) = (expected_hash, source_hash.as_deref()) {
        if want != got {
            return Err(Error::invalid(format!("input was produced by config {got}, expected {want}")));
        }
    }
    let (mut d, from) = if let Some(diagram) = value.get("diagram") {
        let from: Stage = serde_json::from_value(value.get("stage").cloned().unwrap_or(Value::Null))
            .map_err(|_| Error::invalid("diagram dump without a valid stage tag"))?;
        (ZxDiagram::from_json(&diagram.to_string())?, from)
    } else {
        let record = value.pointer("/data/record").unwrap_or(&value);
        let rec = CircuitRecord::from_value(record)?;
        (diagram_from_circuit(&rec.circuit, None)?, Stage::Raw)
    };
    if stage < from {
        return Err(Error::invalid(format!("cannot replay {from:?} input back to {stage:?}")));
    }
    let mut events = String::new();
    if stage == Stage::Graphlike && from == Stage::Raw {
        to_graph_like(&mut d);
    }
    if stage == Stage::Simplified && from != Stage::Simplified {
        events = events_to_csv(&clifford_simplify(&mut d, true).events);
    }
    Ok(json!({
        "stage": stage,
        "source_hash": source_hash,
        "diagram": serde_json::to_value(d.to_dump())?,
        "events": events,
    }))
}
