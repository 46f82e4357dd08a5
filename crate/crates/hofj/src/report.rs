//! JSON-lines experiment records.

use std::io::Write;

use hofj_core::graph::IngestStats;
use serde::Serialize;

use crate::io::SparsifierSidecar;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Exact,
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IngestRecord {
    pub input_edges: usize,
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
}

impl From<IngestStats> for IngestRecord {
    fn from(s: IngestStats) -> Self {
        Self {
            input_edges: s.input_edges,
            self_loops_dropped: s.self_loops_dropped,
            duplicates_merged: s.duplicates_merged,
        }
    }
}

/// One solver run on one seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub dataset: String,
    pub n: usize,
    pub m: usize,
    pub distribution: String,
    pub x_min: f64,
    pub beta: Vec<f64>,
    pub solver: Solver,
    pub m_multiplier: Option<usize>,
    /// Sample budget `M`.
    pub budget: Option<usize>,
    pub iterations: Option<usize>,
    pub seed: u64,
    pub wall_time_seconds: f64,
    /// Shared setup (dense `P*` construction) amortised over seeds.
    pub setup_seconds: Option<f64>,
    /// Present exactly when both solvers ran on this seed.
    pub mae_sigma: Option<f64>,
    pub sparsifier: Option<SparsifierSidecar>,
    pub negative_entry_count: Option<usize>,
    pub ingest: Option<IngestRecord>,
    pub note: Option<String>,
    pub generator: &'static str,
    pub version: &'static str,
}

pub fn write_json_lines<W: Write>(mut w: W, reports: &[ExperimentReport]) -> std::io::Result<()> {
    for r in reports {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Outcome of one assertion made by a harness command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}
