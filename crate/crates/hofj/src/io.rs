//! Edge lists, opinion vectors, sparsifier exports and trace CSVs.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use hofj_core::graph::IngestStats;
use hofj_core::sparsifier::SparsifierOutput;
use hofj_core::WeightedGraph;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}: {content:?}")]
    Malformed {
        line: usize,
        reason: &'static str,
        content: String,
    },
    #[error(transparent)]
    Graph(#[from] hofj_core::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A graph read from an edge list, with the original node labels.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: WeightedGraph,
    /// `ids[i]` is the original label of compact node `i`.
    pub ids: Vec<String>,
    pub ingest: IngestStats,
    /// Echoed from the caller; edges are always treated as undirected.
    pub directed_hint: bool,
}

pub fn load_edge_list(path: &Path, directed_hint: bool) -> Result<LoadedGraph, IoError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    parse_edge_list(BufReader::new(file), directed_hint).map_err(|e| match e {
        IoError::Io { source, .. } => io_err(path)(source),
        other => other,
    })
}

/// Parses `u v [w]` lines; `#` and `%` start comment lines and columns past
/// the third are ignored.
pub fn parse_edge_list<R: BufRead>(reader: R, directed_hint: bool) -> Result<LoadedGraph, IoError> {
    let mut raw: Vec<(String, String, f64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(Path::new("<input>")))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let malformed = |reason| IoError::Malformed {
            line: idx + 1,
            reason,
            content: line.clone(),
        };
        let mut cols = trimmed.split_whitespace();
        let (Some(u), Some(v)) = (cols.next(), cols.next()) else {
            return Err(malformed("expected at least two columns"));
        };
        let w = match cols.next() {
            None => 1.0,
            Some(tok) => tok.parse::<f64>().map_err(|_| malformed("weight is not a number"))?,
        };
        if !(w > 0.0 && w.is_finite()) {
            return Err(malformed("weight must be positive"));
        }
        raw.push((u.to_owned(), v.to_owned(), w));
    }

    let ids = compact_ids(raw.iter().flat_map(|(u, v, _)| [u.as_str(), v.as_str()]));
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let edges = raw.iter().map(|(u, v, w)| (index[u.as_str()], index[v.as_str()], *w));
    let (graph, ingest) = WeightedGraph::from_edges(ids.len(), edges)?;
    Ok(LoadedGraph {
        graph,
        ids,
        ingest,
        directed_hint,
    })
}

/// Distinct labels in numeric order when every label is a non-negative
/// integer, lexicographic otherwise.
fn compact_ids<'a>(labels: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut ids: Vec<String> = labels.map(str::to_owned).collect();
    ids.sort_unstable();
    ids.dedup();
    let numeric: Option<Vec<u64>> = ids.iter().map(|s| s.parse::<u64>().ok()).collect();
    if let Some(nums) = numeric {
        let mut keyed: Vec<(u64, String)> = nums.into_iter().zip(ids).collect();
        keyed.sort_unstable();
        return keyed.into_iter().map(|(_, s)| s).collect();
    }
    ids
}

/// Largest connected component of an edge list, with its original labels.
#[derive(Debug, Clone)]
pub struct PreparedGraph {
    pub graph: WeightedGraph,
    pub ids: Vec<String>,
    pub ingest: IngestStats,
    pub input_nodes: usize,
    pub input_edges: usize,
    pub directed_hint: bool,
}

impl PreparedGraph {
    pub fn from_loaded(loaded: LoadedGraph) -> Self {
        let (graph, kept) = loaded.graph.largest_connected_component();
        let ids = kept.iter().map(|&i| loaded.ids[i].clone()).collect();
        Self {
            input_nodes: loaded.graph.node_count(),
            input_edges: loaded.graph.edge_count(),
            graph,
            ids,
            ingest: loaded.ingest,
            directed_hint: loaded.directed_hint,
        }
    }
}

pub fn prepare(path: &Path, directed_hint: bool) -> Result<PreparedGraph, IoError> {
    Ok(PreparedGraph::from_loaded(load_edge_list(path, directed_hint)?))
}

fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    fs::write(path, contents).map_err(io_err(path))
}

/// Writes `compact_id original_label` lines.
pub fn write_id_map(path: &Path, ids: &[String]) -> Result<(), IoError> {
    let mut out = String::new();
    for (i, id) in ids.iter().enumerate() {
        writeln!(out, "{i} {id}").unwrap();
    }
    write_file(path, &out)
}

/// Writes the graph as a `u v w` edge list over compact ids.
pub fn write_edge_list(path: &Path, g: &WeightedGraph) -> Result<(), IoError> {
    let mut out = String::new();
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u, e.v, e.weight).unwrap();
    }
    write_file(path, &out)
}

/// One value per line; line `i` belongs to compact node `i`.
pub fn write_vector_text(path: &Path, values: &[f64]) -> Result<(), IoError> {
    let mut out = String::new();
    for v in values {
        writeln!(out, "{v}").unwrap();
    }
    write_file(path, &out)
}

pub fn write_vector_json(path: &Path, values: &[f64]) -> Result<(), IoError> {
    write_file(path, &serde_json::to_string(values)?)
}

/// Reads a JSON array or a single-column text vector.
pub fn read_vector(path: &Path) -> Result<Vec<f64>, IoError> {
    let mut text = String::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(io_err(path))?;
    if text.trim_start().starts_with('[') {
        return Ok(serde_json::from_str(&text)?);
    }
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        values.push(t.parse::<f64>().map_err(|_| IoError::Malformed {
            line: idx + 1,
            reason: "expected one number per line",
            content: line.to_owned(),
        })?);
    }
    Ok(values)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SparsifierSidecar {
    pub budget: usize,
    pub mode: String,
    pub seed: u64,
    pub workers: usize,
    pub merged_edge_count: usize,
    pub self_loop_samples: usize,
    pub zero_weight_samples: usize,
    pub per_r_counts: Vec<usize>,
    pub epsilon_estimate: Option<f64>,
    pub generator: &'static str,
}

impl SparsifierSidecar {
    pub fn new(out: &SparsifierOutput) -> Self {
        Self {
            budget: out.config.budget,
            mode: out.config.mode.to_string(),
            seed: out.config.seed,
            workers: out.workers,
            merged_edge_count: out.merged_edge_count,
            self_loop_samples: out.self_loop_samples,
            zero_weight_samples: out.zero_weight_samples,
            per_r_counts: out.per_r_counts.clone(),
            epsilon_estimate: out.epsilon_estimate,
            generator: hofj_core::rng::GENERATOR_NAME,
        }
    }
}

/// Writes `<prefix>.edges` (sorted `u v w`) and `<prefix>.json`.
pub fn write_sparsifier(prefix: &Path, out: &SparsifierOutput) -> Result<(PathBuf, PathBuf), IoError> {
    let edges_path = prefix.with_extension("edges");
    let json_path = prefix.with_extension("json");
    let mut text = String::new();
    for e in out.laplacian.edges() {
        writeln!(text, "{} {} {:e}", e.u, e.v, e.weight).unwrap();
    }
    write_file(&edges_path, &text)?;
    write_file(&json_path, &serde_json::to_string_pretty(&SparsifierSidecar::new(out))?)?;
    Ok((edges_path, json_path))
}

/// `step,max_delta,bound` rows; the bound column is empty when unknown.
pub fn trace_csv(trace: &[f64], bounds: Option<&[f64]>) -> String {
    let mut out = String::from("step,max_delta,bound\n");
    for (i, d) in trace.iter().enumerate() {
        let b = bounds.and_then(|b| b.get(i)).map(|b| b.to_string()).unwrap_or_default();
        writeln!(out, "{},{d},{b}", i + 1).unwrap();
    }
    out
}

pub fn write_text(path: &Path, contents: &str) -> Result<(), IoError> {
    write_file(path, contents)
}
