use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hofj::harness::{self, Dataset, ExperimentConfig, HarnessError};
use hofj::io::{self, PreparedGraph};
use hofj::report::{self, Check};
use hofj_core::dynamics::{
    approximation_error_bound, build_sparse_transition, iterate_opinions, ErrorBoundInputs,
    IterationConfig,
};
use hofj_core::opinion_gen::{generate_innate, generate_resistance, OpinionDistribution};
use hofj_core::polynomial::{PolynomialSpec, DEFAULT_DENSE_CAP};
use hofj_core::sparsifier::{SamplingMode, SparsifierConfig};
use hofj_core::OpinionState;

#[derive(Parser)]
#[command(name = "hofj", version, about = "Higher-order Friedkin-Johnsen opinion dynamics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load an edge list, keep its largest connected component and print n', m'.
    Prepare {
        path: PathBuf,
        #[arg(long)]
        directed: bool,
        /// Write the LCC as a `u v w` edge list over compact ids.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write `compact_id original_label` lines.
        #[arg(long)]
        id_map: Option<PathBuf>,
    },
    /// Exact vs approximate equilibria; one JSON report per (seed, solver).
    Compare {
        path: PathBuf,
        #[command(flatten)]
        exp: ExpArgs,
        /// Innate opinions file (text column or JSON array) used for every seed.
        #[arg(long, requires = "resistance")]
        innate: Option<PathBuf>,
        #[arg(long, requires = "innate")]
        resistance: Option<PathBuf>,
        /// Also report the fraction of nodes whose equilibria under --beta and
        /// the classic model differ by more than this amount.
        #[arg(long)]
        model_difference: Option<f64>,
    },
    /// MAE and wall time across sample budgets M = k·T·m.
    SweepM {
        path: PathBuf,
        #[command(flatten)]
        exp: ExpArgs,
        #[arg(long, value_delimiter = ',', default_values_t = harness::DEFAULT_K_GRID)]
        ks: Vec<usize>,
    },
    /// MAE as a function of the iteration count.
    SweepIters {
        path: PathBuf,
        #[command(flatten)]
        exp: ExpArgs,
        #[arg(long, value_delimiter = ',', default_values_t = harness::DEFAULT_ITER_GRID)]
        grid: Vec<usize>,
    },
    /// Reproduce the ten-node tree example.
    ExampleTree,
    /// Generate innate opinions and resistances.
    GenOpinions {
        /// Number of agents; or use --graph to match a prepared graph.
        #[arg(long, required_unless_present = "graph")]
        n: Option<usize>,
        #[arg(long, conflicts_with = "n")]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = OpinionDistribution::Uniform)]
        distribution: OpinionDistribution,
        #[arg(long = "x-min", default_value_t = 1.0)]
        x_min: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        /// Innate opinions; resistances go to `<out>.resistance`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a sparsifier and export it as `<out>.edges` plus `<out>.json`.
    Sparsify {
        path: PathBuf,
        #[arg(long, value_parser = parse_beta, default_value = "0.5,0.5")]
        beta: PolynomialSpec,
        #[arg(long = "M-multiplier", default_value_t = 10)]
        m_multiplier: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = SamplingMode::LiteralUniform)]
        mode: SamplingMode,
        #[arg(long)]
        single_thread: bool,
        /// Estimate spectral similarity against the dense L_β.
        #[arg(long)]
        diagnostics: bool,
        /// Also iterate against the sparsifier for --iters steps and write
        /// `<out>.trace.csv`.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ExpArgs {
    #[arg(long, value_parser = parse_beta, default_value = "0.5,0.5")]
    beta: PolynomialSpec,
    #[arg(long = "M-multiplier", default_value_t = 10)]
    m_multiplier: usize,
    #[arg(long, default_value_t = 100)]
    iters: usize,
    /// First seed; runs use `seed, seed+1, ...`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, default_value_t = OpinionDistribution::Uniform)]
    distribution: OpinionDistribution,
    #[arg(long = "x-min", default_value_t = 1.0)]
    x_min: f64,
    #[arg(long, default_value_t = SamplingMode::LiteralUniform)]
    mode: SamplingMode,
    /// Sample on one thread (the setting used for timing comparisons).
    #[arg(long)]
    single_thread: bool,
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    dense_cap: usize,
    #[arg(long)]
    directed: bool,
    /// Output file (JSON lines for compare, CSV for sweeps); stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExpArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            spec: self.beta.clone(),
            multiplier: self.m_multiplier,
            iters: self.iters,
            seeds: (self.seed..self.seed + self.seeds).collect(),
            distribution: self.distribution,
            x_min: self.x_min,
            mode: self.mode,
            workers: workers(self.single_thread),
            dense_cap: self.dense_cap,
        }
    }
}

fn parse_beta(s: &str) -> Result<PolynomialSpec, String> {
    let beta = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    PolynomialSpec::new(beta).map_err(|e| e.to_string())
}

fn workers(single_thread: bool) -> usize {
    if single_thread {
        1
    } else {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(p) => io::write_text(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn print_checks(checks: &[Check]) -> bool {
    for c in checks {
        println!("{}", c.line());
    }
    report::all_pass(checks)
}

fn load(path: &Path, directed: bool) -> Result<PreparedGraph, HarnessError> {
    let prepared = io::prepare(path, directed)?;
    eprintln!(
        "{}: n'={} m'={} (input {} nodes, {} edges; {} self-loops dropped, {} duplicates merged)",
        path.display(),
        prepared.graph.node_count(),
        prepared.graph.edge_count(),
        prepared.input_nodes,
        prepared.input_edges,
        prepared.ingest.self_loops_dropped,
        prepared.ingest.duplicates_merged,
    );
    Ok(prepared)
}

fn dataset_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Prepare { path, directed, out, id_map } => {
            let p = load(&path, directed)?;
            let stats = serde_json::json!({
                "dataset": dataset_name(&path),
                "n": p.graph.node_count(),
                "m": p.graph.edge_count(),
                "input_nodes": p.input_nodes,
                "input_edges": p.input_edges,
                "self_loops_dropped": p.ingest.self_loops_dropped,
                "duplicates_merged": p.ingest.duplicates_merged,
                "directed_hint": p.directed_hint,
            });
            println!("n'={} m'={}", p.graph.node_count(), p.graph.edge_count());
            println!("{stats}");
            if let Some(out) = out {
                io::write_edge_list(&out, &p.graph)?;
            }
            if let Some(map) = id_map {
                io::write_id_map(&map, &p.ids)?;
            }
            Ok(true)
        }
        Command::Compare { path, exp, innate, resistance, model_difference } => {
            let p = load(&path, exp.directed)?;
            let cfg = exp.config();
            let name = dataset_name(&path);
            let fixed = match (innate, resistance) {
                (Some(s), Some(a)) => Some(OpinionState::new(io::read_vector(&s)?, io::read_vector(&a)?)?),
                _ => None,
            };
            let data = Dataset { name: &name, graph: &p.graph, ingest: Some(p.ingest) };
            let reports = harness::compare(data, &cfg, fixed.as_ref())?;
            let mut buf = Vec::new();
            report::write_json_lines(&mut buf, &reports).expect("in-memory write");
            emit(exp.out.as_deref(), &String::from_utf8(buf).expect("JSON is UTF-8"))?;
            let maes: Vec<f64> = reports.iter().filter(|r| r.solver == report::Solver::Approx).filter_map(|r| r.mae_sigma).collect();
            if let Some(med) = hofj_core::stats::median(&maes) {
                eprintln!("median MAE over {} seeds: {med:.4e}", maes.len());
            }
            if let Some(threshold) = model_difference {
                let state = match &fixed {
                    Some(s) => s.clone(),
                    None => cfg.opinions(p.graph.node_count(), cfg.seeds[0])?,
                };
                let frac = harness::model_difference(
                    &p.graph,
                    &state,
                    &PolynomialSpec::classic(),
                    &cfg.spec,
                    threshold,
                    cfg.dense_cap,
                )?;
                eprintln!("fraction of nodes with |z_classic - z_beta| > {threshold}: {frac:.4}");
            }
            Ok(true)
        }
        Command::SweepM { path, exp, ks } => {
            let p = load(&path, exp.directed)?;
            let sweep = harness::sweep_m(&p.graph, &exp.config(), &ks)?;
            emit(exp.out.as_deref(), &sweep.csv())?;
            for pt in &sweep.points {
                eprintln!("k={:<5} M={:<10} median MAE {:.4e}  median time {:.4} s", pt.k, pt.budget, pt.median_mae, pt.median_seconds);
            }
            Ok(print_checks(&sweep.checks()))
        }
        Command::SweepIters { path, exp, grid } => {
            let p = load(&path, exp.directed)?;
            let sweep = harness::sweep_iters(&p.graph, &exp.config(), &grid)?;
            emit(exp.out.as_deref(), &sweep.csv())?;
            for &t in &grid {
                if let Some(m) = sweep.median_at(t) {
                    eprintln!("t={t:<4} median MAE {m:.4e}");
                }
            }
            Ok(print_checks(&sweep.checks()))
        }
        Command::ExampleTree => {
            let report = harness::run_example_tree()?;
            println!("{:<12} {:>8} {:>8} {:>8} {:>10}", "beta", "red", "yellow", "blue", "sum");
            for r in &report.results {
                println!(
                    "{:<12} {:>8.3} {:>8.3} {:>8.3} {:>10.3}",
                    format!("{:?}", r.case.beta),
                    r.opinions[0],
                    r.opinions[1],
                    r.opinions[4],
                    r.rounded_sum
                );
            }
            Ok(print_checks(&report.checks))
        }
        Command::GenOpinions { n, graph, distribution, x_min, seed, json, out } => {
            let n = match (n, graph) {
                (Some(n), _) => n,
                (None, Some(g)) => load(&g, false)?.graph.node_count(),
                (None, None) => return Err(HarnessError::Input("either --n or --graph is required".into())),
            };
            let cfg = ExperimentConfig { distribution, x_min, ..Default::default() };
            let s = generate_innate(&cfg.gen_spec(n, seed))?;
            let a = generate_resistance(n, seed);
            let res_path = out.with_extension("resistance");
            if json {
                io::write_vector_json(&out, &s)?;
                io::write_vector_json(&res_path, &a)?;
            } else {
                io::write_vector_text(&out, &s)?;
                io::write_vector_text(&res_path, &a)?;
            }
            eprintln!(
                "{n} innate opinions ({distribution}, x_min={x_min}, seed {seed}) -> {}; resistances -> {}; generator: {}",
                out.display(),
                res_path.display(),
                hofj_core::rng::GENERATOR_NAME
            );
            Ok(true)
        }
        Command::Sparsify { path, beta, m_multiplier, seed, mode, single_thread, diagnostics, trace, iters, out } => {
            let p = load(&path, false)?;
            let g = &p.graph;
            let cfg = SparsifierConfig {
                mode,
                record_diagnostics: diagnostics,
                ..SparsifierConfig::with_multiplier(m_multiplier, beta.degree(), g.edge_count(), seed)
            };
            let sp = harness::sparsify(g, &beta, cfg, workers(single_thread))?;
            let (edges, sidecar) = io::write_sparsifier(&out, &sp)?;
            eprintln!(
                "M={} merged edges={} self-loop samples={} -> {}, {}",
                cfg.budget,
                sp.merged_edge_count,
                sp.self_loop_samples,
                edges.display(),
                sidecar.display()
            );
            if trace {
                let state = ExperimentConfig::default().opinions(g.node_count(), seed)?;
                let p_tilde = build_sparse_transition(g, &sp.laplacian)?;
                if p_tilde.negative_entry_count > 0 {
                    log::warn!("sparsified transition has {} negative entries", p_tilde.negative_entry_count);
                }
                let it = IterationConfig { max_iters: iters, stop_tol: None, track_trace: true };
                let outcome = iterate_opinions(&p_tilde, &state, &it)?;
                let bounds: Option<Vec<f64>> = sp.epsilon_estimate.map(|eps| {
                    (1..=outcome.trace.len())
                        .map(|t| {
                            let inp = ErrorBoundInputs { epsilon: eps, alpha_min: state.alpha_min(), n: g.node_count(), t };
                            approximation_error_bound(&inp).unwrap_or(f64::NAN)
                        })
                        .collect()
                });
                let trace_path = out.with_extension("trace.csv");
                io::write_text(&trace_path, &io::trace_csv(&outcome.trace, bounds.as_deref()))?;
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            ExitCode::from(2)
        }
    }
}
