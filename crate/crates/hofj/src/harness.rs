//! Experiment drivers behind the CLI subcommands.

use std::thread;
use std::time::Instant;

use hofj_core::dynamics::{
    build_sparse_transition, contraction_check, iterate_opinions, iterate_opinions_with,
    IterationConfig,
};
use hofj_core::opinion_gen::{generate_innate, generate_resistance, GenSpec, OpinionDistribution};
use hofj_core::polynomial::{
    build_transition_polynomial_capped, mean_absolute_error, solve_equilibrium_with,
    DenseOperator, PolynomialSpec, DEFAULT_DENSE_CAP,
};
use hofj_core::sparsifier::{
    record_epsilon_estimate, SamplingMode, SparsifierConfig, SparsifierOutput, SparsifierPlan,
};
use hofj_core::stats::{linear_fit, median, LinearFit};
use hofj_core::{OpinionState, WeightedGraph};

use crate::io::SparsifierSidecar;
use crate::report::{Check, ExperimentReport, IngestRecord, Solver, TOOL_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] hofj_core::Error),
    #[error(transparent)]
    Io(#[from] crate::io::IoError),
    #[error("{0} requires the exact solver, but {1} nodes exceeds the dense cap of {2}")]
    ExactUnavailable(&'static str, usize, usize),
    #[error("{0}")]
    Input(String),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub spec: PolynomialSpec,
    /// `k` in `M = k · T · m`.
    pub multiplier: usize,
    pub iters: usize,
    pub seeds: Vec<u64>,
    pub distribution: OpinionDistribution,
    pub x_min: f64,
    pub mode: SamplingMode,
    pub workers: usize,
    pub dense_cap: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            spec: PolynomialSpec::new(vec![0.5, 0.5]).unwrap(),
            multiplier: 10,
            iters: 100,
            seeds: (0..5).collect(),
            distribution: OpinionDistribution::Uniform,
            x_min: GenSpec::DEFAULT_X_MIN,
            mode: SamplingMode::LiteralUniform,
            workers: 1,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

impl ExperimentConfig {
    pub fn sparsifier_config(&self, g: &WeightedGraph, multiplier: usize, seed: u64) -> SparsifierConfig {
        SparsifierConfig {
            mode: self.mode,
            ..SparsifierConfig::with_multiplier(multiplier, self.spec.degree(), g.edge_count(), seed)
        }
    }

    pub fn gen_spec(&self, n: usize, seed: u64) -> GenSpec {
        GenSpec {
            x_min: self.x_min,
            ..GenSpec::new(self.distribution, n, seed)
        }
    }

    /// Innate opinions and resistances for one seed.
    pub fn opinions(&self, n: usize, seed: u64) -> Result<OpinionState> {
        let s = generate_innate(&self.gen_spec(n, seed))?;
        Ok(OpinionState::new(s, generate_resistance(n, seed))?)
    }
}

/// Builds the sparsifier with `workers` threads; each worker owns one stream.
pub fn sparsify(
    g: &WeightedGraph,
    spec: &PolynomialSpec,
    cfg: SparsifierConfig,
    workers: usize,
) -> Result<SparsifierOutput> {
    let plan = SparsifierPlan::new(g, spec, cfg, workers)?;
    let mut out = if workers == 1 {
        plan.run()
    } else {
        let parts = thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let plan = &plan;
                    scope.spawn(move || plan.sample_chunk(w))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sampling worker panicked"))
                .collect()
        });
        plan.merge(parts)
    };
    if cfg.record_diagnostics {
        record_epsilon_estimate(g, spec, &mut out)?;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ApproxRun {
    pub expressed: Vec<f64>,
    pub sparsifier: SparsifierOutput,
    pub negative_entry_count: usize,
    pub iterations: usize,
    pub trace: Vec<f64>,
    pub seconds: f64,
}

/// Sparsify, form `P̃`, iterate; timed end to end.
pub fn run_approx(
    g: &WeightedGraph,
    spec: &PolynomialSpec,
    state: &OpinionState,
    sp_cfg: SparsifierConfig,
    workers: usize,
    iter_cfg: &IterationConfig,
) -> Result<ApproxRun> {
    let start = Instant::now();
    let sparsifier = sparsify(g, spec, sp_cfg, workers)?;
    let p = build_sparse_transition(g, &sparsifier.laplacian)?;
    let out = iterate_opinions(&p, state, iter_cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    if p.negative_entry_count > 0 {
        log::warn!(
            "sparsified transition has {} negative entries (seed {})",
            p.negative_entry_count,
            sp_cfg.seed
        );
    }
    Ok(ApproxRun {
        expressed: out.expressed,
        sparsifier,
        negative_entry_count: p.negative_entry_count,
        iterations: out.iterations,
        trace: out.trace,
        seconds,
    })
}

/// Dense `P*`, built once and shared by every seed.
#[derive(Debug, Clone)]
pub struct ExactContext {
    pub p_star: Option<DenseOperator>,
    pub setup_seconds: f64,
}

impl ExactContext {
    pub fn new(g: &WeightedGraph, spec: &PolynomialSpec, cap: usize) -> Result<Self> {
        let start = Instant::now();
        let p_star = match build_transition_polynomial_capped(g, spec, cap) {
            Ok(p) => Some(p),
            Err(hofj_core::Error::DenseCapExceeded { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        Ok(Self {
            p_star,
            setup_seconds: start.elapsed().as_secs_f64(),
        })
    }

    pub fn require(&self, what: &'static str, g: &WeightedGraph, cap: usize) -> Result<&DenseOperator> {
        self.p_star
            .as_ref()
            .ok_or(HarnessError::ExactUnavailable(what, g.node_count(), cap))
    }

    /// `z*` and the solve time, when the dense operator exists.
    pub fn solve(&self, state: &OpinionState) -> Result<Option<(Vec<f64>, f64)>> {
        let Some(p) = &self.p_star else { return Ok(None) };
        let start = Instant::now();
        let z = solve_equilibrium_with(p, state)?;
        Ok(Some((z, start.elapsed().as_secs_f64())))
    }
}

/// Graph plus provenance echoed into reports.
#[derive(Debug, Clone, Copy)]
pub struct Dataset<'a> {
    pub name: &'a str,
    pub graph: &'a WeightedGraph,
    pub ingest: Option<hofj_core::graph::IngestStats>,
}

impl Dataset<'_> {
    fn report(&self, cfg: &ExperimentConfig, solver: Solver, seed: u64) -> ExperimentReport {
        ExperimentReport {
            dataset: self.name.to_owned(),
            n: self.graph.node_count(),
            m: self.graph.edge_count(),
            distribution: cfg.distribution.to_string(),
            x_min: cfg.x_min,
            beta: cfg.spec.beta().to_vec(),
            solver,
            m_multiplier: None,
            budget: None,
            iterations: None,
            seed,
            wall_time_seconds: 0.0,
            setup_seconds: None,
            mae_sigma: None,
            sparsifier: None,
            negative_entry_count: None,
            ingest: self.ingest.map(IngestRecord::from),
            note: None,
            generator: hofj_core::rng::GENERATOR_NAME,
            version: TOOL_VERSION,
        }
    }
}

/// Exact and approximate solvers on identical inputs, one report per
/// `(seed, solver)`. `opinions` overrides generation for every seed.
pub fn compare(
    data: Dataset<'_>,
    cfg: &ExperimentConfig,
    opinions: Option<&OpinionState>,
) -> Result<Vec<ExperimentReport>> {
    let g = data.graph;
    let ctx = ExactContext::new(g, &cfg.spec, cfg.dense_cap)?;
    let cap_note = ctx.p_star.is_none().then(|| {
        format!(
            "exact solver skipped: {} nodes exceeds the dense cap of {}",
            g.node_count(),
            cfg.dense_cap
        )
    });
    let iter_cfg = IterationConfig::fixed(cfg.iters);
    let mut reports = Vec::new();
    for &seed in &cfg.seeds {
        let state = match opinions {
            Some(s) => s.clone(),
            None => cfg.opinions(g.node_count(), seed)?,
        };
        let exact = ctx.solve(&state)?;
        let sp_cfg = cfg.sparsifier_config(g, cfg.multiplier, seed);
        let approx = run_approx(g, &cfg.spec, &state, sp_cfg, cfg.workers, &iter_cfg)?;
        let mae = match &exact {
            Some((z, _)) => Some(mean_absolute_error(z, &approx.expressed)?),
            None => None,
        };
        if let Some((_, secs)) = exact {
            let mut r = data.report(cfg, Solver::Exact, seed);
            r.wall_time_seconds = secs;
            r.setup_seconds = Some(ctx.setup_seconds);
            r.mae_sigma = mae;
            reports.push(r);
        }
        let mut r = data.report(cfg, Solver::Approx, seed);
        r.m_multiplier = Some(cfg.multiplier);
        r.budget = Some(sp_cfg.budget);
        r.iterations = Some(approx.iterations);
        r.wall_time_seconds = approx.seconds;
        r.mae_sigma = mae;
        r.sparsifier = Some(SparsifierSidecar::new(&approx.sparsifier));
        r.negative_entry_count = Some(approx.negative_entry_count);
        r.note = cap_note.clone();
        reports.push(r);
    }
    Ok(reports)
}

/// Fraction of nodes whose equilibria under `a` and `b` differ by more than
/// `threshold`.
pub fn model_difference(
    g: &WeightedGraph,
    state: &OpinionState,
    a: &PolynomialSpec,
    b: &PolynomialSpec,
    threshold: f64,
    cap: usize,
) -> Result<f64> {
    let za = ExactContext::new(g, a, cap)?;
    let zb = ExactContext::new(g, b, cap)?;
    let za = solve_equilibrium_with(za.require("model difference", g, cap)?, state)?;
    let zb = solve_equilibrium_with(zb.require("model difference", g, cap)?, state)?;
    let count = za.iter().zip(&zb).filter(|(x, y)| (*x - *y).abs() > threshold).count();
    Ok(count as f64 / g.node_count() as f64)
}

pub const DEFAULT_K_GRID: [usize; 7] = [1, 10, 100, 200, 500, 1000, 2000];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    pub seed: u64,
    pub budget: usize,
    pub mae: f64,
    pub seconds: f64,
    pub negative_entry_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub k: usize,
    pub budget: usize,
    pub median_mae: f64,
    pub median_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepM {
    pub rows: Vec<SweepRow>,
    pub points: Vec<SweepPoint>,
    /// Median wall time against `M`.
    pub time_fit: Option<LinearFit>,
}

/// MAE and time of the approximate solver across sample budgets.
pub fn sweep_m(g: &WeightedGraph, cfg: &ExperimentConfig, ks: &[usize]) -> Result<SweepM> {
    let ctx = ExactContext::new(g, &cfg.spec, cfg.dense_cap)?;
    let p_star = ctx.require("sweep-m", g, cfg.dense_cap)?;
    let iter_cfg = IterationConfig::fixed(cfg.iters);
    let mut rows = Vec::new();
    for (i, &seed) in cfg.seeds.iter().enumerate() {
        let state = cfg.opinions(g.node_count(), seed)?;
        let z = solve_equilibrium_with(p_star, &state)?;
        if i == 0 {
            if let Some(&k) = ks.first() {
                // Warm-up, not recorded.
                run_approx(g, &cfg.spec, &state, cfg.sparsifier_config(g, k, seed), cfg.workers, &iter_cfg)?;
            }
        }
        for &k in ks {
            let sp_cfg = cfg.sparsifier_config(g, k, seed);
            let run = run_approx(g, &cfg.spec, &state, sp_cfg, cfg.workers, &iter_cfg)?;
            rows.push(SweepRow {
                k,
                seed,
                budget: sp_cfg.budget,
                mae: mean_absolute_error(&z, &run.expressed)?,
                seconds: run.seconds,
                negative_entry_count: run.negative_entry_count,
            });
        }
    }
    let points: Vec<SweepPoint> = ks
        .iter()
        .map(|&k| {
            let at: Vec<&SweepRow> = rows.iter().filter(|r| r.k == k).collect();
            let maes: Vec<f64> = at.iter().map(|r| r.mae).collect();
            let secs: Vec<f64> = at.iter().map(|r| r.seconds).collect();
            SweepPoint {
                k,
                budget: at.first().map_or(0, |r| r.budget),
                median_mae: median(&maes).unwrap_or(f64::NAN),
                median_seconds: median(&secs).unwrap_or(f64::NAN),
            }
        })
        .collect();
    let budgets: Vec<f64> = points.iter().map(|p| p.budget as f64).collect();
    let times: Vec<f64> = points.iter().map(|p| p.median_seconds).collect();
    Ok(SweepM {
        time_fit: linear_fit(&budgets, &times),
        rows,
        points,
    })
}

impl SweepM {
    pub fn csv(&self) -> String {
        let mut out = String::from("k,M,seed,mae,seconds,negative_entries\n");
        for r in &self.rows {
            out += &format!("{},{},{},{},{},{}\n", r.k, r.budget, r.seed, r.mae, r.seconds, r.negative_entry_count);
        }
        out
    }

    fn point(&self, k: usize) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.k == k)
    }

    pub fn checks(&self) -> Vec<Check> {
        let mut checks = Vec::new();
        let medians: Vec<String> = self
            .points
            .iter()
            .map(|p| format!("k={}:{:.3e}", p.k, p.median_mae))
            .collect();
        let monotone = self.points.windows(2).all(|w| w[1].median_mae <= w[0].median_mae);
        checks.push(Check::new("median MAE non-increasing in M", monotone, medians.join(" ")));
        if let (Some(a), Some(b)) = (self.point(1), self.point(100)) {
            checks.push(Check::new(
                "median MAE k=100 below k=1",
                b.median_mae < a.median_mae,
                format!("{:.3e} < {:.3e}", b.median_mae, a.median_mae),
            ));
        }
        if let (Some(a), Some(b)) = (self.point(1000), self.point(2000)) {
            let ratio = b.median_mae / a.median_mae;
            checks.push(Check::new(
                "median MAE k=2000 within 2x of k=1000",
                (0.5..=2.0).contains(&ratio),
                format!("ratio {ratio:.3}"),
            ));
        }
        if let Some(fit) = self.time_fit {
            checks.push(Check::new(
                "wall time linear in M",
                fit.r_squared >= 0.9,
                format!("R^2 {:.4}, slope {:.3e} s/sample", fit.r_squared, fit.slope),
            ));
            let worst = self
                .points
                .iter()
                .map(|p| p.median_seconds / (fit.slope * p.budget as f64 + fit.intercept).max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max);
            checks.push(Check::new(
                "wall time within 1.5x of linear fit",
                worst <= 1.5,
                format!("worst ratio {worst:.3}"),
            ));
        }
        checks
    }
}

pub const DEFAULT_ITER_GRID: [usize; 10] = [0, 1, 2, 5, 10, 20, 30, 50, 75, 100];

#[derive(Debug, Clone, PartialEq)]
pub struct IterRow {
    pub t: usize,
    pub seed: u64,
    pub mae: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepIters {
    pub rows: Vec<IterRow>,
    /// `MAE(s, z*)` per seed, the expected value at `t = 0`.
    pub initial_gap: Vec<(u64, f64)>,
}

/// MAE of the approximate iteration against `z*` at each `t` in `grid`,
/// using one sparsifier per seed.
pub fn sweep_iters(g: &WeightedGraph, cfg: &ExperimentConfig, grid: &[usize]) -> Result<SweepIters> {
    let ctx = ExactContext::new(g, &cfg.spec, cfg.dense_cap)?;
    let p_star = ctx.require("sweep-iters", g, cfg.dense_cap)?;
    let max_t = grid.iter().copied().max().unwrap_or(0);
    let mut rows = Vec::new();
    let mut initial_gap = Vec::new();
    for &seed in &cfg.seeds {
        let state = cfg.opinions(g.node_count(), seed)?;
        let z = solve_equilibrium_with(p_star, &state)?;
        initial_gap.push((seed, mean_absolute_error(&z, state.innate())?));
        let sp = sparsify(g, &cfg.spec, cfg.sparsifier_config(g, cfg.multiplier, seed), cfg.workers)?;
        let p = build_sparse_transition(g, &sp.laplacian)?;
        let mut record = |t: usize, x: &[f64]| {
            if grid.contains(&t) {
                let mae = mean_absolute_error(&z, x).expect("lengths match");
                rows.push(IterRow { t, seed, mae });
            }
        };
        if max_t == 0 {
            record(0, state.innate());
        } else {
            iterate_opinions_with(&p, &state, &IterationConfig::fixed(max_t), &mut record)?;
        }
    }
    Ok(SweepIters { rows, initial_gap })
}

impl SweepIters {
    pub fn csv(&self) -> String {
        let mut out = String::from("t,seed,mae\n");
        for r in &self.rows {
            out += &format!("{},{},{}\n", r.t, r.seed, r.mae);
        }
        out
    }

    pub fn mae(&self, t: usize, seed: u64) -> Option<f64> {
        self.rows.iter().find(|r| r.t == t && r.seed == seed).map(|r| r.mae)
    }

    pub fn median_at(&self, t: usize) -> Option<f64> {
        let v: Vec<f64> = self.rows.iter().filter(|r| r.t == t).map(|r| r.mae).collect();
        median(&v)
    }

    pub fn checks(&self) -> Vec<Check> {
        let mut checks = Vec::new();
        let starts = self
            .initial_gap
            .iter()
            .all(|&(seed, gap)| self.mae(0, seed).is_none_or(|m| m == gap));
        if self.rows.iter().any(|r| r.t == 0) {
            checks.push(Check::new("MAE at t=0 equals MAE(s, z*)", starts, "x(0) = s"));
        }
        let worst = self
            .initial_gap
            .iter()
            .filter_map(|&(seed, _)| Some(self.mae(100, seed)? - self.mae(50, seed)?))
            .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
        if let Some(worst) = worst {
            checks.push(Check::new(
                "plateau: MAE(100) - MAE(50) <= 1e-6",
                worst <= 1e-6,
                format!("worst difference {worst:.3e}"),
            ));
        }
        checks
    }
}

/// The ten-node example tree: centre 0, middle nodes 1..=3, and leaves
/// `4 + 2(y − 1)` and `5 + 2(y − 1)` under middle node `y`.
pub fn example_tree() -> WeightedGraph {
    let mut edges = Vec::new();
    for y in 1..=3 {
        edges.push((0, y, 1.0));
        edges.push((y, 4 + 2 * (y - 1), 1.0));
        edges.push((y, 5 + 2 * (y - 1), 1.0));
    }
    WeightedGraph::from_edges(10, edges).expect("static tree").0
}

/// Centre `(s, α) = (1, 1)`, middle `(0, 0.6)`, leaves `(0, 0.01)`; with
/// `stubborn` every `α` is 1.
pub fn example_tree_state(stubborn: bool) -> OpinionState {
    let mut s = vec![0.0; 10];
    let mut a = vec![0.01; 10];
    s[0] = 1.0;
    a[0] = 1.0;
    a[1..=3].fill(0.6);
    if stubborn {
        a.fill(1.0);
    }
    OpinionState::new(s, a).expect("static opinions")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeCase {
    pub beta: [f64; 2],
    /// Published (centre, middle, leaf) opinions and their node-weighted sum.
    pub expected: [f64; 3],
    pub expected_sum: f64,
}

pub const TREE_CASES: [TreeCase; 3] = [
    TreeCase { beta: [1.0, 0.0], expected: [1.0, 0.181, 0.179], expected_sum: 2.617 },
    TreeCase { beta: [0.0, 1.0], expected: [1.0, 0.0, 0.971], expected_sum: 6.826 },
    TreeCase { beta: [0.5, 0.5], expected: [1.0, 0.142, 0.351], expected_sum: 3.532 },
];

#[derive(Debug, Clone, PartialEq)]
pub struct TreeResult {
    pub case: TreeCase,
    pub opinions: Vec<f64>,
    pub sum: f64,
    /// Sum of the opinions rounded to three decimals, the convention of the
    /// published sums.
    pub rounded_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeReport {
    pub results: Vec<TreeResult>,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

pub fn run_example_tree() -> Result<TreeReport> {
    let start = Instant::now();
    let g = example_tree();
    let state = example_tree_state(false);
    let mut results = Vec::new();
    let mut checks = Vec::new();
    for case in TREE_CASES {
        let spec = PolynomialSpec::new(case.beta.to_vec())?;
        let p_star = build_transition_polynomial_capped(&g, &spec, DEFAULT_DENSE_CAP)?;
        let z = solve_equilibrium_with(&p_star, &state)?;
        let groups: [&[usize]; 3] = [&[0], &[1, 2, 3], &[4, 5, 6, 7, 8, 9]];
        let worst = groups
            .iter()
            .zip(case.expected)
            .flat_map(|(nodes, e)| nodes.iter().map(move |&i| (i, e)))
            .map(|(i, e)| (z[i] - e).abs())
            .fold(0.0, f64::max);
        let sum: f64 = z.iter().sum();
        let rounded_sum: f64 = z.iter().map(|v| (v * 1e3).round() / 1e3).sum();
        let label = format!("tree beta={:?}", case.beta);
        checks.push(Check::new(
            format!("{label} opinions"),
            worst <= 1e-3,
            format!("(red, yellow, blue) = ({:.4}, {:.4}, {:.4}), max deviation {worst:.2e}", z[0], z[1], z[4]),
        ));
        checks.push(Check::new(
            format!("{label} opinion sum"),
            (rounded_sum - case.expected_sum).abs() <= 1e-3,
            format!("rounded-node sum {rounded_sum:.3} vs {:.3} (unrounded {sum:.4})", case.expected_sum),
        ));
        let iterated = iterate_opinions(&p_star, &state, &IterationConfig::fixed(100))?;
        let gap = hofj_core::polynomial::max_abs_difference(&iterated.expressed, &z);
        checks.push(Check::new(format!("{label} iteration agrees"), gap <= 1e-6, format!("{gap:.2e}")));
        checks.push(Check::new(
            format!("{label} contraction"),
            contraction_check(&p_star, &state, 20)?,
            "20 steps",
        ));
        results.push(TreeResult { case, opinions: z, sum, rounded_sum });
    }
    let stubborn = example_tree_state(true);
    let z = hofj_core::polynomial::solve_equilibrium_exact(&g, &PolynomialSpec::new(vec![0.5, 0.5])?, &stubborn)?;
    let gap = hofj_core::polynomial::max_abs_difference(&z, stubborn.innate());
    checks.push(Check::new("tree alpha=1 gives z=s", gap <= 1e-12, format!("{gap:.2e}")));
    let seconds = start.elapsed().as_secs_f64();
    checks.push(Check::new("tree runtime under 1 s", seconds < 1.0, format!("{seconds:.4} s")));
    Ok(TreeReport { results, seconds, checks })
}
