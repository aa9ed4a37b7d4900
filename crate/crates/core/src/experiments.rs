//! Named, seeded experiments shared by the command-line tool and the
//! acceptance tests. Each run returns a report (estimates plus explicit
//! checks) and zero or more tables for plotting.
//!
//! Every (model, width, …) block draws from its own stream family derived
//! from the master seed and a label, and replicate `i` from stream `i` of
//! that family, so results never depend on the worker count.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::activation::ActivationKind;
use crate::dist::{gamma_unchecked, inverse_gamma_cdf, std_normal};
use crate::error::{ensure, Error, Result};
use crate::harness::{map_replicates, try_map_replicates};
use crate::kernels::{gp_relu_kernel, j_alpha_quadrature, kappa, kappa2, KernelMomentQuery, CLOSED_FORM_ORDERS};
use crate::levy::{sample_id, Mark, Measure};
use crate::network::{output_chain, KernelSampler, NetworkConfig, SingleInputLimit};
use crate::pruning::{compressibility_ratio, epsilon_error_bound, paired_pruning_error, paired_pruning_errors, PruningRule};
use crate::quad;
use crate::rng::{tag, RngStream};
use crate::special::{elliptic_e, elliptic_k, lower_incomplete_gamma, norm_cdf, upper_incomplete_gamma};
use crate::stats::{
    ks_critical_1pct, ks_distance, ks_two_sample, ks_two_sample_critical_1pct, linear_fit, mean_se,
    order_stat_cdf, quantile, tail_exponent, tail_exponent_sweep, variance_se, Check, ExperimentReport,
};
use crate::variance::{check_id_conditions, make_model, VarianceModel};

/// Registered experiment names.
pub const EXPERIMENTS: [&str; 13] = [
    "output_dist",
    "output_corr",
    "max_weight",
    "truncation_error",
    "kernel_realizations",
    "compressibility",
    "verify",
    "special_functions",
    "limit_ks",
    "output_laws",
    "kernel_moments",
    "extremes",
    "tail_exponents",
];

/// One table cell: a label or a number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Num(v as f64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Number formatting used in CSV output: scientific below 1e-4 in magnitude.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format_number(*v),
                    Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub tables: Vec<Table>,
}

/// Run a registered experiment and return only its report.
pub fn run_experiment(name: &str, config: &Value, master_seed: u64, replicates: Option<usize>, workers: usize) -> Result<ExperimentReport> {
    Ok(run_experiment_full(name, config, master_seed, replicates, workers)?.report)
}

/// Run a registered experiment. `replicates` overrides the experiment's default.
pub fn run_experiment_full(
    name: &str,
    config: &Value,
    master_seed: u64,
    replicates: Option<usize>,
    workers: usize,
) -> Result<ExperimentOutput> {
    let ctx = Ctx {
        seed: master_seed,
        workers: workers.max(1),
    };
    match name {
        "output_dist" => output_dist(&parse(config)?, ctx, replicates.unwrap_or(50_000)),
        "output_corr" => output_corr(&parse(config)?, ctx, replicates.unwrap_or(5_000)),
        "max_weight" => max_weight(&parse(config)?, ctx, replicates.unwrap_or(2_000)),
        "truncation_error" => truncation_error(&parse(config)?, ctx, replicates.unwrap_or(1_000)),
        "kernel_realizations" => kernel_realizations(&parse(config)?, ctx, replicates.unwrap_or(20)),
        "compressibility" => compressibility(&parse(config)?, ctx, replicates.unwrap_or(200)),
        "verify" => verify(&parse(config)?, ctx, replicates.unwrap_or(200_000)),
        "special_functions" => special_functions(&parse(config)?, ctx),
        "limit_ks" => limit_ks(&parse(config)?, ctx, replicates.unwrap_or(50_000)),
        "output_laws" => output_laws(&parse(config)?, ctx, replicates.unwrap_or(50_000)),
        "kernel_moments" => kernel_moments(&parse(config)?, ctx, replicates.unwrap_or(10_000)),
        "extremes" => extremes(&parse(config)?, ctx, replicates.unwrap_or(10_000)),
        "tail_exponents" => tail_exponents(&parse(config)?, ctx, replicates.unwrap_or(1_000_000)),
        other => Err(Error::Unknown(format!("experiment {other}"))),
    }
}

/// Resolved configuration of an experiment, defaults filled in.
pub fn resolved_config(name: &str, config: &Value) -> Result<Value> {
    fn echo<T: Serialize + DeserializeOwned + Default>(config: &Value) -> Result<Value> {
        let c: T = parse(config)?;
        serde_json::to_value(c).map_err(|e| Error::Config(e.to_string()))
    }
    match name {
        "output_dist" => echo::<OutputDistConfig>(config),
        "output_corr" => echo::<OutputCorrConfig>(config),
        "max_weight" => echo::<MaxWeightConfig>(config),
        "truncation_error" => echo::<TruncationConfig>(config),
        "kernel_realizations" => echo::<KernelRealizationsConfig>(config),
        "compressibility" => echo::<CompressibilityConfig>(config),
        "verify" => echo::<VerifyConfig>(config),
        "special_functions" => echo::<SpecialFunctionsConfig>(config),
        "limit_ks" => echo::<LimitKsConfig>(config),
        "output_laws" => echo::<OutputLawsConfig>(config),
        "kernel_moments" => echo::<KernelMomentsConfig>(config),
        "extremes" => echo::<ExtremesConfig>(config),
        "tail_exponents" => echo::<TailExponentsConfig>(config),
        other => Err(Error::Unknown(format!("experiment {other}"))),
    }
}

fn parse<T: DeserializeOwned + Default>(config: &Value) -> Result<T> {
    if config.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(config.clone()).map_err(|e| Error::Config(e.to_string()))
}

#[derive(Clone, Copy)]
struct Ctx {
    seed: u64,
    workers: usize,
}

impl Ctx {
    fn family(&self, label: &str) -> RngStream {
        RngStream::new(self.seed, 0).derive(tag(label))
    }
}

fn model(name: &str, params: Value) -> VarianceModel {
    make_model(name, params).expect("built-in model parameters are valid")
}

/// The five variance laws used throughout the simulated experiments, scaled
/// so that E[Σλ] → 1 (the horseshoe has no mean and uses c = 1).
pub fn standard_models() -> Vec<VarianceModel> {
    vec![
        model("deterministic", json!({"c1": 1.0})),
        model("inverse_gamma", json!({"c1": 1.0})),
        model("beta", json!({"eta": 1.0, "b": 1.0})),
        model("horseshoe", json!({"c": 1.0})),
        model("generalized_bfry", json!({"eta": 4.0, "alpha": 0.5, "tau": 5.0})),
    ]
}

/// Every bundled model with representative parameters.
pub fn bundled_models() -> Vec<VarianceModel> {
    vec![
        model("deterministic", json!({"c1": 1.0})),
        model("bernoulli", json!({"c": 2.0})),
        model("group_lasso_gamma", json!({"c1": 1.0})),
        model("inverse_gamma", json!({"c1": 2.0})),
        model("inverse_gamma_stable", json!({"alpha": 0.5})),
        model("beta", json!({"eta": 1.0, "b": 1.0})),
        model("horseshoe", json!({"c": 1.0})),
        model("regularized_horseshoe", json!({"c": 1.0})),
        model("generalized_bfry", json!({"eta": 4.0, "alpha": 0.5, "tau": 5.0})),
        model("spike_slab", json!({"c": 1.0, "c_tilde": 0.5, "slab": {"kind": "gamma", "shape": 2.0, "rate": 2.0}})),
        model("perman_generic", json!({"measure": {"kind": "stable", "alpha": 0.5, "scale": 1.0}})),
    ]
}

/// Short label such as `beta(eta=1,b=0.5)`.
pub fn model_label(m: &VarianceModel) -> String {
    let spec = serde_json::to_value(m.spec()).unwrap_or(Value::Null);
    let params = match spec.get("params") {
        Some(Value::Object(map)) => map
            .iter()
            .filter_map(|(k, v)| v.as_f64().map(|f| format!("{k}={f}")))
            .collect::<Vec<_>>()
            .join(";"),
        _ => String::new(),
    };
    format!("{}({params})", m.name())
}

fn relu_net(m: &VarianceModel, width: usize, depth: usize, d_out: usize) -> NetworkConfig {
    NetworkConfig {
        d_in: 1,
        d_out,
        widths: vec![width; depth],
        sigma_v: 1.0,
        sigma_b: 0.0,
        activation: ActivationKind::Relu,
        variance_models: vec![m.clone(); depth],
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn max_increase(xs: &[f64]) -> f64 {
    xs.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max)
}

/// Jackknife standard error of a statistic over contiguous batches.
fn jackknife<F: Fn(&[usize]) -> f64>(n: usize, batches: usize, stat: F) -> f64 {
    let g = batches.clamp(2, n.max(2));
    let size = n / g;
    if size == 0 {
        return f64::NAN;
    }
    let leave_out: Vec<f64> = (0..g)
        .map(|b| {
            let idx: Vec<usize> = (0..g * size).filter(|i| i / size != b).collect();
            stat(&idx)
        })
        .collect();
    let m = leave_out.iter().sum::<f64>() / g as f64;
    let ss: f64 = leave_out.iter().map(|v| (v - m) * (v - m)).sum();
    ((g as f64 - 1.0) / g as f64 * ss).sqrt()
}

fn corr_on(a: &[f64], b: &[f64], idx: &[usize]) -> f64 {
    let x: Vec<f64> = idx.iter().map(|&i| a[i]).collect();
    let y: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
    crate::stats::correlation(&x, &y)
}

/// corr(Z₁², Z₂²) implied by the conditional variance s of two conditionally
/// iid Gaussian outputs: (E s² − (E s)²)/(3 E s² − (E s)²).
fn rb_corr_on(s: &[f64], idx: &[usize]) -> f64 {
    let n = idx.len() as f64;
    let m1 = idx.iter().map(|&i| s[i]).sum::<f64>() / n;
    let m2 = idx.iter().map(|&i| s[i] * s[i]).sum::<f64>() / n;
    (m2 - m1 * m1) / (3.0 * m2 - m1 * m1)
}

// ---------------------------------------------------------------- output distribution

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputDistConfig {
    pub models: Vec<VarianceModel>,
    pub width: usize,
    pub depth: usize,
    pub x: f64,
    pub bins: usize,
    pub half_range: f64,
    pub tail_points: usize,
    pub tail_max: f64,
    pub include_limit: bool,
    pub atom_floor: Option<f64>,
}

impl Default for OutputDistConfig {
    fn default() -> Self {
        Self {
            models: standard_models(),
            width: 2000,
            depth: 1,
            x: 1.0,
            bins: 80,
            half_range: 8.0,
            tail_points: 30,
            tail_max: 1e3,
            include_limit: true,
            atom_floor: None,
        }
    }
}

fn output_dist(cfg: &OutputDistConfig, ctx: Ctx, n: usize) -> Result<ExperimentOutput> {
    ensure(n >= 2 && cfg.bins >= 1 && cfg.half_range > 0.0, || "output_dist needs n ≥ 2, bins ≥ 1, half_range > 0".into())?;
    let mut report = ExperimentReport::new("output_dist", serde_json::to_value(cfg).unwrap_or_default(), ctx.seed, n);
    let mut hist = Table::new("histogram", &["model", "source", "bin_center", "density"]);
    let mut tail = Table::new("tail", &["model", "source", "u", "survival"]);
    let us = log_space(0.1, cfg.tail_max, cfg.tail_points.max(2));
    let width = 2.0 * cfg.half_range / cfg.bins as f64;
    for m in &cfg.models {
        let label = model_label(m);
        let net = relu_net(m, cfg.width, cfg.depth, 1);
        let x = [cfg.x];
        let finite = try_map_replicates(n, ctx.workers, ctx.family(&format!("output_dist/{label}/finite")), |_, rng| {
            Ok(output_chain(&net, &net_lambdas(&net, rng)?, &x, rng)?.1[0])
        })?;
        let mut sources = vec![("finite", finite)];
        if cfg.include_limit {
            let lim = SingleInputLimit::new(&net, cfg.atom_floor)?;
            let draws = map_replicates(n, ctx.workers, ctx.family(&format!("output_dist/{label}/limit")), |_, rng| {
                lim.draw(cfg.x * cfg.x, rng).outputs[0]
            });
            sources.push(("limit", draws));
        }
        for (src, z) in &sources {
            let mut counts = vec![0usize; cfg.bins];
            for v in z {
                let b = ((v + cfg.half_range) / width).floor();
                if b >= 0.0 && (b as usize) < cfg.bins {
                    counts[b as usize] += 1;
                }
            }
            for (b, c) in counts.iter().enumerate() {
                let center = -cfg.half_range + (b as f64 + 0.5) * width;
                hist.push(vec![label.clone().into(), (*src).into(), center.into(), (*c as f64 / (z.len() as f64 * width)).into()]);
            }
            for &u in &us {
                let s = z.iter().filter(|v| v.abs() > u).count() as f64 / z.len() as f64;
                tail.push(vec![label.clone().into(), (*src).into(), u.into(), s.into()]);
            }
            let sq: Vec<f64> = z.iter().map(|v| v * v).collect();
            let (m2, se) = mean_se(&sq);
            report.estimate(format!("{label} {src} E[Z^2]"), m2, se);
        }
        if sources.len() == 2 {
            let d = ks_two_sample(&sources[0].1, &sources[1].1);
            report.check(Check::below(format!("{label} KS finite vs limit"), d, ks_two_sample_critical_1pct(n, n)));
        }
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![hist, tail],
    })
}

fn net_lambdas<R: rand::RngCore + ?Sized>(net: &NetworkConfig, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    crate::network::sample_lambdas(net, rng)
}

// ---------------------------------------------------------------- output correlation

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputCorrConfig {
    pub models: Vec<VarianceModel>,
    pub widths: Vec<usize>,
    pub depth: usize,
    pub x: f64,
    pub batches: usize,
    /// Checks at the largest width: models whose correlation must vanish.
    pub vanishing: Vec<String>,
    pub vanishing_max: f64,
    /// Checks at the largest width: (model name, target, tolerance).
    pub targets: Vec<(String, f64, f64)>,
}

impl Default for OutputCorrConfig {
    fn default() -> Self {
        Self {
            models: standard_models(),
            widths: vec![100, 500, 1000, 2000],
            depth: 1,
            x: 1.0,
            batches: 50,
            vanishing: vec!["deterministic".into(), "inverse_gamma".into()],
            vanishing_max: 0.02,
            targets: vec![("beta".into(), 0.30, 0.08)],
        }
    }
}

fn output_corr(cfg: &OutputCorrConfig, ctx: Ctx, n: usize) -> Result<ExperimentOutput> {
    ensure(n >= 4 && !cfg.widths.is_empty(), || "output_corr needs n ≥ 4 and a nonempty width grid".into())?;
    let mut report = ExperimentReport::new("output_corr", serde_json::to_value(cfg).unwrap_or_default(), ctx.seed, n);
    let mut table = Table::new("output_corr", &["model", "width", "corr", "corr_se", "rb_corr", "rb_corr_se"]);
    let p_max = *cfg.widths.iter().max().unwrap();
    for m in &cfg.models {
        let label = model_label(m);
        for &p in &cfg.widths {
            let net = relu_net(m, p, cfg.depth, 2);
            let x = [cfg.x];
            let draws = try_map_replicates(n, ctx.workers, ctx.family(&format!("output_corr/{label}/{p}")), |_, rng| {
                let (sig, z) = output_chain(&net, &net_lambdas(&net, rng)?, &x, rng)?;
                Ok((*sig.last().unwrap(), z[0] * z[0], z[1] * z[1]))
            })?;
            let s: Vec<f64> = draws.iter().map(|d| d.0).collect();
            let a: Vec<f64> = draws.iter().map(|d| d.1).collect();
            let b: Vec<f64> = draws.iter().map(|d| d.2).collect();
            let all: Vec<usize> = (0..n).collect();
            let corr = corr_on(&a, &b, &all);
            let corr_se = jackknife(n, cfg.batches, |idx| corr_on(&a, &b, idx));
            let rb = rb_corr_on(&s, &all);
            let rb_se = jackknife(n, cfg.batches, |idx| rb_corr_on(&s, idx));
            table.push(vec![label.clone().into(), p.into(), corr.into(), corr_se.into(), rb.into(), rb_se.into()]);
            report.estimate(format!("{label} p={p} corr"), corr, corr_se);
            report.estimate(format!("{label} p={p} rb_corr"), rb, rb_se);
            if p == p_max {
                if cfg.vanishing.iter().any(|v| v == m.name()) {
                    report.check(Check::below(format!("{label} p={p} corr"), corr, cfg.vanishing_max));
                }
                for (name, target, tol) in &cfg.targets {
                    if name == m.name() {
                        report.check(Check::within(format!("{label} p={p} corr"), corr, *target, *tol));
                    }
                }
            }
        }
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- largest weight

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxWeightConfig {
    pub models: Vec<VarianceModel>,
    pub widths: Vec<usize>,
    pub grid_points: usize,
}

impl Default for MaxWeightConfig {
    fn default() -> Self {
        let s = standard_models();
        Self {
            models: vec![s[0].clone(), s[2].clone(), s[4].clone()],
            widths: vec![10, 100, 1000, 5000],
            grid_points: 60,
        }
    }
}

/// P(max_j |W_{j1}| ≤ w) in the limit: exp(−ν̄(w²)) with ν the chi-square-marked measure.
fn max_weight_limit_cdf(m: &Measure, w: f64) -> f64 {
    if m.is_trivial() {
        return if w > 0.0 { 1.0 } else { 0.0 };
    }
    let nu = Measure::Marked {
        base: Box::new(m.clone()),
        mark: Mark::ChiSquare,
    };
    (-nu.tail(w * w)).exp()
}

fn max_weight(cfg: &MaxWeightConfig, ctx: Ctx, n: usize) -> Result<ExperimentOutput> {
    ensure(n >= 2 && !cfg.widths.is_empty() && cfg.grid_points >= 2, || "max_weight needs n ≥ 2, widths and a grid".into())?;
    let mut report = ExperimentReport::new("max_weight", serde_json::to_value(cfg).unwrap_or_default(), ctx.seed, n);
    let mut table = Table::new("max_weight_cdf", &["model", "width", "w", "ecdf", "limit_cdf"]);
    let p_max = *cfg.widths.iter().max().unwrap();
    for m in &cfg.models {
        let label = model_label(m);
        let limit = &m.limit().measure;
        let mut samples = Vec::new();
        for &p in &cfg.widths {
            let sampler = m.node_sampler(p, Some(1))?;
            let maxima = map_replicates(n, ctx.workers, ctx.family(&format!("max_weight/{label}/{p}")), |_, rng| {
                (0..p).map(|_| (sampler.sample(rng).sqrt() * std_normal(rng)).abs()).fold(0.0, f64::max)
            });
            let (med, _) = (quantile(&maxima, 0.5), 0.0);
            report.estimate(format!("{label} p={p} median max|W|"), med, f64::NAN);
            if p == p_max && !limit.is_trivial() {
                let d = ks_distance(&maxima, |w| max_weight_limit_cdf(limit, w));
                report.check(Check::below(format!("{label} p={p} KS vs limit"), d, ks_critical_1pct(n)));
            }
            samples.push((p, maxima));
        }
        let top = samples.iter().map(|(_, s)| quantile(s, 0.99)).fold(0.0, f64::max).max(1e-6) * 1.2;
        for (p, s) in &samples {
            let mut sorted = s.clone();
            sorted.sort_by(f64::total_cmp);
            for i in 1..=cfg.grid_points {
                let w = top * i as f64 / cfg.grid_points as f64;
                let ecdf = sorted.partition_point(|v| *v <= w) as f64 / sorted.len() as f64;
                table.push(vec![label.clone().into(), (*p).into(), w.into(), ecdf.into(), max_weight_limit_cdf(limit, w).into()]);
            }
        }
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- truncation error

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationConfig {
    pub eta: f64,
    pub tau: f64,
    pub alphas: Vec<f64>,
    pub width: usize,
    pub depth: usize,
    pub x: f64,
    pub eps_grid: Vec<f64>,
    pub delta: f64,
    /// Expected log-log slopes, one per alpha (empty to skip the checks).
    pub slope_targets: Vec<f64>,
    pub slope_tolerance: f64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            eta: 4.0,
            tau: 5.0,
            alphas: vec![0.5, 0.3, 0.1],
            width: 2000,
            depth: 3,
            x: 1.0,
            eps_grid: log_space(1e-4, 1e-1, 7),
            delta: 0.05,
            slope_targets: vec![0.49, 0.69, 0.92],
            slope_tolerance: 0.05,
        }
    }
}

fn truncation_error(cfg: &TruncationConfig, ctx: Ctx, n: usize) -> Result<ExperimentOutput> {
    ensure(cfg.eps_grid.len() >= 2, || "need at least two epsilon values".into())?;
    ensure(cfg.slope_targets.is_empty() || cfg.slope_targets.len() == cfg.alphas.len(), || {
        "slope_targets must be empty or match alphas".into()
    })?;
    let mut report = ExperimentReport::new("truncation_error", serde_json::to_value(cfg).unwrap_or_default(), ctx.seed, n);
    let mut table = Table::new("truncation_error", &["alpha", "eps", "layer", "error", "error_se", "bound"]);
    let mut slopes = Table::new("slopes", &["alpha", "layer", "slope", "slope_se"]);
    for (ai, &alpha) in cfg.alphas.iter().enumerate() {
        let m = make_model("generalized_bfry", json!({"eta": cfg.eta, "alpha": alpha, "tau": cfg.tau}))?;
        let net = relu_net(&m, cfg.width, cfg.depth, 1);
        let rules: Vec<PruningRule> = cfg.eps_grid.iter().map(|&eps| PruningRule::Epsilon { eps }).collect();
        let errs = paired_pruning_errors(&net, &[cfg.x], &rules, n, ctx.family(&format!("truncation_error/{alpha}")), ctx.workers)?;
        let delta = cfg.delta.min(0.5 * (1.0 - alpha));
        for (rule, e) in cfg.eps_grid.iter().zip(&errs) {
            let bound = epsilon_error_bound(&net, &[cfg.x], *rule, alpha, delta)?;
            for (li, (v, se)) in e.error.iter().enumerate() {
                table.push(vec![alpha.into(), (*rule).into(), (li + 2).into(), (*v).into(), (*se).into(), bound[li].into()]);
            }
        }
        for li in 0..cfg.depth {
            let lx: Vec<f64> = cfg.eps_grid.iter().map(|e| e.ln()).collect();
            let ly: Vec<f64> = errs.iter().map(|e| e.error[li].0.ln()).collect();
            let fit = linear_fit(&lx, &ly);
            slopes.push(vec![alpha.into(), (li + 2).into(), fit.slope.into(), fit.slope_se.into()]);
            report.estimate(format!("alpha={alpha} layer={} slope", li + 2), fit.slope, fit.slope_se);
            if li + 1 == cfg.depth {
                if let Some(t) = cfg.slope_targets.get(ai) {
                    report.check(Check::within(format!("alpha={alpha} output-layer slope"), fit.slope, *t, cfg.slope_tolerance));
                }
            }
        }
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table, slopes],
    })
}

// ---------------------------------------------------------------- random kernels

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelRealizationsConfig {
    pub models: Vec<VarianceModel>,
    pub rho_points: usize,
    pub atom_floor: Option<f64>,
}

/// Beta laws with η = β, b = β/2, so M₁ = 2 and M₂ = 4/(2+β).
pub fn scaled_beta_models(betas: &[f64]) -> Vec<VarianceModel> {
    betas.iter().map(|&b| model("beta", json!({"eta": b, "b": b / 2.0}))).collect()
}

impl Default for KernelRealizationsConfig {
    fn default() -> Self {
        Self {
            models: scaled_beta_models(&[1.0, 10.0, 1000.0]),
            rho_points: 21,
            atom_floor: None,
        }
    }
}

/// x = √2(1, 0) and x′ = √2(ρ, √(1−ρ²)), so ‖x‖‖x′‖/d_in = 1 and the cosine is ρ.
fn input_pair(rho: f64) -> (Vec<f64>, Vec<f64>) {
    let r2 = 2f64.sqrt();
    (vec![r2, 0.0], vec![r2 * rho, r2 * (1.0 - rho * rho).max(0.0).sqrt()])
}

fn kernel_net(m: &VarianceModel) -> NetworkConfig {
    NetworkConfig {
        d_in: 2,
        d_out: 1,
        widths: vec![1],
        sigma_v: 1.0,
        sigma_b: 0.0,
        activation: ActivationKind::Relu,
        variance_models: vec![m.clone()],
    }
}

fn kernel_realizations(cfg: &KernelRealizationsConfig, ctx: Ctx, n: usize) -> Result<ExperimentOutput> {
    ensure(cfg.rho_points >= 2 && cfg.rho_points <= 63, || "rho_points must be in [2, 63]".into())?;
    let mut report = ExperimentReport::new("kernel_realizations", serde_json::to_value(cfg).unwrap_or_default(), ctx.seed, n);
    let mut table = Table::new("kernel_realizations", &["model", "draw", "rho", "k2", "gp_kernel"]);
    let rhos: Vec<f64> = (0..cfg.rho_points).map(|i| -1.0 + 2.0 * i as f64 / (cfg.rho_points - 1) as f64).collect();
    let mut inputs = vec![input_pair(0.0).0];
    inputs.extend(rhos.iter().map(|&r| input_pair(r).1));
    for m in &cfg.models {
        let label = model_label(m);
        let sampler = KernelSampler::new(&kernel_net(m), cfg.atom_floor)?;
        let draws = try_map_replicates(n, ctx.workers, ctx.family(&format!("kernel_realizations/{label}")), |_, rng| {
            Ok(sampler.draw(&inputs, rng)?.pop().expect("two layers"))
        })?;
        for (d, k) in draws.iter().enumerate() {
            for (i, &rho) in rhos.iter().enumerate() {
                let gp = gp_relu_kernel(&inputs[0], &inputs[i + 1], 2)?;
                table.push(vec![label.clone().into(), d.into(), rho.into(), k.get(0, i + 1).into(), gp.into()]);
            }
        }
        let diag: Vec<f64> = draws.iter().map(|k| k.get(0, 0)).collect();
        let (v, se) = mean_se(&diag);
        report.estimate(format!("{label} mean K2(x,x)"), v, se);
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelMomentsConfig {
    pub betas: Vec<f64>,
    pub rhos: Vec<f64>,
    pub se_multiple: f64,
    pub atom_floor: Option<f64>,
}

impl Default for KernelMomentsConfig {
    fn default() -> Self {
        Self {
            betas: vec![1.0, 10.0, 1000.0],
            rhos: vec![0.0, 0.5],
            se_multiple: 3.0,
            atom_floor: None,
        }
    }
}

fn kernel_moments(cfg: &KernelMomentsConfig, ctx: Ctx, n: usize) -> Result<ExperimentOutput> {
    ensure(n >= 4, || "kernel_moments needs n ≥ 4".into())?;
    let mut report = ExperimentReport::new("kernel_moments", serde_json::to_value(cfg).unwrap_or_default(), ctx.seed, n);
    let mut table = Table::new("kernel_moments", &["beta", "rho", "mean", "mean_se", "gp_kernel", "var", "var_se", "var_target"]);
    for (beta, m) in cfg.betas.iter().zip(scaled_beta_models(&cfg.betas)) {
        let sampler = KernelSampler::new(&kernel_net(&m), cfg.atom_floor)?;
        for &rho in &cfg.rhos {
            let (x, xp) = input_pair(rho);
            let inputs = [x.clone(), xp.clone()];
            let k2 = try_map_replicates(n, ctx.workers, ctx.family(&format!("kernel_moments/{beta}/{rho}")), |_, rng| {
                Ok(sampler.draw(&inputs, rng)?[1].get(0, 1))
            })?;
            let (mean, mean_se_) = mean_se(&k2);
            let (var, var_se) = variance_se(&k2);
            let gp = gp_relu_kernel(&x, &xp, 2)?;
            let target = 2.0 / (PI * (2.0 + beta)) * kappa2(rho);
            table.push(vec![(*beta).into(), rho.into(), mean.into(), mean_se_.into(), gp.into(), var.into(), var_se.into(), target.into()]);
            report.estimate(format!("beta={beta} rho={rho} mean"), mean, mean_se_);
            report.estimate(format!("beta={beta} rho={rho} var"), var, var_se);
            report.check(Check::within(format!("beta={beta} rho={rho} mean vs GP kernel"), mean, gp, cfg.se_multiple * mean_se_));
            report.check(Check::within(format!("beta={beta} rho={rho} var vs kappa2 term"), var, target, cfg.se_multiple * var_se));
        }
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- compressibility

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompressibilityConfig {
    pub models: Vec<VarianceModel>,
    pub widths: Vec<usize>,
    pub kappa: f64,
    pub depth: usize,
    pub x: f64,
    /// Models with a > 0 whose norm ratio should stay near 1 − κ.
    pub controls: Vec<String>,
    pub control_tolerance: f64,
    /// Final-width bound for ratios and relative pruning errors of a = 0 models.
    pub final_max: f64,
    /// Replicates for the paired pruning error (defaults to the ratio replicates).
    pub error_replicates: Option<usize>,
}

impl Default for CompressibilityConfig {
    fn default() -> Self {
        let s = standard_models();
        Self {
            models: vec![s[2].clone(), s[3].clone(), s[4].clone(), s[0].clone(), s[1].clone()],
            widths: vec![500, 2000, 8000],
            kappa: 0.5,
            depth: 2,
            x: 1.0,
            controls: vec!["deterministic".into(), "inverse_gamma".into()],
            control_tolerance: 0.03,
            final_max: 0.05,
            error_replicates: None,
        }
    }
}

fn compressibility(cfg: &CompressibilityConfig, ctx: Ctx, n: usize) -> Result<ExperimentOutput> {
    ensure(n >= 2 && !cfg.widths.is_empty(), || "compressibility needs n ≥ 2 and widths".into())?;
    ensure(cfg.kappa > 0.0 && cfg.kappa < 1.0, || format!("kappa {} outside (0, 1)", cfg.kappa))?;
    let mut report = ExperimentReport::new("compressibility", serde_json::to_value(cfg).unwrap_or_default(), ctx.seed, n);
    let mut table = Table::new(
        "compressibility",
        &["model", "width", "kappa", "lambda_ratio", "lambda_ratio_se", "norm_ratio", "norm_ratio_se", "rel_prune_error", "rel_prune_error_se"],
    );
    for m in &cfg.models {
        let label = model_label(m);
        let compressible = m.limit().location_a == 0.0;
        let has_mean = m.limit().measure.moment(1).is_finite();
        let mut lam_r = Vec::new();
        let mut norm_r = Vec::new();
        let mut errs = Vec::new();
        for &p in &cfg.widths {
            let sampler = m.node_sampler(p, Some(p))?;
            let ratios = try_map_replicates(n, ctx.workers, ctx.family(&format!("compressibility/{label}/{p}")), |_, rng| {
                let lam: Vec<f64> = (0..p).map(|_| sampler.sample(rng)).collect();
                // T_j = λ_j Σ_k V_jk² over p outgoing weights
                let t: Vec<f64> = lam.iter().map(|l| l * 2.0 * gamma_unchecked(0.5 * p as f64, 1.0, rng)).collect();
                Ok((compressibility_ratio(&lam, cfg.kappa)?, compressibility_ratio(&t, cfg.kappa)?))
            })?;
            let (lr, lse) = mean_se(&ratios.iter().map(|r| r.0).collect::<Vec<_>>());
            let (nr, nse) = mean_se(&ratios.iter().map(|r| r.1).collect::<Vec<_>>());
            let (er, ese) = if compressible && has_mean {
                let net = relu_net(m, p, cfg.depth, 1);
                let e = paired_pruning_error(
                    &net,
                    &[cfg.x],
                    PruningRule::Kappa { kappa: cfg.kappa },
                    cfg.error_replicates.unwrap_or(n),
                    ctx.family(&format!("compressibility/{label}/{p}/error")),
                    ctx.workers,
                )?;
                let (v, se) = *e.error.last().unwrap();
                let (s2, _) = *e.second_moment.last().unwrap();
                (v / s2, se / s2)
            } else {
                (f64::NAN, f64::NAN)
            };
            table.push(vec![label.clone().into(), p.into(), cfg.kappa.into(), lr.into(), lse.into(), nr.into(), nse.into(), er.into(), ese.into()]);
            report.estimate(format!("{label} p={p} lambda ratio"), lr, lse);
            report.estimate(format!("{label} p={p} norm ratio"), nr, nse);
            if er.is_finite() {
                report.estimate(format!("{label} p={p} relative kappa-pruning error"), er, ese);
            }
            if cfg.controls.iter().any(|c| c == m.name()) {
                report.check(Check::within(format!("{label} p={p} norm ratio near 1-kappa"), nr, 1.0 - cfg.kappa, cfg.control_tolerance));
            }
            lam_r.push(lr);
            norm_r.push(nr);
            errs.push(er);
        }
        if compressible && !cfg.controls.iter().any(|c| c == m.name()) {
            let mut series = vec![("lambda ratio", &lam_r), ("norm ratio", &norm_r)];
            if has_mean {
                series.push(("relative kappa-pruning error", &errs));
            }
            for (what, s) in series {
                if s.len() >= 2 {
                    report.check(Check::new(format!("{label} {what} non-increasing in width"), max_increase(s), 0.0, 1e-12, crate::stats::Comparison::Below));
                }
                report.check(Check::below(format!("{label} {what} at largest width"), *s.last().unwrap(), cfg.final_max));
            }
        }
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- verification suite

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub models: Vec<VarianceModel>,
    pub p_grid: Vec<usize>,
    pub x_grid: Vec<f64>,
    pub h_grid: Vec<f64>,
    pub special_functions: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            models: bundled_models(),
            p_grid: vec![2000, 20_000],
            x_grid: vec![0.05, 0.2, 0.8],
            h_grid: vec![0.05, 0.2, 1.0],
            special_functions: true,
        }
    }
}

fn verify(cfg: &VerifyConfig, ctx: Ctx, n: usize) -> Result<ExperimentOutput> {
    let mut report = ExperimentReport::new("verify", serde_json::to_value(cfg).unwrap_or_default(), ctx.seed, n);
    let mut table = Table::new("verify", &["suite", "label", "value", "target", "tolerance", "pass"]);
    let mut reports = Vec::new();
    for m in &cfg.models {
        let label = model_label(m);
        reports.push(check_id_conditions(m, &cfg.p_grid, &cfg.x_grid, &cfg.h_grid, n, ctx.family(&format!("verify/{label}")))?);
    }
    if cfg.special_functions {
        reports.push(special_functions(&SpecialFunctionsConfig::default(), ctx)?.report);
    }
    for r in reports {
        for c in &r.checks {
            table.push(vec![
                r.name.clone().into(),
                c.label.clone().into(),
                c.value.into(),
                c.target.into(),
                c.tolerance.into(),
                (if c.pass { "true" } else { "false" }).into(),
            ]);
        }
        report.merge(r);
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- special functions

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpecialFunctionsConfig {
    pub kappa_tolerance: f64,
    pub elliptic_tolerance: f64,
    pub gamma_tolerance: f64,
}

impl Default for SpecialFunctionsConfig {
    fn default() -> Self {
        Self {
            kappa_tolerance: 1e-8,
            elliptic_tolerance: 1e-10,
            gamma_tolerance: 1e-10,
        }
    }
}

fn special_functions(cfg: &SpecialFunctionsConfig, ctx: Ctx) -> Result<ExperimentOutput> {
    let mut report = ExperimentReport::new("special_functions", serde_json::to_value(cfg).unwrap_or_default(), ctx.seed, 0);
    let mut table = Table::new("special_functions", &["family", "parameter", "argument", "closed_form", "reference", "abs_diff"]);
    let rhos: Vec<f64> = (0..19).map(|i| -0.9 + 0.1 * i as f64).collect();
    for alpha in CLOSED_FORM_ORDERS {
        let mut worst: f64 = 0.0;
        for &rho in &rhos {
            let cf = kappa(KernelMomentQuery::new(alpha, rho)?)?;
            let q = j_alpha_quadrature(alpha, rho.acos())?;
            worst = worst.max((cf - q).abs());
            table.push(vec!["kappa".into(), alpha.into(), rho.into(), cf.into(), q.into(), (cf - q).abs().into()]);
        }
        report.check(Check::below(format!("kappa_{alpha} closed form vs quadrature"), worst, cfg.kappa_tolerance));
    }
    let ms = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99];
    let (mut wk, mut we): (f64, f64) = (0.0, 0.0);
    for &m in &ms {
        let k = elliptic_k(m)?.value;
        let e = elliptic_e(m)?.value;
        let kq = quad::integrate(|t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-14).value;
        let eq = quad::integrate(|t: f64| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-14).value;
        wk = wk.max((k - kq).abs());
        we = we.max((e - eq).abs());
        table.push(vec!["elliptic_k".into(), m.into(), Cell::Num(f64::NAN), k.into(), kq.into(), (k - kq).abs().into()]);
        table.push(vec!["elliptic_e".into(), m.into(), Cell::Num(f64::NAN), e.into(), eq.into(), (e - eq).abs().into()]);
    }
    report.check(Check::below("elliptic K: AGM vs quadrature", wk, cfg.elliptic_tolerance));
    report.check(Check::below("elliptic E: AGM vs quadrature", we, cfg.elliptic_tolerance));
    let mut worst_up: f64 = 0.0;
    let mut worst_low: f64 = 0.0;
    for &s in &[0.3, 0.5, 1.0, 2.5, 5.0, 10.0] {
        for &x in &[0.1f64, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0] {
            let base = x.powf(s) * (-x).exp();
            let up1 = upper_incomplete_gamma(s + 1.0, x)?;
            let up0 = upper_incomplete_gamma(s, x)?;
            let r_up = (up1 - s * up0 - base).abs() / up1.abs().max(f64::MIN_POSITIVE);
            let lo1 = lower_incomplete_gamma(s + 1.0, x)?;
            let lo0 = lower_incomplete_gamma(s, x)?;
            let r_low = (lo1 - s * lo0 + base).abs() / lo1.abs().max(f64::MIN_POSITIVE);
            worst_up = worst_up.max(r_up);
            worst_low = worst_low.max(r_low);
            table.push(vec!["upper_gamma_recurrence".into(), s.into(), x.into(), up1.into(), (s * up0 + base).into(), r_up.into()]);
            table.push(vec!["lower_gamma_recurrence".into(), s.into(), x.into(), lo1.into(), (s * lo0 - base).into(), r_low.into()]);
        }
    }
    report.check(Check::below("upper incomplete gamma recurrence residual", worst_up, cfg.gamma_tolerance));
    report.check(Check::below("lower incomplete gamma recurrence residual", worst_low, cfg.gamma_tolerance));
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- limit laws of Σλ

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitKsConfig {
    pub models: Vec<VarianceModel>,
    pub width: usize,
    pub ks_max: f64,
    pub chi_square_min_p: f64,
    pub atom_floor: Option<f64>,
}

impl Default for LimitKsConfig {
    fn default() -> Self {
        Self {
            models: vec![
                model("bernoulli", json!({"c": 2.0})),
                model("beta", json!({"eta": 1.0, "b": 0.5})),
                model("horseshoe", json!({"c": 4.0})),
                model("generalized_bfry", json!({"eta": 4.0, "alpha": 0.5, "tau": 5.0})),
            ],
            width: 2000,
            ks_max: 0.02,
            chi_square_min_p: 0.01,
            atom_floor: None,
        }
    }
}

fn limit_ks(cfg: &LimitKsConfig, ctx: Ctx, n: usize) -> Result<ExperimentOutput> {
    ensure(n >= 2, || "limit_ks needs n ≥ 2".into())?;
    let mut report = ExperimentReport::new("limit_ks", serde_json::to_value(cfg).unwrap_or_default(), ctx.seed, n);
    let mut table = Table::new("limit_ks", &["model", "comparison", "statistic", "threshold"]);
    let p = cfg.width;
    for m in &cfg.models {
        let label = model_label(m);
        let sampler = m.node_sampler(p, Some(p))?;
        let sums = map_replicates(n, ctx.workers, ctx.family(&format!("limit_ks/{label}/finite")), |_, rng| {
            let v: Vec<f64> = (0..p).map(|_| sampler.sample(rng)).collect();
            crate::stats::pairwise_sum(&v)
        });
        let limit = m.limit().clone();
        if let Measure::Atomic { atoms } = &limit.measure {
            // Σλ counts the unit atoms: compare with Poisson(total mass)
            ensure(atoms.len() == 1 && atoms[0].0 == 1.0 && limit.location_a == 0.0, || {
                "chi-square comparison supports a single unit atom".into()
            })?;
            let mean = atoms[0].1;
            let counts: Vec<u64> = sums.iter().map(|s| s.round() as u64).collect();
            let gof = crate::stats::poisson_gof(&counts, mean)?;
            table.push(vec![label.clone().into(), "chi2 p-value vs Poisson".into(), gof.p_value.into(), cfg.chi_square_min_p.into()]);
            report.estimate(format!("{label} chi2 statistic"), gof.statistic, f64::NAN);
            report.check(Check::above(format!("{label} chi-square p-value vs Poisson"), gof.p_value, cfg.chi_square_min_p));
            continue;
        }
        let floor = cfg.atom_floor.unwrap_or_else(|| limit.measure.default_floor());
        let draws = map_replicates(n, ctx.workers, ctx.family(&format!("limit_ks/{label}/limit")), |_, rng| sample_id(&limit, rng, floor));
        let d = ks_two_sample(&sums, &draws);
        table.push(vec![label.clone().into(), "two-sample KS vs limit draws".into(), d.into(), cfg.ks_max.into()]);
        report.check(Check::below(format!("{label} KS finite sum vs limit draws"), d, cfg.ks_max));
        if let Measure::Stable { alpha, scale } = limit.measure {
            if alpha == 0.5 {
                // Stable(1/2) with tail (c/x)^{1/2} is IG(1/2, cπ/4)
                let ig_scale = scale * PI / 4.0;
                let d1 = ks_distance(&sums, |x| inverse_gamma_cdf(0.5, ig_scale, x));
                let d2 = ks_distance(&draws, |x| inverse_gamma_cdf(0.5, ig_scale, x));
                table.push(vec![label.clone().into(), "KS finite sum vs exact IG".into(), d1.into(), cfg.ks_max.into()]);
                table.push(vec![label.clone().into(), "KS limit draws vs exact IG".into(), d2.into(), cfg.ks_max.into()]);
                report.check(Check::below(format!("{label} KS finite sum vs inverse-gamma CDF"), d1, cfg.ks_max));
                report.check(Check::below(format!("{label} KS limit draws vs inverse-gamma CDF"), d2, cfg.ks_max));
            }
        }
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- single-input output laws

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputLawsConfig {
    pub horseshoe_c: f64,
    pub beta_eta: f64,
    pub beta_b: f64,
    pub ks_max: f64,
    pub atom_floor: Option<f64>,
}

impl Default for OutputLawsConfig {
    fn default() -> Self {
        Self {
            horseshoe_c: 4.0,
            beta_eta: 1.0,
            beta_b: 0.5,
            ks_max: 0.01,
            atom_floor: None,
        }
    }
}

/// CDF of √G·N with G ~ Gamma(1/2, rate 1/2) (a chi-square with one degree
/// of freedom), i.e. of the product of two independent standard normals.
pub fn normal_product_cdf(z: f64) -> f64 {
    if z == 0.0 {
        return 0.5;
    }
    // E[Φ(z/|U|)] = ∫₀^∞ 2φ(u) Φ(z/u) du
    let f = |u: f64| {
        if u == 0.0 {
            return if z > 0.0 { 2.0 * crate::special::norm_pdf(0.0) } else { 0.0 };
        }
        2.0 * crate::special::norm_pdf(u) * norm_cdf(z / u)
    };
    quad::integrate(f, 0.0, 12.0, 1e-13).value
}

fn output_laws(cfg: &OutputLawsConfig, ctx: Ctx, n: usize) -> Result<ExperimentOutput> {
    ensure(n >= 2, || "output_laws needs n ≥ 2".into())?;
    let mut report = ExperimentReport::new("output_laws", serde_json::to_value(cfg).unwrap_or_default(), ctx.seed, n);
    let mut table = Table::new("output_laws", &["model", "reference", "ks", "threshold"]);
    let hs = make_model("horseshoe", json!({"c": cfg.horseshoe_c}))?;
    let bt = make_model("beta", json!({"eta": cfg.beta_eta, "b": cfg.beta_b}))?;
    let cauchy_scale = cfg.horseshoe_c.sqrt() / 2.0;
    let cases: [(VarianceModel, &str, Box<dyn Fn(f64) -> f64>); 2] = [
        (hs, "cauchy", Box::new(move |z: f64| 0.5 + (z / cauchy_scale).atan() / PI)),
        (bt, "sqrt-chi2 times normal", Box::new(normal_product_cdf)),
    ];
    for (m, reference, cdf) in cases.iter() {
        let label = model_label(m);
        let net = relu_net(m, 1, 1, 1);
        let lim = SingleInputLimit::new(&net, cfg.atom_floor)?;
        let z = map_replicates(n, ctx.workers, ctx.family(&format!("output_laws/{label}")), |_, rng| lim.draw(1.0, rng).outputs[0]);
        let d = ks_distance(&z, cdf);
        table.push(vec![label.clone().into(), (*reference).into(), d.into(), cfg.ks_max.into()]);
        report.check(Check::below(format!("{label} limit output KS vs {reference}"), d, cfg.ks_max));
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- extreme variances

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtremesConfig {
    pub models: Vec<VarianceModel>,
    pub width: usize,
    pub orders: Vec<usize>,
    /// A trivial-limit model's median maximum must be below this fraction of
    /// the smallest limiting median among the other models.
    pub negligible_fraction: f64,
}

impl Default for ExtremesConfig {
    fn default() -> Self {
        Self {
            models: standard_models(),
            width: 5000,
            orders: vec![1, 2, 3],
            negligible_fraction: 1e-2,
        }
    }
}

fn extremes(cfg: &ExtremesConfig, ctx: Ctx, n: usize) -> Result<ExperimentOutput> {
    ensure(n >= 2 && !cfg.orders.is_empty(), || "extremes needs n ≥ 2 and orders".into())?;
    let kmax = *cfg.orders.iter().max().unwrap();
    ensure(kmax >= 1 && kmax <= cfg.width, || "orders must lie in 1..=width".into())?;
    let mut report = ExperimentReport::new("extremes", serde_json::to_value(cfg).unwrap_or_default(), ctx.seed, n);
    let mut table = Table::new("extremes", &["model", "k", "ks", "critical_1pct", "median", "limit_median"]);
    let p = cfg.width;
    let mut trivial_medians = Vec::new();
    let mut limit_medians = Vec::new();
    for m in &cfg.models {
        let label = model_label(m);
        let sampler = m.node_sampler(p, Some(p))?;
        let tops = map_replicates(n, ctx.workers, ctx.family(&format!("extremes/{label}")), |_, rng| {
            let mut v: Vec<f64> = (0..p).map(|_| sampler.sample(rng)).collect();
            v.select_nth_unstable_by(kmax - 1, |a, b| b.total_cmp(a));
            let mut top = v[..kmax].to_vec();
            top.sort_by(|a, b| b.total_cmp(a));
            top
        });
        let measure = &m.limit().measure;
        for &k in &cfg.orders {
            let xs: Vec<f64> = tops.iter().map(|t| t[k - 1]).collect();
            let med = quantile(&xs, 0.5);
            if measure.is_trivial() {
                table.push(vec![label.clone().into(), k.into(), Cell::Num(f64::NAN), Cell::Num(f64::NAN), med.into(), 0.0.into()]);
                if k == 1 {
                    trivial_medians.push((label.clone(), med));
                }
                continue;
            }
            let d = ks_distance(&xs, |x| order_stat_cdf(measure, k, x).unwrap_or(f64::NAN));
            let crit = ks_critical_1pct(n);
            let lim_med = if k == 1 { measure.inverse_tail(2f64.ln()) } else { f64::NAN };
            if k == 1 {
                limit_medians.push(lim_med);
            }
            table.push(vec![label.clone().into(), k.into(), d.into(), crit.into(), med.into(), lim_med.into()]);
            report.check(Check::below(format!("{label} k={k} KS vs order-statistic law"), d, crit));
        }
    }
    let scale = limit_medians.iter().cloned().fold(f64::INFINITY, f64::min);
    if scale.is_finite() {
        report.estimate("smallest limiting median of the largest variance", scale, 0.0);
        for (label, med) in trivial_medians {
            report.check(Check::below(format!("{label} median largest variance negligible"), med, cfg.negligible_fraction * scale));
        }
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
    })
}

// ---------------------------------------------------------------- tail exponents

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailExponentsConfig {
    pub horseshoe_c: f64,
    pub bfry_eta: f64,
    pub bfry_alpha: f64,
    pub bfry_tau: f64,
    /// Width at which node variances are drawn. The power-law tail of λ only
    /// dominates beyond its 1 − O(1/p) quantile, so small widths are needed
    /// for a top-fraction estimator to see it.
    pub width: usize,
    pub top_fraction: f64,
    pub sweep: Vec<f64>,
    pub weight_tolerance: f64,
    pub variance_tolerance: f64,
}

impl Default for TailExponentsConfig {
    fn default() -> Self {
        Self {
            horseshoe_c: 1.0,
            bfry_eta: 4.0,
            bfry_alpha: 0.5,
            bfry_tau: 5.0,
            width: 1,
            top_fraction: 0.05,
            sweep: vec![0.02, 0.05, 0.1],
            weight_tolerance: 0.15,
            variance_tolerance: 0.75,
        }
    }
}

fn tail_exponents(cfg: &TailExponentsConfig, ctx: Ctx, n: usize) -> Result<ExperimentOutput> {
    let mut report = ExperimentReport::new("tail_exponents", serde_json::to_value(cfg).unwrap_or_default(), ctx.seed, n);
    let mut table = Table::new("tail_exponents", &["sample", "top_fraction", "exponent", "exponent_se", "tail_points"]);
    let hs = make_model("horseshoe", json!({"c": cfg.horseshoe_c}))?;
    let gb = make_model("generalized_bfry", json!({"eta": cfg.bfry_eta, "alpha": cfg.bfry_alpha, "tau": cfg.bfry_tau}))?;
    let hs_s = hs.node_sampler(cfg.width, Some(cfg.width))?;
    let gb_s = gb.node_sampler(cfg.width, Some(cfg.width))?;
    // single stream per sample so the draw count does not depend on chunking
    let chunks = 100usize;
    let per = n.div_ceil(chunks);
    let draw = |label: &str, f: &(dyn Fn(&mut crate::rng::StreamRng) -> f64 + Sync)| -> Vec<f64> {
        let parts = map_replicates(chunks, ctx.workers, ctx.family(label), |i, rng| {
            let cnt = per.min(n.saturating_sub(i * per));
            (0..cnt).map(|_| f(rng)).collect::<Vec<f64>>()
        });
        parts.concat()
    };
    let weights = draw("tail_exponents/horseshoe_weights", &|rng| (hs_s.sample(rng).sqrt() * std_normal(rng)).abs());
    let lambdas = draw("tail_exponents/bfry_variances", &|rng| gb_s.sample(rng));
    for (name, xs, target, tol) in [
        ("horseshoe |W|", &weights, 2.0 * 0.5, cfg.weight_tolerance),
        ("generalized BFRY lambda", &lambdas, cfg.bfry_tau, cfg.variance_tolerance),
    ] {
        let est = tail_exponent(xs, cfg.top_fraction)?;
        let (sweep, unstable) = tail_exponent_sweep(xs, &cfg.sweep)?;
        for (f, e) in cfg.sweep.iter().zip(&sweep) {
            table.push(vec![name.into(), (*f).into(), e.exponent.into(), e.std_error.into(), e.tail_points.into()]);
        }
        report.estimate(format!("{name} Hill exponent"), est.exponent, est.std_error);
        report.estimate(format!("{name} sweep unstable"), if unstable { 1.0 } else { 0.0 }, 0.0);
        report.check(Check::within(format!("{name} Hill exponent"), est.exponent, target, tol));
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
    })
}
