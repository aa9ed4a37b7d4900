//! Per-node variance laws μ_p and their infinite-width limits ID(a, ρ).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::dist::{beta_unchecked, gamma_unchecked, ln_gamma_variate, pareto_from_uniform, sample_half_cauchy, EtBfry};
use crate::error::{ensure, Error, Result};
use crate::levy::{LevyTriple, Measure, Slab};
use crate::quad::{self, integrate_positive};
use crate::rng::{open01, RngStream};
use crate::special::gamma;
use crate::stats::{mean_se, Check, ExperimentReport};

fn default_ig_c1() -> f64 {
    2.0
}

/// Serializable model description, `{"name": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case")]
pub enum ModelSpec {
    Deterministic { c1: f64 },
    Bernoulli { c: f64 },
    GroupLassoGamma { c1: f64 },
    /// IG(2, c1/p); c1 = 2 is the usual multivariate-t scaling.
    InverseGamma {
        #[serde(default = "default_ig_c1")]
        c1: f64,
    },
    InverseGammaStable { alpha: f64 },
    Beta { eta: f64, b: f64 },
    Horseshoe { c: f64 },
    RegularizedHorseshoe { c: f64 },
    GeneralizedBfry { eta: f64, alpha: f64, tau: f64 },
    SpikeSlab { c: f64, c_tilde: f64, slab: Slab },
    PermanGeneric { measure: Measure },
}

pub const MODEL_NAMES: [&str; 11] = [
    "deterministic",
    "bernoulli",
    "group_lasso_gamma",
    "inverse_gamma",
    "inverse_gamma_stable",
    "beta",
    "horseshoe",
    "regularized_horseshoe",
    "generalized_bfry",
    "spike_slab",
    "perman_generic",
];

/// A variance law together with its declared limit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub struct VarianceModel {
    spec: ModelSpec,
    limit: LevyTriple,
    #[serde(skip)]
    perman: Arc<Mutex<HashMap<usize, Arc<PermanTable>>>>,
}

impl PartialEq for VarianceModel {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl TryFrom<ModelSpec> for VarianceModel {
    type Error = Error;
    fn try_from(spec: ModelSpec) -> Result<Self> {
        VarianceModel::new(spec)
    }
}

impl From<VarianceModel> for ModelSpec {
    fn from(m: VarianceModel) -> Self {
        m.spec
    }
}

/// Build a model from its name and a JSON object of parameters.
pub fn make_model(name: &str, params: serde_json::Value) -> Result<VarianceModel> {
    if !MODEL_NAMES.contains(&name) {
        return Err(Error::Unknown(name.to_string()));
    }
    let spec: ModelSpec = serde_json::from_value(serde_json::json!({ "name": name, "params": params }))
        .map_err(|e| Error::Config(format!("{name}: {e}")))?;
    VarianceModel::new(spec)
}

impl VarianceModel {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        let limit = declared_limit(&spec)?;
        Ok(Self {
            spec,
            limit,
            perman: Arc::default(),
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn name(&self) -> &'static str {
        match self.spec {
            ModelSpec::Deterministic { .. } => "deterministic",
            ModelSpec::Bernoulli { .. } => "bernoulli",
            ModelSpec::GroupLassoGamma { .. } => "group_lasso_gamma",
            ModelSpec::InverseGamma { .. } => "inverse_gamma",
            ModelSpec::InverseGammaStable { .. } => "inverse_gamma_stable",
            ModelSpec::Beta { .. } => "beta",
            ModelSpec::Horseshoe { .. } => "horseshoe",
            ModelSpec::RegularizedHorseshoe { .. } => "regularized_horseshoe",
            ModelSpec::GeneralizedBfry { .. } => "generalized_bfry",
            ModelSpec::SpikeSlab { .. } => "spike_slab",
            ModelSpec::PermanGeneric { .. } => "perman_generic",
        }
    }

    /// The limit ID(a, ρ) of Σ_j λ_{p,j} as p → ∞.
    pub fn limit(&self) -> &LevyTriple {
        &self.limit
    }

    pub fn needs_upper_width(&self) -> bool {
        matches!(self.spec, ModelSpec::GroupLassoGamma { .. })
    }

    /// Check that width p is admissible and return the per-node sampler for it.
    pub fn node_sampler(&self, p: usize, p_next: Option<usize>) -> Result<NodeSampler> {
        ensure(p >= 1, || "width must be at least 1".into())?;
        let pf = p as f64;
        Ok(match self.spec {
            ModelSpec::Deterministic { c1 } => NodeSampler::Constant(c1 / pf),
            ModelSpec::Bernoulli { c } => {
                ensure(pf >= c, || format!("bernoulli needs p ≥ c, got p={p}, c={c}"))?;
                NodeSampler::Bernoulli { prob: c / pf }
            }
            ModelSpec::GroupLassoGamma { c1 } => {
                let q = p_next.ok_or_else(|| {
                    Error::Config("group_lasso_gamma needs the width of the layer above".into())
                })? as f64;
                NodeSampler::Gamma {
                    shape: 0.5 * (q + 1.0),
                    rate: pf * (q + 1.0) / (2.0 * c1),
                }
            }
            ModelSpec::InverseGamma { c1 } => NodeSampler::InverseGamma {
                shape: 2.0,
                scale: c1 / pf,
            },
            ModelSpec::InverseGammaStable { alpha } => NodeSampler::InverseGamma {
                shape: alpha,
                scale: (gamma(1.0 + alpha) / pf).powf(1.0 / alpha),
            },
            ModelSpec::Beta { eta, b } => NodeSampler::Beta { a: eta / pf, b },
            ModelSpec::Horseshoe { c } => NodeSampler::Horseshoe {
                scale: c * PI * PI / (4.0 * pf * pf),
            },
            ModelSpec::RegularizedHorseshoe { c } => NodeSampler::RegularizedHorseshoe { c2: c * c, p: pf },
            ModelSpec::GeneralizedBfry { eta, alpha, tau } => NodeSampler::GenBfry {
                tau,
                etbfry: EtBfry::new(alpha, bfry_t(pf, eta, alpha, tau), 1.0)?,
            },
            ModelSpec::SpikeSlab { c, c_tilde, ref slab } => {
                ensure(pf >= c, || format!("spike_slab needs p ≥ c, got p={p}, c={c}"))?;
                NodeSampler::SpikeSlab {
                    prob: c / pf,
                    spike: c_tilde / pf,
                    slab: slab.clone(),
                }
            }
            ModelSpec::PermanGeneric { ref measure } => NodeSampler::Perman(self.perman_table(measure, p)?),
        })
    }

    fn perman_table(&self, measure: &Measure, p: usize) -> Result<Arc<PermanTable>> {
        let mut cache = self.perman.lock().expect("perman cache poisoned");
        if let Some(t) = cache.get(&p) {
            return Ok(t.clone());
        }
        let t = Arc::new(PermanTable::build(measure, p as f64)?);
        cache.insert(p, t.clone());
        Ok(t)
    }

    /// p iid draws from μ_p.
    pub fn sample_variances<R: RngCore + ?Sized>(&self, p: usize, p_next: Option<usize>, rng: &mut R) -> Result<Vec<f64>> {
        let s = self.node_sampler(p, p_next)?;
        Ok((0..p).map(|_| s.sample(rng)).collect())
    }

    /// Survival function P(λ_{p,1} > x) in closed form, where one exists.
    pub fn node_survival(&self, p: usize, x: f64) -> Option<f64> {
        let pf = p as f64;
        match self.spec {
            ModelSpec::Deterministic { c1 } => Some(if c1 / pf > x { 1.0 } else { 0.0 }),
            ModelSpec::Bernoulli { c } => Some(if x < 1.0 { c / pf } else { 0.0 }),
            ModelSpec::Horseshoe { c } => {
                // λ > x ⇔ T > 2p√x/(π√c)
                let t = 2.0 * pf * x.sqrt() / (PI * c.sqrt());
                Some(2.0 / PI * (1.0 / t).atan())
            }
            _ => None,
        }
    }
}

/// etBFRY tilt scale. With t^α = pατ/η the sum converges to the gamma-Pareto
/// measure η x^{−1−τ} γ(τ−α, x)/Γ(1−α); an extra (τ−α) in the denominator
/// would inflate the limit by that factor.
fn bfry_t(p: f64, eta: f64, alpha: f64, tau: f64) -> f64 {
    (p * alpha * tau / eta).powf(1.0 / alpha)
}

fn declared_limit(spec: &ModelSpec) -> Result<LevyTriple> {
    let pos = |v: f64, what: &str| ensure(v > 0.0 && v.is_finite(), || format!("{what} must be positive, got {v}"));
    match *spec {
        ModelSpec::Deterministic { c1 } => {
            pos(c1, "c1")?;
            LevyTriple::trivial(c1)
        }
        ModelSpec::Bernoulli { c } => {
            pos(c, "c")?;
            LevyTriple::new(0.0, Measure::atomic(vec![(1.0, c)])?)
        }
        ModelSpec::GroupLassoGamma { c1 } => {
            pos(c1, "c1")?;
            LevyTriple::trivial(c1)
        }
        ModelSpec::InverseGamma { c1 } => {
            pos(c1, "c1")?;
            LevyTriple::trivial(c1)
        }
        ModelSpec::InverseGammaStable { alpha } => LevyTriple::new(0.0, Measure::stable(alpha, 1.0)?),
        ModelSpec::Beta { eta, b } => LevyTriple::new(0.0, Measure::beta(eta, b)?),
        ModelSpec::Horseshoe { c } => LevyTriple::new(0.0, Measure::horseshoe(c)?),
        ModelSpec::RegularizedHorseshoe { c } => LevyTriple::new(0.0, Measure::regularized_horseshoe(c)?),
        ModelSpec::GeneralizedBfry { eta, alpha, tau } => {
            LevyTriple::new(0.0, Measure::gen_gamma_pareto(eta, alpha, tau)?)
        }
        ModelSpec::SpikeSlab { c, c_tilde, ref slab } => {
            ensure(c_tilde >= 0.0, || format!("c_tilde must be nonnegative, got {c_tilde}"))?;
            LevyTriple::new(c_tilde, Measure::compound(c, slab.clone())?)
        }
        ModelSpec::PermanGeneric { ref measure } => {
            measure.validate()?;
            if measure.total_mass().is_finite() {
                return Err(Error::Domain(
                    "perman_generic needs an infinite measure; use spike_slab for finite ones".into(),
                ));
            }
            LevyTriple::new(0.0, measure.clone())
        }
    }
}

/// Per-node sampler for a fixed width.
#[derive(Debug, Clone)]
pub enum NodeSampler {
    Constant(f64),
    Bernoulli { prob: f64 },
    Gamma { shape: f64, rate: f64 },
    InverseGamma { shape: f64, scale: f64 },
    Beta { a: f64, b: f64 },
    Horseshoe { scale: f64 },
    RegularizedHorseshoe { c2: f64, p: f64 },
    GenBfry { tau: f64, etbfry: EtBfry },
    SpikeSlab { prob: f64, spike: f64, slab: Slab },
    Perman(Arc<PermanTable>),
}

impl NodeSampler {
    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            NodeSampler::Constant(v) => *v,
            NodeSampler::Bernoulli { prob } => {
                if open01(rng) < *prob {
                    1.0
                } else {
                    0.0
                }
            }
            NodeSampler::Gamma { shape, rate } => gamma_unchecked(*shape, *rate, rng),
            NodeSampler::InverseGamma { shape, scale } => (scale.ln() - ln_gamma_variate(*shape, rng)).exp(),
            NodeSampler::Beta { a, b } => beta_unchecked(*a, *b, rng),
            NodeSampler::Horseshoe { scale } => {
                let t = sample_half_cauchy(rng);
                scale * t * t
            }
            NodeSampler::RegularizedHorseshoe { c2, p } => {
                let t = sample_half_cauchy(rng) / p;
                let s = t * t;
                c2 * s / (c2 + s)
            }
            NodeSampler::GenBfry { tau, etbfry } => pareto_from_uniform(open01(rng), *tau, 1.0) * etbfry.sample(rng),
            NodeSampler::SpikeSlab { prob, spike, slab } => {
                if open01(rng) < *prob {
                    slab.sample(rng)
                } else {
                    *spike
                }
            }
            NodeSampler::Perman(t) => t.sample(rng),
        }
    }
}

/// Tail function of μ_p(du) = (1 − e^{−u s}) ρ(du) / p with s = ψ⁻¹(p),
/// tabulated on a log grid and inverted by monotone cubic interpolation.
#[derive(Debug)]
pub struct PermanTable {
    /// ψ⁻¹(p).
    pub s: f64,
    ln_x: Vec<f64>,
    /// ln of p·P(λ > x) at the grid points.
    ln_g: Vec<f64>,
    /// d ln G / d ln x at the grid points.
    slope: Vec<f64>,
    p: f64,
}

const PERMAN_GRID: usize = 2048;

/// Laplace exponent ψ(t) = ∫ (1 − e^{−ut}) ρ(du) = t ∫ e^{−ut} ρ̄(u) du.
pub fn laplace_exponent(m: &Measure, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    // substitute v = ut so the integrand is e^{−v} ρ̄(v/t)
    integrate_positive(|v| (-v).exp() * m.tail(v / t), 0.0, f64::INFINITY, 1e-12).value
}

impl PermanTable {
    pub fn build(m: &Measure, p: f64) -> Result<Self> {
        let s = inverse_laplace_exponent(m, p)?;
        // G(x) = (1 − e^{−xs}) ρ̄(x) + s ∫_x^∞ e^{−us} ρ̄(u) du
        let lo_target = 1e-12 * p;
        let mut x_lo = 1.0 / s;
        while s * m.truncated_mean(x_lo) > lo_target && x_lo > 1e-300 {
            x_lo *= 0.5;
        }
        let upper = m.support_upper();
        let mut x_hi = m.inverse_tail(1e-14 * p).max(x_lo * 4.0);
        if upper.is_finite() {
            x_hi = x_hi.min(upper);
        }
        let (a, b) = (x_lo.ln(), x_hi.ln());
        let ln_x: Vec<f64> = (0..PERMAN_GRID)
            .map(|i| a + (b - a) * i as f64 / (PERMAN_GRID - 1) as f64)
            .collect();
        // cumulative ∫_x^∞ e^{−us} ρ̄(u) du from the right
        let mut tail_int = vec![0.0; PERMAN_GRID];
        let beyond = integrate_positive(|u| (-u * s).exp() * m.tail(u), x_hi, f64::INFINITY, 1e-300);
        tail_int[PERMAN_GRID - 1] = if upper.is_finite() && x_hi >= upper { 0.0 } else { beyond.value };
        for i in (0..PERMAN_GRID - 1).rev() {
            let (u0, u1) = (ln_x[i].exp(), ln_x[i + 1].exp());
            let cell = quad::integrate(|u| (-u * s).exp() * m.tail(u), u0, u1, 0.0).value;
            tail_int[i] = tail_int[i + 1] + cell;
        }
        let mut ln_g = Vec::with_capacity(PERMAN_GRID);
        let mut g_vals = Vec::with_capacity(PERMAN_GRID);
        for i in 0..PERMAN_GRID {
            let x = ln_x[i].exp();
            let g = -(-x * s).exp_m1() * m.tail(x) + s * tail_int[i];
            g_vals.push(g);
            ln_g.push(g.max(1e-300).ln());
        }
        // slopes: −x g(x)/G(x) with g the μ_p-density times p; finite differences when ρ has no density
        let slope: Vec<f64> = (0..PERMAN_GRID)
            .map(|i| {
                let x = ln_x[i].exp();
                match m.density(x) {
                    Some(d) => -x * (-(-x * s).exp_m1()) * d / g_vals[i].max(1e-300),
                    None => {
                        let (j0, j1) = (i.saturating_sub(1), (i + 1).min(PERMAN_GRID - 1));
                        (ln_g[j1] - ln_g[j0]) / (ln_x[j1] - ln_x[j0])
                    }
                }
            })
            .collect();
        ensure(ln_g.windows(2).all(|w| w[1] <= w[0] + 1e-12), || {
            "perman tail table is not monotone".into()
        })?;
        Ok(Self {
            s,
            ln_x,
            ln_g,
            slope,
            p,
        })
    }

    /// p · P(λ > x) interpolated from the table.
    pub fn scaled_tail(&self, x: f64) -> f64 {
        let lx = x.ln();
        let n = self.ln_x.len();
        if lx <= self.ln_x[0] {
            return self.p;
        }
        if lx >= self.ln_x[n - 1] {
            return self.ln_g[n - 1].exp() * (x / self.ln_x[n - 1].exp()).powf(self.slope[n - 1]);
        }
        let i = self.ln_x.partition_point(|v| *v <= lx) - 1;
        self.hermite(i, lx).exp()
    }

    fn hermite(&self, i: usize, lx: f64) -> f64 {
        let h = self.ln_x[i + 1] - self.ln_x[i];
        let t = (lx - self.ln_x[i]) / h;
        let (y0, y1) = (self.ln_g[i], self.ln_g[i + 1]);
        // clamp slopes into the monotone region (Fritsch–Carlson)
        let secant = (y1 - y0) / h;
        let clamp = |d: f64| if secant == 0.0 { 0.0 } else { d.max(3.0 * secant).min(0.0) };
        let (d0, d1) = (clamp(self.slope[i]) * h, clamp(self.slope[i + 1]) * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let target = (self.p * open01(rng)).ln();
        let n = self.ln_g.len();
        if target >= self.ln_g[0] {
            // below the table: the remaining mass is < 1e-12, place it at the left edge
            return self.ln_x[0].exp();
        }
        if target <= self.ln_g[n - 1] {
            // power-law extrapolation past the right edge
            let sl = self.slope[n - 1].min(-1e-3);
            return (self.ln_x[n - 1] + (target - self.ln_g[n - 1]) / sl).exp();
        }
        // ln_g is decreasing: first index with ln_g < target
        let j = self.ln_g.partition_point(|v| *v >= target);
        let i = j - 1;
        let (mut a, mut b) = (self.ln_x[i], self.ln_x[j]);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if self.hermite(i, mid) >= target {
                a = mid;
            } else {
                b = mid;
            }
            if b - a < 1e-13 {
                break;
            }
        }
        (0.5 * (a + b)).exp()
    }
}

fn inverse_laplace_exponent(m: &Measure, p: f64) -> Result<f64> {
    let total = m.total_mass();
    ensure(total > p, || format!("Laplace exponent is bounded by {total}, cannot reach {p}"))?;
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    while laplace_exponent(m, lo) > p {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::Numerical("ψ⁻¹ bracket underflow".into()));
        }
    }
    while laplace_exponent(m, hi) < p {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Numerical("ψ⁻¹ bracket overflow".into()));
        }
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    while b - a > 1e-13 {
        let mid = 0.5 * (a + b);
        if laplace_exponent(m, mid.exp()) < p {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

/// Relative slack granted to the width-p value of a quantity that only
/// converges as p → ∞.
pub const ID_RELATIVE_SLACK: f64 = 0.01;

fn id_tolerance(se: f64, target: f64) -> f64 {
    (3.0 * se).max(ID_RELATIVE_SLACK * target.abs()).max(1e-12)
}

/// ∫₀^h u² ρ(du) = 2∫₀^h u ρ̄(u) du − h² ρ̄(h).
fn truncated_second_moment(m: &Measure, h: f64) -> f64 {
    let v = quad::integrate(|u| 2.0 * u * m.tail(u), 0.0, h, 0.0).value - h * h * m.tail(h);
    v.max(0.0)
}

/// Monte-Carlo check of the two convergence conditions
/// (i) p P(λ > x) → ρ̄(x) and (ii) p E[λ 1{λ ≤ h}] → a + ∫₀ʰ x ρ(dx).
///
/// Both are limit statements with finite-width bias, so they are checked at
/// the largest width only, to 3 standard errors or 1% relative, whichever is
/// looser; smaller widths are reported as estimates. The standard error is
/// floored by its value under the limit, since rare large draws make the
/// sample SE undercover.
pub fn check_id_conditions(
    model: &VarianceModel,
    p_grid: &[usize],
    x_grid: &[f64],
    h_grid: &[f64],
    replicates: usize,
    stream: RngStream,
) -> Result<ExperimentReport> {
    ensure(!p_grid.is_empty() && replicates >= 2, || "need widths and at least two replicates".into())?;
    let mut report = ExperimentReport::new(
        format!("id_conditions_{}", model.name()),
        serde_json::json!({
            "model": model.spec(),
            "p_grid": p_grid,
            "x_grid": x_grid,
            "h_grid": h_grid,
        }),
        stream.master_seed,
        replicates,
    );
    let limit = model.limit();
    let p_max = *p_grid.iter().max().unwrap();
    for (pi, &p) in p_grid.iter().enumerate() {
        let sampler = model.node_sampler(p, Some(p))?;
        let mut rng = stream.with_index(stream.stream_index.wrapping_add(pi as u64)).rng();
        let draws: Vec<f64> = (0..replicates).map(|_| sampler.sample(&mut rng)).collect();
        let pf = p as f64;
        for &x in x_grid {
            let ind: Vec<f64> = draws.iter().map(|&l| if l > x { pf } else { 0.0 }).collect();
            let (est, se) = mean_se(&ind);
            let target = limit.measure.tail(x);
            let label = format!("p={p} x={x} p*P(lambda>x)");
            report.estimate(&label, est, se);
            if p == p_max {
                // binomial SE under the limit keeps the tolerance honest when no draw exceeds x
                let q = (target / pf).min(1.0);
                let se_null = pf * (q * (1.0 - q) / replicates as f64).sqrt();
                report.check(Check::within(label, est, target, id_tolerance(se.max(se_null), target)));
            }
        }
        for &h in h_grid {
            let vals: Vec<f64> = draws.iter().map(|&l| if l <= h { pf * l } else { 0.0 }).collect();
            let (est, se) = mean_se(&vals);
            let target = limit.location_a + limit.measure.truncated_mean(h);
            let label = format!("p={p} h={h} p*E[lambda;lambda<=h]");
            report.estimate(&label, est, se);
            if p == p_max {
                // under the limit, Var(pλ1{λ≤h}) ≈ p∫₀^h u²ρ(du); guards against rare-jump undercoverage
                let se_null = (pf * truncated_second_moment(&limit.measure, h) / replicates as f64).sqrt();
                report.check(Check::within(label, est, target, id_tolerance(se.max(se_null), target)));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_is_constant() {
        let m = make_model("deterministic", serde_json::json!({"c1": 1.0})).unwrap();
        let mut r = RngStream::new(1, 0).rng();
        let v = m.sample_variances(10, None, &mut r).unwrap();
        assert!(v.iter().all(|&x| x == 0.1));
    }

    #[test]
    fn unknown_and_bad_params() {
        assert!(matches!(make_model("gaussian", serde_json::json!({})), Err(Error::Unknown(_))));
        assert!(make_model("beta", serde_json::json!({"eta": -1.0, "b": 1.0})).is_err());
        assert!(make_model("generalized_bfry", serde_json::json!({"eta": 1.0, "alpha": 0.5, "tau": 0.2})).is_err());
    }

    #[test]
    fn group_lasso_needs_upper_width() {
        let m = make_model("group_lasso_gamma", serde_json::json!({"c1": 1.0})).unwrap();
        let mut r = RngStream::new(1, 0).rng();
        assert!(m.sample_variances(10, None, &mut r).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = make_model("inverse_gamma", serde_json::json!({})).unwrap();
        assert_eq!(m.limit().location_a, 2.0);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"name":"inverse_gamma","params":{"c1":2.0}}"#);
        let back: VarianceModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn laplace_exponent_of_stable() {
        // ψ(t) = Γ(1−α) c^α t^α for the stable measure
        let m = Measure::stable(0.5, 4.0).unwrap();
        let psi = laplace_exponent(&m, 3.0);
        assert!((psi - gamma(0.5) * 2.0 * 3f64.sqrt()).abs() < 1e-9 * psi);
    }
}
