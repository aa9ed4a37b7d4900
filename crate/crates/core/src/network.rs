//! Finite feedforward networks with per-node variances, and samplers for
//! their infinite-width limits.

use std::f64::consts::PI;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::activation::ActivationKind;
use crate::dist::std_normal;
use crate::error::{ensure, Error, Result};
use crate::kernels::{gaussian_cross_moment, kappa1, leaky_relu_cross_moment};
use crate::levy::{activation_transform, sample_id, LevyTriple, Measure};
use crate::linalg::{cholesky_jittered, psd_root, Matrix};
use crate::special::ln_gamma;
use crate::variance::{NodeSampler, VarianceModel};

/// Architecture and priors. Layer l = 1..L is hidden with width `widths[l-1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub d_in: usize,
    pub d_out: usize,
    pub widths: Vec<usize>,
    pub sigma_v: f64,
    #[serde(default)]
    pub sigma_b: f64,
    pub activation: ActivationKind,
    pub variance_models: Vec<VarianceModel>,
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.d_in >= 1 && self.d_out >= 1, || "input and output dimensions must be positive".into())?;
        ensure(!self.widths.is_empty() && self.widths.iter().all(|&p| p >= 1), || {
            "need at least one hidden layer, all widths positive".into()
        })?;
        ensure(self.sigma_v > 0.0 && self.sigma_v.is_finite(), || format!("sigma_v must be positive, got {}", self.sigma_v))?;
        ensure(self.sigma_b >= 0.0 && self.sigma_b.is_finite(), || format!("sigma_b must be nonnegative, got {}", self.sigma_b))?;
        if self.variance_models.len() != self.widths.len() {
            return Err(Error::Dimension {
                expected: self.widths.len(),
                got: self.variance_models.len(),
            });
        }
        Ok(())
    }

    /// Number of hidden layers L.
    pub fn depth(&self) -> usize {
        self.widths.len()
    }

    /// Width of the layer above hidden layer `l` (0-based).
    fn upper_width(&self, l: usize) -> usize {
        self.widths.get(l + 1).copied().unwrap_or(self.d_out)
    }

    pub fn node_samplers(&self) -> Result<Vec<NodeSampler>> {
        self.validate()?;
        self.variance_models
            .iter()
            .enumerate()
            .map(|(l, m)| m.node_sampler(self.widths[l], Some(self.upper_width(l))))
            .collect()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d_in {
            return Err(Error::Dimension {
                expected: self.d_in,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Σ^{(1)}(x, x′) = σ_b² + σ_v² xᵀx′/d_in.
    pub fn first_layer_kernel(&self, x: &[f64], xp: &[f64]) -> f64 {
        let dot: f64 = x.iter().zip(xp).map(|(a, b)| a * b).sum();
        self.sigma_b * self.sigma_b + self.sigma_v * self.sigma_v * dot / self.d_in as f64
    }
}

/// A draw of all per-node variances, Gaussian weights V and biases B.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkRealization {
    /// λ^{(0)} = 1/d_in for every input node.
    pub input_lambda: f64,
    /// λ^{(l)} for hidden layers l = 1..L.
    pub lambdas: Vec<Vec<f64>>,
    /// V^{(l)} for l = 1..L+1, shape p_{l−1} × p_l.
    pub v: Vec<Matrix>,
    /// B^{(l)} for l = 1..L+1.
    pub b: Vec<Vec<f64>>,
}

pub fn sample_lambdas<R: RngCore + ?Sized>(cfg: &NetworkConfig, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    let samplers = cfg.node_samplers()?;
    Ok(samplers
        .iter()
        .zip(&cfg.widths)
        .map(|(s, &p)| (0..p).map(|_| s.sample(rng)).collect())
        .collect())
}

/// Independent draws of λ, V and B.
pub fn sample_network<R: RngCore + ?Sized>(cfg: &NetworkConfig, rng: &mut R) -> Result<NetworkRealization> {
    let lambdas = sample_lambdas(cfg, rng)?;
    Ok(resample_weights(cfg, lambdas, rng))
}

/// Fresh V and B for fixed per-node variances.
pub fn resample_weights<R: RngCore + ?Sized>(cfg: &NetworkConfig, lambdas: Vec<Vec<f64>>, rng: &mut R) -> NetworkRealization {
    let mut dims = vec![cfg.d_in];
    dims.extend(&cfg.widths);
    dims.push(cfg.d_out);
    let mut v = Vec::with_capacity(dims.len() - 1);
    let mut b = Vec::with_capacity(dims.len() - 1);
    for w in dims.windows(2) {
        let mut m = Matrix::zeros(w[0], w[1]);
        for e in m.data.iter_mut() {
            *e = cfg.sigma_v * std_normal(rng);
        }
        v.push(m);
        b.push(if cfg.sigma_b > 0.0 {
            (0..w[1]).map(|_| cfg.sigma_b * std_normal(rng)).collect()
        } else {
            vec![0.0; w[1]]
        });
    }
    NetworkRealization {
        input_lambda: 1.0 / cfg.d_in as f64,
        lambdas,
        v,
        b,
    }
}

/// Pre-activations Z^{(1)}, …, Z^{(L+1)} at input x.
pub fn forward(real: &NetworkRealization, cfg: &NetworkConfig, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    cfg.check_input(x)?;
    let mut out = Vec::with_capacity(real.v.len());
    // inputs enter unactivated with weight scale √(1/d_in)
    let s0 = real.input_lambda.sqrt();
    let mut h: Vec<f64> = x.iter().map(|xi| s0 * xi).collect();
    for (l, (v, b)) in real.v.iter().zip(&real.b).enumerate() {
        if h.len() != v.rows {
            return Err(Error::Dimension {
                expected: v.rows,
                got: h.len(),
            });
        }
        let mut z = b.clone();
        for (j, hj) in h.iter().enumerate() {
            if *hj == 0.0 {
                continue;
            }
            for (zk, vjk) in z.iter_mut().zip(v.row(j)) {
                *zk += hj * vjk;
            }
        }
        if l < real.lambdas.len() {
            h = z
                .iter()
                .zip(&real.lambdas[l])
                .map(|(zk, lam)| lam.sqrt() * cfg.activation.apply(*zk))
                .collect();
        }
        out.push(z);
    }
    Ok(out)
}

/// One pass of the exact conditional Gaussian chain for several networks
/// that share V and B but differ in their per-node variances (e.g. pruned
/// copies). Row/column a of each covariance refers to variant a.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainDraw {
    /// Conditional covariance of (Z^{a}_k)_a at layers 1..L+1, given the layer below.
    pub cond_cov: Vec<Matrix>,
    /// Output draws, variants × d_out.
    pub outputs: Matrix,
}

/// Conditional expectation of the variant covariance of layer l+2 given the
/// covariance `prev` of layer l+1: every node of layer l+1 has the same
/// variant covariance, so the sum over nodes collapses to
/// σ_b² + σ_v² E[φ(X_a)φ(X_b)] Σ_j √(λ^a_j λ^b_j). `None` without a closed-form
/// cross moment.
pub fn expected_next_cov(cfg: &NetworkConfig, variants: &[Vec<Vec<f64>>], prev: &Matrix, l: usize) -> Option<Matrix> {
    let e = variants.len();
    let v2 = cfg.sigma_v * cfg.sigma_v;
    let b2 = cfg.sigma_b * cfg.sigma_b;
    let mut out = Matrix::zeros(e, e);
    for a in 0..e {
        for b in 0..=a {
            let m = gaussian_cross_moment(cfg.activation, prev.get(a, a), prev.get(b, b), prev.get(a, b))?;
            let mass: f64 = if a == b {
                variants[a][l].iter().sum()
            } else {
                variants[a][l].iter().zip(&variants[b][l]).map(|(x, y)| (x * y).sqrt()).sum()
            };
            let v = b2 + v2 * m * mass;
            out.set(a, b, v);
            out.set(b, a, v);
        }
    }
    Some(out)
}

/// Sample the pre-activations layer by layer from their conditional law:
/// given layer l−1, the vectors (Z^{a,(l)}_k)_a are iid over k and Gaussian
/// with covariance σ_b² + σ_v² Σ_j √(λ^a_j λ^b_j) φ(Z^a_j) φ(Z^b_j).
///
/// `variants[a][l]` is the λ vector of hidden layer l+1 for variant a.
///
/// Identical variants share one column, so their draws agree exactly.
pub fn joint_output_chain<R: RngCore + ?Sized>(
    cfg: &NetworkConfig,
    variants: &[Vec<Vec<f64>>],
    x: &[f64],
    rng: &mut R,
) -> Result<ChainDraw> {
    cfg.check_input(x)?;
    ensure(!variants.is_empty(), || "need at least one network variant".into())?;
    for var in variants {
        if var.len() != cfg.depth() {
            return Err(Error::Dimension {
                expected: cfg.depth(),
                got: var.len(),
            });
        }
    }
    let mut distinct: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut slot = Vec::with_capacity(variants.len());
    for var in variants {
        match distinct.iter().position(|d| d == var) {
            Some(i) => slot.push(i),
            None => {
                slot.push(distinct.len());
                distinct.push(var.clone());
            }
        }
    }
    let draw = chain_distinct(cfg, &distinct, x, rng)?;
    if distinct.len() == variants.len() {
        return Ok(draw);
    }
    let e = variants.len();
    let cond_cov = draw
        .cond_cov
        .iter()
        .map(|c| {
            let mut m = Matrix::zeros(e, e);
            for a in 0..e {
                for b in 0..e {
                    m.set(a, b, c.get(slot[a], slot[b]));
                }
            }
            m
        })
        .collect();
    let mut outputs = Matrix::zeros(e, cfg.d_out);
    for a in 0..e {
        for k in 0..cfg.d_out {
            outputs.set(a, k, draw.outputs.get(slot[a], k));
        }
    }
    Ok(ChainDraw { cond_cov, outputs })
}

fn chain_distinct<R: RngCore + ?Sized>(
    cfg: &NetworkConfig,
    variants: &[Vec<Vec<f64>>],
    x: &[f64],
    rng: &mut R,
) -> Result<ChainDraw> {
    let e = variants.len();
    let v2 = cfg.sigma_v * cfg.sigma_v;
    let b2 = cfg.sigma_b * cfg.sigma_b;
    let mut cond_cov = Vec::with_capacity(cfg.depth() + 1);
    let mut cov = Matrix::filled(e, e, cfg.first_layer_kernel(x, x));
    let mut z = vec![0.0; e];
    let mut y = vec![0.0; e];
    let mut u = vec![0.0; e];
    for l in 0..=cfg.depth() {
        let chol = psd_root(&cov)?;
        let width = if l < cfg.depth() { cfg.widths[l] } else { cfg.d_out };
        let mut layer = Matrix::zeros(width, e);
        for k in 0..width {
            for zi in z.iter_mut() {
                *zi = std_normal(rng);
            }
            chol.mul_into(&z, &mut y);
            layer.data[k * e..(k + 1) * e].copy_from_slice(&y);
        }
        cond_cov.push(cov.clone());
        if l == cfg.depth() {
            // transpose to variants × d_out
            let mut outputs = Matrix::zeros(e, width);
            for k in 0..width {
                for a in 0..e {
                    outputs.set(a, k, layer.get(k, a));
                }
            }
            return Ok(ChainDraw { cond_cov, outputs });
        }
        let mut next = Matrix::filled(e, e, b2);
        for j in 0..width {
            for a in 0..e {
                let lam = variants[a][l][j];
                u[a] = if lam > 0.0 { lam.sqrt() * cfg.activation.apply(layer.get(j, a)) } else { 0.0 };
            }
            for a in 0..e {
                if u[a] == 0.0 {
                    continue;
                }
                for b in 0..=a {
                    next.add(a, b, v2 * u[a] * u[b]);
                }
            }
        }
        for a in 0..e {
            for b in 0..a {
                let s = next.get(a, b);
                next.set(b, a, s);
            }
        }
        cov = next;
    }
    unreachable!("loop returns at the output layer")
}

/// Conditional variance Σ^{(L+1)} and the outputs of a single network at input x.
pub fn output_chain<R: RngCore + ?Sized>(
    cfg: &NetworkConfig,
    lambdas: &[Vec<f64>],
    x: &[f64],
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let draw = joint_output_chain(cfg, &[lambdas.to_vec()], x, rng)?;
    let sig = draw.cond_cov.iter().map(|c| c.get(0, 0)).collect();
    Ok((sig, draw.outputs.row(0).to_vec()))
}

/// Per-layer limit data (c^{(l)}, η^{(l)}) of the single-input recurrence.
#[derive(Debug, Clone)]
pub struct SingleInputLimit {
    layers: Vec<LevyTriple>,
    floors: Vec<f64>,
    sigma_v: f64,
    sigma_b: f64,
    d_in: usize,
    d_out: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitDraw {
    /// Σ^{(1)}, …, Σ^{(L+1)}.
    pub sigma_chain: Vec<f64>,
    /// ζ_1, …, ζ_{d_out}: iid N(0, Σ^{(L+1)}) given the chain.
    pub outputs: Vec<f64>,
}

impl SingleInputLimit {
    pub fn new(cfg: &NetworkConfig, atom_floor: Option<f64>) -> Result<Self> {
        cfg.validate()?;
        if !cfg.activation.is_homogeneous() {
            return Err(Error::Unsupported(format!(
                "the single-input limit needs a positively homogeneous activation, got {:?}",
                cfg.activation
            )));
        }
        let mut layers = Vec::new();
        let mut floors = Vec::new();
        for m in &cfg.variance_models {
            let (c, eta) = activation_transform(m.limit(), cfg.activation)?;
            let floor = match atom_floor {
                Some(f) => f,
                None => eta.default_floor(),
            };
            layers.push(LevyTriple::new(c, eta)?);
            floors.push(floor);
        }
        Ok(Self {
            layers,
            floors,
            sigma_v: cfg.sigma_v,
            sigma_b: cfg.sigma_b,
            d_in: cfg.d_in,
            d_out: cfg.d_out,
        })
    }

    /// The transformed triple (c^{(l)}, η^{(l)}) for hidden layer l (0-based).
    pub fn layer(&self, l: usize) -> &LevyTriple {
        &self.layers[l]
    }

    pub fn draw<R: RngCore + ?Sized>(&self, x_sq_norm: f64, rng: &mut R) -> LimitDraw {
        let v2 = self.sigma_v * self.sigma_v;
        let b2 = self.sigma_b * self.sigma_b;
        let mut sigma = b2 + v2 * x_sq_norm / self.d_in as f64;
        let mut chain = vec![sigma];
        for (t, &f) in self.layers.iter().zip(&self.floors) {
            let s = sample_id(t, rng, f);
            sigma = b2 + v2 * s * sigma;
            chain.push(sigma);
        }
        let sd = sigma.sqrt();
        let outputs = (0..self.d_out).map(|_| sd * std_normal(rng)).collect();
        LimitDraw {
            sigma_chain: chain,
            outputs,
        }
    }
}

/// One draw of the infinite-width single-input limit.
pub fn simulate_limit_single_input<R: RngCore + ?Sized>(
    cfg: &NetworkConfig,
    x: &[f64],
    rng: &mut R,
    atom_floor: Option<f64>,
) -> Result<LimitDraw> {
    cfg.check_input(x)?;
    let lim = SingleInputLimit::new(cfg, atom_floor)?;
    Ok(lim.draw(x.iter().map(|v| v * v).sum(), rng))
}

/// E[Σ^{(l)}(x)] for l = 1..L+1.
pub fn variance_recursion(cfg: &NetworkConfig, x: &[f64]) -> Result<Vec<f64>> {
    cfg.validate()?;
    cfg.check_input(x)?;
    let c_phi = cfg.activation.second_moment().ok_or_else(|| {
        Error::Unsupported(format!("no closed-form second moment for {:?}", cfg.activation))
    })?;
    let v2 = cfg.sigma_v * cfg.sigma_v;
    let b2 = cfg.sigma_b * cfg.sigma_b;
    let mut e = cfg.first_layer_kernel(x, x);
    let mut out = vec![e];
    for m in &cfg.variance_models {
        let lim = m.limit();
        let m1 = lim.measure.moment(1);
        if !m1.is_finite() {
            return Err(Error::Inapplicable(format!("M1 infinite for the {} model", m.name())));
        }
        e = b2 + v2 * c_phi * (lim.location_a + m1) * e;
        out.push(e);
    }
    Ok(out)
}

/// Number of Monte-Carlo draws for E[φ(ζ)φ(ζ′)] when no closed form exists.
pub const CROSS_MOMENT_DRAWS: usize = 100_000;

/// Sampler of the random kernels K^{(1)}, …, K^{(L+1)} on a fixed set of inputs.
#[derive(Debug, Clone)]
pub struct KernelSampler {
    measures: Vec<Measure>,
    /// a^{(l)} plus the mean mass of atoms below the floor.
    location_eff: Vec<f64>,
    floors: Vec<f64>,
    sigma_v: f64,
    sigma_b: f64,
    activation: ActivationKind,
    d_in: usize,
}

impl KernelSampler {
    pub fn new(cfg: &NetworkConfig, atom_floor: Option<f64>) -> Result<Self> {
        cfg.validate()?;
        let mut measures = Vec::new();
        let mut location_eff = Vec::new();
        let mut floors = Vec::new();
        for m in &cfg.variance_models {
            let lim = m.limit();
            let floor = atom_floor.unwrap_or_else(|| lim.measure.default_floor());
            let comp = if lim.measure.is_trivial() { 0.0 } else { lim.measure.truncated_mean(floor) };
            measures.push(lim.measure.clone());
            location_eff.push(lim.location_a + comp);
            floors.push(floor);
        }
        Ok(Self {
            measures,
            location_eff,
            floors,
            sigma_v: cfg.sigma_v,
            sigma_b: cfg.sigma_b,
            activation: cfg.activation,
            d_in: cfg.d_in,
        })
    }

    pub fn draw<R: RngCore + ?Sized>(&self, inputs: &[Vec<f64>], rng: &mut R) -> Result<Vec<Matrix>> {
        let n = inputs.len();
        ensure(n >= 1, || "need at least one input".into())?;
        for x in inputs {
            if x.len() != self.d_in {
                return Err(Error::Dimension {
                    expected: self.d_in,
                    got: x.len(),
                });
            }
        }
        let v2 = self.sigma_v * self.sigma_v;
        let b2 = self.sigma_b * self.sigma_b;
        let mut k = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = inputs[i].iter().zip(&inputs[j]).map(|(a, b)| a * b).sum();
                k.set(i, j, b2 + v2 * dot / self.d_in as f64);
            }
        }
        let mut out = vec![k.clone()];
        let mut z = vec![0.0; n];
        let mut zeta = vec![0.0; n];
        for l in 0..self.measures.len() {
            let chol = cholesky_jittered(&k)?;
            let cross = self.cross_moments(&k, &chol, rng);
            let mut next = Matrix::filled(n, n, b2);
            for i in 0..n {
                for j in 0..=i {
                    next.add(i, j, v2 * self.location_eff[l] * cross.get(i, j));
                }
            }
            let act = self.activation;
            self.measures[l].for_each_jump(self.floors[l], rng, &mut |lam, r: &mut R| {
                for zi in z.iter_mut() {
                    *zi = std_normal(r);
                }
                chol.mul_into(&z, &mut zeta);
                for zi in zeta.iter_mut() {
                    *zi = act.apply(*zi);
                }
                let w = v2 * lam;
                for i in 0..n {
                    if zeta[i] == 0.0 {
                        continue;
                    }
                    for j in 0..=i {
                        next.add(i, j, w * zeta[i] * zeta[j]);
                    }
                }
            });
            for i in 0..n {
                for j in 0..i {
                    let s = next.get(i, j);
                    next.set(j, i, s);
                }
            }
            out.push(next.clone());
            k = next;
        }
        Ok(out)
    }

    /// E[φ(ζ_i) φ(ζ_j) | K] for ζ ~ N(0, K).
    fn cross_moments<R: RngCore + ?Sized>(&self, k: &Matrix, chol: &crate::linalg::Cholesky, rng: &mut R) -> Matrix {
        let n = k.rows;
        let mut m = Matrix::zeros(n, n);
        match self.activation {
            ActivationKind::Linear => return k.clone(),
            ActivationKind::Relu => {
                for i in 0..n {
                    for j in 0..n {
                        let s = (k.get(i, i) * k.get(j, j)).sqrt();
                        let v = if s > 0.0 {
                            s / (2.0 * PI) * kappa1((k.get(i, j) / s).clamp(-1.0, 1.0))
                        } else {
                            0.0
                        };
                        m.set(i, j, v);
                    }
                }
            }
            ActivationKind::LeakyRelu { beta } => {
                for i in 0..n {
                    for j in 0..n {
                        m.set(i, j, leaky_relu_cross_moment(beta, k.get(i, i), k.get(j, j), k.get(i, j)));
                    }
                }
            }
            ActivationKind::Tanh => {
                if self.location_eff.iter().all(|a| *a == 0.0) {
                    return m;
                }
                let mut z = vec![0.0; n];
                let mut y = vec![0.0; n];
                for _ in 0..CROSS_MOMENT_DRAWS {
                    for zi in z.iter_mut() {
                        *zi = std_normal(rng);
                    }
                    chol.mul_into(&z, &mut y);
                    for yi in y.iter_mut() {
                        *yi = yi.tanh();
                    }
                    for i in 0..n {
                        for j in 0..n {
                            m.add(i, j, y[i] * y[j]);
                        }
                    }
                }
                for v in m.data.iter_mut() {
                    *v /= CROSS_MOMENT_DRAWS as f64;
                }
            }
        }
        m
    }
}

/// One draw of the random kernels K^{(1)}, …, K^{(L+1)} on `inputs`.
pub fn sample_random_kernel<R: RngCore + ?Sized>(
    cfg: &NetworkConfig,
    inputs: &[Vec<f64>],
    rng: &mut R,
    atom_floor: Option<f64>,
) -> Result<Vec<Matrix>> {
    KernelSampler::new(cfg, atom_floor)?.draw(inputs, rng)
}

/// E|φ(ζ)|^{2α} for ζ ~ N(0, Σ) and positively homogeneous φ.
pub fn homogeneous_abs_moment(act: ActivationKind, alpha: f64, sigma: f64) -> Result<f64> {
    if !act.is_homogeneous() {
        return Err(Error::Unsupported(format!("{act:?} is not positively homogeneous")));
    }
    let (a, b) = act.slopes();
    // E|N|^{2α} = 2^α Γ(α+1/2)/√π
    let abs = sigma.powf(alpha) * 2f64.powf(alpha) * (ln_gamma(alpha + 0.5) - ln_gamma(0.5)).exp();
    Ok(0.5 * (a.abs().powf(2.0 * alpha) + b.abs().powf(2.0 * alpha)) * abs)
}

/// Scale r = σ_v² (E|φ(ζ)|^{2α})^{1/α} of the conditional Stable(α, r) law of
/// K^{(l+1)}(x,x) − σ_b² when ζ ~ N(0, Σ^{(l)}) and the layer's variances
/// converge to the unit stable law Stable(α, 1).
pub fn stable_case_scale(act: ActivationKind, sigma_v: f64, sigma: f64, alpha: f64) -> Result<f64> {
    ensure(alpha > 0.0 && alpha <= 1.0, || format!("stable exponent {alpha} outside (0, 1]"))?;
    match act {
        ActivationKind::Relu | ActivationKind::Linear | ActivationKind::LeakyRelu { .. } => {}
        ActivationKind::Tanh => return Err(Error::Unsupported("stable-case scale needs ReLU or linear activation".into())),
    }
    let m = homogeneous_abs_moment(act, alpha, sigma)?;
    Ok(sigma_v * sigma_v * m.powf(1.0 / alpha))
}

/// r^{(l+1)} for each Σ^{(l)} in a single-input chain Σ^{(1)}, …, Σ^{(L)}.
pub fn stable_case_scales(cfg: &NetworkConfig, sigma_chain: &[f64], alpha: f64) -> Result<Vec<f64>> {
    sigma_chain
        .iter()
        .take(cfg.depth())
        .map(|&s| stable_case_scale(cfg.activation, cfg.sigma_v, s, alpha))
        .collect()
}

/// The Lévy measure whose ID(0, ·) law is Stable(α, 1) (Laplace transform e^{−t^α}).
pub fn unit_stable_measure(alpha: f64) -> Result<Measure> {
    Measure::stable(alpha, (1.0 / crate::special::gamma(1.0 - alpha)).powf(1.0 / alpha))
}
