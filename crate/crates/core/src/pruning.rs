//! Node pruning by per-node variance, the paired pruning-error Monte Carlo,
//! the ε-pruning error bound and compressibility ratios.
//!
//! Order statistics follow the descending convention λ_(1) ≥ λ_(2) ≥ …, so
//! κ-pruning removes every node with λ ≤ λ_(⌊κp⌋) and keeps about the top
//! κ-proportion. Ties with the threshold are pruned together.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::harness::try_map_replicates;
use crate::linalg::Matrix;
use crate::network::{expected_next_cov, forward, joint_output_chain, sample_lambdas, sample_network, variance_recursion, NetworkConfig, NetworkRealization};
use crate::rng::RngStream;
use crate::stats::mean_se;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PruningRule {
    /// Prune λ ≤ eps.
    Epsilon { eps: f64 },
    /// Prune λ ≤ λ_(⌊κp⌋).
    Kappa { kappa: f64 },
    /// Prune T_j ≤ T_(⌊κp⌋) with T_j = λ_j ‖V_{j,:}‖², the squared norm of the outgoing weights.
    OutgoingNormKappa { kappa: f64 },
}

impl PruningRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PruningRule::Epsilon { eps } => ensure(eps >= 0.0 && eps.is_finite(), || format!("epsilon {eps} must be nonnegative")),
            PruningRule::Kappa { kappa } | PruningRule::OutgoingNormKappa { kappa } => {
                ensure(kappa > 0.0 && kappa < 1.0, || format!("kappa {kappa} outside (0, 1)"))
            }
        }
    }

    fn uses_weights(&self) -> bool {
        matches!(self, PruningRule::OutgoingNormKappa { .. })
    }
}

/// The ⌊κp⌋-th largest value, or `None` when ⌊κp⌋ = 0 (nothing to compare against).
pub fn kappa_threshold(values: &[f64], kappa: f64) -> Option<f64> {
    let k = (kappa * values.len() as f64).floor() as usize;
    if k == 0 {
        return None;
    }
    let mut v = values.to_vec();
    let idx = k - 1;
    v.select_nth_unstable_by(idx, |a, b| b.total_cmp(a));
    Some(v[idx])
}

/// Keep mask for one layer: node j survives iff `score[j] > threshold`.
/// The flag is set when a κ rule degenerates to keep-all.
fn layer_mask(score: &[f64], rule: &PruningRule) -> (Vec<bool>, bool) {
    let threshold = match *rule {
        PruningRule::Epsilon { eps } => Some(eps),
        PruningRule::Kappa { kappa } | PruningRule::OutgoingNormKappa { kappa } => kappa_threshold(score, kappa),
    };
    match threshold {
        Some(t) => (score.iter().map(|s| *s > t).collect(), false),
        None => (vec![true; score.len()], true),
    }
}

fn apply_mask(lambdas: &[f64], keep: &[bool]) -> Vec<f64> {
    lambdas.iter().zip(keep).map(|(l, k)| if *k { *l } else { 0.0 }).collect()
}

/// λ with pruned nodes set to zero, for rules that rank by λ.
pub fn masked_lambdas(lambdas: &[Vec<f64>], rule: &PruningRule) -> Result<(Vec<Vec<f64>>, bool)> {
    rule.validate()?;
    if rule.uses_weights() {
        return Err(Error::Inapplicable("outgoing-norm pruning needs the weights; use prune()".into()));
    }
    let mut flagged = false;
    let out = lambdas
        .iter()
        .map(|lam| {
            let (keep, f) = layer_mask(lam, rule);
            flagged |= f;
            apply_mask(lam, &keep)
        })
        .collect();
    Ok((out, flagged))
}

/// T_j = λ_j Σ_k V_{jk}² for every hidden layer.
pub fn outgoing_norms(real: &NetworkRealization) -> Vec<Vec<f64>> {
    real.lambdas
        .iter()
        .enumerate()
        .map(|(l, lam)| {
            let v = &real.v[l + 1];
            lam.iter()
                .enumerate()
                .map(|(j, lj)| lj * v.row(j).iter().map(|x| x * x).sum::<f64>())
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pruned {
    pub realization: NetworkRealization,
    /// Surviving nodes per hidden layer.
    pub active: Vec<usize>,
    /// A κ rule had ⌊κp⌋ = 0 in some layer and kept everything there.
    pub keep_all_flagged: bool,
}

/// Mask a realization: pruned nodes get λ = 0, everything else is shared.
pub fn prune(real: &NetworkRealization, rule: &PruningRule) -> Result<Pruned> {
    rule.validate()?;
    let scores = if rule.uses_weights() { outgoing_norms(real) } else { real.lambdas.clone() };
    let mut flagged = false;
    let mut active = Vec::new();
    let mut out = real.clone();
    for (l, score) in scores.iter().enumerate() {
        let (keep, f) = layer_mask(score, rule);
        flagged |= f;
        active.push(keep.iter().filter(|k| **k).count());
        out.lambdas[l] = apply_mask(&real.lambdas[l], &keep);
    }
    Ok(Pruned {
        realization: out,
        active,
        keep_all_flagged: flagged,
    })
}

/// Monte-Carlo estimate of E[(Z^{(l)} − Z*^{(l)})²] for l = 2..L+1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedError {
    pub rule: PruningRule,
    /// (mean, standard error) per layer l = 2..L+1.
    pub error: Vec<(f64, f64)>,
    /// E[(Z^{(l)})²] of the unpruned network, same layers.
    pub second_moment: Vec<(f64, f64)>,
    /// Mean number of active nodes per hidden layer.
    pub active: Vec<(f64, f64)>,
    pub keep_all_flagged: usize,
}

struct Replicate {
    err: Vec<Vec<f64>>,
    second: Vec<f64>,
    active: Vec<Vec<f64>>,
    flagged: Vec<bool>,
}

/// Paired pruning error for several rules driven by the same draws.
///
/// Rules that rank by λ use the exact conditional Gaussian chain: given the
/// layer below, the unpruned and pruned pre-activations are jointly Gaussian,
/// and the reported value is the conditional mean of the squared gap, further
/// averaged over the Gaussians one layer down when φ has a closed-form cross
/// moment. With an
/// outgoing-norm rule the whole network is drawn and pushed forward instead.
pub fn paired_pruning_errors(
    cfg: &NetworkConfig,
    x: &[f64],
    rules: &[PruningRule],
    replicates: usize,
    family: RngStream,
    workers: usize,
) -> Result<Vec<PairedError>> {
    cfg.validate()?;
    ensure(replicates >= 1, || "need at least one replicate".into())?;
    ensure(!rules.is_empty(), || "need at least one pruning rule".into())?;
    for r in rules {
        r.validate()?;
    }
    let depth = cfg.depth();
    let by_weights = rules.iter().any(PruningRule::uses_weights);
    let reps = try_map_replicates(replicates, workers, family, |_, rng| {
        if by_weights {
            let real = sample_network(cfg, rng)?;
            let base = forward(&real, cfg, x)?;
            let second = (1..=depth).map(|l| mean_sq(&base[l])).collect();
            let mut rep = Replicate {
                err: Vec::new(),
                second,
                active: Vec::new(),
                flagged: Vec::new(),
            };
            for rule in rules {
                let p = prune(&real, rule)?;
                let z = forward(&p.realization, cfg, x)?;
                rep.err.push((1..=depth).map(|l| mean_sq_diff(&base[l], &z[l])).collect());
                rep.active.push(p.active.iter().map(|a| *a as f64).collect());
                rep.flagged.push(p.keep_all_flagged);
            }
            Ok(rep)
        } else {
            let lam = sample_lambdas(cfg, rng)?;
            let mut variants = vec![lam.clone()];
            let mut active = Vec::new();
            let mut flagged = Vec::new();
            for rule in rules {
                let (m, f) = masked_lambdas(&lam, rule)?;
                active.push(m.iter().map(|layer| layer.iter().filter(|v| **v > 0.0).count() as f64).collect());
                flagged.push(f);
                variants.push(m);
            }
            let draw = joint_output_chain(cfg, &variants, x, rng)?;
            // average each layer's covariance over the Gaussians of the layer below when possible
            let cov: Vec<Matrix> = (0..=depth)
                .map(|l| match l {
                    0 => draw.cond_cov[0].clone(),
                    _ => expected_next_cov(cfg, &variants, &draw.cond_cov[l - 1], l - 1).unwrap_or_else(|| draw.cond_cov[l].clone()),
                })
                .collect();
            let err = (1..=rules.len())
                .map(|r| {
                    (1..=depth)
                        .map(|l| (cov[l].get(0, 0) + cov[l].get(r, r) - 2.0 * cov[l].get(0, r)).max(0.0))
                        .collect()
                })
                .collect();
            Ok(Replicate {
                err,
                second: (1..=depth).map(|l| cov[l].get(0, 0)).collect(),
                active,
                flagged,
            })
        }
    })?;
    let column = |f: &dyn Fn(&Replicate) -> f64| -> (f64, f64) {
        let xs: Vec<f64> = reps.iter().map(f).collect();
        mean_se(&xs)
    };
    let second_moment: Vec<(f64, f64)> = (0..depth).map(|l| column(&|r| r.second[l])).collect();
    Ok(rules
        .iter()
        .enumerate()
        .map(|(i, rule)| PairedError {
            rule: *rule,
            error: (0..depth).map(|l| column(&|r| r.err[i][l])).collect(),
            second_moment: second_moment.clone(),
            active: (0..depth).map(|l| column(&|r| r.active[i][l])).collect(),
            keep_all_flagged: reps.iter().filter(|r| r.flagged[i]).count(),
        })
        .collect())
}

/// Single-rule convenience wrapper.
pub fn paired_pruning_error(
    cfg: &NetworkConfig,
    x: &[f64],
    rule: PruningRule,
    replicates: usize,
    family: RngStream,
    workers: usize,
) -> Result<PairedError> {
    Ok(paired_pruning_errors(cfg, x, &[rule], replicates, family, workers)?.remove(0))
}

fn mean_sq(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64
}

fn mean_sq_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Limit bound D(l)·ε^{1−(α+δ)} on E|Z^{(l+1)} − Z*^{(l+1)}|² for l = 1..L.
///
/// U^{(l)} is replaced by 2·E[Σ^{(l)}] when σ_b = 0 and by the recursive
/// second-moment bound otherwise; the supremum over widths is not computable.
pub fn epsilon_error_bound(cfg: &NetworkConfig, x: &[f64], eps: f64, alpha: f64, delta: f64) -> Result<Vec<f64>> {
    ensure((0.0..1.0).contains(&alpha), || format!("alpha {alpha} outside [0, 1)"))?;
    ensure(delta > 0.0 && delta < 1.0 - alpha, || format!("delta {delta} outside (0, 1 − alpha)"))?;
    ensure(eps > 0.0, || format!("epsilon {eps} must be positive"))?;
    if !cfg.activation.is_homogeneous() {
        return Err(Error::Unsupported("the pruning bound needs a positively homogeneous activation".into()));
    }
    let sig = variance_recursion(cfg, x)?;
    // sup over widths of E[Z²] is at most twice its wide limit, biases or not
    let u: Vec<f64> = sig.iter().map(|s| 2.0 * s).collect();
    let lip = cfg.activation.lipschitz();
    let g = cfg.sigma_v * cfg.sigma_v * lip * lip;
    let m1: Vec<f64> = cfg.variance_models.iter().map(|m| m.limit().measure.moment(1)).collect();
    let e = 1.0 - (alpha + delta);
    Ok((1..=cfg.depth())
        .map(|l| {
            // Σ_{i=0}^{l−1} (g M₁)^i U^{(l−i)}
            let mut sum = 0.0;
            let mut factor = 1.0;
            for i in 0..l {
                sum += factor * u[l - 1 - i];
                factor *= g * m1[l - 1 - i];
            }
            g / e * sum * eps.powf(e)
        })
        .collect())
}

/// Fraction of total mass carried by the values that κ-pruning removes:
/// Σ 1{v ≤ v_(⌊κp⌋)} v / Σ v. An all-zero vector gives 0.
pub fn compressibility_ratio(values: &[f64], kappa: f64) -> Result<f64> {
    ensure(!values.is_empty(), || "empty value vector".into())?;
    ensure(kappa > 0.0 && kappa < 1.0, || format!("kappa {kappa} outside (0, 1)"))?;
    ensure(values.iter().all(|v| *v >= 0.0), || "values must be nonnegative".into())?;
    let total: f64 = values.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let pruned: f64 = match kappa_threshold(values, kappa) {
        Some(t) => values.iter().filter(|v| **v <= t).sum(),
        None => 0.0,
    };
    Ok(pruned / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::ActivationKind;
    use crate::variance::make_model;
    use serde_json::json;

    fn cfg(name: &str, params: serde_json::Value, widths: Vec<usize>) -> NetworkConfig {
        let m = make_model(name, params).unwrap();
        NetworkConfig {
            d_in: 1,
            d_out: 1,
            variance_models: vec![m; widths.len()],
            widths,
            sigma_v: 1.0,
            sigma_b: 0.0,
            activation: ActivationKind::Relu,
        }
    }

    #[test]
    fn threshold_is_descending_order_statistic() {
        let v = [5.0, 1.0, 3.0, 2.0, 4.0];
        assert_eq!(kappa_threshold(&v, 0.4), Some(4.0));
        assert_eq!(kappa_threshold(&v, 0.1), None);
    }

    #[test]
    fn deterministic_ties_prune_everything() {
        let c = cfg("deterministic", json!({"c1": 2.0}), vec![1000]);
        let mut r = RngStream::new(1, 0).rng();
        let real = sample_network(&c, &mut r).unwrap();
        let p = prune(&real, &PruningRule::Kappa { kappa: 0.5 }).unwrap();
        assert_eq!(p.active, vec![0]);
        assert_eq!(compressibility_ratio(&real.lambdas[0], 0.5).unwrap(), 1.0);
    }

    #[test]
    fn bernoulli_epsilon_keeps_unit_nodes() {
        let c = cfg("bernoulli", json!({"c": 3.0}), vec![500]);
        let mut r = RngStream::new(2, 0).rng();
        let real = sample_network(&c, &mut r).unwrap();
        let p = prune(&real, &PruningRule::Epsilon { eps: 0.5 }).unwrap();
        let ones = real.lambdas[0].iter().filter(|l| **l == 1.0).count();
        assert_eq!(p.active[0], ones);
    }

    #[test]
    fn zero_epsilon_is_exact_identity() {
        let c = cfg("horseshoe", json!({"c": 1.0}), vec![50, 40]);
        let mut r = RngStream::new(3, 0).rng();
        let real = sample_network(&c, &mut r).unwrap();
        let p = prune(&real, &PruningRule::Epsilon { eps: 0.0 }).unwrap();
        assert_eq!(forward(&real, &c, &[0.7]).unwrap(), forward(&p.realization, &c, &[0.7]).unwrap());
        let e = paired_pruning_error(&c, &[0.7], PruningRule::Epsilon { eps: 0.0 }, 20, RngStream::new(3, 1), 1).unwrap();
        assert!(e.error.iter().all(|(m, _)| *m == 0.0));
    }

    #[test]
    fn ratio_edge_cases() {
        assert_eq!(compressibility_ratio(&[0.0; 4], 0.5).unwrap(), 0.0);
        assert!(compressibility_ratio(&[], 0.5).is_err());
        assert!(compressibility_ratio(&[1.0], 1.0).is_err());
    }

    #[test]
    fn bound_grows_with_depth() {
        let c = cfg("generalized_bfry", json!({"eta": 4.0, "alpha": 0.5, "tau": 5.0}), vec![100, 100, 100]);
        let b = epsilon_error_bound(&c, &[1.0], 1e-3, 0.5, 0.1).unwrap();
        assert!(b.windows(2).all(|w| w[1] > w[0]));
        assert!(epsilon_error_bound(&c, &[1.0], 1e-3, 0.5, 0.6).is_err());
    }
}
