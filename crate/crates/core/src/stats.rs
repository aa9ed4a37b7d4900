//! Statistical oracles: goodness-of-fit distances, tail-index estimation,
//! order-statistic laws and the report type every experiment returns.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{Measure, PointProcessSample};
use crate::special::reg_upper_gamma;

/// Sum with O(log n) error growth whose result depends only on the input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let m = mean(xs);
    if n < 2 {
        return (m, f64::NAN);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    (m, (var / n as f64).sqrt())
}

/// Unbiased sample variance with the standard error of that variance
/// (from the fourth central moment).
pub fn variance_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = mean(xs);
    let d2: Vec<f64> = xs.iter().map(|x| (x - m).powi(2)).collect();
    let d4: Vec<f64> = xs.iter().map(|x| (x - m).powi(4)).collect();
    let m2 = pairwise_sum(&d2) / n;
    let m4 = pairwise_sum(&d4) / n;
    let var = m2 * n / (n - 1.0);
    (var, ((m4 - m2 * m2) / n).max(0.0).sqrt())
}

/// Pearson correlation.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (mx, my) = (mean(x), mean(y));
    let sxy: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let sxx: Vec<f64> = x.iter().map(|a| (a - mx).powi(2)).collect();
    let syy: Vec<f64> = y.iter().map(|b| (b - my).powi(2)).collect();
    pairwise_sum(&sxy) / (pairwise_sum(&sxx) * pairwise_sum(&syy)).sqrt()
}

/// Ordinary least squares y = intercept + slope x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub sse: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let slope_se = if n > 2.0 { (sse / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    LinearFit {
        slope,
        intercept,
        slope_se,
        sse,
    }
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// sup_x |F_n(x) − F(x)| for a continuous reference CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let s = sorted(samples);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < s.len() {
        // ties: the empirical CDF jumps once by their total weight
        let mut j = i;
        while j + 1 < s.len() && s[j + 1] == s[i] {
            j += 1;
        }
        let f = cdf(s[i]);
        let f_below = cdf(next_below(s[i]));
        d = d.max((f_below - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    d
}

fn next_below(x: f64) -> f64 {
    if x.is_nan() || x == f64::NEG_INFINITY {
        x
    } else if x == 0.0 {
        -f64::from_bits(1)
    } else if x > 0.0 {
        f64::from_bits(x.to_bits() - 1)
    } else {
        f64::from_bits(x.to_bits() + 1)
    }
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic one-sample KS critical value at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Asymptotic two-sample KS critical value at the 1% level.
pub fn ks_two_sample_critical_1pct(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    1.628 * ((n + m) / (n * m)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of observed counts against cell probabilities.
/// Cells with expected count below 5 are merged into their right neighbour.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if observed.len() != probs.len() {
        return Err(Error::Dimension {
            expected: probs.len(),
            got: observed.len(),
        });
    }
    let n: u64 = observed.iter().sum();
    let nf = n as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&obs, &p) in observed.iter().zip(probs) {
        o += obs as f64;
        e += p * nf;
        if e >= 5.0 {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    if cells.len() < 2 {
        return Err(Error::Insufficient("fewer than two chi-square cells".into()));
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells.len() - 1;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: reg_upper_gamma(dof as f64 / 2.0, statistic / 2.0),
    })
}

/// Chi-square test of integer counts against Poisson(mean).
pub fn poisson_gof(counts: &[u64], mean: f64) -> Result<ChiSquare> {
    let top = counts.iter().copied().max().unwrap_or(0) as usize;
    let cells = top.max((mean + 6.0 * mean.sqrt()) as usize) + 1;
    let mut observed = vec![0u64; cells + 1];
    for &c in counts {
        observed[c as usize] += 1;
    }
    let mut probs = Vec::with_capacity(cells + 1);
    let mut pk = (-mean).exp();
    let mut acc = 0.0;
    for k in 0..cells {
        probs.push(pk);
        acc += pk;
        pk *= mean / (k + 1) as f64;
    }
    probs.push((1.0 - acc).max(0.0));
    chi_square_gof(&observed, &probs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub exponent: f64,
    pub std_error: f64,
    pub top_fraction: f64,
    pub tail_points: usize,
}

/// Hill estimator of the tail index from the top `top_fraction` of the sample.
pub fn tail_exponent(samples: &[f64], top_fraction: f64) -> Result<TailEstimate> {
    if !(top_fraction > 0.0 && top_fraction <= 0.2) {
        return Err(Error::Domain(format!("top fraction {top_fraction} outside (0, 0.2]")));
    }
    let mut s: Vec<f64> = samples.iter().copied().filter(|x| *x > 0.0).collect();
    let k = (top_fraction * samples.len() as f64).floor() as usize;
    if k < 10 || s.len() <= k {
        return Err(Error::Insufficient(format!("{k} tail points for the Hill estimator")));
    }
    s.sort_by(|a, b| b.total_cmp(a));
    let threshold = s[k].ln();
    let logs: Vec<f64> = s[..k].iter().map(|x| x.ln() - threshold).collect();
    let h = pairwise_sum(&logs) / k as f64;
    let exponent = 1.0 / h;
    Ok(TailEstimate {
        exponent,
        std_error: exponent / (k as f64).sqrt(),
        top_fraction,
        tail_points: k,
    })
}

/// Hill estimates over several thresholds, plus a flag raised when they
/// disagree by more than 20% (no stable power law in range).
pub fn tail_exponent_sweep(samples: &[f64], fractions: &[f64]) -> Result<(Vec<TailEstimate>, bool)> {
    let est = fractions
        .iter()
        .map(|&f| tail_exponent(samples, f))
        .collect::<Result<Vec<_>>>()?;
    let lo = est.iter().map(|e| e.exponent).fold(f64::INFINITY, f64::min);
    let hi = est.iter().map(|e| e.exponent).fold(0.0, f64::max);
    Ok((est, hi > 1.2 * lo))
}

/// F_k(x) = P(k-th largest atom ≤ x) = e^{−ρ̄(x)} Σ_{i<k} ρ̄(x)^i / i!.
pub fn order_stat_cdf(m: &Measure, k: usize, x: f64) -> Result<f64> {
    if m.is_trivial() {
        return Err(Error::Inapplicable("order statistics of a trivial measure".into()));
    }
    if k == 0 {
        return Err(Error::Domain("order statistic index starts at 1".into()));
    }
    if x <= 0.0 && m.total_mass().is_infinite() {
        return Ok(0.0);
    }
    let r = m.tail(x.max(0.0));
    if r.is_infinite() {
        return Ok(0.0);
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for i in 1..k {
        term *= r / i as f64;
        sum += term;
    }
    Ok((-r).exp() * sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// Slope of ln λ̃_(k) against ln k.
    pub power_slope: f64,
    pub power_slope_se: f64,
    /// −1/α, the slope expected for a regularly varying tail at 0.
    pub target_slope: f64,
    /// Slope of ln λ̃_(k) against k (geometric decay rate).
    pub geometric_rate: f64,
    pub power_sse: f64,
    pub geometric_sse: f64,
    pub points: usize,
}

impl DecayReport {
    pub fn geometric_fits_better(&self) -> bool {
        self.geometric_sse < self.power_sse
    }
}

/// Log-log regression of the ordered atoms on their index over the middle
/// of the index range, compared with −1/α. α = 0 means a slowly varying tail,
/// for which the target slope is reported as −∞.
pub fn small_weight_decay_check(atoms: &PointProcessSample, alpha_at_zero: f64) -> Result<DecayReport> {
    let n = atoms.atoms.len();
    if n < 50 {
        return Err(Error::Insufficient(format!("{n} atoms, need at least 50")));
    }
    if !(0.0..1.0).contains(&alpha_at_zero) {
        return Err(Error::Domain(format!("alpha {alpha_at_zero} outside [0, 1)")));
    }
    let (lo, hi) = (n / 10, n / 2);
    let idx: Vec<f64> = (lo..hi).map(|k| (k + 1) as f64).collect();
    let ln_idx: Vec<f64> = idx.iter().map(|k| k.ln()).collect();
    let ln_atoms: Vec<f64> = atoms.atoms[lo..hi].iter().map(|x| x.ln()).collect();
    let pow = linear_fit(&ln_idx, &ln_atoms);
    let geo = linear_fit(&idx, &ln_atoms);
    Ok(DecayReport {
        power_slope: pow.slope,
        power_slope_se: pow.slope_se,
        target_slope: if alpha_at_zero > 0.0 { -1.0 / alpha_at_zero } else { f64::NEG_INFINITY },
        geometric_rate: geo.slope,
        power_sse: pow.sse,
        geometric_sse: geo.sse,
        points: hi - lo,
    })
}

/// Empirical quantile by linear interpolation between order statistics.
pub fn quantile(samples: &[f64], q: f64) -> f64 {
    let s = sorted(samples);
    if s.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (s.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < s.len() {
        s[i] * (1.0 - frac) + s[i + 1] * frac
    } else {
        s[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// |value − target| ≤ tolerance.
    Within,
    /// value < target + tolerance.
    Below,
    /// value > target − tolerance.
    Above,
}

/// JSON has no NaN or infinity; they are written as `null` and read back as NaN.
fn nullable_f64<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub label: String,
    #[serde(deserialize_with = "nullable_f64")]
    pub value: f64,
    #[serde(deserialize_with = "nullable_f64")]
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    #[serde(deserialize_with = "nullable_f64")]
    pub value: f64,
    #[serde(deserialize_with = "nullable_f64")]
    pub target: f64,
    #[serde(deserialize_with = "nullable_f64")]
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn new(label: impl Into<String>, value: f64, target: f64, tolerance: f64, comparison: Comparison) -> Self {
        let mut c = Check {
            label: label.into(),
            value,
            target,
            tolerance,
            comparison,
            pass: false,
        };
        c.pass = c.recompute();
        c
    }

    pub fn within(label: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self::new(label, value, target, tolerance, Comparison::Within)
    }

    pub fn below(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(label, value, bound, 0.0, Comparison::Below)
    }

    pub fn above(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(label, value, bound, 0.0, Comparison::Above)
    }

    /// The pass flag as implied by the stored fields.
    pub fn recompute(&self) -> bool {
        match self.comparison {
            Comparison::Within => (self.value - self.target).abs() <= self.tolerance,
            Comparison::Below => self.value < self.target + self.tolerance,
            Comparison::Above => self.value > self.target - self.tolerance,
        }
    }
}

/// Result bundle of a seeded Monte-Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub config: serde_json::Value,
    pub estimates: Vec<Estimate>,
    pub checks: Vec<Check>,
    pub master_seed: u64,
    pub replicate_count: usize,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>, config: serde_json::Value, master_seed: u64, replicate_count: usize) -> Self {
        Self {
            name: name.into(),
            config,
            estimates: Vec::new(),
            checks: Vec::new(),
            master_seed,
            replicate_count,
        }
    }

    pub fn estimate(&mut self, label: impl Into<String>, value: f64, std_error: f64) {
        self.estimates.push(Estimate {
            label: label.into(),
            value,
            std_error,
        });
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn flags_consistent(&self) -> bool {
        self.checks.iter().all(|c| c.pass == c.recompute())
    }

    pub fn merge(&mut self, other: ExperimentReport) {
        self.estimates.extend(other.estimates);
        self.checks.extend(other.checks);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::norm_cdf;

    #[test]
    fn ks_shifted_normal() {
        // sup |Φ(x) − Φ(x − 1)| is attained at x = 1/2
        let n = 20_001;
        let xs: Vec<f64> = (0..n).map(|i| crate::quad::bisect(|z| norm_cdf(z) - (i as f64 + 0.5) / n as f64, -10.0, 10.0, 1e-12)).collect();
        let d = ks_distance(&xs, |x| norm_cdf(x - 1.0));
        assert!((d - (norm_cdf(0.5) - norm_cdf(-0.5))).abs() < 1e-3);
    }

    #[test]
    fn ks_point_mass() {
        let xs = vec![2.0; 100];
        assert_eq!(ks_distance(&xs, |x| if x >= 2.0 { 1.0 } else { 0.0 }), 0.0);
    }

    #[test]
    fn pairwise_sum_is_accurate() {
        let xs = vec![0.1; 1_000_000];
        assert!((pairwise_sum(&xs) - 100_000.0).abs() < 1e-8);
    }

    #[test]
    fn order_stat_dominance() {
        let m = Measure::horseshoe(4.0).unwrap();
        assert!((order_stat_cdf(&m, 1, 4.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
        for &x in &[0.1, 1.0, 10.0] {
            assert!(order_stat_cdf(&m, 2, x).unwrap() >= order_stat_cdf(&m, 1, x).unwrap());
        }
        assert_eq!(order_stat_cdf(&m, 1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn check_flags_recompute() {
        let c = Check::within("x", 1.0, 1.05, 0.1);
        assert!(c.pass && c.recompute());
        assert!(!Check::below("y", 0.03, 0.02).pass);
    }

    #[test]
    fn chi_square_uniform() {
        let r = chi_square_gof(&[100, 100, 100, 100], &[0.25; 4]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.dof, 3);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }
}
