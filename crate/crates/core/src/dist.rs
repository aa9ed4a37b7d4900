//! Scalar samplers and the distribution functions used as their oracles.
//!
//! Gamma variates use Marsaglia–Tsang squeeze/rejection for shape ≥ 1 and
//! the boost G(a) = G(a+1)·U^{1/a} below one. Normal and exponential
//! variates come from the ziggurat samplers in `rand_distr`.

use rand::RngCore;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};

use crate::error::{ensure, Result};
use crate::quad;
use crate::rng::open01;
use crate::special::{gamma, ln_gamma, reg_lower_gamma, upper_gamma_raw};

#[inline]
pub fn std_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let mut r = rng;
    StandardNormal.sample(&mut r)
}

#[inline]
pub fn exp1<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let mut r = rng;
    Exp1.sample(&mut r)
}

fn gamma_unit_ge1<R: RngCore + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = std_normal(rng);
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = open01(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// log of a Gamma(shape, 1) draw; stays finite for very small shapes.
pub fn ln_gamma_variate<R: RngCore + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape >= 1.0 {
        gamma_unit_ge1(shape, rng).ln()
    } else {
        gamma_unit_ge1(shape + 1.0, rng).ln() + open01(rng).ln() / shape
    }
}

/// Gamma(shape, rate) draw (mean shape/rate).
pub fn sample_gamma<R: RngCore + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    ensure(shape > 0.0 && rate > 0.0, || format!("gamma(shape={shape}, rate={rate})"))?;
    Ok(gamma_unchecked(shape, rate, rng))
}

#[inline]
pub(crate) fn gamma_unchecked<R: RngCore + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> f64 {
    if shape >= 1.0 {
        gamma_unit_ge1(shape, rng) / rate
    } else {
        gamma_unit_ge1(shape + 1.0, rng) * open01(rng).powf(1.0 / shape) / rate
    }
}

pub fn sample_beta<R: RngCore + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    ensure(a > 0.0 && b > 0.0, || format!("beta(a={a}, b={b})"))?;
    Ok(beta_unchecked(a, b, rng))
}

#[inline]
pub(crate) fn beta_unchecked<R: RngCore + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    let la = ln_gamma_variate(a, rng);
    let lb = ln_gamma_variate(b, rng);
    // X/(X+Y) computed in log space so tiny shapes do not produce 0/0
    if la >= lb {
        1.0 / (1.0 + (lb - la).exp())
    } else {
        let r = (la - lb).exp();
        r / (1.0 + r)
    }
}

/// Inverse-gamma with the given shape and scale (density ∝ x^{-shape-1} e^{-scale/x}).
pub fn sample_inverse_gamma<R: RngCore + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> Result<f64> {
    ensure(shape > 0.0 && scale > 0.0, || format!("inverse gamma(shape={shape}, scale={scale})"))?;
    Ok(scale / gamma_unchecked(shape, 1.0, rng))
}

/// |Cauchy(0,1)|.
#[inline]
pub fn sample_half_cauchy<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (std::f64::consts::FRAC_PI_2 * open01(rng)).tan()
}

/// Pareto(τ, c) by inversion of a uniform.
#[inline]
pub fn pareto_from_uniform(u: f64, tau: f64, c: f64) -> f64 {
    c * u.powf(-1.0 / tau)
}

pub fn sample_pareto<R: RngCore + ?Sized>(tau: f64, c: f64, rng: &mut R) -> Result<f64> {
    ensure(tau > 0.0 && c > 0.0, || format!("pareto(tau={tau}, c={c})"))?;
    Ok(pareto_from_uniform(open01(rng), tau, c))
}

pub fn sample_poisson<R: RngCore + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let mut r = rng;
    let d = Poisson::new(mean).expect("positive finite Poisson mean");
    d.sample(&mut r) as u64
}

/// Parameters of the exponentially tilted BFRY law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtBfry {
    pub alpha: f64,
    pub t: f64,
    pub xi: f64,
}

impl EtBfry {
    pub fn new(alpha: f64, t: f64, xi: f64) -> Result<Self> {
        ensure(alpha > 0.0 && alpha < 1.0 && t > 0.0 && xi > 0.0, || {
            format!("etBFRY(alpha={alpha}, t={t}, xi={xi})")
        })?;
        Ok(Self { alpha, t, xi })
    }

    fn norm(&self) -> f64 {
        gamma(1.0 - self.alpha) * ((self.t + self.xi).powf(self.alpha) - self.xi.powf(self.alpha))
    }

    pub fn density(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let a = self.alpha;
        a * s.powf(-1.0 - a) * (-self.xi * s).exp() * -(-self.t * s).exp_m1() / self.norm()
    }

    /// P(S > s) = α[ξ^α Γ(-α, ξs) − (t+ξ)^α Γ(-α, (t+ξ)s)] / (Γ(1−α)((t+ξ)^α − ξ^α)).
    pub fn survival(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 1.0;
        }
        let a = self.alpha;
        let txi = self.t + self.xi;
        let v = a * (self.xi.powf(a) * upper_gamma_raw(-a, self.xi * s)
            - txi.powf(a) * upper_gamma_raw(-a, txi * s))
            / self.norm();
        v.clamp(0.0, 1.0)
    }

    pub fn cdf(&self, s: f64) -> f64 {
        1.0 - self.survival(s)
    }

    /// Exact draw from the gamma mixture: U has density ∝ (ξ+u)^{α−1} on (0,t)
    /// and S | U ~ Gamma(1−α, rate ξ+U).
    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let a = self.alpha;
        let lo = self.xi.powf(a);
        let hi = (self.t + self.xi).powf(a);
        let rate = (lo + open01(rng) * (hi - lo)).powf(1.0 / a);
        gamma_unchecked(1.0 - a, rate, rng)
    }

    /// Draw by inverting the survival function to 1e-12 relative precision.
    pub fn sample_by_inversion<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = open01(rng);
        let scale = 1.0 / (self.t + self.xi);
        quad::invert_decreasing(|s| self.survival(s), u, scale, Some(|s| self.density(s)), 1e-12)
    }
}

/// One draw from etBFRY(α, t, ξ).
pub fn sample_etbfry<R: RngCore + ?Sized>(alpha: f64, t: f64, xi: f64, rng: &mut R) -> Result<f64> {
    Ok(EtBfry::new(alpha, t, xi)?.sample(rng))
}

/// CDF of Gamma(shape, rate).
pub fn gamma_cdf(shape: f64, rate: f64, x: f64) -> f64 {
    reg_lower_gamma(shape, rate * x)
}

/// CDF of the inverse-gamma(shape, scale).
pub fn inverse_gamma_cdf(shape: f64, scale: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        1.0 - reg_lower_gamma(shape, scale / x)
    }
}

pub fn beta_ln_density(a: f64, b: f64, x: f64) -> f64 {
    (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn pareto_inversion_example() {
        assert_eq!(pareto_from_uniform(0.5, 1.0, 1.0), 2.0);
    }

    #[test]
    fn domain_errors() {
        let mut r = RngStream::new(1, 0).rng();
        assert!(sample_gamma(0.0, 1.0, &mut r).is_err());
        assert!(sample_beta(1.0, -1.0, &mut r).is_err());
        assert!(sample_pareto(1.0, 0.0, &mut r).is_err());
        assert!(EtBfry::new(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn tiny_beta_shape_is_finite() {
        let mut r = RngStream::new(2, 0).rng();
        for _ in 0..1000 {
            let x = beta_unchecked(1e-4, 0.5, &mut r);
            assert!((0.0..=1.0).contains(&x));
        }
    }

    #[test]
    fn etbfry_survival_matches_quadrature() {
        let d = EtBfry::new(0.5, 10.0, 1.0).unwrap();
        for &s in &[0.01, 0.1, 1.0, 3.0] {
            let q = quad::integrate_positive(|x| d.density(x), s, f64::INFINITY, 1e-12).value;
            assert!((q - d.survival(s)).abs() < 1e-9, "s={s}: {q} vs {}", d.survival(s));
        }
    }
}
