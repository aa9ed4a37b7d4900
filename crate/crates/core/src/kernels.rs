//! ReLU kernel moments κ_α and the second-layer ReLU kernel.
//!
//! For (X, Y) ~ N(0, Σ) with correlation ρ,
//! E[max(0,X)^α max(0,Y)^α] = (Σ₁₁Σ₂₂)^{α/2} κ_α(ρ) / (2π).

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::activation::ActivationKind;
use crate::error::{ensure, Error, Result};
use crate::levy::LevyTriple;
use crate::quad;
use crate::special::{elliptic_e, elliptic_k, gamma, ln_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelMomentQuery {
    pub alpha: f64,
    pub rho: f64,
}

impl KernelMomentQuery {
    pub fn new(alpha: f64, rho: f64) -> Result<Self> {
        ensure((-1.0..=1.0).contains(&rho), || format!("correlation {rho} outside [-1, 1]"))?;
        ensure(alpha >= 0.0 && alpha.is_finite(), || format!("alpha {alpha} must be nonnegative"))?;
        Ok(Self { alpha, rho })
    }
}

/// Orders with closed forms.
pub const CLOSED_FORM_ORDERS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

/// κ_α(ρ). Closed forms for α ∈ {0, 1/2, 1, 2}; other orders go through
/// [`j_alpha_quadrature`].
pub fn kappa(q: KernelMomentQuery) -> Result<f64> {
    let KernelMomentQuery { alpha, rho } = KernelMomentQuery::new(q.alpha, q.rho)?;
    let s = (1.0 - rho * rho).max(0.0).sqrt();
    let arc = FRAC_PI_2 + rho.asin();
    Ok(if alpha == 0.0 {
        arc
    } else if alpha == 1.0 {
        s + arc * rho
    } else if alpha == 2.0 {
        3.0 * s * rho + arc * (1.0 + 2.0 * rho * rho)
    } else if alpha == 0.5 {
        kappa_half(rho)?
    } else {
        j_alpha_quadrature(alpha, rho.acos())?
    })
}

fn kappa_half(rho: f64) -> Result<f64> {
    if rho >= 1.0 {
        // 2π E[max(0,X)] for unit variance
        return Ok((2.0 * PI).sqrt());
    }
    let m = 0.5 * (rho + 1.0);
    let e = elliptic_e(m)?.value;
    let k = elliptic_k(m)?.value;
    Ok((PI / 2.0).sqrt() * (2.0 * e - (1.0 - rho) * k))
}

pub fn kappa0(rho: f64) -> f64 {
    kappa(KernelMomentQuery { alpha: 0.0, rho }).expect("rho in [-1, 1]")
}

pub fn kappa1(rho: f64) -> f64 {
    kappa(KernelMomentQuery { alpha: 1.0, rho }).expect("rho in [-1, 1]")
}

pub fn kappa2(rho: f64) -> f64 {
    kappa(KernelMomentQuery { alpha: 2.0, rho }).expect("rho in [-1, 1]")
}

/// J_α(θ) = Γ(α+1) sin^{2α+1}θ ∫₀^{π/2} cos^α x / (1 − cos θ cos x)^{α+1} dx by adaptive quadrature.
///
/// The integrand concentrates at x = 0 as θ → 0, so the range is split at
/// the peak width; θ = 0 itself returns the limit 2^α Γ(α+1/2) √π.
pub fn j_alpha_quadrature(alpha: f64, theta: f64) -> Result<f64> {
    ensure(alpha >= 0.0, || format!("alpha {alpha} must be nonnegative"))?;
    ensure((0.0..=PI).contains(&theta), || format!("theta {theta} outside [0, π]"))?;
    if theta == 0.0 {
        return Ok(2f64.powf(alpha) * (ln_gamma(alpha + 0.5)).exp() * PI.sqrt());
    }
    let c = theta.cos();
    let s = theta.sin();
    if s == 0.0 {
        return Ok(0.0);
    }
    // 1 − c cos x written as (1 − c) + c(1 − cos x) = (1 − c) + 2c sin²(x/2) to avoid cancellation
    let one_minus_c = if c > 0.5 { 2.0 * (0.5 * theta).sin().powi(2) } else { 1.0 - c };
    let integrand = |x: f64| {
        let d = one_minus_c + 2.0 * c * (0.5 * x).sin().powi(2);
        x.cos().max(0.0).powf(alpha) / d.powf(alpha + 1.0)
    };
    // break the range where the peak width ~ θ sits
    let w = theta.min(FRAC_PI_2);
    let r1 = quad::integrate(integrand, 0.0, w, 0.0);
    let r2 = quad::integrate(integrand, w, FRAC_PI_2, 0.0);
    if !(r1.converged && r2.converged) {
        return Err(Error::Numerical(format!("J_{alpha}({theta}) quadrature did not converge")));
    }
    Ok(gamma(alpha + 1.0) * s.powf(2.0 * alpha + 1.0) * (r1.value + r2.value))
}

/// E[max(0, X)^{2α}] for X ~ N(0, Σ₁₁).
pub fn relu_moment(alpha: f64, sigma11: f64) -> Result<f64> {
    ensure(alpha >= 0.0 && sigma11 >= 0.0, || format!("relu moment needs alpha, sigma ≥ 0, got ({alpha}, {sigma11})"))?;
    if sigma11 == 0.0 {
        return Ok(if alpha == 0.0 { 0.5 } else { 0.0 });
    }
    Ok(sigma11.powf(alpha) * 2f64.powf(alpha - 1.0) * (ln_gamma(alpha + 0.5) - ln_gamma(0.5)).exp())
}

/// Second-layer ReLU GP kernel with σ_v²(a + M₁) = 2 and no bias.
pub fn gp_relu_kernel(x: &[f64], xp: &[f64], d_in: usize) -> Result<f64> {
    if x.len() != d_in || xp.len() != d_in {
        return Err(Error::Dimension {
            expected: d_in,
            got: if x.len() != d_in { x.len() } else { xp.len() },
        });
    }
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let np = xp.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nx == 0.0 || np == 0.0 {
        return Ok(0.0);
    }
    let dot: f64 = x.iter().zip(xp).map(|(a, b)| a * b).sum();
    let rho = (dot / (nx * np)).clamp(-1.0, 1.0);
    Ok(nx * np / d_in as f64 * kappa1(rho) / PI)
}

/// E[φ(X)φ(Y)] for leaky ReLU with negative slope β, (X, Y) ~ N(0, [[k11, k12], [k12, k22]]).
pub fn leaky_relu_cross_moment(beta: f64, k11: f64, k22: f64, k12: f64) -> f64 {
    let s = (k11 * k22).sqrt();
    if s == 0.0 {
        return 0.0;
    }
    let rho = (k12 / s).clamp(-1.0, 1.0);
    s / (2.0 * PI) * (kappa1(rho) * (1.0 + beta * beta) - 2.0 * beta * kappa1(-rho))
}

/// E[φ(X)φ(Y)] for (X, Y) ~ N(0, [[caa, cab], [cab, cbb]]) when φ is
/// positively homogeneous; `None` for tanh.
pub fn gaussian_cross_moment(act: ActivationKind, caa: f64, cbb: f64, cab: f64) -> Option<f64> {
    match act {
        ActivationKind::Linear => Some(cab),
        ActivationKind::Relu => Some(leaky_relu_cross_moment(0.0, caa, cbb, cab)),
        ActivationKind::LeakyRelu { beta } => Some(leaky_relu_cross_moment(beta, caa, cbb, cab)),
        ActivationKind::Tanh => None,
    }
}

/// Conditional mean and variance of the next-layer ReLU kernel entry
/// K^{(l+1)}(x, x′) given the 2×2 block of K^{(l)}.
pub fn kernel_cond_stats(k_prev: [[f64; 2]; 2], levy: &LevyTriple, sigma_v: f64, sigma_b: f64) -> Result<(f64, f64)> {
    let (k, kp, c) = (k_prev[0][0], k_prev[1][1], k_prev[0][1]);
    ensure(k >= 0.0 && kp >= 0.0 && c * c <= k * kp * (1.0 + 1e-12), || "previous kernel block is not PSD".into())?;
    let m1 = levy.measure.moment(1);
    let m2 = levy.measure.moment(2);
    if !m1.is_finite() || !m2.is_finite() {
        return Err(Error::Inapplicable("first or second moment of the Lévy measure is infinite".into()));
    }
    let s = (k * kp).sqrt();
    let rho = if s > 0.0 { (c / s).clamp(-1.0, 1.0) } else { 0.0 };
    let v2 = sigma_v * sigma_v;
    let mean = sigma_b * sigma_b + v2 * (m1 + levy.location_a) * s / (2.0 * PI) * kappa1(rho);
    let var = v2 * v2 * m2 * k * kp / (2.0 * PI) * kappa2(rho);
    Ok((mean, var))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_values() {
        assert!((kappa1(0.0) - 1.0).abs() < 1e-15);
        assert!((kappa1(1.0) - PI).abs() < 1e-15);
        assert!(kappa1(-1.0).abs() < 1e-15);
        assert!((kappa0(0.0) - FRAC_PI_2).abs() < 1e-15);
        assert!((kappa2(0.0) - FRAC_PI_2).abs() < 1e-15);
        let k = kappa(KernelMomentQuery { alpha: 0.5, rho: 1.0 }).unwrap();
        assert!((k - 2.506_628_274_631_000_5).abs() < 1e-12);
    }

    #[test]
    fn j_closed_forms() {
        assert!((j_alpha_quadrature(0.0, 1.0).unwrap() - (PI - 1.0)).abs() < 1e-8);
        assert!((j_alpha_quadrature(1.0, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn relu_moment_table() {
        assert_eq!(relu_moment(0.0, 1.0).unwrap(), 0.5);
        assert!((relu_moment(1.0, 3.0).unwrap() - 1.5).abs() < 1e-14);
        assert!((relu_moment(2.0, 1.0).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn gp_kernel_cases() {
        let x = [1.0, 1.0];
        assert!((gp_relu_kernel(&x, &x, 2).unwrap() - 1.0).abs() < 1e-15);
        let a = [2f64.sqrt(), 0.0];
        let b = [0.0, 2f64.sqrt()];
        assert!((gp_relu_kernel(&a, &b, 2).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!(gp_relu_kernel(&x, &[-1.0, -1.0], 2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn unsupported_query() {
        assert!(kappa(KernelMomentQuery { alpha: 1.0, rho: 1.5 }).is_err());
        assert!(kappa(KernelMomentQuery { alpha: -1.0, rho: 0.0 }).is_err());
    }
}
