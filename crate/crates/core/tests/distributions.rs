mod common;

use std::f64::consts::{E, FRAC_PI_2, PI};

use common::{ks, mean_se, rng, simpson, simpson_to_inf};
use mogp_core::dist::*;
use mogp_core::special::{elliptic_e, elliptic_k, lower_incomplete_gamma, upper_incomplete_gamma};
use mogp_core::Error;

const N: usize = 1_000_000;

#[test]
fn standard_normal_moments() {
    let mut r = rng("normal");
    let xs: Vec<f64> = (0..N).map(|_| std_normal(&mut r)).collect();
    let (m, _) = mean_se(&xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (N - 1) as f64;
    assert!(m.abs() < 0.005, "mean {m}");
    assert!((var - 1.0).abs() < 0.01, "variance {var}");
}

#[test]
fn pareto_by_inversion() {
    assert_eq!(pareto_from_uniform(0.5, 1.0, 1.0), 2.0);
    let mut r = rng("pareto");
    let xs: Vec<f64> = (0..100_000).map(|_| sample_pareto(2.0, 1.5, &mut r).unwrap()).collect();
    let d = ks(&xs, |x| if x < 1.5 { 0.0 } else { 1.0 - (1.5 / x).powi(2) });
    assert!(d < 1.628 / 100_000f64.sqrt(), "KS {d}");
}

#[test]
fn inverse_gamma_mean() {
    let mut r = rng("inverse gamma");
    let xs: Vec<f64> = (0..N).map(|_| sample_inverse_gamma(2.0, 2.0, &mut r).unwrap()).collect();
    let (m, _) = mean_se(&xs);
    assert!((m - 2.0).abs() < 0.02, "mean {m}");
}

#[test]
fn half_cauchy_median_is_one() {
    let mut r = rng("half cauchy");
    let above = (0..N).filter(|_| sample_half_cauchy(&mut r) > 1.0).count() as f64 / N as f64;
    assert!((above - 0.5).abs() < 0.002, "fraction {above}");
}

#[test]
fn gamma_and_beta_match_closed_cdfs() {
    let mut r = rng("gamma beta");
    let n = 100_000;
    let crit = 1.628 / (n as f64).sqrt();
    let g: Vec<f64> = (0..n).map(|_| sample_gamma(2.0, 3.0, &mut r).unwrap()).collect();
    let d = ks(&g, |x| 1.0 - (-3.0 * x).exp() * (1.0 + 3.0 * x));
    assert!(d < crit, "gamma KS {d}");
    // Beta(2, 3): F(x) = 6x² − 8x³ + 3x⁴
    let b: Vec<f64> = (0..n).map(|_| sample_beta(2.0, 3.0, &mut r).unwrap()).collect();
    let d = ks(&b, |x| 6.0 * x * x - 8.0 * x.powi(3) + 3.0 * x.powi(4));
    assert!(d < crit, "beta KS {d}");
    // small shapes: Beta(1/2, 1/2) is the arcsine law
    let b: Vec<f64> = (0..n).map(|_| sample_beta(0.5, 0.5, &mut r).unwrap()).collect();
    let d = ks(&b, |x| 2.0 / PI * x.sqrt().asin());
    assert!(d < crit, "arcsine KS {d}");
}

#[test]
fn gamma_shape_below_one() {
    // Gamma(1/2, 1/2) is χ²₁: P(X ≤ x) = 2Φ(√x) − 1
    let mut r = rng("chi2");
    let n = 100_000;
    let xs: Vec<f64> = (0..n).map(|_| sample_gamma(0.5, 0.5, &mut r).unwrap()).collect();
    let d = ks(&xs, |x| 2.0 * common::phi(x.sqrt()) - 1.0);
    assert!(d < 1.628 / (n as f64).sqrt(), "KS {d}");
}

#[test]
fn parameter_domains_are_enforced() {
    let mut r = rng("domains");
    assert!(matches!(sample_gamma(0.0, 1.0, &mut r), Err(Error::Domain(_))));
    assert!(matches!(sample_beta(1.0, -1.0, &mut r), Err(Error::Domain(_))));
    assert!(matches!(sample_inverse_gamma(2.0, 0.0, &mut r), Err(Error::Domain(_))));
    assert!(matches!(sample_pareto(-1.0, 1.0, &mut r), Err(Error::Domain(_))));
    assert!(sample_etbfry(1.0, 1.0, 1.0, &mut r).is_err());
    assert!(sample_etbfry(0.5, 0.0, 1.0, &mut r).is_err());
}

/// CDF of etBFRY(1/2, t, ξ) by quadrature of its density after s = u².
fn etbfry_half_cdf(t: f64, xi: f64, x: f64) -> f64 {
    let norm = PI.sqrt() * ((t + xi).sqrt() - xi.sqrt());
    let f = |u: f64| {
        if u == 0.0 {
            t
        } else {
            let s = u * u;
            -(-t * s).exp_m1() * (-xi * s).exp() / (u * u)
        }
    };
    // 2α u^{-2}(1 − e^{−tu²})e^{−ξu²} with α = 1/2
    simpson(f, 0.0, x.sqrt(), 4000) / norm
}

#[test]
fn etbfry_against_quadrature() {
    for &(t, xi) in &[(1.0, 1.0), (5.0, 0.2), (0.3, 2.0)] {
        let law = EtBfry::new(0.5, t, xi).unwrap();
        for &x in &[0.01, 0.3, 1.0, 4.0] {
            let q = etbfry_half_cdf(t, xi, x);
            assert!((law.cdf(x) - q).abs() < 1e-7, "t={t} ξ={xi} x={x}: {} vs {q}", law.cdf(x));
        }
        let mut r = rng("etbfry");
        let n = 50_000;
        let crit = 1.628 / (n as f64).sqrt();
        let xs: Vec<f64> = (0..n).map(|_| law.sample(&mut r)).collect();
        let d = ks(&xs, |x| etbfry_half_cdf(t, xi, x.min(60.0)));
        assert!(d < crit, "mixture sampler KS {d}");
        let ys: Vec<f64> = (0..5_000).map(|_| law.sample_by_inversion(&mut r)).collect();
        let d = ks(&ys, |x| law.cdf(x));
        assert!(d < 1.628 / 5_000f64.sqrt(), "inversion sampler KS {d}");
    }
}

#[test]
fn etbfry_tail_scaling_without_tilt() {
    // as ξ → 0 and e^{−ts} negligible, P(S > s) ∝ s^{−α}
    let law = EtBfry::new(0.5, 1.0, 1e-9).unwrap();
    let ratio = law.survival(10.0) / law.survival(20.0);
    // ∫_s^∞ x^{−3/2} g(x) dx = 2 s^{−1/2} ∫₀¹ g(s/v²) dv
    let g = |x: f64| -(-x).exp_m1() * (-1e-9 * x).exp();
    let tail = |s: f64| 2.0 / s.sqrt() * simpson(|v: f64| if v == 0.0 { 0.0 } else { g(s / (v * v)) }, 0.0, 1.0, 20_000);
    let x = tail(10.0) / tail(20.0);
    assert!((ratio - x).abs() < 1e-3 * x, "ratio {ratio} vs quadrature {x}");
    assert!((ratio - 2f64.sqrt()).abs() < 1e-3, "ratio {ratio}");
}

#[test]
fn elliptic_integrals() {
    assert!((elliptic_k(0.0).unwrap().value - FRAC_PI_2).abs() < 1e-15);
    assert!((elliptic_e(0.0).unwrap().value - FRAC_PI_2).abs() < 1e-15);
    assert!((elliptic_e(1.0).unwrap().value - 1.0).abs() < 1e-15);
    for &m in &[0.1, 0.5, 0.9, 0.99] {
        let k = simpson(|t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 20_000);
        let e = simpson(|t: f64| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 20_000);
        let (kk, ee) = (elliptic_k(m).unwrap(), elliptic_e(m).unwrap());
        assert!((kk.value - k).abs() < 1e-10, "K({m}) {} vs {k}", kk.value);
        assert!((ee.value - e).abs() < 1e-10, "E({m}) {} vs {e}", ee.value);
        assert!(kk.abs_error_estimate <= 1e-12 && ee.abs_error_estimate <= 1e-12);
    }
    assert!(matches!(elliptic_k(1.0), Err(Error::Domain(_))));
    assert!(elliptic_e(1.5).is_err());
}

#[test]
fn incomplete_gamma_identities() {
    assert!((upper_incomplete_gamma(1.0, 2.0).unwrap() - (-2f64).exp()).abs() < 1e-15);
    assert!((lower_incomplete_gamma(1.0, 1.0).unwrap() - (1.0 - 1.0 / E)).abs() < 1e-15);
    let half = simpson_to_inf(|t: f64| t.powf(-0.5) * (-t).exp(), 1.0, 40_000);
    let up_half = upper_incomplete_gamma(0.5, 1.0).unwrap();
    assert!((up_half - half).abs() < 1e-10, "Γ(1/2, 1) {up_half} vs {half}");
    // Γ(s+1, x) = sΓ(s, x) + x^s e^{−x}
    let neg = upper_incomplete_gamma(-0.5, 1.0).unwrap();
    let residual = up_half - (-0.5 * neg + (-1f64).exp());
    assert!(residual.abs() < 1e-10, "recurrence residual {residual}");
    for &(s, x) in &[(2.5, 0.7), (0.3, 4.0), (-1.5, 0.2), (-0.25, 3.0)] {
        let lhs = upper_incomplete_gamma(s + 1.0, x).unwrap();
        let rhs = s * upper_incomplete_gamma(s, x).unwrap() + x.powf(s) * (-x).exp();
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "s={s} x={x}");
    }
    assert!(lower_incomplete_gamma(-1.0, 1.0).is_err());
}
