mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::simpson;
use mogp_core::kernels::*;
use mogp_core::{LevyTriple, Measure};
use proptest::prelude::*;

const ALPHAS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

/// 2π E[(X⁺)^α (Y⁺)^α] for unit normals with correlation ρ, in polar
/// coordinates: 2^α Γ(α+1) ∫_{θ−π/2}^{π/2} cos^α t cos^α(t−θ) dt, θ = arccos ρ.
fn kappa_oracle(alpha: f64, rho: f64) -> f64 {
    let theta = rho.clamp(-1.0, 1.0).acos();
    let (a, b) = (theta - FRAC_PI_2, FRAC_PI_2);
    let gamma_a1 = match alpha {
        a if a == 0.0 => 1.0,
        a if a == 0.5 => PI.sqrt() / 2.0,
        a if a == 1.0 => 1.0,
        _ => 2.0,
    };
    // t = a + (b − a)(1 − cos πu)/2 smooths the √ endpoint behaviour
    let f = |u: f64| {
        let t = a + (b - a) * (1.0 - (PI * u).cos()) / 2.0;
        let dt = (b - a) * PI * (PI * u).sin() / 2.0;
        let g = t.cos().max(0.0).powf(alpha) * (t - theta).cos().max(0.0).powf(alpha);
        g * dt
    };
    2f64.powf(alpha) * gamma_a1 * simpson(f, 0.0, 1.0, 20_000)
}

fn grid() -> Vec<f64> {
    (-9..=9).map(|i| i as f64 / 10.0).collect()
}

#[test]
fn kappa_endpoint_values() {
    assert!((kappa1(0.0) - 1.0).abs() < 1e-15);
    assert!((kappa1(1.0) - PI).abs() < 1e-15);
    assert!(kappa1(-1.0).abs() < 1e-15);
    assert!((kappa0(0.0) - FRAC_PI_2).abs() < 1e-15);
    assert!((kappa2(0.0) - FRAC_PI_2).abs() < 1e-15);
    let half = kappa(KernelMomentQuery::new(0.5, 1.0).unwrap()).unwrap();
    assert!((half - (2.0 * PI).sqrt()).abs() < 1e-12, "{half}");
    assert!(KernelMomentQuery::new(1.0, 1.5).is_err());
}

#[test]
fn kappa_matches_independent_quadrature() {
    for &a in &ALPHAS {
        for &rho in &grid() {
            let k = kappa(KernelMomentQuery { alpha: a, rho }).unwrap();
            let q = kappa_oracle(a, rho);
            assert!((k - q).abs() < 1e-8, "α={a} ρ={rho}: {k} vs {q}");
        }
    }
}

#[test]
fn kappa_matches_j_alpha() {
    for &a in &ALPHAS {
        for &rho in &grid() {
            let k = kappa(KernelMomentQuery { alpha: a, rho }).unwrap();
            let j = j_alpha_quadrature(a, rho.acos()).unwrap();
            assert!((k - j).abs() < 1e-8, "α={a} ρ={rho}: {k} vs {j}");
        }
    }
    assert!((j_alpha_quadrature(0.0, 1.0).unwrap() - (PI - 1.0)).abs() < 1e-8);
    assert!((j_alpha_quadrature(1.0, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-8);
    // off the closed-form set the quadrature still agrees with the oracle
    for &rho in &[-0.5f64, 0.0, 0.7] {
        let j = j_alpha_quadrature(1.5, rho.acos()).unwrap();
        let o = 2f64.powf(1.5) * (1.5 * PI.sqrt() / 2.0) * {
            let theta = rho.acos();
            let (a, b) = (theta - FRAC_PI_2, FRAC_PI_2);
            simpson(
                |u: f64| {
                    let t = a + (b - a) * (1.0 - (PI * u).cos()) / 2.0;
                    let dt = (b - a) * PI * (PI * u).sin() / 2.0;
                    t.cos().max(0.0).powf(1.5) * (t - theta).cos().max(0.0).powf(1.5) * dt
                },
                0.0,
                1.0,
                20_000,
            )
        };
        assert!((j - o).abs() < 1e-8, "J_1.5 at ρ={rho}: {j} vs {o}");
    }
}

#[test]
fn relu_moments() {
    assert_eq!(relu_moment(0.0, 2.0).unwrap(), 0.5);
    assert!((relu_moment(1.0, 3.0).unwrap() - 1.5).abs() < 1e-14);
    assert!((relu_moment(2.0, 1.0).unwrap() - 1.5).abs() < 1e-14);
    for &a in &ALPHAS {
        let lhs = 2.0 * PI * relu_moment(a, 1.0).unwrap();
        let rhs = kappa(KernelMomentQuery { alpha: a, rho: 1.0 }).unwrap();
        assert!((lhs - rhs).abs() < 1e-12, "α={a}: {lhs} vs {rhs}");
    }
}

#[test]
fn gp_kernel_cases() {
    let x = [1.0, 2.0, -1.0];
    assert!((gp_relu_kernel(&x, &x, 3).unwrap() - 2.0).abs() < 1e-14);
    let s = 2f64.sqrt();
    let v = gp_relu_kernel(&[s, 0.0], &[0.0, s], 2).unwrap();
    assert!((v - 1.0 / PI).abs() < 1e-15);
    assert!(gp_relu_kernel(&x, &[-1.0, -2.0, 1.0], 3).unwrap().abs() < 1e-15);
    assert_eq!(gp_relu_kernel(&[0.0, 0.0], &[1.0, 1.0], 2).unwrap(), 0.0);
}

#[test]
fn conditional_kernel_statistics() {
    let (k, kp, c) = (1.5, 0.8, 0.4);
    let block = [[k, c], [c, kp]];
    let rho = c / (k * kp as f64).sqrt();
    let (mean, var) = kernel_cond_stats(block, &LevyTriple::trivial(2.0).unwrap(), 1.3, 0.2).unwrap();
    let want = 0.04 + 1.69 * 2.0 * (k * kp as f64).sqrt() * kappa1(rho) / (2.0 * PI);
    assert!((mean - want).abs() < 1e-14);
    assert_eq!(var, 0.0);
    // η = β, b = β/2 with β = 1000: M₂ = 4/1002
    let t = LevyTriple::new(0.0, Measure::beta(1000.0, 500.0).unwrap()).unwrap();
    let (_, var) = kernel_cond_stats(block, &t, 1.0, 0.0).unwrap();
    let want = 4.0 / 1002.0 * k * kp / (2.0 * PI) * kappa2(rho);
    assert!((var - want).abs() < 1e-12 * want, "{var} vs {want}");
    let hs = LevyTriple::new(0.0, Measure::horseshoe(1.0).unwrap()).unwrap();
    assert!(kernel_cond_stats(block, &hs, 1.0, 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn kappa_is_nondecreasing(idx in 0usize..4, r1 in -1.0f64..1.0, r2 in -1.0f64..1.0) {
        let a = ALPHAS[idx];
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        let (klo, khi) = (
            kappa(KernelMomentQuery { alpha: a, rho: lo }).unwrap(),
            kappa(KernelMomentQuery { alpha: a, rho: hi }).unwrap(),
        );
        prop_assert!(khi >= klo - 1e-12, "α={} κ({})={} > κ({})={}", a, lo, klo, hi, khi);
    }

    #[test]
    fn gp_kernel_is_symmetric_and_bounded(x in prop::collection::vec(-3.0f64..3.0, 3), y in prop::collection::vec(-3.0f64..3.0, 3)) {
        let kxy = gp_relu_kernel(&x, &y, 3).unwrap();
        let kyx = gp_relu_kernel(&y, &x, 3).unwrap();
        prop_assert!((kxy - kyx).abs() < 1e-14);
        let kxx = gp_relu_kernel(&x, &x, 3).unwrap();
        let kyy = gp_relu_kernel(&y, &y, 3).unwrap();
        prop_assert!(kxy >= 0.0 && kxy * kxy <= kxx * kyy * (1.0 + 1e-12));
    }
}
