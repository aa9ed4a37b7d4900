#![allow(dead_code)]
//! Oracles shared by the integration tests. They are deliberately written
//! without the crate's own numerics.

use mogp_core::rng::{tag, RngStream};
use mogp_core::rng::StreamRng;

/// Fresh generator for a named test.
pub fn rng(label: &str) -> StreamRng {
    RngStream::new(20_261_016, 0).derive(tag(label)).rng()
}

/// Composite Simpson rule with n (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// ∫_a^∞ f by substituting x = a + t/(1−t) and Simpson on [0, 1).
pub fn simpson_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, n: usize) -> f64 {
    simpson(
        |t: f64| {
            if t >= 1.0 {
                0.0
            } else {
                let x = a + t / (1.0 - t);
                f(x) / ((1.0 - t) * (1.0 - t))
            }
        },
        0.0,
        1.0,
        n,
    )
}

/// Standard normal CDF via a high-accuracy erfc continued fraction / series.
pub fn phi(z: f64) -> f64 {
    // Φ(z) = 1/2 + (1/√(2π)) ∫₀^z e^{−t²/2} dt, Simpson on a fine grid
    if z.abs() > 9.0 {
        return if z > 0.0 { 1.0 } else { 0.0 };
    }
    0.5 + simpson(|t| (-0.5 * t * t).exp(), 0.0, z, 4000) / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// One-sample KS distance written from the definition.
pub fn ks<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let s = sorted(samples);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let m = mean(v);
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (m, (var / v.len() as f64).sqrt())
}
