//! Gamma-family functions, the error function and complete elliptic integrals.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialFnResult {
    pub value: f64,
    pub abs_error_estimate: f64,
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    // x is the argument minus one
    let mut s = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (x + i as f64);
    }
    s
}

/// ln|Γ(x)|.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        (PI / (PI * x).sin().abs()).ln() - ln_gamma(1.0 - x)
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
    }
}

/// Γ(x) for real x, including negative non-integers.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else if x > 171.6 {
        f64::INFINITY
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
    }
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

fn lower_series(s: f64, x: f64) -> f64 {
    // Σ x^n / (s (s+1) ... (s+n)), the bracket in P(s,x) = x^s e^-x / Γ(s+1) · ...
    let mut term = 1.0 / s;
    let mut sum = term;
    for n in 1..10_000 {
        term *= x / (s + n as f64);
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum
}

/// Lentz continued fraction for e^x x^-s Γ(s,x); valid for any real s once x is not small.
fn upper_cf(s: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized lower incomplete gamma P(s, x), s > 0.
pub fn reg_lower_gamma(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < s + 1.0 {
        (s * x.ln() - x - ln_gamma(s)).exp() * lower_series(s, x)
    } else {
        1.0 - (s * x.ln() - x - ln_gamma(s)).exp() * upper_cf(s, x)
    }
}

/// Regularized upper incomplete gamma Q(s, x), s > 0.
pub fn reg_upper_gamma(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x < s + 1.0 {
        1.0 - (s * x.ln() - x - ln_gamma(s)).exp() * lower_series(s, x)
    } else {
        (s * x.ln() - x - ln_gamma(s)).exp() * upper_cf(s, x)
    }
}

/// Exponential integral E₁(x) = Γ(0, x), x > 0.
pub fn exp_integral_e1(x: f64) -> f64 {
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < EPS * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        (-x).exp() * upper_cf(0.0, x)
    }
}

/// Γ(s, x) without argument checks; requires x > 0.
pub(crate) fn upper_gamma_raw(s: f64, x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    if x >= 1.0 && x >= s - 1.0 {
        return (s * x.ln() - x).exp() * upper_cf(s, x);
    }
    if s > 0.0 {
        return gamma(s) * reg_upper_gamma(s, x);
    }
    // s <= 0 and x < 1: climb to s0 in (0, 1] (or to 0), then recur downward
    let n = (-s).ceil();
    let s0 = s + n;
    let mut g = if s0 == 0.0 {
        exp_integral_e1(x)
    } else {
        gamma(s0) - (s0 * x.ln() - x).exp() * lower_series(s0, x)
    };
    let mut cur = s0;
    for _ in 0..n as usize {
        cur -= 1.0;
        g = (g - (cur * x.ln() - x).exp()) / cur;
    }
    g
}

/// Upper incomplete gamma Γ(s, x). Negative s is supported through the
/// recurrence Γ(s+1,x) = sΓ(s,x) + x^s e^-x and requires x > 0.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    if !s.is_finite() || x.is_nan() {
        return Err(domain(format!("upper incomplete gamma at s={s}, x={x}")));
    }
    if x < 0.0 || (s <= 0.0 && x == 0.0) {
        return Err(domain(format!("upper incomplete gamma needs x > 0 for s={s}, got x={x}")));
    }
    if x == 0.0 {
        return Ok(gamma(s));
    }
    Ok(upper_gamma_raw(s, x))
}

/// Lower incomplete gamma γ(s, x) for s > 0, x ≥ 0.
pub fn lower_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !(x >= 0.0) {
        return Err(domain(format!("lower incomplete gamma at s={s}, x={x}")));
    }
    Ok(lower_gamma_raw(s, x))
}

pub(crate) fn lower_gamma_raw(s: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x < s + 1.0 {
        (s * x.ln() - x).exp() * lower_series(s, x)
    } else {
        gamma(s) * reg_lower_gamma(s, x)
    }
}

pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc(-x)
    } else {
        reg_upper_gamma(0.5, x * x)
    }
}

pub fn erf(x: f64) -> f64 {
    if x.abs() < 0.5 {
        x.signum() * reg_lower_gamma(0.5, x * x)
    } else {
        1.0 - erfc(x)
    }
}

/// Standard normal CDF.
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal survival function.
pub fn norm_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Digamma ψ(x) for x > 0.
pub fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    acc + x.ln() - 0.5 * inv - series
}

/// (2k-1)!! = E[N^{2k}].
pub fn double_factorial_odd(k: u32) -> f64 {
    (1..=k).map(|i| (2 * i - 1) as f64).product()
}

const AGM_TOL: f64 = 1e-15;

/// Complete elliptic integral of the first kind, parameter m ∈ [0, 1).
pub fn elliptic_k(m: f64) -> Result<SpecialFnResult> {
    if !(0.0..1.0).contains(&m) {
        return Err(domain(format!("elliptic K needs m in [0,1), got {m}")));
    }
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    for _ in 0..100 {
        if (a - b).abs() < AGM_TOL {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    let value = PI / (2.0 * a);
    Ok(SpecialFnResult {
        value,
        abs_error_estimate: 8.0 * f64::EPSILON * value,
    })
}

/// Complete elliptic integral of the second kind, parameter m ∈ [0, 1].
pub fn elliptic_e(m: f64) -> Result<SpecialFnResult> {
    if !(0.0..=1.0).contains(&m) {
        return Err(domain(format!("elliptic E needs m in [0,1], got {m}")));
    }
    if m == 1.0 {
        return Ok(SpecialFnResult {
            value: 1.0,
            abs_error_estimate: 0.0,
        });
    }
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    let mut weight = 0.5;
    let mut sum = 0.5 * m;
    for _ in 0..100 {
        if (a - b).abs() < AGM_TOL {
            break;
        }
        let c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        weight *= 2.0;
        sum += weight * c * c;
    }
    let value = PI / (2.0 * a) * (1.0 - sum);
    Ok(SpecialFnResult {
        value,
        abs_error_estimate: 16.0 * f64::EPSILON * (PI / (2.0 * a)),
    })
}
