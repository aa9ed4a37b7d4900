//! Adaptive Gauss–Kronrod quadrature and monotone root finding.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub const DEFAULT_TOL: f64 = 1e-10;
const REL_TOL: f64 = 1e-13;
const MAX_SEGMENTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
}

#[inline]
fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = finite_or_zero(f(c));
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = finite_or_zero(f(c - dx)) + finite_or_zero(f(c + dx));
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// ∫_a^b f over a finite interval, bisecting the worst segment until the
/// summed error estimate drops below `abs_tol` (or a tiny relative level).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            abs_error: 0.0,
            converged: true,
        };
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, err: e });
    let mut total = v;
    let mut total_err = e;
    let mut converged = false;
    while heap.len() < MAX_SEGMENTS {
        if total_err <= abs_tol.max(REL_TOL * total.abs()) {
            converged = true;
            break;
        }
        let seg = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval exhausted at machine precision
            heap.push(Segment { err: 0.0, ..seg });
            total_err = heap.iter().map(|s| s.err).sum();
            continue;
        }
        let (v1, e1) = gk15(&f, seg.a, mid);
        let (v2, e2) = gk15(&f, mid, seg.b);
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.err;
        heap.push(Segment { a: seg.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, err: e2 });
    }
    // re-sum to shed accumulated rounding from the running updates
    let value = heap.iter().map(|s| s.value).sum();
    let abs_error: f64 = heap.iter().map(|s| s.err).sum();
    QuadResult {
        value,
        abs_error,
        converged: converged || abs_error <= abs_tol.max(REL_TOL * total.abs()),
    }
}

/// ∫_lo^hi f(x) dx for 0 ≤ lo < hi ≤ ∞ after the substitution x = e^u,
/// which tames power singularities at 0 and power tails at ∞.
pub fn integrate_positive<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, abs_tol: f64) -> QuadResult {
    integrate_positive_dyn(&f, lo, hi, abs_tol)
}

fn integrate_positive_dyn(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, abs_tol: f64) -> QuadResult {
    assert!(lo >= 0.0 && hi > lo, "bad range [{lo}, {hi}]");
    let g = |u: f64| {
        let x = u.exp();
        if x == 0.0 || x.is_infinite() {
            0.0
        } else {
            f(x) * x
        }
    };
    let ul = if lo > 0.0 { lo.ln() } else { f64::NEG_INFINITY };
    let uh = if hi.is_finite() { hi.ln() } else { f64::INFINITY };
    match (ul.is_finite(), uh.is_finite()) {
        (true, true) => integrate(g, ul, uh, abs_tol),
        (false, true) => integrate(
            |t: f64| {
                let s = 1.0 - t;
                g(uh - t / s) / (s * s)
            },
            0.0,
            1.0,
            abs_tol,
        ),
        (true, false) => integrate(
            |t: f64| {
                let s = 1.0 - t;
                g(ul + t / s) / (s * s)
            },
            0.0,
            1.0,
            abs_tol,
        ),
        (false, false) => {
            let left = integrate_positive_dyn(f, 0.0, 1.0, 0.5 * abs_tol);
            let right = integrate_positive_dyn(f, 1.0, f64::INFINITY, 0.5 * abs_tol);
            QuadResult {
                value: left.value + right.value,
                abs_error: left.abs_error + right.abs_error,
                converged: left.converged && right.converged,
            }
        }
    }
}

/// Solve g(x) = target for a nonincreasing g on (0, ∞). Returns the
/// generalized inverse inf{x > 0 : g(x) < target} to relative precision
/// `rel_tol`, or 0 when g never reaches the target from above.
///
/// `hint` seeds the bracket search; `density` (= -g') enables Newton steps.
pub fn invert_decreasing<G, D>(g: G, target: f64, hint: f64, density: Option<D>, rel_tol: f64) -> f64
where
    G: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = if hint > 0.0 && hint.is_finite() { hint } else { 1.0 };
    let (mut lo, mut hi);
    if g(x) >= target {
        lo = x;
        loop {
            x *= 4.0;
            if x > 1e300 {
                return f64::INFINITY;
            }
            if g(x) < target {
                hi = x;
                break;
            }
            lo = x;
        }
    } else {
        hi = x;
        loop {
            x *= 0.25;
            if x < 1e-300 {
                return 0.0;
            }
            if g(x) >= target {
                lo = x;
                break;
            }
            hi = x;
        }
    }
    // work in log-space
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut y = 0.5 * (a + b);
    for _ in 0..300 {
        if b - a <= rel_tol {
            break;
        }
        let xv = y.exp();
        let gy = g(xv);
        if gy >= target {
            a = y;
        } else {
            b = y;
        }
        let mut next = 0.5 * (a + b);
        if let Some(d) = density.as_ref() {
            let slope = d(xv) * xv;
            if slope > 0.0 && slope.is_finite() {
                let cand = y + (gy - target) / slope;
                if cand > a && cand < b {
                    next = cand;
                    if (cand - y).abs() <= 0.25 * rel_tol {
                        // converged; bracket the Newton point tightly
                        return cand.exp();
                    }
                }
            }
        }
        y = next;
    }
    b.exp()
}

/// Plain bisection root of a sign-changing continuous function on [a, b].
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
