//! Real roots of low-degree polynomials.
//!
//! Closed-form (trigonometric / Cardano) roots followed by Newton polishing on
//! the original, unnormalized coefficients. Leading coefficients that vanish
//! relative to the rest drop the degree, so the same entry point handles the
//! quadratic and linear limits.

use std::f64::consts::PI;

/// Coefficients `[c3, c2, c1, c0]` of `c3 x³ + c2 x² + c1 x + c0`.
pub type Cubic = [f64; 4];

/// A polished real root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    /// Two closed-form roots closer than the merge tolerance were collapsed.
    pub double: bool,
}

/// Relative size below which a leading coefficient is treated as zero.
const DEGENERATE_LEADING: f64 = 1e-14;
/// Relative discriminant below which the cubic has a double root.
const DOUBLE_ROOT_DISC: f64 = 1e-14;

pub fn eval(c: &Cubic, x: f64) -> f64 {
    ((c[0] * x + c[1]) * x + c[2]) * x + c[3]
}

pub fn eval_derivative(c: &Cubic, x: f64) -> f64 {
    (3.0 * c[0] * x + 2.0 * c[1]) * x + c[2]
}

pub fn scale(c: &Cubic) -> f64 {
    c.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// `|p(x)| / max|c_i|`.
pub fn normalized_residual(c: &Cubic, x: f64) -> f64 {
    let s = scale(c);
    if s == 0.0 {
        0.0
    } else {
        eval(c, x).abs() / s
    }
}

/// All real roots in ascending order, polished and with near-duplicates
/// (closer than `merge_tol`) collapsed into a single root flagged `double`.
pub fn real_roots(c: &Cubic, merge_tol: f64) -> Vec<RealRoot> {
    let s = scale(c);
    if s == 0.0 {
        return Vec::new();
    }
    let mut raw = if c[0].abs() > DEGENERATE_LEADING * s {
        closed_form_cubic(c)
    } else if c[1].abs() > DEGENERATE_LEADING * s {
        quadratic(c[1], c[2], c[3])
    } else if c[2].abs() > DEGENERATE_LEADING * s {
        vec![-c[3] / c[2]]
    } else {
        Vec::new()
    };
    for r in raw.iter_mut() {
        *r = polish(c, *r);
    }
    raw.sort_by(|a, b| a.total_cmp(b));

    let mut out: Vec<RealRoot> = Vec::with_capacity(raw.len());
    for r in raw {
        match out.last_mut() {
            Some(last) if (r - last.value).abs() < merge_tol => {
                last.value = 0.5 * (last.value + r);
                last.double = true;
            }
            _ => out.push(RealRoot {
                value: r,
                double: false,
            }),
        }
    }
    out
}

fn quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        // Keep the vertex when it is a numerical double root.
        let x = -b / (2.0 * a);
        if disc.abs() <= 1e-14 * (b * b).max((4.0 * a * c).abs()) {
            return vec![x];
        }
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        return vec![0.0, 0.0];
    }
    vec![q / a, c / q]
}

fn closed_form_cubic(c: &Cubic) -> Vec<f64> {
    let a = c[1] / c[0];
    let b = c[2] / c[0];
    let d = c[3] / c[0];
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;

    // t³ + p t + q = 0
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    let disc_scale = half_q * half_q + (third_p * third_p * third_p).abs();
    if disc < 0.0 && disc.abs() > DOUBLE_ROOT_DISC * disc_scale {
        let r = (-third_p).sqrt();
        let arg = (-half_q / (r * r * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| 2.0 * r * (phi - 2.0 * PI * k as f64 / 3.0).cos() - shift)
            .collect()
    } else if disc.abs() <= DOUBLE_ROOT_DISC * disc_scale {
        // Rounding can push a tangency to either side; keep both copies of
        // the double root so the merge step flags it.
        let u = (-half_q).cbrt();
        vec![2.0 * u - shift, -u - shift, -u - shift]
    } else {
        let sq = disc.sqrt();
        // Pick the cube root that avoids cancellation.
        let u = (-half_q - half_q.signum() * sq).cbrt();
        let t = if u == 0.0 { 0.0 } else { u - third_p / u };
        vec![t - shift]
    }
}

fn polish(c: &Cubic, mut x: f64) -> f64 {
    let mut best = x;
    let mut best_res = eval(c, x).abs();
    for _ in 0..8 {
        let f = eval(c, x);
        let df = eval_derivative(c, x);
        if df == 0.0 || f == 0.0 {
            break;
        }
        x -= f / df;
        let res = eval(c, x).abs();
        if res < best_res {
            best = x;
            best_res = res;
        } else {
            break;
        }
    }
    best
}
