//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{IobError, Result};

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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &wk)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let s = f(c - h * x) + f(c + h * x);
        kronrod += wk * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    }
}

/// `∫_a^b f` over the consecutive intervals of `breaks` (ascending), refined
/// until the summed error estimate is below `max(abs_tol, rel_tol |I|)`.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], abs_tol: f64, rel_tol: f64) -> Result<f64> {
    let mut segs: Vec<Segment> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk15(&f, w[0], w[1]))
        .collect();
    for _ in 0..20_000 {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let (idx, worst) = segs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, s)| (i, *s))
            .expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            break;
        }
        segs[idx] = gk15(&f, worst.a, mid);
        segs.push(gk15(&f, mid, worst.b));
    }
    let err: f64 = segs.iter().map(|s| s.error).sum();
    let total: f64 = segs.iter().map(|s| s.value).sum();
    if err <= abs_tol.max(rel_tol * total.abs()) {
        Ok(total)
    } else {
        Err(IobError::QuadratureFailed { error: err })
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    integrate_pieces(f, &[a, b], abs_tol, rel_tol)
}

/// `∫_{−∞}^{∞} f` for integrands decaying at least as `|x|⁻²`.
///
/// The finite part `[−cut, cut]` is split at `interior` points; the tails are
/// mapped onto `(0, 1]` with `x = cut / t`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, cut: f64, interior: &[f64], abs_tol: f64, rel_tol: f64) -> Result<f64> {
    let mut breaks = vec![-cut];
    let mut inner: Vec<f64> = interior.iter().copied().filter(|x| x.abs() < cut).collect();
    inner.sort_by(|a, b| a.total_cmp(b));
    breaks.extend(inner);
    breaks.push(cut);
    let centre = integrate_pieces(&f, &breaks, abs_tol, rel_tol)?;
    let tails = integrate(
        |t: f64| {
            if t == 0.0 {
                0.0
            } else {
                let x = cut / t;
                (f(x) + f(-x)) * cut / (t * t)
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )?;
    Ok(centre + tails)
}
