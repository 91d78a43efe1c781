//! Independent numerical routes used to cross-check the closed forms.
//!
//! Nothing here calls into the closed-form spectrum or steady-state code:
//! the spectrum comes from a complex linear solve, the stationary state from
//! the null space of a Liouvillian assembled from 2×2 operator algebra, and
//! cubic roots from companion-matrix eigenvalues.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{IobError, Result};
use crate::steady_state::DensityMatrix;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The 3×3 matrix acting on `(g11, g12, g21)` of the stationary correlation
/// equations.
pub fn correlation_matrix(nu: f64, omega: Complex64, delta: f64, gamma: f64) -> Matrix3<Complex64> {
    Matrix3::new(
        I * nu + gamma,
        I * omega.conj(),
        -I * omega,
        2.0 * I * omega,
        I * (nu - delta) + 0.5 * gamma,
        c(0.0),
        -2.0 * I * omega.conj(),
        c(0.0),
        I * (nu + delta) + 0.5 * gamma,
    )
}

/// Source vector `q = s − ρ21 ρ_A` with `|ξ_k|² = 1`.
pub fn correlation_source(rho: &DensityMatrix) -> Vector3<Complex64> {
    let rho21 = rho.rho21();
    let s = Vector3::new(rho21, c(rho.rho22), c(0.0));
    let rho_a = Vector3::new(c(rho.rho11), rho.rho12, rho21);
    s - rho_a * rho21
}

/// Solve `M g = q` for `(g11, g12, g21)`.
pub fn solve_correlation(nu: f64, omega: Complex64, delta: f64, gamma: f64, rho: &DensityMatrix) -> Result<Vector3<Complex64>> {
    let m = correlation_matrix(nu, omega, delta, gamma);
    let det = m.determinant();
    if det.norm() < 1e-14 {
        return Err(IobError::SingularMatrix { determinant: det.norm() });
    }
    m.lu()
        .solve(&correlation_source(rho))
        .ok_or(IobError::SingularMatrix { determinant: det.norm() })
}

/// `Re (g_k⁺)₁₂`, in the same normalization as the closed-form spectrum.
pub fn oracle_spectrum(nu: f64, omega: Complex64, delta: f64, gamma: f64, rho: &DensityMatrix) -> Result<f64> {
    Ok(solve_correlation(nu, omega, delta, gamma, rho)?[1].re)
}

fn sigma_plus() -> Matrix2<Complex64> {
    // |2⟩⟨1| with basis (|1⟩ ground, |2⟩ excited).
    Matrix2::new(c(0.0), c(0.0), c(1.0), c(0.0))
}

fn sigma_z() -> Matrix2<Complex64> {
    Matrix2::new(c(-0.5), c(0.0), c(0.0), c(0.5))
}

fn comm(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    a * b - b * a
}

/// Right-hand side of the single-atom master equation at fixed effective
/// parameters, applied to an arbitrary 2×2 operator.
pub fn master_equation_rhs(rho: &Matrix2<Complex64>, omega: Complex64, delta: f64, gamma: f64) -> Matrix2<Complex64> {
    let sp = sigma_plus();
    let sm = sp.adjoint();
    let drive = sp * omega.conj() + sm * omega;
    let h = sigma_z() * c(delta);
    let n = sp * sm;
    let dissipator = (n * rho + rho * n - sm * rho * sp * c(2.0)) * c(-0.5 * gamma);
    comm(&h, rho) * (-I) + comm(&drive, rho) * I + dissipator
}

fn vectorize(m: &Matrix2<Complex64>) -> Vector4<Complex64> {
    Vector4::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

fn unvectorize(v: &Vector4<Complex64>) -> Matrix2<Complex64> {
    Matrix2::new(v[0], v[1], v[2], v[3])
}

/// Liouvillian in the basis `(ρ11, ρ12, ρ21, ρ22)`.
pub fn liouvillian(omega: Complex64, delta: f64, gamma: f64) -> Matrix4<Complex64> {
    let mut l = Matrix4::zeros();
    for k in 0..4 {
        let mut e = Vector4::zeros();
        e[k] = c(1.0);
        let col = vectorize(&master_equation_rhs(&unvectorize(&e), omega, delta, gamma));
        l.set_column(k, &col);
    }
    l
}

/// Stationary density matrix from the null space of the Liouvillian.
pub fn stationary_density(omega: Complex64, delta: f64, gamma: f64) -> Result<DensityMatrix> {
    let mut l = liouvillian(omega, delta, gamma);
    // Replace the ρ11 equation by the trace condition.
    l.set_row(0, &nalgebra::RowVector4::new(c(1.0), c(0.0), c(0.0), c(1.0)));
    let rhs = Vector4::new(c(1.0), c(0.0), c(0.0), c(0.0));
    let det = l.determinant().norm();
    let x = l.lu().solve(&rhs).ok_or(IobError::SingularMatrix { determinant: det })?;
    Ok(DensityMatrix {
        rho11: x[0].re,
        rho22: x[3].re,
        rho12: x[1],
    })
}

/// Full 2×2 stationary correlation operator from `(iν − L) g = σ⁻ρ − ⟨σ⁻⟩ρ`,
/// without imposing the trace condition. Singular at `ν = 0`, where the
/// stationary state spans the kernel of `L`.
pub fn full_correlation(nu: f64, omega: Complex64, delta: f64, gamma: f64, rho: &DensityMatrix) -> Result<Matrix2<Complex64>> {
    let l = liouvillian(omega, delta, gamma);
    let a = Matrix4::from_diagonal_element(I * nu) - l;
    let rho_m = Matrix2::new(c(rho.rho11), rho.rho12, rho.rho21(), c(rho.rho22));
    let sm = sigma_plus().adjoint();
    let expect = (sm * rho_m).trace();
    let source = sm * rho_m - rho_m * expect;
    let det = a.determinant().norm();
    if det < 1e-14 {
        return Err(IobError::SingularMatrix { determinant: det });
    }
    let x = a
        .lu()
        .solve(&vectorize(&source))
        .ok_or(IobError::SingularMatrix { determinant: det })?;
    Ok(unvectorize(&x))
}

/// Real eigenvalues of the companion matrix of `c3 x³ + c2 x² + c1 x + c0`.
pub fn companion_real_roots(coeffs: [f64; 4], imag_tol: f64) -> Vec<f64> {
    let [c3, c2, c1, c0] = coeffs;
    let m = Matrix3::new(-c2 / c3, -c1 / c3, -c0 / c3, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    let mut roots: Vec<f64> = m
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= imag_tol)
        .map(|z| z.re)
        .collect();
    roots.sort_by(|a, b| a.total_cmp(b));
    roots
}

/// Sign-change bracketing plus bisection on `[lo, hi]` over `n` cells.
pub fn bisection_roots(coeffs: [f64; 4], lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let p = |x: f64| ((coeffs[0] * x + coeffs[1]) * x + coeffs[2]) * x + coeffs[3];
    let mut out = Vec::new();
    let step = (hi - lo) / n as f64;
    for i in 0..n {
        let (mut a, mut b) = (lo + i as f64 * step, lo + (i + 1) as f64 * step);
        let (mut fa, fb) = (p(a), p(b));
        if fa == 0.0 {
            out.push(a);
            continue;
        }
        if fa * fb > 0.0 || (fb == 0.0 && i + 1 < n) {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let fm = p(m);
            if fm == 0.0 || m <= a || m >= b {
                a = m;
                b = m;
                break;
            }
            if fa * fm < 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}
