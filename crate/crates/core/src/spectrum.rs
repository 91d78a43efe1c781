//! Resonance-fluorescence spectrum of the renormalized medium.
//!
//! The incoherent part is the rational line shape
//!
//! ```text
//! S(ν) = 2 ρ22² Γ a (ν² + a0) / (ν⁶ + b4 ν⁴ + b2 ν² + b0)
//! ```
//!
//! evaluated with the effective Rabi frequency and detuning of the chosen
//! steady state. The elastic (Rayleigh) line is a delta function at `ν = 0`
//! and is reported only through its weight `|ρ12|²`.
//!
//! All spectra share an arbitrary unit (`|ξ_k|² = 1`, no `ħω_k` or `N`
//! prefactors), so only shapes and ratios carry meaning.

use serde::{Deserialize, Serialize};

use crate::error::{IobError, Result};
use crate::par;
use crate::params::{Branch, Mechanism, MediumParams};
use crate::quadrature;
use crate::steady_state::{self, SteadyStateSolution};

/// Which `b2` expression to use. `AsPrinted` reproduces a typo (`16|Ω|²`
/// instead of `16|Ω|⁴`) and only exists for fault-injection checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum B2Form {
    #[default]
    Corrected,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCoefficients {
    pub a: f64,
    pub a0: f64,
    pub b4: f64,
    pub b2: f64,
    pub b0: f64,
    /// `4|Ω̄|² + Δ̄² − ¾Γ²`; negative when there are no satellites.
    pub nu_p_sq: f64,
    /// `Γ² (2|Ω̄|² + Δ̄² + Γ²/4)²`.
    pub gamma6: f64,
    pub omega_eff_sq: f64,
    pub delta_eff: f64,
    pub gamma: f64,
}

pub fn spectrum_coefficients(omega_eff_sq: f64, delta_eff: f64, gamma: f64) -> SpectrumCoefficients {
    spectrum_coefficients_with(omega_eff_sq, delta_eff, gamma, B2Form::Corrected)
}

pub fn spectrum_coefficients_with(omega_eff_sq: f64, delta_eff: f64, gamma: f64, form: B2Form) -> SpectrumCoefficients {
    let o2 = omega_eff_sq;
    let d2 = delta_eff * delta_eff;
    let g2 = gamma * gamma;
    let a = 2.0 * o2 + d2 + 0.25 * g2;
    let leading = match form {
        B2Form::Corrected => 16.0 * o2 * o2,
        B2Form::AsPrinted => 16.0 * o2,
    };
    SpectrumCoefficients {
        a,
        a0: 2.0 * o2 + g2,
        b4: -8.0 * o2 - 2.0 * d2 + 1.5 * g2,
        b2: leading + 2.0 * o2 * (4.0 * d2 + g2) + d2 * d2 - 1.5 * g2 * d2 + 0.5625 * g2 * g2,
        b0: g2 * a * a,
        nu_p_sq: 4.0 * o2 + d2 - 0.75 * g2,
        gamma6: g2 * (2.0 * o2 + d2 + 0.25 * g2).powi(2),
        omega_eff_sq,
        delta_eff,
        gamma,
    }
}

/// Relative deviations of the three factorization identities
/// `b4 = −2ν_p²`, `b2 = ν_p⁴ + 8Γ²|Ω̄|²`, `b0 = γ⁶`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityDeviation {
    pub b4: f64,
    pub b2: f64,
    pub b0: f64,
}

impl IdentityDeviation {
    pub fn max(&self) -> f64 {
        self.b4.max(self.b2).max(self.b0)
    }
}

impl SpectrumCoefficients {
    /// `ν⁶ + b4 ν⁴ + b2 ν² + b0`.
    pub fn denominator(&self, nu: f64) -> f64 {
        let x = nu * nu;
        ((x + self.b4) * x + self.b2) * x + self.b0
    }

    /// `ν²(ν² − ν_p²)² + 8Γ²|Ω̄|²ν² + γ⁶`, a sum of non-negative terms.
    pub fn factored_denominator(&self, nu: f64) -> f64 {
        let x = nu * nu;
        x * (x - self.nu_p_sq).powi(2) + 8.0 * self.gamma * self.gamma * self.omega_eff_sq * x + self.gamma6
    }

    pub fn identity_deviation(&self) -> IdentityDeviation {
        let o2 = self.omega_eff_sq;
        let d2 = self.delta_eff * self.delta_eff;
        let g2 = self.gamma * self.gamma;
        // Scales: sums of the magnitudes of the terms entering each side.
        let s4 = 8.0 * o2 + 2.0 * d2 + 1.5 * g2;
        let s2 = (4.0 * o2 + d2 + 0.75 * g2).powi(2) + 8.0 * g2 * o2;
        let rel = |x: f64, s: f64| if s == 0.0 { x.abs() } else { x.abs() / s };
        IdentityDeviation {
            b4: rel(self.b4 + 2.0 * self.nu_p_sq, s4),
            b2: rel(self.b2 - (self.nu_p_sq * self.nu_p_sq + 8.0 * g2 * o2), s2),
            b0: rel(self.b0 - self.gamma6, self.gamma6),
        }
    }
}

/// Incoherent spectral density at `nu = ω_k − ω_L`.
pub fn incoherent_spectrum(nu: f64, coeffs: &SpectrumCoefficients, rho22: f64, gamma: f64) -> f64 {
    2.0 * rho22 * rho22 * gamma * coeffs.a * (nu * nu + coeffs.a0) / coeffs.denominator(nu)
}

/// `{−ν_p, 0, ν_p}` when satellites exist, `{0}` otherwise.
pub fn peak_positions(coeffs: &SpectrumCoefficients) -> Vec<f64> {
    if coeffs.nu_p_sq > 0.0 {
        let nu_p = coeffs.nu_p_sq.sqrt();
        vec![-nu_p, 0.0, nu_p]
    } else {
        vec![0.0]
    }
}

/// Satellite offset `ν_p`, if the radicand is positive.
pub fn satellite_offset(coeffs: &SpectrumCoefficients) -> Option<f64> {
    (coeffs.nu_p_sq > 0.0).then(|| coeffs.nu_p_sq.sqrt())
}

/// Peak of the free-atom incoherent spectrum in the saturation limit
/// (`ρ22 → ½`, `|Ω| → ∞`), reached at line centre: `1 / (2Γ)`.
pub fn free_atom_saturation_max(gamma: f64) -> f64 {
    0.5 / gamma
}

/// Symmetric grid of `n` points on `[−(2ν_p^max + 10Γ), 2ν_p^max + 10Γ]`.
pub fn default_nu_grid(nu_p_max: f64, gamma: f64, n: usize) -> Vec<f64> {
    let half = 2.0 * nu_p_max.max(0.0) + 10.0 * gamma;
    symmetric_grid(half, n)
}

pub const DEFAULT_NU_POINTS: usize = 2001;

pub fn symmetric_grid(half_width: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.0; n];
    }
    let step = 2.0 * half_width / (n - 1) as f64;
    let mut g = vec![0.0; n];
    // Mirror the lower half so that S(ν) = S(−ν) holds sample by sample.
    for i in 0..n / 2 {
        g[i] = -half_width + i as f64 * step;
        g[n - 1 - i] = -g[i];
    }
    g
}

/// Spectrum of one steady state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub nu_grid: Vec<f64>,
    pub incoherent: Vec<f64>,
    /// `|ρ12|²`, the weight of the elastic delta line.
    pub elastic_weight: f64,
    pub peaks: Vec<f64>,
    pub coefficients: SpectrumCoefficients,
    pub rho22: f64,
    pub branch: Branch,
    /// The source steady state is dynamically unstable.
    pub unstable: bool,
}

impl SpectrumResult {
    pub fn density(&self, nu: f64) -> f64 {
        incoherent_spectrum(nu, &self.coefficients, self.rho22, self.coefficients.gamma)
    }
}

pub fn sample_spectrum(nu_grid: &[f64], coeffs: &SpectrumCoefficients, rho22: f64, gamma: f64) -> Vec<f64> {
    par::map(nu_grid, |&nu| incoherent_spectrum(nu, coeffs, rho22, gamma))
}

/// Spectrum computed from an already solved steady state.
pub fn spectrum_for_solution(sol: &SteadyStateSolution, gamma: f64, nu_grid: Option<&[f64]>) -> SpectrumResult {
    let coefficients = spectrum_coefficients(sol.omega_eff.norm_sqr(), sol.delta_eff, gamma);
    let grid = match nu_grid {
        Some(g) => g.to_vec(),
        None => default_nu_grid(satellite_offset(&coefficients).unwrap_or(0.0), gamma, DEFAULT_NU_POINTS),
    };
    let incoherent = sample_spectrum(&grid, &coefficients, sol.rho22, gamma);
    SpectrumResult {
        nu_grid: grid,
        incoherent,
        elastic_weight: sol.rho12.norm_sqr(),
        peaks: peak_positions(&coefficients),
        coefficients,
        rho22: sol.rho22,
        branch: sol.branch,
        unstable: !sol.stable,
    }
}

/// Full pipeline at the drive `params.omega`: steady state on `branch`,
/// effective parameters, coefficients and sampled line shape.
pub fn spectrum_for_branch(
    params: &MediumParams,
    mech: Mechanism,
    branch: Branch,
    nu_grid: Option<&[f64]>,
) -> Result<SpectrumResult> {
    let sol = steady_state::solution_on_branch(params, mech, branch)?;
    Ok(spectrum_for_solution(&sol, params.gamma, nu_grid))
}

/// `∫ S(ν) dν / (ρ22 − |ρ12|²)` over the whole real line.
pub fn sum_rule_ratio(result: &SpectrumResult, rho22: f64, rho12: num_complex::Complex64) -> Result<f64> {
    let inelastic = rho22 - rho12.norm_sqr();
    if inelastic <= 0.0 {
        return Err(IobError::InconsistentSteadyState { value: inelastic });
    }
    let c = &result.coefficients;
    let gamma = c.gamma;
    let nu_p = satellite_offset(c).unwrap_or(0.0);
    let cut = 2.0 * nu_p + 10.0 * gamma;
    let mut interior = vec![0.0];
    if nu_p > 0.0 {
        interior.extend([-nu_p, nu_p]);
    }
    let integral = quadrature::integrate_real_line(
        |nu| incoherent_spectrum(nu, c, rho22, gamma),
        cut,
        &interior,
        0.0,
        1e-12,
    )?;
    Ok(integral / inelastic)
}
