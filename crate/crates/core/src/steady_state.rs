//! Steady states of the renormalized two-level medium.
//!
//! The stationary Bloch equations at fixed inversion reduce to the cubic
//! `c3 W³ + c2 W² + c1 W + c0 = 0` in the population difference
//! `W = ρ11 − ρ22`. Both mechanisms lead to the same cubic with
//! `ζ = zeta_total(...)`; they differ only in how the effective Rabi frequency
//! and detuning are reconstructed from a root.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubic::{self, Cubic};
use crate::dynamics::{self, BlochState};
use crate::error::{IobError, Result};
use crate::params::{zeta_total, Branch, Mechanism, MediumParams};

/// Closed-form roots closer than this are one (double) root.
pub const ROOT_MERGE_TOL: f64 = 1e-8;
/// Jacobian eigenvalues with `|Re λ|` below this are marginal.
pub const MARGINAL_TOL: f64 = 1e-9;
/// Roots within this distance of 1 are still accepted (and snapped).
const UNIT_SLACK: f64 = 1e-9;

/// Stationary single-atom density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    pub rho11: f64,
    pub rho22: f64,
    /// `⟨σ⁺⟩`; its conjugate is `ρ21`.
    pub rho12: Complex64,
}

impl DensityMatrix {
    pub fn rho21(&self) -> Complex64 {
        self.rho12.conj()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

/// One root of the inversion cubic with everything derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateSolution {
    pub w: f64,
    pub rho22: f64,
    pub rho12: Complex64,
    pub omega_eff: Complex64,
    pub delta_eff: f64,
    pub branch: Branch,
    pub stable: bool,
    /// Fold point (double root) or vanishing leading eigenvalue.
    pub marginal: bool,
    /// `|p(W)| / max|c_i|`.
    pub residual: f64,
}

impl SteadyStateSolution {
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            rho11: 1.0 - self.rho22,
            rho22: self.rho22,
            rho12: self.rho12,
        }
    }

    pub fn bloch_state(&self) -> BlochState {
        BlochState::from_coherence(self.rho12, self.w)
    }
}

/// Coefficients `[c3, c2, c1, c0]` of the inversion cubic.
pub fn cubic_coefficients(params: &MediumParams, mech: Mechanism) -> Result<Cubic> {
    let zeta = zeta_total(params, mech)?;
    Ok(cubic_for(params.gamma, params.delta, params.omega, zeta))
}

fn cubic_for(gamma: f64, delta: f64, omega: f64, zeta: f64) -> Cubic {
    let g2 = 0.25 * gamma * gamma;
    [
        zeta * zeta,
        -zeta * (zeta + 2.0 * delta),
        2.0 * omega * omega + delta * (delta + 2.0 * zeta) + g2,
        -(delta * delta + g2),
    ]
}

/// Inversions at the fold points of the S-curve, i.e. the zeros of
/// `d(Ω²)/dW` along `Ω²(W) = (1−W)((Δ−ζW)² + Γ²/4) / (2W)`.
///
/// Empty when the medium is monostable for every drive.
pub fn fold_inversions(params: &MediumParams, mech: Mechanism) -> Result<Vec<f64>> {
    let zeta = zeta_total(params, mech)?;
    if zeta == 0.0 {
        return Ok(Vec::new());
    }
    let g2 = 0.25 * params.gamma * params.gamma;
    let d = params.delta;
    let c = [2.0 * zeta * zeta, -zeta * (zeta + 2.0 * d), 0.0, d * d + g2];
    Ok(cubic::real_roots(&c, ROOT_MERGE_TOL)
        .into_iter()
        .filter(|r| !r.double && r.value > 0.0 && r.value < 1.0)
        .map(|r| r.value)
        .collect())
}

/// Drive strength at which `w` is a steady-state inversion.
pub fn omega_for_inversion(params: &MediumParams, mech: Mechanism, w: f64) -> Result<f64> {
    let zeta = zeta_total(params, mech)?;
    let shifted = params.delta - zeta * w;
    let g2 = 0.25 * params.gamma * params.gamma;
    Ok(((1.0 - w) * (shifted * shifted + g2) / (2.0 * w)).max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct InversionRoot {
    pub w: f64,
    pub double: bool,
    pub residual: f64,
}

pub(crate) fn inversion_roots(params: &MediumParams, mech: Mechanism) -> Result<Vec<InversionRoot>> {
    let c = cubic_coefficients(params, mech)?;
    let mut out = Vec::with_capacity(3);
    for r in cubic::real_roots(&c, ROOT_MERGE_TOL) {
        let mut w = r.value;
        if w <= 0.0 || w > 1.0 + UNIT_SLACK {
            continue;
        }
        if (w - 1.0).abs() <= UNIT_SLACK
            && cubic::eval(&c, 1.0).abs() <= cubic::eval(&c, w).abs()
        {
            w = 1.0;
        }
        if w > 1.0 {
            continue;
        }
        out.push(InversionRoot {
            w,
            double: r.double,
            residual: cubic::normalized_residual(&c, w),
        });
    }
    if out.is_empty() {
        return Err(IobError::NoPhysicalRoot);
    }
    Ok(out)
}

/// All physical roots `W ∈ (0, 1]` of the inversion cubic, ascending.
pub fn solve_inversion(params: &MediumParams, mech: Mechanism) -> Result<Vec<f64>> {
    Ok(inversion_roots(params, mech)?.into_iter().map(|r| r.w).collect())
}

/// Effective (renormalized) Rabi frequency and detuning at inversion `w`.
pub fn effective_params(w: f64, params: &MediumParams, mech: Mechanism) -> Result<(Complex64, f64)> {
    mech.check(params)?;
    let delta_eff = params.delta - params.zeta_detuning * w;
    let omega = Complex64::new(params.omega, 0.0);
    if params.zeta_lorentz == 0.0 {
        return Ok((omega, delta_eff));
    }
    // Ω̄ = Ω + ζ_L ρ12 with ρ12 = Ω̄ W / (Δ̄ + iΓ/2).
    let susceptibility = w / Complex64::new(delta_eff, 0.5 * params.gamma);
    let denominator = 1.0 - params.zeta_lorentz * susceptibility;
    if denominator.norm() < 1e-14 {
        return Err(IobError::SingularFeedback {
            denominator: denominator.norm(),
        });
    }
    Ok((omega / denominator, delta_eff))
}

/// Stationary coherence `ρ12 = ⟨σ⁺⟩` at fixed inversion.
pub fn coherence(w: f64, omega_eff: Complex64, delta_eff: f64, gamma: f64) -> Complex64 {
    omega_eff * w / Complex64::new(delta_eff, 0.5 * gamma)
}

/// Linear stability of the mean-field fixed point with inversion `w`.
pub fn classify_stability(w: f64, params: &MediumParams, mech: Mechanism) -> Result<Stability> {
    let (omega_eff, delta_eff) = effective_params(w, params, mech)?;
    let state = BlochState::from_coherence(coherence(w, omega_eff, delta_eff, params.gamma), w);
    let leading = dynamics::leading_eigenvalue_real_part(&state, params, mech, params.omega)?;
    Ok(if leading.abs() < MARGINAL_TOL {
        Stability::Marginal
    } else if leading < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    })
}

/// Label roots (ascending in `W`) by branch. `W` decreases with excitation,
/// so the largest `W` is the lower branch.
fn label_roots(roots: &[InversionRoot], folds: &[f64]) -> Vec<Branch> {
    if roots.len() == 3 {
        return vec![Branch::Upper, Branch::Middle, Branch::Lower];
    }
    let split = match folds {
        [a, b] => Some(0.5 * (a + b)),
        _ => None,
    };
    roots
        .iter()
        .map(|r| match split {
            Some(s) if r.w < s => Branch::Upper,
            _ => Branch::Lower,
        })
        .collect()
}

/// Every steady state at the drive `params.omega`, ordered lower → upper.
pub fn steady_states(params: &MediumParams, mech: Mechanism) -> Result<Vec<SteadyStateSolution>> {
    let roots = inversion_roots(params, mech)?;
    let folds = fold_inversions(params, mech)?;
    let labels = label_roots(&roots, &folds);
    let mut out = Vec::with_capacity(roots.len());
    for (root, branch) in roots.iter().zip(labels) {
        let (omega_eff, delta_eff) = effective_params(root.w, params, mech)?;
        let rho12 = coherence(root.w, omega_eff, delta_eff, params.gamma);
        let stability = classify_stability(root.w, params, mech)?;
        let marginal = root.double || stability == Stability::Marginal;
        out.push(SteadyStateSolution {
            w: root.w,
            rho22: 0.5 * (1.0 - root.w),
            rho12,
            omega_eff,
            delta_eff,
            branch,
            stable: stability == Stability::Stable,
            marginal,
            residual: root.residual,
        });
    }
    out.sort_by_key(|s| s.branch);
    Ok(out)
}

/// The steady state on `branch`, if that branch exists at `params.omega`.
pub fn solution_on_branch(params: &MediumParams, mech: Mechanism, branch: Branch) -> Result<SteadyStateSolution> {
    steady_states(params, mech)?
        .into_iter()
        .find(|s| s.branch == branch)
        .ok_or(IobError::BranchAbsent {
            branch: branch.as_str(),
            omega: params.omega,
        })
}

/// `|Ω|² (Δ̄² + Γ²/4) / ((Δ̄ − ζ_L W)² + Γ²/4)`.
pub fn effective_rabi_sq_relation(params: &MediumParams, w: f64, delta_eff: f64) -> f64 {
    let g2 = 0.25 * params.gamma * params.gamma;
    let shifted = delta_eff - params.zeta_lorentz * w;
    params.omega * params.omega * (delta_eff * delta_eff + g2) / (shifted * shifted + g2)
}
