//! Time-domain mean-field Bloch equations.
//!
//! The local field and the detuning shift follow the instantaneous state:
//! `Ω̄(t) = Ω(t) + ζ_L ρ12(t)` and `Δ̄(t) = Δ − ζ_m W(t)`. With
//! `ρ12 = (u + iv)/2` the equations of motion are
//!
//! ```text
//! u' = −Δ̄ v − Γ u / 2 + 2 Im(Ω̄) W
//! v' =  Δ̄ u − Γ v / 2 − 2 Re(Ω̄) W
//! W' =  2 (Re(Ω̄) v − Im(Ω̄) u) + Γ (1 − W)
//! ```

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{IobError, Result};
use crate::ode::{self, OdeOptions, OdeStats};
use crate::params::{Mechanism, MediumParams};
use crate::steady_state;

/// Coherence quadratures and population difference of one atom.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochState {
    pub u: f64,
    pub v: f64,
    /// Population difference `ρ11 − ρ22` (1 in the ground state).
    pub w: f64,
}

impl BlochState {
    pub const GROUND: BlochState = BlochState { u: 0.0, v: 0.0, w: 1.0 };

    pub fn from_coherence(rho12: Complex64, w: f64) -> Self {
        Self {
            u: 2.0 * rho12.re,
            v: 2.0 * rho12.im,
            w,
        }
    }

    pub fn coherence(&self) -> Complex64 {
        Complex64::new(0.5 * self.u, 0.5 * self.v)
    }

    pub fn rho22(&self) -> f64 {
        0.5 * (1.0 - self.w)
    }

    /// Squared radius in the Bloch ball.
    pub fn radius_sq(&self) -> f64 {
        self.u * self.u + self.v * self.v + self.w * self.w
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.u, self.v, self.w]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self {
            u: a[0],
            v: a[1],
            w: a[2],
        }
    }

    pub fn distance(&self, other: &BlochState) -> f64 {
        ((self.u - other.u).powi(2) + (self.v - other.v).powi(2) + (self.w - other.w).powi(2)).sqrt()
    }
}

fn couplings(params: &MediumParams, mech: Mechanism) -> (f64, f64) {
    let p = params.restricted_to(mech);
    (p.zeta_lorentz, p.zeta_detuning)
}

/// Time derivative of the state under the drive `omega_now`.
pub fn bloch_rhs(state: &BlochState, params: &MediumParams, mech: Mechanism, omega_now: f64) -> BlochState {
    let (zl, zm) = couplings(params, mech);
    let g = params.gamma;
    let delta_eff = params.delta - zm * state.w;
    let om_re = omega_now + 0.5 * zl * state.u;
    let om_im = 0.5 * zl * state.v;
    BlochState {
        u: -delta_eff * state.v - 0.5 * g * state.u + 2.0 * om_im * state.w,
        v: delta_eff * state.u - 0.5 * g * state.v - 2.0 * om_re * state.w,
        w: 2.0 * (om_re * state.v - om_im * state.u) + g * (1.0 - state.w),
    }
}

/// Analytic Jacobian of [`bloch_rhs`] with respect to `(u, v, W)`.
pub fn jacobian(state: &BlochState, params: &MediumParams, mech: Mechanism, omega_now: f64) -> Matrix3<f64> {
    let (zl, zm) = couplings(params, mech);
    let g = params.gamma;
    let BlochState { u, v, w } = *state;
    let delta_eff = params.delta - zm * w;
    let om_re = omega_now + 0.5 * zl * u;
    let om_im = 0.5 * zl * v;
    // ∂Re Ω̄/∂u = ζ_L/2, ∂Im Ω̄/∂v = ζ_L/2, ∂Δ̄/∂W = −ζ_m
    let d_re_du = 0.5 * zl;
    let d_im_dv = 0.5 * zl;
    Matrix3::new(
        -0.5 * g,
        -delta_eff + 2.0 * d_im_dv * w,
        zm * v + 2.0 * om_im,
        delta_eff - 2.0 * d_re_du * w,
        -0.5 * g,
        -zm * u - 2.0 * om_re,
        2.0 * (d_re_du * v - om_im),
        2.0 * (om_re - d_im_dv * u),
        -g,
    )
}

pub fn eigenvalues(state: &BlochState, params: &MediumParams, mech: Mechanism, omega_now: f64) -> Result<[Complex64; 3]> {
    let j = jacobian(state, params, mech, omega_now);
    let ev = j
        .try_schur(1e-15, 10_000)
        .ok_or(IobError::SingularMatrix { determinant: j.determinant().abs() })?
        .complex_eigenvalues();
    Ok([ev[0], ev[1], ev[2]])
}

pub fn leading_eigenvalue_real_part(
    state: &BlochState,
    params: &MediumParams,
    mech: Mechanism,
    omega_now: f64,
) -> Result<f64> {
    Ok(eigenvalues(state, params, mech, omega_now)?
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Sampled solution of the Bloch equations.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlochState>,
    /// Drive `Ω(t)` at each sample.
    pub drive: Vec<f64>,
    /// Largest `u² + v² + W²` over every accepted integrator step.
    pub max_radius_sq: f64,
    #[serde(skip)]
    pub stats: OdeStats,
}

/// `n` equally spaced samples on `[0, t_end]` (both ends included).
pub fn uniform_times(t_end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t_end],
        _ => (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Integrate from `state0` at `t = 0` to `t_end` under the drive `drive(t)`.
pub fn integrate<D>(
    state0: BlochState,
    params: &MediumParams,
    mech: Mechanism,
    drive: D,
    t_end: f64,
    sample_times: &[f64],
    opts: &OdeOptions,
) -> Result<Trajectory>
where
    D: Fn(f64) -> f64,
{
    mech.check(params)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(IobError::InvalidParameter {
            name: "t_end",
            value: t_end,
            reason: "must be positive and finite",
        });
    }
    for (name, value) in [("rel_tol", opts.tol.rel), ("abs_tol", opts.tol.abs)] {
        if !(value > 0.0 && value <= 1e-3) {
            return Err(IobError::InvalidParameter {
                name,
                value,
                reason: "must lie in (0, 1e-3]",
            });
        }
    }
    if sample_times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(IobError::InvalidGrid("sample times must be strictly increasing".into()));
    }
    if sample_times.iter().any(|&t| !(0.0..=t_end).contains(&t)) {
        return Err(IobError::InvalidGrid("sample times must lie in [0, t_end]".into()));
    }

    let mut max_radius_sq = state0.radius_sq();
    let (ys, stats) = ode::dopri5(
        |t, y: &[f64; 3]| bloch_rhs(&BlochState::from_array(*y), params, mech, drive(t)).to_array(),
        0.0,
        state0.to_array(),
        t_end,
        sample_times,
        opts,
        |_, y| {
            max_radius_sq = max_radius_sq.max(BlochState::from_array(*y).radius_sq());
        },
    )?;
    Ok(Trajectory {
        times: sample_times.to_vec(),
        states: ys.into_iter().map(BlochState::from_array).collect(),
        drive: sample_times.iter().map(|&t| drive(t)).collect(),
        max_radius_sq,
        stats,
    })
}

/// Damped Newton search for a zero of [`bloch_rhs`] starting at `guess`.
pub fn find_fixed_point(guess: BlochState, params: &MediumParams, mech: Mechanism, omega: f64) -> Option<BlochState> {
    let norm = |s: &BlochState| bloch_rhs(s, params, mech, omega).radius_sq().sqrt();
    let mut x = guess;
    let mut fx = norm(&x);
    for _ in 0..200 {
        if fx < 1e-14 {
            return Some(x);
        }
        let f = bloch_rhs(&x, params, mech, omega);
        let j = jacobian(&x, params, mech, omega);
        let step = j.lu().solve(&nalgebra::Vector3::new(f.u, f.v, f.w))?;
        let mut lambda = 1.0;
        loop {
            let trial = BlochState {
                u: x.u - lambda * step[0],
                v: x.v - lambda * step[1],
                w: x.w - lambda * step[2],
            };
            let ft = norm(&trial);
            if ft < fx || lambda < 1e-10 {
                x = trial;
                fx = ft;
                break;
            }
            lambda *= 0.5;
        }
    }
    (fx < 1e-10).then_some(x)
}

/// All fixed points reachable from a fan of starts along the `W` axis.
pub fn fixed_points(params: &MediumParams, mech: Mechanism, omega: f64) -> Vec<BlochState> {
    let mut found: Vec<BlochState> = Vec::new();
    for i in 0..=200 {
        let w0 = -1.0 + 2.0 * i as f64 / 200.0;
        let guess = BlochState { u: 0.0, v: 0.0, w: w0 };
        if let Some(p) = find_fixed_point(guess, params, mech, omega) {
            if p.radius_sq() <= 1.0 + 1e-9 && !found.iter().any(|q| q.distance(&p) < 1e-7) {
                found.push(p);
            }
        }
    }
    found.sort_by(|a, b| a.w.total_cmp(&b.w));
    found
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub ode: OdeOptions,
    /// Spacing of the recorded samples in drive units.
    pub omega_step: f64,
    /// Distance in `W` from the nearest stable steady state above which the
    /// trajectory counts as off the slow manifold.
    pub manifold_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            omega_step: 1e-3,
            manifold_tol: 0.05,
        }
    }
}

/// A fast transition between branches during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    /// Drive at the steepest point of the transition.
    pub omega: f64,
    pub w_before: f64,
    pub w_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub trajectory: Trajectory,
    pub jumps: Vec<Jump>,
    /// Largest distance from the stable manifold outside jump windows.
    pub max_manifold_distance: f64,
    /// Set when `max_manifold_distance` exceeds the tolerance.
    pub non_adiabatic: bool,
}

pub const MAX_RAMP_RATE: f64 = 1e-3;

/// Slowly ramp the drive linearly from `omega_start` to `omega_end`, starting
/// on the stable steady state (lowest excitation when ramping up, highest
/// when ramping down), and locate branch jumps.
pub fn sweep_adiabatic(
    params: &MediumParams,
    mech: Mechanism,
    omega_start: f64,
    omega_end: f64,
    ramp_rate: f64,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    mech.check(params)?;
    if !(ramp_rate > 0.0 && ramp_rate <= MAX_RAMP_RATE * params.gamma * params.gamma) {
        return Err(IobError::InvalidParameter {
            name: "ramp_rate",
            value: ramp_rate,
            reason: "must lie in (0, 1e-3 Γ²]",
        });
    }
    if omega_start < 0.0 || omega_end < 0.0 || omega_start == omega_end {
        return Err(IobError::InvalidParameter {
            name: "omega_end",
            value: omega_end,
            reason: "sweep endpoints must be non-negative and distinct",
        });
    }
    let span = omega_end - omega_start;
    let direction = span.signum();
    let t_end = span.abs() / ramp_rate;

    let start_states = steady_state::steady_states(&params.with_omega(omega_start), mech)?;
    let stable = start_states.iter().filter(|s| s.stable);
    let start = if direction > 0.0 {
        stable.max_by(|a, b| a.w.total_cmp(&b.w))
    } else {
        stable.min_by(|a, b| a.w.total_cmp(&b.w))
    }
    .ok_or(IobError::NoPhysicalRoot)?;

    let n = ((span.abs() / opts.omega_step).ceil() as usize).max(2) + 1;
    let times = uniform_times(t_end, n);
    let drive = |t: f64| omega_start + direction * ramp_rate * t;
    let trajectory = integrate(start.bloch_state(), params, mech, drive, t_end, &times, &opts.ode)?;

    // Distance to the nearest stable steady state at every sample.
    let distance: Vec<f64> = trajectory
        .drive
        .iter()
        .zip(&trajectory.states)
        .map(|(&om, s)| {
            steady_state::steady_states(&params.with_omega(om), mech)
                .map(|sols| {
                    sols.iter()
                        .filter(|x| x.stable || x.marginal)
                        .map(|x| (x.w - s.w).abs())
                        .fold(f64::INFINITY, f64::min)
                })
                .unwrap_or(f64::INFINITY)
        })
        .collect();

    let ws: Vec<f64> = trajectory.states.iter().map(|s| s.w).collect();
    // A sample is inside a transition when it is off the stable manifold or
    // when W changed by more than the jump threshold since the previous
    // sample (a transition faster than the sampling).
    let mut off: Vec<bool> = distance.iter().map(|&d| d > opts.manifold_tol).collect();
    for k in 1..ws.len() {
        if (ws[k] - ws[k - 1]).abs() > 2.0 * opts.manifold_tol {
            off[k] = true;
        }
    }
    let mut jumps = Vec::new();
    let mut max_manifold_distance: f64 = 0.0;
    let mut i = 0;
    while i < distance.len() {
        if !off[i] {
            max_manifold_distance = max_manifold_distance.max(distance[i]);
            i += 1;
            continue;
        }
        let begin = i;
        while i < distance.len() && off[i] {
            i += 1;
        }
        let end = i.min(distance.len() - 1);
        let before = ws[begin.saturating_sub(1)];
        let after = ws[end];
        if (after - before).abs() > 2.0 * opts.manifold_tol {
            let steepest = (begin.saturating_sub(1)..end)
                .max_by(|&a, &b| (ws[a + 1] - ws[a]).abs().total_cmp(&(ws[b + 1] - ws[b]).abs()))
                .unwrap_or(begin);
            jumps.push(Jump {
                omega: 0.5 * (trajectory.drive[steepest] + trajectory.drive[steepest + 1]),
                w_before: before,
                w_after: after,
            });
        } else {
            for d in &distance[begin..i] {
                max_manifold_distance = max_manifold_distance.max(*d);
            }
        }
    }

    Ok(SweepResult {
        non_adiabatic: max_manifold_distance > opts.manifold_tol,
        trajectory,
        jumps,
        max_manifold_distance,
    })
}

/// `∫ |W_up − W_down| dΩ` over the drive range shared by two sweeps.
pub fn hysteresis_loop_area(up: &SweepResult, down: &SweepResult) -> f64 {
    let curve = |s: &SweepResult| -> Vec<(f64, f64)> {
        let mut c: Vec<(f64, f64)> = s.trajectory.drive.iter().copied().zip(s.trajectory.states.iter().map(|x| x.w)).collect();
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
        c
    };
    let a = curve(up);
    let b = curve(down);
    if a.len() < 2 || b.len() < 2 {
        return 0.0;
    }
    let lo = a[0].0.max(b[0].0);
    let hi = a[a.len() - 1].0.min(b[b.len() - 1].0);
    if hi <= lo {
        return 0.0;
    }
    let interp = |c: &[(f64, f64)], x: f64| -> f64 {
        let k = c.partition_point(|p| p.0 < x).clamp(1, c.len() - 1);
        let (x0, y0) = c[k - 1];
        let (x1, y1) = c[k];
        if x1 == x0 {
            y0
        } else {
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    };
    let n = a.len().max(b.len());
    let h = (hi - lo) / (n - 1) as f64;
    let diff = |x: f64| (interp(&a, x) - interp(&b, x)).abs();
    let mut area = 0.5 * (diff(lo) + diff(hi));
    for k in 1..n - 1 {
        area += diff(lo + k as f64 * h);
    }
    area * h
}
