//! Switching thresholds and drive scans of the steady-state S-curve.

use serde::{Deserialize, Serialize};

use crate::error::{IobError, Result};
use crate::par;
use crate::params::{Mechanism, MediumParams};
use crate::steady_state::{self, SteadyStateSolution};

/// Bisection stops once the bracket is this narrow (in Γ units).
pub const THRESHOLD_TOL: f64 = 1e-7;
const COARSE_POINTS: usize = 4000;

/// Fold drives of the S-curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Ω↑: the lower branch ends and the system jumps up.
    pub up: f64,
    /// Ω↓: the upper branch ends and the system jumps down.
    pub down: f64,
    /// Final bisection brackets `(monostable side, bistable side)`.
    pub up_bracket: (f64, f64),
    pub down_bracket: (f64, f64),
}

impl Thresholds {
    /// A drive just inside the window next to Ω↑, where the lower branch
    /// still exists.
    pub fn just_below_up(&self) -> f64 {
        self.up_bracket.1
    }

    /// A drive just inside the window next to Ω↓, where the upper branch
    /// already exists.
    pub fn just_above_down(&self) -> f64 {
        self.down_bracket.1
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega > self.down && omega < self.up
    }
}

fn multi_root(params: &MediumParams, mech: Mechanism, omega: f64) -> Result<bool> {
    Ok(steady_state::solve_inversion(&params.with_omega(omega), mech)?.len() >= 2)
}

/// Bisect between a single-root drive `mono` and a multi-root drive `multi`.
fn bisect(params: &MediumParams, mech: Mechanism, mut mono: f64, mut multi: f64) -> Result<(f64, f64)> {
    while (multi - mono).abs() > THRESHOLD_TOL {
        let mid = 0.5 * (mono + multi);
        if mid == mono || mid == multi {
            break;
        }
        if multi_root(params, mech, mid)? {
            multi = mid;
        } else {
            mono = mid;
        }
    }
    Ok((mono, multi))
}

/// Locate Ω↓ < Ω↑ inside `omega_range` by bisection on the number of
/// physical roots. `Ok(None)` when the scanned range is monostable.
///
/// Fails with [`IobError::RangeTooNarrow`] when the multi-root window
/// touches either end of the range.
pub fn find_thresholds(params: &MediumParams, mech: Mechanism, omega_range: (f64, f64)) -> Result<Option<Thresholds>> {
    params.validate()?;
    mech.check(params)?;
    let (lo, hi) = omega_range;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(IobError::InvalidGrid(format!("threshold range [{lo}, {hi}] is not a valid drive interval")));
    }
    let mut probes: Vec<f64> = (0..=COARSE_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / COARSE_POINTS as f64)
        .collect();
    // Seed the coarse scan with the middle of the analytic fold window so a
    // window narrower than the coarse spacing is not missed.
    let folds = steady_state::fold_inversions(params, mech)?;
    if let [a, b] = folds[..] {
        let wa = steady_state::omega_for_inversion(params, mech, a)?;
        let wb = steady_state::omega_for_inversion(params, mech, b)?;
        let mid = 0.5 * (wa + wb);
        if mid > lo && mid < hi {
            probes.push(mid);
        }
    }
    probes.sort_by(|a, b| a.total_cmp(b));

    let flags = par::map(&probes, |&om| multi_root(params, mech, om));
    let flags = flags.into_iter().collect::<Result<Vec<bool>>>()?;
    let Some(first) = flags.iter().position(|&f| f) else {
        return Ok(None);
    };
    let last = flags.iter().rposition(|&f| f).expect("some flag is set");
    if first == 0 {
        return Err(IobError::RangeTooNarrow { omega: lo });
    }
    if last == probes.len() - 1 {
        return Err(IobError::RangeTooNarrow { omega: hi });
    }
    let down_bracket = bisect(params, mech, probes[first - 1], probes[first])?;
    let up_bracket = bisect(params, mech, probes[last + 1], probes[last])?;
    Ok(Some(Thresholds {
        down: 0.5 * (down_bracket.0 + down_bracket.1),
        up: 0.5 * (up_bracket.0 + up_bracket.1),
        up_bracket,
        down_bracket,
    }))
}

/// Steady states at one drive of a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub omega: f64,
    /// Ordered lower → upper. Empty if the solver failed.
    pub solutions: Vec<SteadyStateSolution>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HysteresisScan {
    pub points: Vec<ScanPoint>,
    pub omega_up: Option<f64>,
    pub omega_down: Option<f64>,
    /// Why the thresholds are missing, if they could not be located.
    pub threshold_warning: Option<String>,
}

impl HysteresisScan {
    pub fn failures(&self) -> impl Iterator<Item = &ScanPoint> {
        self.points.iter().filter(|p| p.error.is_some())
    }

    pub fn is_bistable(&self) -> bool {
        self.omega_up.is_some()
    }
}

/// Solve the steady state at every drive in `omega_grid` (strictly
/// increasing, non-negative). Per-point failures are recorded, not fatal.
pub fn scan_hysteresis(params: &MediumParams, mech: Mechanism, omega_grid: &[f64]) -> Result<HysteresisScan> {
    params.validate()?;
    mech.check(params)?;
    if omega_grid.is_empty() {
        return Err(IobError::InvalidGrid("empty drive grid".into()));
    }
    if omega_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(IobError::InvalidGrid("drive grid must be strictly increasing".into()));
    }
    if omega_grid.iter().any(|&o| !(o >= 0.0 && o.is_finite())) {
        return Err(IobError::InvalidGrid("drive values must be finite and non-negative".into()));
    }

    let points = par::map(omega_grid, |&omega| match steady_state::steady_states(&params.with_omega(omega), mech) {
        Ok(solutions) => ScanPoint {
            omega,
            solutions,
            error: None,
        },
        Err(e) => ScanPoint {
            omega,
            solutions: Vec::new(),
            error: Some(e.to_string()),
        },
    });

    let (omega_up, omega_down, threshold_warning) = if omega_grid.len() < 2 {
        (None, None, None)
    } else {
        match find_thresholds(params, mech, (omega_grid[0], omega_grid[omega_grid.len() - 1])) {
            Ok(Some(t)) => (Some(t.up), Some(t.down), None),
            Ok(None) => (None, None, None),
            Err(e) => (None, None, Some(e.to_string())),
        }
    };
    Ok(HysteresisScan {
        points,
        omega_up,
        omega_down,
        threshold_warning,
    })
}
