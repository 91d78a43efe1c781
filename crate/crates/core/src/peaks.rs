//! Satellite positions `±ν_p` across a drive grid.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{IobError, Result};
use crate::par;
use crate::params::{Branch, Mechanism, MediumParams};
use crate::spectrum;
use crate::steady_state;

/// Which medium a row of the peak map belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Mechanism(Mechanism),
    /// Reference with both couplings switched off.
    Free,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Mechanism(m) => m.as_str(),
            Family::Free => "free",
        }
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakRow {
    pub omega: f64,
    pub family: Family,
    pub branch: Branch,
    /// `None` when `4|Ω̄|² + Δ̄² < ¾Γ²`.
    pub nu_p: Option<f64>,
    pub stable: bool,
}

/// Peak positions for every mechanism in `mechanisms` (each evaluated with
/// only its own coupling switched on) and, optionally, the free atom.
///
/// Rows are ordered by drive, then family, then branch.
pub fn peak_map(
    params: &MediumParams,
    mechanisms: &[Mechanism],
    include_free: bool,
    omega_grid: &[f64],
) -> Result<Vec<PeakRow>> {
    params.validate()?;
    if omega_grid.iter().any(|&o| !(o >= 0.0 && o.is_finite())) {
        return Err(IobError::InvalidGrid("drive values must be finite and non-negative".into()));
    }
    let mut families: Vec<(Family, MediumParams, Mechanism)> = mechanisms
        .iter()
        .map(|&m| (Family::Mechanism(m), params.restricted_to(m), m))
        .collect();
    if include_free {
        families.push((
            Family::Free,
            MediumParams::free_atom(params.gamma, params.delta, 0.0),
            Mechanism::Lorentz,
        ));
    }
    for (_, p, m) in &families {
        m.check(p)?;
    }

    let per_point = par::map(omega_grid, |&omega| -> Result<Vec<PeakRow>> {
        let mut rows = Vec::new();
        for (family, p, mech) in &families {
            for sol in steady_state::steady_states(&p.with_omega(omega), *mech)? {
                let c = spectrum::spectrum_coefficients(sol.omega_eff.norm_sqr(), sol.delta_eff, p.gamma);
                rows.push(PeakRow {
                    omega,
                    family: *family,
                    branch: sol.branch,
                    nu_p: spectrum::satellite_offset(&c),
                    stable: sol.stable,
                });
            }
        }
        Ok(rows)
    });
    let mut out = Vec::new();
    for rows in per_point {
        out.extend(rows?);
    }
    Ok(out)
}
