//! Physical inputs and the choice of bistability mechanism.
//!
//! Every frequency is expressed in the same unit; the CLI and the examples use
//! units of the spontaneous decay rate (`gamma = 1`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{IobError, Result};

/// Physical inputs of the dense two-level medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// Spontaneous decay rate, the frequency unit.
    pub gamma: f64,
    /// Bare detuning of the atomic transition from the laser.
    pub delta: f64,
    /// Bare Rabi frequency. Its phase is unobservable and fixed to zero.
    pub omega: f64,
    /// Near dipole-dipole (Lorentz local-field) coupling.
    pub zeta_lorentz: f64,
    /// Phenomenological excitation-dependent shift of the transition.
    pub zeta_detuning: f64,
}

impl Default for MediumParams {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            delta: 0.0,
            omega: 0.0,
            zeta_lorentz: 0.0,
            zeta_detuning: 0.0,
        }
    }
}

impl MediumParams {
    pub fn new(gamma: f64, delta: f64, omega: f64, zeta_lorentz: f64, zeta_detuning: f64) -> Result<Self> {
        let p = Self {
            gamma,
            delta,
            omega,
            zeta_lorentz,
            zeta_detuning,
        };
        p.validate()?;
        Ok(p)
    }

    /// Free atom with the given drive and detuning.
    pub fn free_atom(gamma: f64, delta: f64, omega: f64) -> Self {
        Self {
            gamma,
            delta,
            omega,
            ..Self::default()
        }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("omega", self.omega),
            ("zeta_lorentz", self.zeta_lorentz),
            ("zeta_detuning", self.zeta_detuning),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(IobError::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
        }
        if self.gamma <= 0.0 {
            return Err(IobError::InvalidParameter {
                name: "gamma",
                value: self.gamma,
                reason: "must be positive",
            });
        }
        for (name, value) in [
            ("omega", self.omega),
            ("zeta_lorentz", self.zeta_lorentz),
            ("zeta_detuning", self.zeta_detuning),
        ] {
            if value < 0.0 {
                return Err(IobError::InvalidParameter {
                    name,
                    value,
                    reason: "must be non-negative",
                });
            }
        }
        Ok(())
    }

    /// Copy of the parameters keeping only the coupling used by `mech`.
    pub fn restricted_to(self, mech: Mechanism) -> Self {
        match mech {
            Mechanism::Lorentz => Self {
                zeta_detuning: 0.0,
                ..self
            },
            Mechanism::Detuning => Self {
                zeta_lorentz: 0.0,
                ..self
            },
            Mechanism::Joint => self,
        }
    }

    /// Divide every frequency by `factor`.
    pub fn rescaled(self, factor: f64) -> Self {
        Self {
            gamma: self.gamma / factor,
            delta: self.delta / factor,
            omega: self.omega / factor,
            zeta_lorentz: self.zeta_lorentz / factor,
            zeta_detuning: self.zeta_detuning / factor,
        }
    }
}

/// Which renormalization produces the bistability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    /// Local-field corrected Rabi frequency, `Ω̄ = Ω + ζ_L ρ12`.
    Lorentz,
    /// Excitation dependent detuning, `Δ̄ = Δ − ζ_m W`.
    Detuning,
    /// Both renormalizations at once. Experimental.
    Joint,
}

impl Mechanism {
    pub const ALL: [Mechanism; 3] = [Mechanism::Lorentz, Mechanism::Detuning, Mechanism::Joint];

    pub fn as_str(self) -> &'static str {
        match self {
            Mechanism::Lorentz => "lorentz",
            Mechanism::Detuning => "detuning",
            Mechanism::Joint => "joint",
        }
    }

    pub fn check(self, params: &MediumParams) -> Result<()> {
        params.validate()?;
        match self {
            Mechanism::Lorentz if params.zeta_detuning != 0.0 => Err(IobError::InconsistentMechanism {
                mechanism: self.as_str(),
                reason: "zeta_detuning must be zero",
            }),
            Mechanism::Detuning if params.zeta_lorentz != 0.0 => Err(IobError::InconsistentMechanism {
                mechanism: self.as_str(),
                reason: "zeta_lorentz must be zero",
            }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mechanism {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lorentz" => Ok(Mechanism::Lorentz),
            "detuning" => Ok(Mechanism::Detuning),
            "joint" => Ok(Mechanism::Joint),
            other => Err(format!("unknown mechanism `{other}`")),
        }
    }
}

/// Steady-state branch of the hysteresis loop, ordered by excitation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Lower,
    Middle,
    Upper,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Lower => "lower",
            Branch::Middle => "middle",
            Branch::Upper => "upper",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lower" => Ok(Branch::Lower),
            "middle" => Ok(Branch::Middle),
            "upper" => Ok(Branch::Upper),
            other => Err(format!("unknown branch `{other}`")),
        }
    }
}

/// Coupling constant entering the inversion cubic.
pub fn zeta_total(params: &MediumParams, mech: Mechanism) -> Result<f64> {
    mech.check(params)?;
    Ok(match mech {
        Mechanism::Lorentz => params.zeta_lorentz,
        Mechanism::Detuning => params.zeta_detuning,
        Mechanism::Joint => params.zeta_lorentz + params.zeta_detuning,
    })
}
