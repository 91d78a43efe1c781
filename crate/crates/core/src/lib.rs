//! Intrinsic optical bistability of a dense two-level medium.
//!
//! Two renormalization mechanisms make the steady state multivalued: a
//! Lorentz local field that rescales the Rabi frequency (`ζ_L`) and an
//! excitation-dependent detuning shift (`ζ_m`). This crate solves the
//! resulting steady states, their resonance-fluorescence spectra and the
//! mean-field Bloch dynamics, and ships independent oracles for each closed
//! form.
//!
//! All frequencies are in units of the decay rate `Γ` (default `Γ = 1`).
//!
//! ```
//! use iob_core::{find_thresholds, Mechanism, MediumParams};
//!
//! let p = MediumParams::new(1.0, 3.0, 0.0, 50.0, 0.0).unwrap();
//! let t = find_thresholds(&p, Mechanism::Lorentz, (0.0, 25.0)).unwrap().unwrap();
//! assert!(t.down < t.up);
//! ```
//!
//! The `joint` mechanism (both couplings at once) is experimental.

pub mod cubic;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod hysteresis;
pub mod ode;
pub mod oracle;
pub mod par;
pub mod params;
pub mod peaks;
pub mod quadrature;
pub mod spectrum;
pub mod steady_state;
pub mod verify;

pub use dynamics::{BlochState, SweepOptions, SweepResult, Trajectory};
pub use error::{IobError, Result};
pub use grid::Grid;
pub use hysteresis::{find_thresholds, scan_hysteresis, HysteresisScan, Thresholds};
pub use params::{zeta_total, Branch, Mechanism, MediumParams};
pub use spectrum::{B2Form, SpectrumCoefficients, SpectrumResult};
pub use steady_state::{SteadyStateSolution, Stability};
