//! Oracle suite: every closed form checked against an independent route.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics;
use crate::hysteresis;
use crate::oracle;
use crate::params::{Branch, Mechanism, MediumParams};
use crate::spectrum::{self, B2Form};
use crate::steady_state::{self, DensityMatrix};

pub const DEFAULT_SEED: u64 = 0x010b_5eed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub b2_form: B2Form,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            b2_form: B2Form::Corrected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub samples: usize,
}

impl Check {
    fn new(name: &'static str, max_deviation: f64, tolerance: f64, samples: usize) -> Self {
        Self {
            name,
            max_deviation,
            tolerance,
            // NaN deviations fail.
            passed: max_deviation <= tolerance,
            samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Random effective parameters `(Ω̄, Δ̄, Γ)` with a random drive phase.
fn random_effective(rng: &mut ChaCha8Rng) -> (Complex64, f64, f64) {
    let gamma = rng.random_range(0.2..3.0);
    let magnitude = rng.random_range(0.0..20.0) * gamma;
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let delta = rng.random_range(-20.0..20.0) * gamma;
    (Complex64::from_polar(magnitude, phase), delta, gamma)
}

/// Stationary state for fixed effective parameters.
fn fixed_parameter_state(omega: Complex64, delta: f64, gamma: f64) -> DensityMatrix {
    let g2 = 0.25 * gamma * gamma;
    let w = (delta * delta + g2) / (2.0 * omega.norm_sqr() + delta * delta + g2);
    DensityMatrix {
        rho11: 0.5 * (1.0 + w),
        rho22: 0.5 * (1.0 - w),
        rho12: steady_state::coherence(w, omega, delta, gamma),
    }
}

pub fn check_spectrum_oracle(rng: &mut ChaCha8Rng, form: B2Form, sets: usize, points: usize) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..sets {
        let (omega, delta, gamma) = random_effective(rng);
        let rho = fixed_parameter_state(omega, delta, gamma);
        let c = spectrum::spectrum_coefficients_with(omega.norm_sqr(), delta, gamma, form);
        let nu_p = spectrum::satellite_offset(&c).unwrap_or(0.0);
        for nu in spectrum::default_nu_grid(nu_p, gamma, points) {
            let closed = spectrum::incoherent_spectrum(nu, &c, rho.rho22, gamma);
            let dev = match oracle::oracle_spectrum(nu, omega, delta, gamma, &rho) {
                Ok(reference) if reference != 0.0 => ((closed - reference) / reference).abs(),
                Ok(_) => closed.abs(),
                Err(_) => f64::INFINITY,
            };
            worst = worst.max(if dev.is_nan() { f64::INFINITY } else { dev });
        }
    }
    Check::new("spectrum_vs_linear_solve", worst, 1e-10, sets * points)
}

pub fn check_factorization(rng: &mut ChaCha8Rng, form: B2Form, sets: usize) -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..sets {
        let gamma = rng.random_range(0.1..5.0);
        // Every fourth set sits below the satellite threshold.
        let (o2, delta) = if i % 4 == 0 {
            let o2 = rng.random_range(0.0..0.18) * gamma * gamma;
            (o2, rng.random_range(-0.1..0.1) * gamma)
        } else {
            (rng.random_range(0.0..400.0) * gamma * gamma, rng.random_range(-30.0..30.0) * gamma)
        };
        let c = spectrum::spectrum_coefficients_with(o2, delta, gamma, form);
        worst = worst.max(c.identity_deviation().max());
    }
    Check::new("denominator_factorization", worst, 1e-12, sets)
}

fn bistable_medium(mech: Mechanism) -> MediumParams {
    let p = MediumParams {
        gamma: 1.0,
        delta: 3.0,
        omega: 0.0,
        zeta_lorentz: 50.0,
        zeta_detuning: 50.0,
    };
    p.restricted_to(mech)
}

/// Newton zeros of the Bloch right-hand side against the cubic's roots.
pub fn check_fixed_points(points: usize) -> (Check, Check) {
    let mut worst: f64 = 0.0;
    let mut stability_mismatch = 0usize;
    let mut total = 0usize;
    for mech in [Mechanism::Lorentz, Mechanism::Detuning] {
        let p = bistable_medium(mech);
        for i in 0..points {
            let omega = 0.5 + 24.5 * i as f64 / (points - 1) as f64;
            let at = p.with_omega(omega);
            let Ok(sols) = steady_state::steady_states(&at, mech) else {
                worst = f64::INFINITY;
                continue;
            };
            let found = dynamics::fixed_points(&at, mech, omega);
            if found.len() != sols.len() {
                worst = f64::INFINITY;
                continue;
            }
            let mut ws: Vec<f64> = sols.iter().map(|s| s.w).collect();
            ws.sort_by(|a, b| a.total_cmp(b));
            for (fp, w) in found.iter().zip(&ws) {
                worst = worst.max((fp.w - w).abs());
                total += 1;
                let leading = dynamics::leading_eigenvalue_real_part(fp, &at, mech, omega).unwrap_or(f64::NAN);
                let sol = sols.iter().min_by(|a, b| (a.w - fp.w).abs().total_cmp(&(b.w - fp.w).abs())).unwrap();
                if !sol.marginal && ((leading < 0.0) != sol.stable) {
                    stability_mismatch += 1;
                }
            }
        }
    }
    (
        Check::new("fixed_points_vs_cubic", worst, 1e-8, total),
        Check::new("stability_vs_jacobian", stability_mismatch as f64, 0.0, total),
    )
}

/// `|Ω̄|²` from the self-consistency against the closed relation on a
/// lorentz scan through the bistable window.
pub fn check_rabi_relation(points: usize) -> Check {
    let p = bistable_medium(Mechanism::Lorentz);
    let grid: Vec<f64> = (0..points).map(|i| 25.0 * i as f64 / (points - 1) as f64).collect();
    let mut worst: f64 = 0.0;
    let mut n = 0;
    match hysteresis::scan_hysteresis(&p, Mechanism::Lorentz, &grid) {
        Ok(scan) => {
            for pt in &scan.points {
                if pt.error.is_some() {
                    worst = f64::INFINITY;
                }
                for s in &pt.solutions {
                    let expected = steady_state::effective_rabi_sq_relation(&p.with_omega(pt.omega), s.w, s.delta_eff);
                    let got = s.omega_eff.norm_sqr();
                    let dev = if expected == 0.0 { got } else { ((got - expected) / expected).abs() };
                    worst = worst.max(dev);
                    n += 1;
                }
            }
        }
        Err(_) => worst = f64::INFINITY,
    }
    Check::new("effective_rabi_relation", worst, 1e-10, n)
}

/// Parameter sets for the sum-rule probe: free atoms, both mechanisms on
/// both outer branches, and a joint medium.
pub fn sum_rule_cases() -> Vec<(MediumParams, Mechanism, Branch)> {
    let free = |delta: f64, omega: f64| MediumParams::free_atom(1.0, delta, omega);
    let lor = bistable_medium(Mechanism::Lorentz);
    let det = bistable_medium(Mechanism::Detuning);
    vec![
        (free(0.0, 1.0), Mechanism::Lorentz, Branch::Lower),
        (free(3.0, 5.0), Mechanism::Lorentz, Branch::Lower),
        (free(-2.0, 0.3), Mechanism::Lorentz, Branch::Lower),
        (free(0.0, 20.0), Mechanism::Lorentz, Branch::Lower),
        (lor.with_omega(15.6), Mechanism::Lorentz, Branch::Upper),
        (lor.with_omega(15.6), Mechanism::Lorentz, Branch::Lower),
        (lor.with_omega(2.0), Mechanism::Lorentz, Branch::Upper),
        (det.with_omega(15.6), Mechanism::Detuning, Branch::Lower),
        (det.with_omega(40.0), Mechanism::Detuning, Branch::Upper),
        (
            MediumParams {
                gamma: 2.0,
                delta: -1.0,
                omega: 3.0,
                zeta_lorentz: 0.0,
                zeta_detuning: 7.0,
            },
            Mechanism::Detuning,
            Branch::Lower,
        ),
    ]
}

/// Ratios `∫S / (ρ22 − |ρ12|²)` for each case; `None` on failure.
pub fn sum_rule_ratios(cases: &[(MediumParams, Mechanism, Branch)]) -> Vec<Option<f64>> {
    cases
        .iter()
        .map(|(p, mech, branch)| {
            let sol = steady_state::solution_on_branch(p, *mech, *branch).ok()?;
            let result = spectrum::spectrum_for_solution(&sol, p.gamma, Some(&[0.0]));
            spectrum::sum_rule_ratio(&result, sol.rho22, sol.rho12).ok()
        })
        .collect()
}

pub fn check_sum_rule() -> Check {
    let cases = sum_rule_cases();
    let ratios = sum_rule_ratios(&cases);
    let worst = match ratios.first().copied().flatten() {
        Some(kappa) => ratios
            .iter()
            .map(|r| r.map_or(f64::INFINITY, |r| ((r - kappa) / kappa).abs()))
            .fold(0.0, f64::max),
        None => f64::INFINITY,
    };
    Check::new("sum_rule_constancy", worst, 1e-6, cases.len())
}

/// Closed-form coherence and population against the Liouvillian null space.
pub fn check_coherence(rng: &mut ChaCha8Rng, sets: usize) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..sets {
        let (omega, delta, gamma) = random_effective(rng);
        let closed = fixed_parameter_state(omega, delta, gamma);
        let dev = match oracle::stationary_density(omega, delta, gamma) {
            Ok(reference) => (closed.rho12 - reference.rho12)
                .norm()
                .max((closed.rho22 - reference.rho22).abs()),
            Err(_) => f64::INFINITY,
        };
        worst = worst.max(dev);
    }
    Check::new("coherence_vs_null_space", worst, 1e-12, sets)
}

/// Run every check. The randomized parameter sets depend only on `seed`.
pub fn run(opts: &VerifyOptions) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let spectrum = check_spectrum_oracle(&mut rng, opts.b2_form, 20, 401);
    let factorization = check_factorization(&mut rng, opts.b2_form, 1000);
    let coherence = check_coherence(&mut rng, 100);
    let (fixed, stability) = check_fixed_points(50);
    VerifyReport {
        seed: opts.seed,
        checks: vec![
            spectrum,
            factorization,
            fixed,
            stability,
            check_rabi_relation(101),
            check_sum_rule(),
            coherence,
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let report = run(&VerifyOptions::default());
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn printed_b2_is_caught() {
        let report = run(&VerifyOptions {
            b2_form: B2Form::AsPrinted,
            ..VerifyOptions::default()
        });
        assert!(!report.all_passed());
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        assert!(failed.contains(&"denominator_factorization"));
        assert!(failed.contains(&"spectrum_vs_linear_solve"));
    }

    #[test]
    fn seed_is_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(
            check_spectrum_oracle(&mut a, B2Form::Corrected, 2, 11),
            check_spectrum_oracle(&mut b, B2Form::Corrected, 2, 11)
        );
    }
}
