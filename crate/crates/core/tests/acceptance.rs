//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use iob_core::dynamics::{self, BlochState, SweepOptions};
use iob_core::hysteresis::{find_thresholds, scan_hysteresis, Thresholds};
use iob_core::peaks::{peak_map, Family};
use iob_core::spectrum::{self, B2Form};
use iob_core::steady_state::{self, effective_rabi_sq_relation, solve_inversion};
use iob_core::verify;
use iob_core::{Branch, Mechanism, MediumParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn medium(mech: Mechanism) -> MediumParams {
    let zeta = 50.0;
    MediumParams {
        gamma: 1.0,
        delta: 3.0,
        omega: 0.0,
        zeta_lorentz: zeta,
        zeta_detuning: zeta,
    }
    .restricted_to(mech)
}

fn thresholds(mech: Mechanism) -> Thresholds {
    find_thresholds(&medium(mech), mech, (0.0, 25.0))
        .expect("threshold search")
        .expect("bistable")
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn c1_thresholds() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for mech in [Mechanism::Lorentz, Mechanism::Detuning] {
        let t = thresholds(mech);
        let up_ok = (t.up - 15.6).abs() <= 0.1;
        let down_ok = (t.down - 1.6).abs() <= 0.1;
        ok &= up_ok && down_ok;
        parts.push(format!(
            "{mech}: up {:.4} (15.6±0.1 {}), down {:.4} (1.6±0.1 {})",
            t.up,
            if up_ok { "ok" } else { "MISS" },
            t.down,
            if down_ok { "ok" } else { "MISS" }
        ));
    }
    outcome(ok, parts.join("; "))
}

fn c2_hysteresis_shape() -> Outcome {
    let mech = Mechanism::Lorentz;
    let p = medium(mech);
    let grid = linspace(0.0, 25.0, 501);
    let scan = scan_hysteresis(&p, mech, &grid).unwrap();
    let counts: Vec<usize> = scan.points.iter().map(|pt| pt.solutions.len()).collect();
    let windows = counts.windows(2).filter(|w| w[0] != 3 && w[1] == 3).count();
    let counts_ok = counts.iter().all(|&n| n == 1 || n == 3);
    let mut middle_unstable = true;
    let mut outer_stable = true;
    let mut worst_ratio: f64 = 0.0;
    for pt in scan.points.iter().filter(|pt| pt.solutions.len() == 3) {
        let [lower, middle, upper] = [pt.solutions[0], pt.solutions[1], pt.solutions[2]];
        middle_unstable &= middle.branch == Branch::Middle && !middle.stable;
        outer_stable &= lower.stable && upper.stable;
        let free = steady_state::solution_on_branch(
            &MediumParams::free_atom(1.0, p.delta, pt.omega),
            mech,
            Branch::Lower,
        )
        .unwrap();
        worst_ratio = worst_ratio.max(lower.rho22 / free.rho22);
    }
    let ok = windows == 1 && counts_ok && middle_unstable && outer_stable && worst_ratio < 0.5;
    outcome(
        ok,
        format!(
            "3-root windows {windows}, counts in {{1,3}} {counts_ok}, middle unstable {middle_unstable}, \
             outer stable {outer_stable}, max lower/free rho22 {worst_ratio:.3e} (< 0.5)"
        ),
    )
}

fn c3_spectrum_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(verify::DEFAULT_SEED);
    let c = verify::check_spectrum_oracle(&mut rng, B2Form::Corrected, 20, 401);
    outcome(c.passed, format!("20 sets x 401 points, max rel dev {:.3e} (<= 1e-10)", c.max_deviation))
}

fn c4_factorization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(verify::DEFAULT_SEED ^ 0xfac7);
    let c = verify::check_factorization(&mut rng, B2Form::Corrected, 1000);
    outcome(c.passed, format!("1000 sets, max rel dev {:.3e} (<= 1e-12)", c.max_deviation))
}

/// Offset of the sampled satellite maximum from `ν_p`, in grid steps.
fn satellite_argmax_offset(result: &spectrum::SpectrumResult, nu_p: f64) -> f64 {
    let g = &result.nu_grid;
    let step = g[1] - g[0];
    let (mut best, mut best_nu) = (f64::NEG_INFINITY, f64::NAN);
    for (i, (&nu, &s)) in g.iter().zip(&result.incoherent).enumerate() {
        // Local maxima on the positive side, away from the central line.
        if i == 0 || i + 1 == g.len() || nu < 0.5 * nu_p {
            continue;
        }
        if s >= result.incoherent[i - 1] && s >= result.incoherent[i + 1] && s > best {
            best = s;
            best_nu = nu;
        }
    }
    (best_nu - nu_p).abs() / step
}

fn c5_peaks() -> Outcome {
    let both = MediumParams {
        gamma: 1.0,
        delta: 3.0,
        omega: 0.0,
        zeta_lorentz: 50.0,
        zeta_detuning: 50.0,
    };
    let mechs = [Mechanism::Lorentz, Mechanism::Detuning];
    let grid = linspace(0.0, 25.0, 251);
    let rows = peak_map(&both, &mechs, true, &grid).unwrap();

    let has = |f: Family, b: Branch| rows.iter().any(|r| r.family == f && r.branch == b && r.nu_p.is_some());
    let mut families_ok = has(Family::Free, Branch::Lower);
    for m in mechs {
        families_ok &= has(Family::Mechanism(m), Branch::Lower) && has(Family::Mechanism(m), Branch::Upper);
    }
    let finite = rows.iter().all(|r| r.nu_p.is_none_or(f64::is_finite));

    // Sampled argmax against ν_p for every stable row with ν_p ≥ 5Γ.
    let mut worst_steps: f64 = 0.0;
    let mut checked = 0;
    for r in rows.iter().filter(|r| r.stable && r.nu_p.is_some_and(|n| n >= 5.0)) {
        let (p, mech) = match r.family {
            Family::Mechanism(m) => (both.restricted_to(m), m),
            Family::Free => (MediumParams::free_atom(1.0, 3.0, 0.0), Mechanism::Lorentz),
        };
        let res = spectrum::spectrum_for_branch(&p.with_omega(r.omega), mech, r.branch, None).unwrap();
        // No excitation, no inelastic line to locate.
        if res.rho22 == 0.0 {
            continue;
        }
        worst_steps = worst_steps.max(satellite_argmax_offset(&res, r.nu_p.unwrap()));
        checked += 1;
    }

    // Point 1: lower branch at the upward threshold.
    let omega1 = thresholds(Mechanism::Lorentz).just_below_up();
    let nu_p_at = |mech: Mechanism| {
        let s = steady_state::solution_on_branch(&both.restricted_to(mech).with_omega(omega1), mech, Branch::Lower).unwrap();
        let c = spectrum::spectrum_coefficients(s.omega_eff.norm_sqr(), s.delta_eff, 1.0);
        spectrum::satellite_offset(&c).unwrap_or(0.0)
    };
    let (lor, det) = (nu_p_at(Mechanism::Lorentz), nu_p_at(Mechanism::Detuning));
    let ratio = det / lor;

    let ok = families_ok && finite && worst_steps <= 1.0 && ratio > 10.0;
    outcome(
        ok,
        format!(
            "{} rows, families present {families_ok}, finite {finite}; argmax offset max {worst_steps:.3} steps over \
             {checked} spectra (<= 1); point-1 nu_p detuning {det:.3} / lorentz {lor:.3} = {ratio:.3} (> 10)",
            rows.len()
        ),
    )
}

fn c6_mechanism_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut mismatched = 0;
    for omega in linspace(0.0, 25.0, 100) {
        let a = solve_inversion(&medium(Mechanism::Lorentz).with_omega(omega), Mechanism::Lorentz).unwrap();
        let b = solve_inversion(&medium(Mechanism::Detuning).with_omega(omega), Mechanism::Detuning).unwrap();
        if a.len() != b.len() {
            mismatched += 1;
            continue;
        }
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).abs());
        }
    }
    outcome(
        mismatched == 0 && worst <= 1e-12,
        format!("100 drives, root-count mismatches {mismatched}, max |dW| {worst:.3e} (<= 1e-12)"),
    )
}

fn c7_rabi_relation() -> Outcome {
    let mech = Mechanism::Lorentz;
    let p = medium(mech);
    let t = thresholds(mech);
    let grid = linspace(0.0, 4.0 * t.up, 400);
    let scan = scan_hysteresis(&p, mech, &grid).unwrap();
    let mut worst: f64 = 0.0;
    for pt in &scan.points {
        for s in &pt.solutions {
            let expected = effective_rabi_sq_relation(&p.with_omega(pt.omega), s.w, s.delta_eff);
            let got = s.omega_eff.norm_sqr();
            worst = worst.max(if expected == 0.0 { got } else { ((got - expected) / expected).abs() });
        }
    }
    // Upper branch beyond 3 Ω↑.
    let mut deviations = Vec::new();
    for omega in linspace(3.0 * t.up, 6.0 * t.up, 31) {
        let s = steady_state::solution_on_branch(&p.with_omega(omega), mech, Branch::Upper).unwrap();
        deviations.push((s.omega_eff.norm() / omega - 1.0).abs());
    }
    let decreasing = deviations.windows(2).all(|w| w[1] <= w[0]);
    let at_three = deviations[0];
    let ok = worst <= 1e-10 && at_three < 0.02 && decreasing;
    outcome(
        ok,
        format!(
            "relation max rel dev {worst:.3e} (<= 1e-10); upper-branch ||Omega_eff|/Omega - 1| at 3*Omega_up = {at_three:.4} \
             (< 0.02), at 6*Omega_up = {:.4}, decreasing {decreasing}",
            deviations[deviations.len() - 1]
        ),
    )
}

fn c8_dynamics() -> Outcome {
    let mech = Mechanism::Lorentz;
    let p = medium(mech);
    let t = thresholds(mech);
    let opts = SweepOptions::default();
    let up = dynamics::sweep_adiabatic(&p, mech, 10.0, 20.0, 1e-3, &opts).unwrap();
    let down = dynamics::sweep_adiabatic(&p, mech, 5.0, 0.5, 1e-3, &opts).unwrap();
    let up_jump = up.jumps.first().map(|j| j.omega);
    let down_jump = down.jumps.first().map(|j| j.omega);
    let up_err = up_jump.map_or(f64::INFINITY, |j| (j - t.up).abs() / t.up);
    let down_err = down_jump.map_or(f64::INFINITY, |j| (j - t.down).abs() / t.down);
    let single_jumps = up.jumps.len() == 1 && down.jumps.len() == 1;

    // Perturbations inside the window.
    let omega = 8.0;
    let at = p.with_omega(omega);
    let sols = steady_state::steady_states(&at, mech).unwrap();
    let [lower, middle, upper] = [sols[0], sols[1], sols[2]];
    let ode = iob_core::ode::OdeOptions::default();
    let end_state = |start: BlochState, t_end: f64| {
        let tr = dynamics::integrate(start, &at, mech, |_| omega, t_end, &[t_end], &ode).unwrap();
        tr.states[0]
    };
    let nudge = |s: BlochState, toward: BlochState, eps: f64| {
        let d = s.distance(&toward);
        BlochState {
            u: s.u + eps * (toward.u - s.u) / d,
            v: s.v + eps * (toward.v - s.v) / d,
            w: s.w + eps * (toward.w - s.w) / d,
        }
    };
    let mid = middle.bloch_state();
    let to_upper = end_state(nudge(mid, upper.bloch_state(), 1e-6), 400.0);
    let to_lower = end_state(nudge(mid, lower.bloch_state(), 1e-6), 400.0);
    let diverges = to_upper.distance(&upper.bloch_state()) < 1e-6 && to_lower.distance(&lower.bloch_state()) < 1e-6;
    let mut reconverge: f64 = 0.0;
    for s in [upper, lower] {
        let b = s.bloch_state();
        let kicked = BlochState {
            u: b.u + 1e-3,
            v: b.v - 1e-3,
            w: b.w + 1e-3,
        };
        reconverge = reconverge.max(end_state(kicked, 50.0).distance(&b));
    }

    // Jacobian against central differences.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut fd_worst: f64 = 0.0;
    for _ in 0..50 {
        use rand::Rng;
        let s = BlochState {
            u: rng.random_range(-0.6..0.6),
            v: rng.random_range(-0.6..0.6),
            w: rng.random_range(-0.5..1.0),
        };
        let om = rng.random_range(0.0..20.0);
        for m in [Mechanism::Lorentz, Mechanism::Detuning] {
            let q = medium(m);
            let j = dynamics::jacobian(&s, &q, m, om);
            let h = 1e-5;
            for k in 0..3 {
                let mut a = s.to_array();
                let mut b = s.to_array();
                a[k] += h;
                b[k] -= h;
                let fa = dynamics::bloch_rhs(&BlochState::from_array(a), &q, m, om).to_array();
                let fb = dynamics::bloch_rhs(&BlochState::from_array(b), &q, m, om).to_array();
                for r in 0..3 {
                    fd_worst = fd_worst.max((j[(r, k)] - (fa[r] - fb[r]) / (2.0 * h)).abs());
                }
            }
        }
    }

    let ok = up_err <= 0.02 && down_err <= 0.05 && single_jumps && diverges && reconverge < 1e-6 && fd_worst <= 1e-6;
    outcome(
        ok,
        format!(
            "up jump {:.4} vs {:.4} ({:.2}% <= 2%), down jump {:.4} vs {:.4} ({:.2}% <= 5%), one jump each {single_jumps}; \
             middle splits to both outer branches {diverges}; kick residual {reconverge:.2e} (< 1e-6); \
             jacobian fd dev {fd_worst:.2e} (<= 1e-6)",
            up_jump.unwrap_or(f64::NAN),
            t.up,
            100.0 * up_err,
            down_jump.unwrap_or(f64::NAN),
            t.down,
            100.0 * down_err
        ),
    )
}

fn c9_mollow() -> Outcome {
    let p = MediumParams::free_atom(1.0, 0.0, 20.0);
    let res = spectrum::spectrum_for_branch(&p, Mechanism::Lorentz, Branch::Lower, None).unwrap();
    let g = &res.nu_grid;
    let n = g.len();
    let even = (0..n).map(|i| (res.incoherent[i] - res.incoherent[n - 1 - i]).abs() / res.incoherent[i]).fold(0.0, f64::max);
    let centre = res.density(0.0);
    let nu_p = (4.0f64 * 400.0 - 0.75).sqrt();
    let (mut sat, mut sat_nu) = (0.0, 0.0);
    for (&nu, &s) in g.iter().zip(&res.incoherent) {
        if nu > 0.5 * nu_p && s > sat {
            sat = s;
            sat_nu = nu;
        }
    }
    let step = g[1] - g[0];
    let ratio = centre / sat;
    let steps = (sat_nu - nu_p).abs() / step;
    let ok = even <= 1e-12 && (ratio / 3.0 - 1.0).abs() <= 0.05 && steps <= 1.0;
    outcome(
        ok,
        format!("evenness {even:.1e} (<= 1e-12), centre/satellite {ratio:.4} (3 ± 5%), satellite offset {steps:.3} steps (<= 1)"),
    )
}

fn c10_sum_rule() -> Outcome {
    let c = verify::check_sum_rule();
    let kappa = verify::sum_rule_ratios(&verify::sum_rule_cases())[0];
    outcome(
        c.passed,
        format!(
            "{} sets, kappa = {:.12}, max rel spread {:.3e} (<= 1e-6)",
            c.samples,
            kappa.unwrap_or(f64::NAN),
            c.max_deviation
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        ("C1 thresholds", c1_thresholds, Duration::from_secs(1)),
        ("C2 hysteresis shape", c2_hysteresis_shape, Duration::from_secs(1)),
        ("C3 spectrum oracle", c3_spectrum_oracle, Duration::from_secs(1)),
        ("C4 factorization", c4_factorization, Duration::from_millis(100)),
        ("C5 peak positions", c5_peaks, Duration::from_secs(5)),
        ("C6 mechanism equivalence", c6_mechanism_equivalence, Duration::from_millis(500)),
        ("C7 effective Rabi", c7_rabi_relation, Duration::from_millis(500)),
        ("C8 dynamics", c8_dynamics, Duration::from_secs(30)),
        ("C9 Mollow limit", c9_mollow, Duration::from_millis(500)),
        ("C10 sum rule", c10_sum_rule, Duration::from_secs(2)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = o.passed && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.3} s, budget {:.1} s{}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs_f64(),
            if in_time { "" } else { ", OVER BUDGET" }
        );
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
