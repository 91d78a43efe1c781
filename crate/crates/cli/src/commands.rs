use std::io::Write;

use iob_core::dynamics::{self, BlochState, SweepOptions, SweepResult};
use iob_core::hysteresis::{find_thresholds, scan_hysteresis};
use iob_core::ode::OdeOptions;
use iob_core::peaks::peak_map;
use iob_core::spectrum::{self, B2Form};
use iob_core::steady_state::{self, SteadyStateSolution};
use iob_core::verify::{self, VerifyOptions};
use iob_core::{Mechanism, MediumParams};

use crate::error::CliError;
use crate::output::{Cell, MetaValue, Table};
use crate::{DynamicsArgs, HysteresisArgs, MediumArgs, Normalize, OutputArgs, PeaksArgs, SpectrumArgs, VerifyArgs};

fn params(m: &MediumArgs, omega: f64) -> Result<MediumParams, CliError> {
    Ok(MediumParams::new(m.gamma, m.delta, omega, m.zeta_l, m.zeta_m)?)
}

/// Explicit mechanism, or the one implied by the non-zero coupling.
fn mechanism(requested: Option<Mechanism>, p: &MediumParams) -> Result<Mechanism, CliError> {
    let mech = match requested {
        Some(m) => m,
        None if p.zeta_detuning == 0.0 => Mechanism::Lorentz,
        None if p.zeta_lorentz == 0.0 => Mechanism::Detuning,
        None => {
            return Err(CliError::Config(
                "both couplings are non-zero; pass --mechanism joint (experimental)".into(),
            ))
        }
    };
    mech.check(p)?;
    Ok(mech)
}

fn medium_meta(t: &mut Table, m: &MediumArgs) {
    t.meta("units", "gamma");
    t.meta("gamma", m.gamma);
    t.meta("delta", m.delta);
    t.meta("zeta_l", m.zeta_l);
    t.meta("zeta_m", m.zeta_m);
}

fn mechanism_meta(t: &mut Table, mechs: &[Mechanism]) {
    t.meta("mechanism", MetaValue::list(mechs.iter().map(|m| m.as_str())));
    if mechs.contains(&Mechanism::Joint) {
        t.meta("experimental", "joint mechanism");
    }
}

fn emit(table: &Table, out: &OutputArgs) -> Result<(), CliError> {
    let text = table.render(out.format);
    match &out.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match lock.write_all(text.as_bytes()).and_then(|_| lock.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r?,
            }
        }
    }
    Ok(())
}

fn solution_cells(s: &SteadyStateSolution) -> Vec<Cell> {
    vec![
        s.branch.as_str().into(),
        s.w.into(),
        s.rho22.into(),
        s.stable.into(),
        s.marginal.into(),
        s.omega_eff.norm().into(),
        s.delta_eff.into(),
        s.rho12.re.into(),
        s.rho12.im.into(),
    ]
}

const SOLUTION_COLUMNS: [&str; 9] = [
    "branch",
    "w",
    "rho22",
    "stable",
    "marginal",
    "omega_eff_abs",
    "delta_eff",
    "rho12_re",
    "rho12_im",
];

pub fn hysteresis(a: &HysteresisArgs) -> Result<(), CliError> {
    let p = params(&a.medium, 0.0)?;
    let mech = mechanism(a.mechanism, &p)?;
    let grid = a.omega.points();
    let scan = scan_hysteresis(&p, mech, &grid)?;
    if let Some(bad) = scan.failures().next() {
        return Err(CliError::Numerical(format!(
            "omega = {}: {}",
            bad.omega,
            bad.error.as_deref().unwrap_or("unknown")
        )));
    }
    if let Some(w) = &scan.threshold_warning {
        eprintln!("iob: warning: {w}");
    }

    let mut t = Table::new("hysteresis");
    medium_meta(&mut t, &a.medium);
    mechanism_meta(&mut t, &[mech]);
    t.meta("omega_grid", a.omega.to_string().as_str());
    t.meta("omega_up", scan.omega_up);
    t.meta("omega_down", scan.omega_down);
    if let Some(w) = &scan.threshold_warning {
        t.meta("threshold_warning", w.as_str());
    }
    let mut cols = vec!["omega"];
    cols.extend(SOLUTION_COLUMNS);
    t.columns(&cols);
    for pt in &scan.points {
        for s in &pt.solutions {
            let mut row = vec![Cell::from(pt.omega)];
            row.extend(solution_cells(s));
            t.row(row);
        }
    }
    if a.output.verbose > 0 {
        eprintln!("iob: {} drive points, {} rows", scan.points.len(), t.len());
    }
    emit(&t, &a.output)
}

pub fn spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let p = params(&a.medium, a.omega)?;
    let mech = mechanism(a.mechanism, &p)?;
    let sol = steady_state::solution_on_branch(&p, mech, a.branch)?;
    let grid = a.nu_grid.map(|g| g.points());
    let res = spectrum::spectrum_for_solution(&sol, p.gamma, grid.as_deref());
    let reference = spectrum::free_atom_saturation_max(p.gamma);
    let scale = match a.normalize {
        Some(Normalize::FreeAtomMax) => 1.0 / reference,
        None => 1.0,
    };
    let c = &res.coefficients;

    let mut t = Table::new("spectrum");
    medium_meta(&mut t, &a.medium);
    mechanism_meta(&mut t, &[mech]);
    t.meta("omega", a.omega);
    t.meta("branch", sol.branch.as_str());
    t.meta("unstable", res.unstable);
    t.meta("w", sol.w);
    t.meta("rho22", sol.rho22);
    t.meta("rho12_re", sol.rho12.re);
    t.meta("rho12_im", sol.rho12.im);
    t.meta("omega_eff_abs", sol.omega_eff.norm());
    t.meta("delta_eff", sol.delta_eff);
    t.meta("elastic_weight", res.elastic_weight);
    t.meta("peaks", MetaValue::list(res.peaks.iter().copied()));
    t.meta("nu_p", spectrum::satellite_offset(c));
    for (k, v) in [
        ("a", c.a),
        ("a0", c.a0),
        ("b4", c.b4),
        ("b2", c.b2),
        ("b0", c.b0),
        ("nu_p_sq", c.nu_p_sq),
        ("gamma6", c.gamma6),
    ] {
        t.meta(k, v);
    }
    t.meta(
        "normalization",
        match a.normalize {
            Some(Normalize::FreeAtomMax) => "free-atom-max",
            None => "none",
        },
    );
    t.meta("free_atom_max", reference);
    t.columns(&["nu", "density"]);
    for (nu, s) in res.nu_grid.iter().zip(&res.incoherent) {
        t.row(vec![(*nu).into(), (s * scale).into()]);
    }
    if res.unstable {
        eprintln!("iob: warning: the {} branch is dynamically unstable here", sol.branch);
    }
    emit(&t, &a.output)
}

pub fn peaks(a: &PeaksArgs) -> Result<(), CliError> {
    let p = params(&a.medium, 0.0)?;
    let mechs = if a.mechanism.is_empty() {
        vec![mechanism(None, &p)?]
    } else {
        a.mechanism.clone()
    };
    let rows = peak_map(&p, &mechs, a.free_atom, &a.omega.points())?;

    let mut t = Table::new("peaks");
    medium_meta(&mut t, &a.medium);
    mechanism_meta(&mut t, &mechs);
    t.meta("free_atom_reference", a.free_atom);
    t.meta("omega_grid", a.omega.to_string().as_str());
    t.columns(&["omega", "family", "branch", "stable", "nu_minus", "nu_plus"]);
    for r in &rows {
        t.row(vec![
            r.omega.into(),
            r.family.as_str().into(),
            r.branch.as_str().into(),
            r.stable.into(),
            r.nu_p.map(|x| -x).into(),
            r.nu_p.into(),
        ]);
    }
    emit(&t, &a.output)
}

fn sweep_rows(t: &mut Table, leg: &str, s: &SweepResult) {
    let tr = &s.trajectory;
    for ((time, omega), st) in tr.times.iter().zip(&tr.drive).zip(&tr.states) {
        t.row(vec![
            leg.into(),
            (*time).into(),
            (*omega).into(),
            st.u.into(),
            st.v.into(),
            st.w.into(),
            st.rho22().into(),
        ]);
    }
}

pub fn dynamics(a: &DynamicsArgs) -> Result<(), CliError> {
    match (a.sweep_from, a.sweep_to, a.omega) {
        (Some(from), Some(to), _) => sweep(a, from, to),
        (_, _, Some(omega)) => relax(a, omega),
        _ => Err(CliError::Config("pass either --omega or --sweep-from/--sweep-to".into())),
    }
}

fn sweep(a: &DynamicsArgs, from: f64, to: f64) -> Result<(), CliError> {
    let p = params(&a.medium, 0.0)?;
    let mech = mechanism(a.mechanism, &p)?;
    if !a.omega_step.is_finite() || a.omega_step <= 0.0 {
        return Err(CliError::Config("--omega-step must be positive".into()));
    }
    let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
    let opts = SweepOptions {
        omega_step: a.omega_step,
        ..SweepOptions::default()
    };
    let run_up = matches!(a.direction, crate::Direction::Up | crate::Direction::Both);
    let run_down = matches!(a.direction, crate::Direction::Down | crate::Direction::Both);
    let up = if run_up {
        Some(dynamics::sweep_adiabatic(&p, mech, lo, hi, a.ramp_rate, &opts)?)
    } else {
        None
    };
    let down = if run_down {
        Some(dynamics::sweep_adiabatic(&p, mech, hi, lo, a.ramp_rate, &opts)?)
    } else {
        None
    };

    let mut t = Table::new("dynamics");
    medium_meta(&mut t, &a.medium);
    mechanism_meta(&mut t, &[mech]);
    t.meta("mode", "sweep");
    t.meta("omega_range", MetaValue::list([lo, hi]));
    t.meta("ramp_rate", a.ramp_rate);
    if let Ok(Some(th)) = find_thresholds(&p, mech, (lo, hi)) {
        t.meta("omega_up_algebraic", th.up);
        t.meta("omega_down_algebraic", th.down);
    }
    for (leg, s) in [("up", &up), ("down", &down)] {
        if let Some(s) = s {
            t.meta(&format!("jumps_{leg}"), MetaValue::list(s.jumps.iter().map(|j| j.omega)));
            t.meta(&format!("non_adiabatic_{leg}"), s.non_adiabatic);
            t.meta(&format!("max_manifold_distance_{leg}"), s.max_manifold_distance);
            if s.non_adiabatic {
                eprintln!(
                    "iob: warning: {leg} sweep left the stable manifold by {:.3} outside jumps",
                    s.max_manifold_distance
                );
            }
        }
    }
    if let (Some(u), Some(d)) = (&up, &down) {
        t.meta("loop_area", dynamics::hysteresis_loop_area(u, d));
    }
    t.columns(&["leg", "t", "omega", "u", "v", "w", "rho22"]);
    for (leg, s) in [("up", &up), ("down", &down)] {
        if let Some(s) = s {
            sweep_rows(&mut t, leg, s);
            if a.output.verbose > 0 {
                eprintln!(
                    "iob: {leg} sweep: {} jumps, {} accepted steps",
                    s.jumps.len(),
                    s.trajectory.stats.accepted
                );
            }
        }
    }
    emit(&t, &a.output)
}

fn relax(a: &DynamicsArgs, omega: f64) -> Result<(), CliError> {
    let p = params(&a.medium, omega)?;
    let mech = mechanism(a.mechanism, &p)?;
    if a.samples < 2 {
        return Err(CliError::Config("--samples must be at least 2".into()));
    }
    let start = match a.branch {
        Some(b) => {
            let s = steady_state::solution_on_branch(&p, mech, b)?.bloch_state();
            BlochState {
                u: s.u + a.perturb,
                v: s.v + a.perturb,
                w: s.w + a.perturb,
            }
        }
        None => BlochState::GROUND,
    };
    let times = dynamics::uniform_times(a.t_end, a.samples);
    let tr = dynamics::integrate(start, &p, mech, |_| omega, a.t_end, &times, &OdeOptions::default())?;

    // Distance to the stable steady state the run ends closest to.
    let last = *tr.states.last().expect("at least two samples");
    let target = steady_state::steady_states(&p, mech)?
        .into_iter()
        .filter(|s| s.stable)
        .map(|s| s.bloch_state())
        .min_by(|x, y| x.distance(&last).total_cmp(&y.distance(&last)));
    let distances: Vec<Option<f64>> = tr.states.iter().map(|s| target.map(|g| s.distance(&g))).collect();
    let monotone = distances.windows(2).all(|w| match (w[0], w[1]) {
        (Some(x), Some(y)) => y <= x,
        _ => false,
    });
    // Oscillatory relaxation is not monotone sample by sample; its envelope,
    // the maximum over each tenth of the run, should be (down to the
    // integrator's noise floor).
    let block = (distances.len() / 10).max(1);
    let envelope: Vec<f64> = distances
        .chunks(block)
        .map(|c| c.iter().map(|d| d.unwrap_or(f64::INFINITY)).fold(0.0, f64::max))
        .collect();
    let envelope_monotone = envelope.windows(2).all(|w| w[1] <= w[0] || w[1] < 1e-8);

    let mut t = Table::new("dynamics");
    medium_meta(&mut t, &a.medium);
    mechanism_meta(&mut t, &[mech]);
    t.meta("mode", "relax");
    t.meta("omega", omega);
    t.meta("start", a.branch.map_or("ground", |b| b.as_str()));
    t.meta("perturb", a.perturb);
    t.meta("t_end", a.t_end);
    t.meta("final_distance", *distances.last().unwrap());
    t.meta("distance_monotone", monotone);
    t.meta("envelope_monotone", envelope_monotone);
    t.meta("max_radius_sq", tr.max_radius_sq);
    t.meta("accepted_steps", tr.stats.accepted);
    t.columns(&["t", "omega", "u", "v", "w", "rho22", "distance"]);
    for (((time, om), st), d) in tr.times.iter().zip(&tr.drive).zip(&tr.states).zip(&distances) {
        t.row(vec![
            (*time).into(),
            (*om).into(),
            st.u.into(),
            st.v.into(),
            st.w.into(),
            st.rho22().into(),
            (*d).into(),
        ]);
    }
    if a.output.verbose > 0 {
        eprintln!(
            "iob: distance to the steady state: monotone {monotone}, envelope monotone {envelope_monotone}, final {:e}",
            distances.last().unwrap().unwrap_or(f64::NAN)
        );
    }
    emit(&t, &a.output)
}

pub fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    let opts = VerifyOptions {
        seed: a.seed,
        b2_form: if a.b2_as_printed { B2Form::AsPrinted } else { B2Form::Corrected },
    };
    let report = verify::run(&opts);

    let mut t = Table::new("verify");
    t.meta("seed", MetaValue::One(Cell::Int(a.seed)));
    t.meta("b2_form", if a.b2_as_printed { "as-printed" } else { "corrected" });
    t.meta("all_passed", report.all_passed());
    t.columns(&["check", "max_deviation", "tolerance", "passed", "samples"]);
    for c in &report.checks {
        t.row(vec![
            c.name.into(),
            c.max_deviation.into(),
            c.tolerance.into(),
            c.passed.into(),
            c.samples.into(),
        ]);
        eprintln!(
            "{} {:<28} max deviation {:<12e} tolerance {:e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.max_deviation,
            c.tolerance
        );
    }
    emit(&t, &a.output)?;
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::VerifyFailed(failed));
    }
    Ok(())
}
