use std::path::Path;
use std::process::{Command, Output};

fn iob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iob")).args(args).output().expect("spawn iob")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn header(csv: &str, key: &str) -> Option<String> {
    let prefix = format!("# {key}: ");
    csv.lines().find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
}

/// Data rows (after the header block and the column line).
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn columns(csv: &str) -> Vec<String> {
    csv.lines().find(|l| !l.starts_with('#')).unwrap().split(',').map(str::to_string).collect()
}

#[test]
fn hysteresis_reports_thresholds_and_three_branches() {
    let o = iob(&["hysteresis", "--delta", "3", "--zeta-l", "50", "--mechanism", "lorentz", "--omega", "0:25:500"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let up: f64 = header(&csv, "omega_up").unwrap().parse().unwrap();
    let down: f64 = header(&csv, "omega_down").unwrap().parse().unwrap();
    assert!(down < up);
    let r = rows(&csv);
    assert!(r.iter().any(|row| row[1] == "middle" && row[4] == "false"));
    for key in ["format_version", "build", "gamma", "delta", "zeta_l", "zeta_m", "mechanism"] {
        assert!(header(&csv, key).is_some(), "{key}");
    }
}

#[test]
fn free_atom_scan_is_single_valued() {
    let o = iob(&["hysteresis", "--zeta-l", "0", "--zeta-m", "0", "--omega", "0:25:101"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(rows(&csv).len(), 101);
    assert_eq!(header(&csv, "omega_up").unwrap(), "none");
}

#[test]
fn malformed_grid_is_a_config_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.csv");
    let o = iob(&["hysteresis", "--omega", "0:25", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let o = iob(&["hysteresis", "--omega", "5:1:10", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unknown_flags_and_bad_values_are_rejected() {
    assert_eq!(iob(&["hysteresis", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(iob(&["hysteresis", "--gamma", "-1"]).status.code(), Some(2));
    assert_eq!(iob(&["spectrum", "--omega", "1", "--branch", "sideways"]).status.code(), Some(2));
    // Both couplings without an explicit mechanism.
    assert_eq!(iob(&["hysteresis", "--zeta-l", "5", "--zeta-m", "5"]).status.code(), Some(2));
    // Mechanism that contradicts the couplings.
    assert_eq!(iob(&["hysteresis", "--zeta-m", "5", "--mechanism", "lorentz"]).status.code(), Some(2));
}

#[test]
fn absent_branch_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = iob(&[
        "spectrum", "--delta", "3", "--zeta-l", "50", "--omega", "0.5", "--branch", "upper", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!out.exists());
}

#[test]
fn free_atom_spectrum_is_a_mollow_triplet() {
    let o = iob(&["spectrum", "--omega", "20", "--normalize", "free-atom-max"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let peaks: Vec<f64> = header(&csv, "peaks").unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
    assert_eq!(peaks.len(), 3);
    assert!((peaks[2] - (1600.0f64 - 0.75).sqrt()).abs() < 1e-12);
    let data: Vec<(f64, f64)> = rows(&csv).iter().map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap())).collect();
    let centre = data.iter().find(|(nu, _)| *nu == 0.0).unwrap().1;
    // Normalized to the saturation limit, the centre is close to 1.
    assert!((centre - 1.0).abs() < 1e-3, "{centre}");
    let n = data.len();
    for i in 0..n {
        assert_eq!(data[i].1, data[n - 1 - i].1);
    }
    assert!(header(&csv, "elastic_weight").is_some());
}

#[test]
fn unstable_branch_spectrum_is_tagged() {
    let o = iob(&["spectrum", "--delta", "3", "--zeta-m", "50", "--omega", "8", "--branch", "middle"]);
    assert!(o.status.success());
    assert_eq!(header(&stdout(&o), "unstable").unwrap(), "true");
}

#[test]
fn peaks_without_satellites_are_none_not_nan() {
    let o = iob(&["peaks", "--free-atom", "--omega", "0:1:11"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(!csv.to_lowercase().contains("nan"));
    assert!(rows(&csv).iter().any(|r| r[4] == "none" && r[5] == "none"));

    let o = iob(&["peaks", "--free-atom", "--omega", "0:1:11", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["data"]["nu_plus"].as_array().unwrap().iter().any(|x| x.is_null()));
}

#[test]
fn peak_families_for_both_mechanisms() {
    let o = iob(&[
        "peaks", "--delta", "3", "--zeta-l", "50", "--zeta-m", "50", "--mechanism", "lorentz", "--mechanism", "detuning",
        "--free-atom", "--omega", "0:25:26",
    ]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    for family in ["lorentz", "detuning", "free"] {
        assert!(r.iter().any(|row| row[1] == family), "{family}");
    }
}

#[test]
fn joint_mechanism_is_flagged_experimental() {
    let o = iob(&["hysteresis", "--zeta-l", "20", "--zeta-m", "30", "--mechanism", "joint", "--omega", "0:10:11"]);
    assert!(o.status.success());
    assert!(header(&stdout(&o), "experimental").is_some());
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let args = ["hysteresis", "--delta", "3", "--zeta-m", "50", "--omega", "0:25:200"];
    assert_eq!(iob(&args).stdout, iob(&args).stdout);
    let args = ["spectrum", "--delta", "3", "--zeta-l", "50", "--omega", "15", "--format", "json"];
    assert_eq!(iob(&args).stdout, iob(&args).stdout);
}

#[test]
fn csv_and_json_agree_numerically() {
    let base = ["hysteresis", "--delta", "3", "--zeta-l", "50", "--omega", "0:25:60"];
    let csv = stdout(&iob(&base));
    let mut json_args = base.to_vec();
    json_args.extend(["--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&iob(&json_args).stdout).unwrap();
    let cols = columns(&csv);
    for (i, row) in rows(&csv).iter().enumerate() {
        for (name, cell) in cols.iter().zip(row) {
            let j = &v["data"][name][i];
            match cell.parse::<f64>() {
                Ok(x) if j.is_number() => assert_eq!(x, j.as_f64().unwrap(), "{name}[{i}]"),
                _ => assert_eq!(cell, &j.to_string().trim_matches('"').to_string(), "{name}[{i}]"),
            }
        }
    }
    let up: f64 = header(&csv, "omega_up").unwrap().parse().unwrap();
    assert_eq!(up, v["meta"]["omega_up"].as_f64().unwrap());
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    let args = ["peaks", "--omega", "0:5:6", "--format", "json"];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", out.to_str().unwrap()]);
    let o = iob(&with_out);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(Path::new(&out)).unwrap(), iob(&args).stdout);
}

#[test]
fn verify_passes_by_default_and_catches_the_printed_b2() {
    let o = iob(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = iob(&["verify", "--b2-as-printed"]);
    assert_eq!(o.status.code(), Some(1));
    let csv = stdout(&o);
    let failed: Vec<String> = rows(&csv).into_iter().filter(|r| r[3] == "false").map(|r| r[0].clone()).collect();
    assert!(failed.contains(&"denominator_factorization".to_string()));
}

#[test]
fn verify_seed_is_reproducible() {
    let a = iob(&["verify", "--seed", "11"]);
    let b = iob(&["verify", "--seed", "11"]);
    let c = iob(&["verify", "--seed", "12"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn zero_drive_from_ground_stays_flat() {
    let o = iob(&["dynamics", "--omega", "0", "--t-end", "20", "--samples", "21"]);
    assert!(o.status.success());
    for r in rows(&stdout(&o)) {
        assert_eq!(r[4], "1");
        assert_eq!(r[5], "0");
    }
}

#[test]
fn relaxation_from_a_perturbed_stable_state() {
    let o = iob(&["dynamics", "--delta", "3", "--zeta-l", "50", "--omega", "8", "--branch", "upper", "--perturb", "1e-3"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let final_distance: f64 = header(&csv, "final_distance").unwrap().parse().unwrap();
    assert!(final_distance < 1e-6);
    assert_eq!(header(&csv, "envelope_monotone").unwrap(), "true");
}

#[test]
fn sweeps_jump_near_the_thresholds() {
    let o = iob(&[
        "dynamics", "--delta", "3", "--zeta-l", "50", "--sweep-from", "0.5", "--sweep-to", "20", "--omega-step", "0.05",
    ]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let get = |k: &str| -> f64 { header(&csv, k).unwrap().parse().unwrap() };
    let up = get("jumps_up");
    let down = get("jumps_down");
    assert!((up - get("omega_up_algebraic")).abs() / up < 0.02);
    assert!((down - get("omega_down_algebraic")).abs() / down < 0.05);
    assert!(get("loop_area") > 1.0);
}

#[test]
fn too_fast_ramp_is_rejected() {
    let o = iob(&["dynamics", "--sweep-from", "0", "--sweep-to", "1", "--ramp-rate", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
}
