use std::path::Path;
use std::process::{Command, Output};

use gravwalk::experiment::{run, ExperimentConfig, ExperimentKind, RawConfig, Table};

fn gravwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gravwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn curve_prints_header_and_one_row_per_step() {
    let out = gravwalk(&["curve", "--steps", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,ee_nats,neg_full,neg_traced");
    assert_eq!(lines.len(), 5);
}

#[test]
fn invalid_arguments_exit_with_code_two_and_name_the_field() {
    for (args, field) in [
        (vec!["curve", "--steps", "0"], "steps"),
        (vec!["curve", "--steps", "60"], "separation"),
        (vec!["sweep", "--theta-a", "2pi"], "theta_a"),
        (vec!["walk", "--spin-a", "sideways"], "spin_a"),
        (vec!["noise", "--steps", "2"], "noise_kind"),
        (
            vec!["noise", "--noise-kind", "bit-flip", "--noise-p", "-0.1"],
            "noise_p",
        ),
    ] {
        let out = gravwalk(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(field), "{args:?}: {err}");
    }
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "theta_a = \"pi/3\"\nsteps = 3\nspin_a = \"down\"\n",
    )
    .unwrap();
    let out_file = dir.path().join("out.csv");
    let out = gravwalk(&[
        "curve",
        "--config",
        config.to_str().unwrap(),
        "--steps",
        "5",
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let written = std::fs::read_to_string(&out_file).unwrap();
    assert_eq!(written.lines().count(), 6);

    let raw = RawConfig::from_file(&config)
        .unwrap()
        .merged_with(RawConfig {
            steps: Some(5),
            ..Default::default()
        });
    let cfg = ExperimentConfig::resolve(ExperimentKind::EntanglementCurve, &raw).unwrap();
    let mut expected = Vec::new();
    run(&cfg).unwrap().write_csv(&mut expected).unwrap();
    assert_eq!(written.as_bytes(), expected.as_slice());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "stepz = 3\n").unwrap();
    let out = gravwalk(&["curve", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let path = dir.join(name);
    let mut all = args.to_vec();
    all.extend(["--out", path.to_str().unwrap()]);
    let out = gravwalk(&all);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::read(path).unwrap()
}

#[test]
fn seeded_noise_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "noise",
        "--steps",
        "4",
        "--noise-kind",
        "bit-flip",
        "--noise-p",
        "0.1",
        "--ensemble",
        "sampled",
        "--samples",
        "64",
        "--seed",
        "11",
    ];
    let first = run_to(dir.path(), "a.csv", &args);
    let second = run_to(dir.path(), "b.csv", &args);
    assert_eq!(first, second);

    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    assert_eq!(
        run_to(dir.path(), "a.json", &json_args),
        run_to(dir.path(), "b.json", &json_args)
    );
}

#[test]
fn bit_and_phase_flip_runs_differ() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["noise", "--steps", "5", "--noise-p", "0.2", "--seed", "3"];
    let mut bit = base.to_vec();
    bit.extend(["--noise-kind", "bit-flip"]);
    let mut phase = base.to_vec();
    phase.extend(["--noise-kind", "phase-flip"]);
    assert_ne!(
        run_to(dir.path(), "bit.csv", &bit),
        run_to(dir.path(), "phase.csv", &phase)
    );
}

#[test]
fn sweep_covers_the_grid_in_order() {
    let out = gravwalk(&["sweep", "--steps", "3", "--grid-n", "2", "--format", "json"]);
    assert!(out.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), 9);
    let thetas: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            (
                r["theta_a"].as_f64().unwrap(),
                r["theta_b"].as_f64().unwrap(),
            )
        })
        .collect();
    let mut sorted = thetas.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(thetas, sorted);
    // zero angle on either walker means zero coupling
    for r in &rows {
        if r["theta_a"].as_f64() == Some(0.0) || r["theta_b"].as_f64() == Some(0.0) {
            assert!(r["neg_full"].as_f64().unwrap() < 1e-12);
        }
    }
}

#[test]
fn walk_per_step_and_moments_outputs() {
    let out = gravwalk(&["walk", "--steps", "6", "--coin", "hadamard", "--per-step"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("t,mean,m2\n0,0.0,0.0\n"));
    assert_eq!(text.lines().count(), 8);

    let raw = RawConfig {
        steps: Some(15),
        grid_n: Some(6),
        ..Default::default()
    };
    let cfg = ExperimentConfig::resolve(ExperimentKind::MomentAnalysis, &raw).unwrap();
    let Table::Moments(rows) = run(&cfg).unwrap() else {
        panic!("wrong table")
    };
    let interior = &rows[1..rows.len() - 1];
    for w in interior.windows(2) {
        assert!(w[1].m2 < w[0].m2);
    }
    let peak = interior
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.sin2_m2.total_cmp(&b.1.sin2_m2))
        .unwrap()
        .0;
    assert!(peak > 0 && peak < interior.len() - 1);
}
