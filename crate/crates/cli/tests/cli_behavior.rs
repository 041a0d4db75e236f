//! End-to-end tests of the command-line interface: artifacts, exit codes,
//! configuration precedence, and reproducibility, driving the real binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spinrl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinrl"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "expected exit {code}; stderr:\n{}",
        stderr_of(out)
    );
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

fn lines(path: &Path) -> Vec<String> {
    read(path).lines().map(str::to_string).collect()
}

/// A deliberately small training run: 2 epochs x 3 circuits x 4 gates.
fn tiny_train(out_dir: &Path, extra: &[&str]) -> Output {
    let out = out_dir.to_str().unwrap();
    let mut args = vec![
        "train", "--qubits", "1", "--epochs", "2", "--circuits", "3", "--gates", "4", "--hidden",
        "8", "--exact", "--noise", "off", "--seed", "7", "--out", out,
    ];
    args.extend_from_slice(extra);
    spinrl(&args)
}

#[test]
fn train_writes_the_advertised_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = tiny_train(dir.path(), &[]);
    assert_exit(&out, 0);
    for name in ["config.txt", "metrics.csv", "checkpoint.json", "summary.json"] {
        assert!(dir.path().join(name).is_file(), "{name} should exist");
    }
    let metrics = lines(&dir.path().join("metrics.csv"));
    assert_eq!(
        metrics[0],
        "epoch,episode,epsilon,e_initial,e_final,e_min,total_reward,gate_sequence"
    );
    assert_eq!(metrics.len() - 1, 2 * 3, "one row per episode");
    let summary = read(&dir.path().join("summary.json"));
    for key in ["best_epoch", "final_epoch_mean_reward", "min_e_final"] {
        assert!(summary.contains(key), "summary should report {key}");
    }
}

#[test]
fn train_rejects_a_missing_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("does-not-exist");
    let out = tiny_train(&missing, &[]);
    assert_exit(&out, 1);
    assert!(!missing.exists(), "failure must not create the directory");
}

#[test]
fn identical_reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_exit(&tiny_train(a.path(), &[]), 0);
    assert_exit(&tiny_train(b.path(), &[]), 0);
    for name in ["metrics.csv", "checkpoint.json", "summary.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name} should not depend on anything but config and seed"
        );
    }
}

#[test]
fn periodic_checkpoints_are_written_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let out = tiny_train(dir.path(), &["--checkpoint-every", "1"]);
    assert_exit(&out, 0);
    assert!(dir.path().join("checkpoint_epoch_0001.json").is_file());
    assert!(dir.path().join("checkpoint_epoch_0002.json").is_file());
}

#[test]
fn eval_writes_per_episode_and_per_step_rows() {
    let train_dir = tempfile::tempdir().unwrap();
    assert_exit(&tiny_train(train_dir.path(), &[]), 0);
    let eval_dir = tempfile::tempdir().unwrap();
    let out = spinrl(&[
        "eval",
        "--checkpoint",
        train_dir.path().join("checkpoint.json").to_str().unwrap(),
        "--episodes",
        "5",
        "--gates",
        "4",
        "--epsilon",
        "0",
        "--exact",
        "--noise",
        "off",
        "--seed",
        "3",
        "--out",
        eval_dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let eval = lines(&eval_dir.path().join("eval.csv"));
    assert_eq!(
        eval[0],
        "episode,e_initial,e_final,e_min,total_reward,gate_sequence"
    );
    assert_eq!(eval.len() - 1, 5);
    let correlators = lines(&eval_dir.path().join("correlators.csv"));
    assert_eq!(correlators[0], "episode,step,x,y,z,energy");
    assert_eq!(
        correlators.len() - 1,
        5 * (4 + 1),
        "one row per step including the prepared state"
    );
}

#[test]
fn eval_rejects_a_corrupt_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("checkpoint.json");
    fs::write(&bad, "{\"not\": \"a checkpoint\"}").unwrap();
    let out = spinrl(&[
        "eval",
        "--checkpoint",
        bad.to_str().unwrap(),
        "--exact",
        "--noise",
        "off",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 2);
}

#[test]
fn eval_qubit_mismatch_is_a_usage_error() {
    let train_dir = tempfile::tempdir().unwrap();
    assert_exit(&tiny_train(train_dir.path(), &[]), 0);
    let eval_dir = tempfile::tempdir().unwrap();
    let out = spinrl(&[
        "eval",
        "--checkpoint",
        train_dir.path().join("checkpoint.json").to_str().unwrap(),
        "--qubits",
        "2",
        "--exact",
        "--noise",
        "off",
        "--out",
        eval_dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 1);
    assert!(stderr_of(&out).contains("qubit"));
}

#[test]
fn corrected_energy_requires_two_qubits() {
    let train_dir = tempfile::tempdir().unwrap();
    assert_exit(&tiny_train(train_dir.path(), &[]), 0);
    let eval_dir = tempfile::tempdir().unwrap();
    let out = spinrl(&[
        "eval",
        "--checkpoint",
        train_dir.path().join("checkpoint.json").to_str().unwrap(),
        "--correct",
        "--exact",
        "--noise",
        "off",
        "--out",
        eval_dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 1);
}

#[test]
fn corrected_energy_column_is_written_for_the_dimer() {
    let train_dir = tempfile::tempdir().unwrap();
    let out = spinrl(&[
        "train", "--qubits", "2", "--epochs", "2", "--circuits", "3", "--gates", "4", "--hidden",
        "8", "--exact", "--noise", "off", "--seed", "7", "--out",
        train_dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let eval_dir = tempfile::tempdir().unwrap();
    let out = spinrl(&[
        "eval",
        "--checkpoint",
        train_dir.path().join("checkpoint.json").to_str().unwrap(),
        "--episodes",
        "6",
        "--gates",
        "4",
        "--epsilon",
        "0",
        "--correct",
        "--exact",
        "--noise",
        "off",
        "--seed",
        "3",
        "--out",
        eval_dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let eval = lines(&eval_dir.path().join("eval.csv"));
    assert!(eval[0].ends_with(",corrected_energy"));
    for row in &eval[1..] {
        let last = row.rsplit(',').next().unwrap();
        // Either the exact corrected value or n/a when the correction has
        // no solution for that episode's final state.
        assert!(
            last == "n/a" || (last.parse::<f64>().unwrap() + 0.75).abs() < 1e-9,
            "unexpected corrected energy {last}"
        );
    }
}

#[test]
fn baseline_exact_circuit_writes_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinrl(&[
        "baseline",
        "exact-circuit",
        "--qubits",
        "1",
        "--runs",
        "10",
        "--exact",
        "--noise",
        "off",
        "--seed",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let rows = lines(&dir.path().join("baseline.csv"));
    assert_eq!(rows[0], "run,energy");
    assert_eq!(rows.len() - 1, 10);
}

#[test]
fn vqe_writes_its_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinrl(&[
        "vqe",
        "--iterations",
        "50",
        "--exact",
        "--noise",
        "off",
        "--seed",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let rows = lines(&dir.path().join("trajectory.csv"));
    assert_eq!(
        rows[0],
        "iteration,alpha,theta0,theta1,theta2,theta3,theta4,theta5,energy"
    );
    assert_eq!(rows.len() - 1, 50 + 1, "initial point plus one row per iteration");
    let summary = read(&dir.path().join("summary.json"));
    assert!(summary.contains("\"target_energy\": -0.75"));
}

#[test]
fn sumrule_corrects_rows_and_reports_bad_input_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("correlators.csv");
    let header = "episode,step,x1,y1,z1,x2,y2,z2,zz,xx,yy,xy,yx,xz,zx,yz,zy,energy";
    // A pure singlet row: all singles zero, diagonal pairs -1.
    let singlet = "1,0,0,0,0,0,0,0,-1,-1,-1,0,0,0,0,0,0,-0.75";
    fs::write(&input, format!("{header}\n{singlet}\n")).unwrap();
    let out = spinrl(&[
        "sumrule",
        input.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let rows = lines(&dir.path().join("corrected.csv"));
    assert!(rows[0].ends_with(",spin_dot,residual,multiplier,corrected_energy"));
    assert!(rows[1].starts_with(singlet), "input fields are preserved verbatim");
    assert!(rows[1].ends_with(",-0.75"));

    // A row with a missing field must be rejected, naming its line.
    fs::write(&input, format!("{header}\n{singlet}\n1,1,0,0\n")).unwrap();
    let out = spinrl(&[
        "sumrule",
        input.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 2);
    assert!(stderr_of(&out).contains("line 3"), "stderr: {}", stderr_of(&out));
}

#[test]
fn config_file_supplies_defaults_and_flags_override_them() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    fs::write(
        &config,
        "seed = 7\n\n[train]\nqubits = 1\nepochs = 3\ncircuits = 2\ngates = 4\nhidden = 8\n",
    )
    .unwrap();
    let out = spinrl(&[
        "train",
        "--config",
        config.to_str().unwrap(),
        "--circuits",
        "4",
        "--exact",
        "--noise",
        "off",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let resolved = read(&dir.path().join("config.txt"));
    assert!(resolved.contains("epochs = 3"), "file value survives");
    assert!(resolved.contains("circuits = 4"), "flag beats file");
    assert!(resolved.contains("seed = 7"), "unsectioned common key applies");
    let metrics = lines(&dir.path().join("metrics.csv"));
    assert_eq!(metrics.len() - 1, 3 * 4);
}

#[test]
fn unknown_config_keys_fail_with_their_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    fs::write(&config, "[train]\nqubits = 1\nbogus_knob = 3\n").unwrap();
    let out = spinrl(&[
        "train",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 1);
    let err = stderr_of(&out);
    assert!(err.contains("line 3") && err.contains("bogus_knob"), "stderr: {err}");
}

#[test]
fn zero_shots_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinrl(&[
        "baseline",
        "exact-circuit",
        "--qubits",
        "1",
        "--shots",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 1);
}

#[test]
fn noise_profile_files_are_loaded_and_inlined() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("device.noise");
    fs::write(
        &profile,
        "gate_depolarizing_1q = 0.002\nreadout_flip_1to0 = 0.03\n",
    )
    .unwrap();
    let out = spinrl(&[
        "baseline",
        "exact-circuit",
        "--qubits",
        "1",
        "--runs",
        "3",
        "--exact",
        "--noise",
        profile.to_str().unwrap(),
        "--seed",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let resolved = read(&dir.path().join("config.txt"));
    assert!(resolved.contains("[noise]"), "profile is inlined:\n{resolved}");
    assert!(resolved.contains("gate_depolarizing_1q = 0.002"));
    assert!(resolved.contains("readout_flip_1to0 = 0.03"));
    // The inlined config reproduces the run without the profile file.
    let rerun_dir = tempfile::tempdir().unwrap();
    let rerun = spinrl(&[
        "baseline",
        "exact-circuit",
        "--config",
        dir.path().join("config.txt").to_str().unwrap(),
        "--out",
        rerun_dir.path().to_str().unwrap(),
    ]);
    assert_exit(&rerun, 0);
    assert_eq!(
        fs::read(dir.path().join("baseline.csv")).unwrap(),
        fs::read(rerun_dir.path().join("baseline.csv")).unwrap()
    );
}

#[test]
fn help_and_version_exit_zero() {
    assert_exit(&spinrl(&["--help"]), 0);
    assert_exit(&spinrl(&["--version"]), 0);
    assert_exit(&spinrl(&["train", "--help"]), 0);
}

#[test]
fn unknown_flags_exit_one() {
    let out = spinrl(&["train", "--bogus-flag"]);
    assert_exit(&out, 1);
}
