//! End-to-end checks of the installed CLI surface.

use std::process::Command;

fn phasemac() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phasemac"))
}

#[test]
fn energy_subcommand_writes_csvs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = phasemac()
        .args(["energy", "--out"])
        .arg(dir.path())
        .args(["--batch", "1,2,4,8,16,32,64,128"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let sweep = std::fs::read_to_string(dir.path().join("batch_sweep.csv")).unwrap();
    let mut lines = sweep.lines();
    assert!(lines.next().unwrap().starts_with("# phasemac"));
    assert_eq!(lines.next().unwrap(), "batch,ratio");
    assert_eq!(sweep.lines().count(), 2 + 8);
    assert!(dir.path().join("efficiency.csv").exists());
    assert!(dir.path().join("batch_sweep.gp").exists());
}

#[test]
fn oracle_subcommand_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "oracle_trials=20000\n").unwrap();
    let out = phasemac()
        .args(["oracle", "--seed", "3", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("0 mismatches"), "stdout: {stdout}");
    let txt = std::fs::read_to_string(dir.path().join("oracle.txt")).unwrap();
    assert!(txt.contains("verdict=PASS"));
}

#[test]
fn report_subcommand_prints_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = phasemac()
        .args(["report", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    for needle in ["14 TOPS/W", "10.26 TOPS/W", "780 MHz"] {
        assert!(stdout.contains(needle), "missing {needle}");
    }
}

#[test]
fn mnist_without_dataset_fails_nonzero_with_hint() {
    let dir = tempfile::tempdir().unwrap();
    let out = phasemac()
        .args(["mnist", "--out"])
        .arg(dir.path())
        .env("PHASEMAC_DATA", dir.path().join("missing"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("mnist_synthetic"), "stderr: {stderr}");
}

#[test]
fn anomaly_respects_config_and_reuses_saved_models() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("predictor.pmfc");
    let cfg1 = dir.path().join("train.cfg");
    std::fs::write(
        &cfg1,
        format!(
            "window=40\nhidden=24\ntrain_windows=50\neval_windows=50\nepochs=4\nspan_len=80\n\
             model_out={}\n",
            model.display()
        ),
    )
    .unwrap();
    let out1_dir = dir.path().join("first");
    let out = phasemac()
        .args(["anomaly", "--seed", "5", "--bits", "8", "--config"])
        .arg(&cfg1)
        .arg("--out")
        .arg(&out1_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(model.exists());

    // Second run loads the saved model instead of training; the scores it
    // produces over the same eval windows must match the first run's.
    let cfg2 = dir.path().join("reuse.cfg");
    std::fs::write(
        &cfg2,
        format!(
            "window=40\nhidden=24\ntrain_windows=50\neval_windows=50\nepochs=4\nspan_len=80\n\
             model_in={}\n",
            model.display()
        ),
    )
    .unwrap();
    let out2_dir = dir.path().join("second");
    let out = phasemac()
        .args(["anomaly", "--seed", "5", "--bits", "8", "--config"])
        .arg(&cfg2)
        .arg("--out")
        .arg(&out2_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let scores1 = std::fs::read(out1_dir.join("anomaly_scores.csv")).unwrap();
    let scores2 = std::fs::read(out2_dir.join("anomaly_scores.csv")).unwrap();
    assert_eq!(scores1, scores2, "saved model changed the scores");
}

#[test]
fn anomaly_consumes_external_windows_csv() {
    let dir = tempfile::tempdir().unwrap();
    // First run generates windows.csv; the second scores exactly that file.
    let base = "window=40\nhidden=24\ntrain_windows=50\neval_windows=50\nepochs=3\nspan_len=80\n";
    let cfg1 = dir.path().join("gen.cfg");
    std::fs::write(&cfg1, base).unwrap();
    let gen_dir = dir.path().join("gen");
    assert!(phasemac()
        .args(["anomaly", "--seed", "2", "--bits", "8", "--config"])
        .arg(&cfg1)
        .arg("--out")
        .arg(&gen_dir)
        .status()
        .unwrap()
        .success());

    let cfg2 = dir.path().join("replay.cfg");
    std::fs::write(
        &cfg2,
        format!(
            "{base}windows_csv={}\n",
            gen_dir.join("windows.csv").display()
        ),
    )
    .unwrap();
    let replay_dir = dir.path().join("replay");
    assert!(phasemac()
        .args(["anomaly", "--seed", "2", "--bits", "8", "--config"])
        .arg(&cfg2)
        .arg("--out")
        .arg(&replay_dir)
        .status()
        .unwrap()
        .success());
    let a = std::fs::read(gen_dir.join("anomaly_scores.csv")).unwrap();
    let b = std::fs::read(replay_dir.join("anomaly_scores.csv")).unwrap();
    assert_eq!(a, b, "replaying the emitted windows changed the scores");
}

#[test]
fn data_root_env_var_is_honored() {
    // Point PHASEMAC_DATA at a prepared synthetic dataset and load it as if
    // it were the real one.
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let mnist_dir = data.join("mnist");
    let (train_img, train_lab) = phasemac::synth::gen_digit_corpus(300, 42);
    let (test_img, test_lab) = phasemac::synth::gen_digit_corpus(80, 43);
    phasemac::idx::write_idx_images(&mnist_dir.join("train-images-idx3-ubyte"), &train_img)
        .unwrap();
    phasemac::idx::write_idx_labels(&mnist_dir.join("train-labels-idx1-ubyte"), &train_lab)
        .unwrap();
    phasemac::idx::write_idx_images(&mnist_dir.join("t10k-images-idx3-ubyte"), &test_img).unwrap();
    phasemac::idx::write_idx_labels(&mnist_dir.join("t10k-labels-idx1-ubyte"), &test_lab).unwrap();

    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "mnist_train=300\nmnist_test=80\nmnist_hidden=16\nmnist_epochs=2\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = phasemac()
        .args(["mnist", "--seed", "1", "--bits", "8", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .env("PHASEMAC_DATA", &data)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("mnist_results.csv").exists());
}

#[test]
fn unknown_subcommand_is_rejected() {
    let out = phasemac().arg("frobnicate").output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn repeated_energy_runs_are_byte_identical_via_cli() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [d1.path(), d2.path()] {
        assert!(phasemac()
            .args(["energy", "--seed", "9", "--out"])
            .arg(d)
            .status()
            .unwrap()
            .success());
    }
    for f in ["batch_sweep.csv", "efficiency.csv", "batch_sweep.gp"] {
        let a = std::fs::read(d1.path().join(f)).unwrap();
        let b = std::fs::read(d2.path().join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between reruns");
    }
}
