use std::path::Path;
use std::process::{Command, Output};

use narme::train::RunResult;

fn bench(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_narme-bench"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("NARME_OUT_DIR")
        .output()
        .unwrap()
}

fn files(dir: &Path, prefix: &str) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_str().unwrap().starts_with(prefix))
        .collect();
    v.sort();
    v
}

#[test]
fn run_writes_curve_and_result() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(dir.path(), &["run", "--experiment", "nac-add", "--loss", "dr-narme", "--epochs", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let curves = files(dir.path(), "curve_");
    assert_eq!(curves.len(), 1);
    let curve = std::fs::read_to_string(&curves[0]).unwrap();
    let lines: Vec<&str> = curve.lines().collect();
    assert_eq!(lines[0], "epoch,train_loss,test_overall_variance");
    assert_eq!(lines.len(), 11);
    assert!(lines[10].starts_with("10,"));

    let json = std::fs::read_to_string(&files(dir.path(), "result_")[0]).unwrap();
    let result: RunResult = serde_json::from_str(&json).unwrap();
    assert_eq!(result.epochs_run, 10);
    assert!(curves[0].ends_with(format!("curve_{}.csv", result.config_hash)));
    assert_eq!(result.config_hash, result.config.hash());
    assert!(String::from_utf8_lossy(&out.stdout).contains("dr-narme"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["run", "--loss", "narme"],
        &["run", "--loss", "mse", "--n-t", "x"],
        &["run", "--loss", "sr-narme", "--n-t", "0"],
        &["run", "--loss", "mse", "--lr", "-1"],
        &["run", "--loss", "mse", "--threshold", "test-mae:le:nan"],
        &["run", "--loss", "mse", "--threshold", "bogus:le:1"],
        &["sweep", "--orders", "4"],
        &["sweep", "--loss", "mse", "--orders", "2,4"],
        &["compare", "--losses", "mse,narme"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = bench(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    assert!(files(dir.path(), "").is_empty());
}

#[test]
fn data_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(
        dir.path(),
        &["run", "--experiment", "stock", "--loss", "mse", "--csv", "/definitely/absent.csv", "--column", "close"],
    );
    assert_eq!(out.status.code(), Some(1));
    let csv = dir.path().join("prices.csv");
    std::fs::write(&csv, "open\n1\n2\n").unwrap();
    let out = bench(
        dir.path(),
        &["run", "--experiment", "stock", "--loss", "mse", "--csv", csv.to_str().unwrap(), "--column", "close"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_rows_are_seed_major() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(
        dir.path(),
        &["sweep", "--orders", "2,4", "--seeds", "1,2", "--epochs", "5", "--emit", "csv"],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv, "n_t,seed,epochs_to_threshold\n2,1,\n4,1,\n2,2,\n4,2,\n");
    assert!(out.stdout.is_empty());
}

#[test]
fn compare_tabulates_requested_losses() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(dir.path(), &["compare", "--experiment", "nalu-mul", "--epochs", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("compare_nalu-mul.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("loss,hyperparameters,overall_variance"));
    let order: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(order, ["huber", "log-cosh", "mse", "mae", "sr-narme", "dr-narme"]);
    assert_eq!(files(dir.path(), "result_").len(), 6);
    assert!(dir.path().join("compare_nalu-mul.txt").exists());

    let dir = tempfile::tempdir().unwrap();
    let out = bench(dir.path(), &["compare", "--losses", "dr-narme,mse", "--epochs", "3", "--emit", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("compare_nac-add.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(files(dir.path(), "result_").is_empty());
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_narme-bench"))
        .args(["run", "--loss", "mae", "--epochs", "2", "--emit", "json"])
        .env("NARME_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(files(dir.path(), "result_").len(), 1);
    assert!(files(dir.path(), "curve_").is_empty());
}
