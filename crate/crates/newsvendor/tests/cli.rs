//! End-to-end tests of the `newsvendor` binary's contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_newsvendor"));
    cmd.env_remove("NEWSVENDOR_OUT");
    cmd
}

fn run_ok(args: &[&str]) -> Output {
    let output = bin().args(args).output().expect("spawn newsvendor");
    assert!(
        output.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

fn csv_data_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(String::from)
        .collect()
}

fn synthetic_fixture(dir: &Path, days: usize, seed: u64) -> PathBuf {
    let out = dir.join("fixture");
    run_ok(&[
        "gen",
        "synthetic",
        "--days",
        &days.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        out.to_str().unwrap(),
    ]);
    out.join("synthetic.csv")
}

#[test]
fn gen_table1_writes_two_14_row_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t1");
    run_ok(&["gen", "table1", "--out", out.to_str().unwrap()]);
    let train_rows = csv_data_rows(&out.join("table1_train.csv"));
    let test_rows = csv_data_rows(&out.join("table1_test.csv"));
    assert_eq!(train_rows.len(), 14);
    assert_eq!(test_rows.len(), 14);
    assert!(out.join("manifest.json").exists());
    // First training row: Monday, demand 13.
    assert!(train_rows[0].ends_with(",13"), "{}", train_rows[0]);
}

#[test]
fn missing_out_dir_fails_without_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let output = bin()
        .current_dir(tmp.path())
        .args(["gen", "table1"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn out_dir_falls_back_to_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("from-env");
    let output = bin()
        .env("NEWSVENDOR_OUT", &out)
        .args(["gen", "table1"])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(out.join("table1_train.csv").exists());
}

#[test]
fn gen_outliers_writes_transformed_csv_and_mask() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synthetic_fixture(tmp.path(), 100, 3);
    // Push some demands over the threshold first.
    let big = tmp.path().join("big.csv");
    let text = std::fs::read_to_string(&data).unwrap();
    let boosted: String = text
        .lines()
        .enumerate()
        .map(|(i, line)| {
            if i >= 2 && i % 3 == 0 {
                let (head, tail) = line.rsplit_once(',').unwrap();
                format!("{head},{}\n", tail.parse::<f64>().unwrap() + 80.0)
            } else {
                format!("{line}\n")
            }
        })
        .collect();
    std::fs::write(&big, boosted).unwrap();

    let out = tmp.path().join("outliers");
    run_ok(&[
        "gen",
        "outliers",
        "--in",
        big.to_str().unwrap(),
        "--subset",
        "100",
        "--threshold",
        "60",
        "--factor",
        "10",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = csv_data_rows(&out.join("outliers.csv"));
    assert_eq!(rows.len(), 100);
    let mask_rows = csv_data_rows(&out.join("outlier_mask.csv"));
    assert_eq!(mask_rows.len(), 100);
    let n_masked = mask_rows.iter().filter(|r| r.ends_with(",1")).count();
    assert!(n_masked > 0);
    // Masked rows carry demands scaled by 10 (above 600 here).
    for (row, mask) in rows.iter().zip(&mask_rows) {
        let demand: f64 = row.rsplit_once(',').unwrap().1.parse().unwrap();
        if mask.ends_with(",1") {
            assert!(demand > 600.0, "masked row demand {demand}");
        } else {
            assert!(demand <= 60.0, "unmasked row demand {demand}");
        }
    }
}

#[test]
fn gen_blocks_resamples_whole_blocks() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synthetic_fixture(tmp.path(), 60, 5);
    let out = tmp.path().join("blocks");
    run_ok(&[
        "gen",
        "blocks",
        "--in",
        data.to_str().unwrap(),
        "--count",
        "3",
        "--seed",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = csv_data_rows(&out.join("blocks.csv"));
    // Three blocks of identical-feature rows; with 8 possible feature
    // combinations and 60 days, every block has several rows.
    assert!(rows.len() >= 3, "{} rows", rows.len());
}

#[test]
fn train_writes_model_trace_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synthetic_fixture(tmp.path(), 80, 7);
    let out = tmp.path().join("run");
    run_ok(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model",
        "mlp:3,10,10,1",
        "--loss",
        "original",
        "--ch",
        "1.5",
        "--cp",
        "6",
        "--seed",
        "1",
        "--scale",
        "0.05",
        "--max-iters",
        "60",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(out.join("model.txt").exists());
    let trace = csv_data_rows(&out.join("trace.csv"));
    assert!(!trace.is_empty());
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"command\": \"train\""));
    assert!(manifest.contains("\"model.txt\""));
}

#[test]
fn bogus_loss_flag_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synthetic_fixture(tmp.path(), 20, 1);
    let out = tmp.path().join("run");
    let output = bin()
        .args([
            "train",
            "--data",
            data.to_str().unwrap(),
            "--model",
            "linear",
            "--loss",
            "bogus",
            "--cp",
            "6",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("bogus"), "{stderr}");
    assert!(!out.join("model.txt").exists());
}

#[test]
fn default_sweep_covers_19_ratios_for_both_kinds() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synthetic_fixture(tmp.path(), 40, 11);
    let out = tmp.path().join("sweep");
    run_ok(&[
        "sweep",
        "--train-data",
        data.to_str().unwrap(),
        "--test-data",
        data.to_str().unwrap(),
        "--model",
        "linear",
        "--max-iters",
        "25",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = csv_data_rows(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 38, "19 ratios x 2 kinds");
    let originals: Vec<&String> = rows.iter().filter(|r| r.contains(",original,")).collect();
    assert_eq!(originals.len(), 19);
    assert!(rows[0].starts_with("1,original,"));
    assert!(rows[37].starts_with("10,quadratic,"));
    let header = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(header.starts_with("ratio,kind,train_err,test_err,wall_ms\n"));
}

#[test]
fn explicit_default_flags_match_the_zero_flag_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synthetic_fixture(tmp.path(), 30, 13);
    let implicit = tmp.path().join("implicit");
    let explicit = tmp.path().join("explicit");
    let common = [
        "--train-data",
        data.to_str().unwrap(),
        "--test-data",
        data.to_str().unwrap(),
        "--model",
        "linear",
        "--max-iters",
        "20",
    ];
    let mut args: Vec<&str> = vec!["sweep"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--out", implicit.to_str().unwrap()]);
    run_ok(&args);

    let mut args: Vec<&str> = vec!["sweep"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&[
        "--ratios",
        "1:10:0.5",
        "--ch",
        "1.5",
        "--kinds",
        "original,quadratic",
        "--out",
        explicit.to_str().unwrap(),
    ]);
    run_ok(&args);

    let a = std::fs::read(implicit.join("sweep.csv")).unwrap();
    let b = std::fs::read(explicit.join("sweep.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sweep_dump_writes_the_prediction_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synthetic_fixture(tmp.path(), 60, 17);
    let out = tmp.path().join("sweep");
    run_ok(&[
        "sweep",
        "--train-data",
        data.to_str().unwrap(),
        "--test-data",
        data.to_str().unwrap(),
        "--model",
        "linear",
        "--ratios",
        "1:1:1",
        "--max-iters",
        "25",
        "--dump-first",
        "50",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(out.join("predictions.csv")).unwrap();
    assert!(text.starts_with("index,demand,pred_original,pred_quadratic\n"));
    assert_eq!(csv_data_rows(&out.join("predictions.csv")).len(), 50);
}

#[test]
fn eval_pairs_models_and_reports_a_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synthetic_fixture(tmp.path(), 80, 19);

    // Outlier-transformed dataset plus mask.
    let transformed = tmp.path().join("transformed");
    run_ok(&[
        "gen",
        "outliers",
        "--in",
        data.to_str().unwrap(),
        "--subset",
        "80",
        "--threshold",
        "15",
        "--factor",
        "10",
        "--seed",
        "23",
        "--out",
        transformed.to_str().unwrap(),
    ]);
    let tdata = transformed.join("outliers.csv");

    for (loss, dir) in [("original", "orig"), ("quadratic", "quad")] {
        run_ok(&[
            "train",
            "--data",
            tdata.to_str().unwrap(),
            "--model",
            "linear",
            "--loss",
            loss,
            "--cp",
            "4",
            "--max-iters",
            "150",
            "--out",
            tmp.path().join(dir).to_str().unwrap(),
        ]);
    }

    let out = tmp.path().join("eval");
    run_ok(&[
        "eval",
        "--data",
        tdata.to_str().unwrap(),
        "--model-original",
        tmp.path().join("orig/model.txt").to_str().unwrap(),
        "--model-quadratic",
        tmp.path().join("quad/model.txt").to_str().unwrap(),
        "--mask",
        transformed.join("outlier_mask.csv").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("metric,value\n"));
    assert!(metrics.contains("mse_original,"));
    assert!(metrics.contains("clean_mae_quadratic,"));
    assert!(metrics.contains("verdict,"), "{metrics}");
}

#[test]
fn eval_requires_a_coherent_model_selection() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synthetic_fixture(tmp.path(), 20, 29);
    let out = tmp.path().join("eval");
    let output = bin()
        .args([
            "eval",
            "--data",
            data.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
}
