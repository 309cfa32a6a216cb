use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use capmimo_core::cli::{read_rows, CSV_COLUMNS};
use capmimo_core::ModelTag;

const FAST: [&str; 6] = ["--wavelength", "0.2", "--ref-m", "128", "--inner-points", "256"];

fn capmimo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capmimo"))
        .current_dir(dir)
        .env("CAPMIMO_THREADS", "1")
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn receiver_sweep_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "sweep-receiver",
        "--scenario",
        "rx",
        "--distances",
        "10,1",
        "--m-list",
        "5,10,20",
    ];
    args.extend(FAST);
    let out = capmimo(dir.path(), &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("wavelength = 0.2"));

    let text = fs::read_to_string(dir.path().join("rx.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    let rows = read_rows(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows
        .iter()
        .all(|r| r.model_tag == ModelTag::DiscreteRx && r.m1.is_none() && r.is_ok()));

    let meta: toml::Table = fs::read_to_string(dir.path().join("rx.meta")).unwrap().parse().unwrap();
    assert_eq!(meta["command"].as_str(), Some("sweep-receiver"));
    assert_eq!(meta["config"]["ref_m"].as_integer(), Some(128));
    assert!(meta["slope_fits"].as_array().is_some());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "sweep-transceiver",
        "--distance",
        "1",
        "--m-list",
        "4,8",
        "--out",
        "a.csv",
    ];
    args.extend(FAST);
    assert!(capmimo(dir.path(), &args).status.success());
    args[6] = "b.csv";
    assert!(capmimo(dir.path(), &args).status.success());
    assert_eq!(
        fs::read(dir.path().join("a.csv")).unwrap(),
        fs::read(dir.path().join("b.csv")).unwrap()
    );
}

#[test]
fn grid_sweep_covers_product() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "sweep-grid",
        "--distance",
        "1",
        "--m1-list",
        "3,6",
        "--m2-list",
        "3,6,9",
        "--out",
        "g.csv",
    ];
    args.extend(FAST);
    let out = capmimo(dir.path(), &args);
    assert!(out.status.success());
    let rows = read_rows(fs::File::open(dir.path().join("g.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
    let meta = fs::read_to_string(dir.path().join("g.meta")).unwrap();
    assert!(meta.contains("max_abs_asymmetry_nats"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "distances = 50.0\nwavelength = 0.2\n").unwrap();
    let out = capmimo(
        dir.path(),
        &["dof", "--config", "run.toml", "--distance", "100", "--ref-m", "128"],
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("distances = [100.0]"), "{text}");
}

#[test]
fn dof_prints_analytic_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = capmimo(dir.path(), &["dof", "--distance", "50", "--ref-m", "200"]);
    assert!(out.status.success());
    let line = stdout(&out)
        .lines()
        .find(|l| l.trim_start().starts_with("50"))
        .unwrap()
        .to_string();
    assert!(line.ends_with("2.000000"), "{line}");
}

#[test]
fn bounds_rows_hold() {
    let dir = tempfile::tempdir().unwrap();
    let out = capmimo(
        dir.path(),
        &["bounds", "--distance", "10", "--wavelength", "0.2", "--out", "b.csv"],
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().skip(1).all(|l| l.ends_with("true")));
}

#[test]
fn invalid_config_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = capmimo(dir.path(), &["sweep-receiver", "--wavelength", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("receiver.csv").exists());
}

#[test]
fn unwritable_output_exits_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "sweep-receiver",
        "--distance",
        "10",
        "--m-list",
        "4",
        "--out",
        "missing/dir/x.csv",
    ];
    args.extend(FAST);
    let out = capmimo(dir.path(), &args);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_capmimo"))
        .current_dir(dir.path())
        .env("CAPMIMO_THREADS", "many")
        .args(["dof", "--distance", "50"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
