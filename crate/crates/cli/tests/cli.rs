use std::fs;
use std::process::{Command, Output};

fn rcisec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcisec")).args(args).output().expect("run rcisec")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn deq_prints_key_value_csv() {
    let o = rcisec(&["deq", "--M", "10", "--K", "10", "--rho-db", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("sinr,2.28388218141501"), "{text}");
}

#[test]
fn json_output_parses() {
    let o = rcisec(&["fdd-bits", "--K", "8", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["bits_rounded"], 67);
    assert_eq!(v["regime"], "BetaBelowOne");
}

#[test]
fn tdd_train_reports_both_optima() {
    let o = rcisec(&["tdd-train", "--rho-db", "40", "--T", "100", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["t_opt_grid"], 16);
    assert!((v["t_opt_cubic"].as_f64().unwrap() - 14.254962).abs() < 1e-5);
}

#[test]
fn exit_codes() {
    assert_eq!(rcisec(&["deq", "--tau2", "1.5"]).status.code(), Some(1));
    assert_eq!(rcisec(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(rcisec(&["deq", "--K", "20", "--rho-db", "40", "--tau2", "0.09"]).status.code(), Some(2));
    assert_eq!(rcisec(&["mc", "--tau2", "1", "--trials", "2"]).status.code(), Some(2));
    assert_eq!(rcisec(&["sweep", "--spec", "/nonexistent/spec.toml"]).status.code(), Some(3));
    assert_eq!(rcisec(&["--help"]).status.code(), Some(0));
}

#[test]
fn spec_file_sweep_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.toml");
    fs::write(
        &spec,
        r#"
[sweep]
axis = "tau"
values = [0.0, 0.1, 1.0]
trials = 20
seed = 3
outputs = ["mc_rate", "deq_rate"]

[system]
M = 6
K = 6
rho_db = 20
"#,
    )
    .unwrap();
    let out = dir.path().join("r.csv");
    let o = rcisec(&["sweep", "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    let rows = rci_secrecy::harness::parse_csv(csv.as_bytes()).unwrap().rows;
    assert_eq!(rows.len(), 3);
    assert!(rows[2].error().is_some(), "tau=1 row records its error");
    assert!(rows[0].mc_mean.unwrap() > rows[1].mc_mean.unwrap());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.csv.meta.json")).unwrap()).unwrap();
    assert!(meta["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(meta["specs"][0]["master_seed"], 3);
}

#[test]
fn unknown_spec_keys_fail_validation() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.toml");
    fs::write(&spec, "[sweep]\naxis = \"M\"\nvalues = [8]\ntrials = 1\nseed = 0\noutputs = []\ncolour = 1\n[system]\nM = 8\nK = 8\nrho_db = 0\n").unwrap();
    assert_eq!(rcisec(&["sweep", "--spec", spec.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn selftest_passes() {
    let o = rcisec(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
