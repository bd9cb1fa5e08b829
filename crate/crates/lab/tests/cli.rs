use std::fs;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blaschke-lab")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn thread_count_does_not_change_reports() {
    let args = ["riesz", "--f", "blaschke(0.5; -0.2+0.6i)", "--h", "1/64"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_blaschke-lab")).args(args).env("BLASCHKE_LAB_THREADS", threads).output().unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, run("3").stdout);
    assert_eq!(one.stdout, run("junk").stdout);
}

#[test]
fn verdict_exit_codes() {
    assert_eq!(lab(&["identity", "--M", "abs(z)^4 + abs(z)^2"]).status.code(), Some(0));
    let held = lab(&["l-bound", "--f", "blaschke(0.5)", "--z", "0.3", "--r", "0.5"]);
    assert_eq!(held.status.code(), Some(0));
    assert_eq!(json(&held)["verdict"], "HOLDS");
    // log|f| = log 3 exceeds a zero majorant once the log term is small
    let failed = lab(&["l-bound", "--f", "3", "--z", "0", "--r", "0.99", "--eps", "0.01"]);
    assert_eq!(failed.status.code(), Some(1));
    assert_eq!(json(&failed)["verdict"], "FAILS");
    let invalid = lab(&["validate-v", "--v", "power:2"]);
    assert_eq!(invalid.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&invalid.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "condition");
}

#[test]
fn violated_majorant_is_an_input_error() {
    let out = lab(&["implication", "--f", "2*blaschke(0.7)", "--M", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn csv_outputs() {
    let green = lab(&["green", "--h", "1/4"]);
    let text = String::from_utf8(green.stdout).unwrap();
    assert!(text.starts_with("re,im,value\n"));
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == 3));

    let empty = lab(&["blaschke", "--f", "blaschke(0.1; 0.2i)", "--format", "csv"]);
    assert_eq!(empty.status.code(), Some(0));
    assert_eq!(String::from_utf8(empty.stdout).unwrap(), "k,abs_zk,partial_sum\n");

    assert_eq!(lab(&["identity", "--M", "1", "--format", "csv"]).status.code(), Some(3));
}

#[test]
fn reports_embed_their_input() {
    let out = lab(&["blaschke", "--f", "blaschke(0.9;0.99)", "--d0", "disk:0,0.5"]);
    let doc = json(&out);
    assert_eq!(doc["input"]["f"], "blaschke(0.9;0.99)");
    assert_eq!(doc["input"]["d0"], "disk:0,0.5");
    for key in ["condition", "verdict", "lhs", "rhs", "constants", "trace", "grid", "tolerances"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"f": "blaschke(0.9;0.99)", "v": "loginv"}"#).unwrap();
    let out = lab(&["blaschke", "--f", "blaschke(0.6)", "--config", cfg.to_str().unwrap()]);
    assert_eq!(json(&out)["trace"].as_array().unwrap().len(), 2);
}

#[test]
fn field_sidecar_next_to_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let out = lab(&["green", "--z0", "0.25", "--h", "1/16", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("g.csv.meta.json")).unwrap()).unwrap();
    let rows = fs::read_to_string(&path).unwrap().lines().count() - 1;
    let nodes = meta["nx"].as_u64().unwrap() * meta["ny"].as_u64().unwrap();
    assert_eq!((nodes - meta["mask_count"].as_u64().unwrap()) as usize, rows);
    assert_eq!(meta["h"], 0.0625);
}

#[test]
fn zero_lists_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.json");
    let located = lab(&["zeros", "--f", "(z-0.6)*(z+0.7i)", "--out", path.to_str().unwrap()]);
    assert_eq!(located.status.code(), Some(0));
    let from_file = json(&lab(&["blaschke", "--zeros", path.to_str().unwrap()]));
    let from_f = json(&lab(&["blaschke", "--f", "(z-0.6)*(z+0.7i)"]));
    let sum = |d: &serde_json::Value| d["lhs"].as_f64().unwrap();
    assert!((sum(&from_file) - sum(&from_f)).abs() < 1e-9);
    assert!((sum(&from_f) - (-(0.6f64.ln()) - 0.7f64.ln())).abs() < 1e-12);
}
