use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn out_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("definetti-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str], out: &PathBuf) -> Output {
    Command::new(env!("CARGO_BIN_EXE_definetti"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn scale_of_rational_model_is_an_exponential_sum() {
    let out = out_dir("scale-erlang");
    let o = run(&["scale", "--model", "erlang2-sigma2"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(out.join("scale.json"));
    assert_eq!(doc["representation"], "exp_sum");
    assert_eq!(doc["terms"].as_array().unwrap().len(), 4);
    let csv = std::fs::read_to_string(out.join("scale.csv")).unwrap();
    assert!(csv.starts_with("x,w,w1,w2,w3\n"));
    assert_eq!(csv.lines().count(), 2050);
}

#[test]
fn scale_of_stable_model_is_tabulated() {
    let out = out_dir("scale-stable");
    let o = run(&["scale", "--model", "stable", "--xmax", "20", "--grid", "512"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(out.join("scale.json"))["representation"], "tabulated");
}

#[test]
fn zero_domain_is_a_usage_error() {
    let o = run(&["scale", "--xmax", "0"], &out_dir("xmax0"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn model_files_are_accepted_and_parse_errors_name_the_line() {
    let out = out_dir("model-file");
    std::fs::create_dir_all(&out).unwrap();
    let good = out.join("model.json");
    std::fs::write(
        &good,
        r#"{"family": "exponential", "params": {"lambda": 1, "beta": 1}, "c": 1.5, "q": 0.1}"#,
    )
    .unwrap();
    let o = run(&["barrier", "--model", good.to_str().unwrap()], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bad = out.join("bad.json");
    std::fs::write(&bad, "{\"family\": \"exponential\",\n \"q\": }").unwrap();
    let o = run(&["barrier", "--model", bad.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn reproduce_figures_matches_the_worked_example() {
    let out = out_dir("figures");
    let o = run(&["reproduce-figures"], &out);
    assert!(o.status.success());
    for f in [
        "fig1_left_w1.csv",
        "fig1_right_generator.csv",
        "fig2_left_w1.csv",
        "fig2_right_generator.csv",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let s = json(out.join("summary.json"));
    let low = &s["sigma_1.4"];
    let high = &s["sigma_2"];
    assert!((low["a_star"].as_f64().unwrap() - 0.4).abs() <= 0.1);
    assert!((high["a_star"].as_f64().unwrap() - 10.5).abs() <= 0.1);
    assert_eq!(low["condition2_holds"], false);
    assert_eq!(low["hjb_holds"], false);
    assert_eq!(high["condition2_holds"], true);
    assert_eq!(high["hjb_holds"], true);
}

#[test]
fn strict_exit_codes_follow_verdicts() {
    let o = run(&["verify", "--model", "erlang2-sigma1.4", "--strict"], &out_dir("strict-low"));
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["verify", "--model", "erlang2-sigma2", "--strict"], &out_dir("strict-high"));
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["barrier", "--model", "exponential", "--strict"], &out_dir("strict-exp"));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn simulate_echoes_seed_and_is_reproducible() {
    let args = [
        "simulate", "--model", "exponential", "--x", "1", "--barrier", "2", "--paths", "2000", "--seed", "9",
    ];
    let a = run(&args, &out_dir("sim-a"));
    let b = run(&[&args[..], &["--sequential"]].concat(), &out_dir("sim-b"));
    assert!(a.status.success());
    let da: Value = serde_json::from_slice(&a.stdout).unwrap();
    let db: Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(da["seed"], 9);
    assert_eq!(da["estimate"], db["estimate"]);
}

#[test]
fn simulate_comparison_writes_table() {
    let out = out_dir("compare");
    let o = run(
        &["simulate", "--model", "exponential", "--x", "1", "--paths", "2000", "--compare", "0.5,1,4"],
        &out,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("compare.csv")).unwrap();
    assert!(csv.starts_with("barrier,estimate,stderr\n"));
    assert_eq!(csv.lines().count(), 5);
}
