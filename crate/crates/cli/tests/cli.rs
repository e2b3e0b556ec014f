use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, None)
}

fn run_env(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_todadual"));
    cmd.args(args).env_remove("TODADUAL_SEED");
    if let Some(s) = seed {
        cmd.env("TODADUAL_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn csv_rows(out: &Output, sep: char) -> (Vec<String>, Vec<Vec<f64>>) {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(sep).map(str::to_owned).collect();
    let rows = lines
        .map(|l| l.split(sep).map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn lax_a2_off_diagonals() {
    let v = json(&run(&["lax", "--type", "A", "--rank", "2", "--q", "0,0", "--p", "1,0"]));
    assert_eq!(v["algebra"], "A2");
    let re = floats(&v["x"]["re"]);
    assert_eq!(re, vec![1.0, 1.0, 1.0, 0.0]);
    assert!(floats(&v["x"]["im"]).iter().all(|x| *x == 0.0));
    assert_eq!(floats(&v["g"]["re"]), vec![1.0, 0.0, 0.0, 1.0]);
}

#[test]
fn missing_rank_is_a_usage_error() {
    let out = run(&["lax", "--type", "A"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["lax", "--type", "B", "--rank", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["lax", "--type", "A", "--rank", "2", "--q", "1,2,3", "--p", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dual_map_a2_at_rest() {
    let v = json(&run(&["dual-map", "--type", "A", "--rank", "2", "--q", "0,0", "--p", "1,-1"]));
    let qhat = floats(&v["goldfish"]["qhat"]);
    let s = 2f64.sqrt();
    assert!((qhat[0] - s).abs() < 1e-13 && (qhat[1] + s).abs() < 1e-13, "{qhat:?}");
    assert!(v["round_trip_error"].as_f64().unwrap() < 1e-10);
}

#[test]
fn dual_map_back_and_forth() {
    let fwd = json(&run(&["dual-map", "--type", "C", "--rank", "2", "--q", "0.2,-0.1", "--p", "0.3,0.5"]));
    let qhat = floats(&fwd["goldfish"]["qhat"]);
    let phat = floats(&fwd["goldfish"]["phat"]);
    assert!(fwd["sp4_hhat2_half_m2"].is_number());
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
    let (qs, ps) = (join(&qhat), join(&phat));
    let back = json(&run(&[
        "dual-map", "--type", "C", "--rank", "2", "--qhat", &qs, "--phat", &ps,
    ]));
    let q = floats(&back["toda"]["q"]);
    let p = floats(&back["toda"]["p"]);
    for (a, b) in q.iter().chain(&p).zip([0.2, -0.1, 0.3, 0.5]) {
        assert!((a - b).abs() < 1e-9, "{q:?} {p:?}");
    }
}

#[test]
fn zero_step_integration_is_constant() {
    let out = run(&["integrate", "--type", "B", "--rank", "3", "--dt", "0", "--steps", "5"]);
    let (_, rows) = csv_rows(&out, ',');
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert_eq!(r[1..], rows[0][1..]);
    }
}

#[test]
fn c2_energy_is_conserved() {
    let out = run(&["integrate", "--type", "C", "--rank", "2", "--steps", "500", "--every", "50"]);
    let (header, rows) = csv_rows(&out, ',');
    let h = header.iter().position(|c| c == "H1").unwrap();
    assert_eq!(rows.len(), 11);
    let h0 = rows[0][h];
    for r in &rows {
        assert!(((r[h] - h0) / h0).abs() < 1e-8, "{} vs {h0}", r[h]);
    }
}

#[test]
fn tsv_and_json_tables_agree() {
    let args = ["integrate", "--type", "A", "--rank", "3", "--steps", "4"];
    let (hc, csv) = csv_rows(&run(&args), ',');
    let mut tsv_args = args.to_vec();
    tsv_args.extend(["--format", "tsv"]);
    let (ht, tsv) = csv_rows(&run(&tsv_args), '\t');
    assert_eq!(hc, ht);
    assert_eq!(csv, tsv);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let v = json(&run(&json_args));
    let rows: Vec<Vec<f64>> = v["rows"].as_array().unwrap().iter().map(floats).collect();
    // serde_json's default parser may be off by an ulp.
    for (a, b) in rows.iter().flatten().zip(csv.iter().flatten()) {
        assert!((a - b).abs() <= 1e-15 * b.abs(), "{a} vs {b}");
    }
    assert_eq!(rows.len(), csv.len());
}

#[test]
fn verify_a3_passes() {
    let out = run(&["verify", "--type", "A", "--rank", "3", "--seed", "7"]);
    let v = json(&out);
    assert_eq!(v["all_passed"], true);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_d3_logs_printed_discrepancies() {
    let v = json(&run(&["verify", "--type", "D", "--rank", "3", "--points", "4", "--steps", "50"]));
    let d = v["discrepancies"].as_array().unwrap();
    assert!(!d.is_empty());
    assert!(d.iter().all(|x| x["relative_difference"].as_f64().unwrap() > 0.0));
}

#[test]
fn large_rank_warns() {
    let out = run(&[
        "verify", "--type", "C", "--rank", "9", "--points", "1", "--fd-points", "1", "--steps", "10",
    ]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("exceeds"), "{err}");
}

#[test]
fn non_generic_point_exits_3() {
    let out = run(&["dual-map", "--type", "A", "--rank", "2", "--q=-40,40", "--p", "0.5,0.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn output_is_deterministic() {
    let args = ["dual-map", "--type", "D", "--rank", "4", "--seed", "11"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn seed_flag_beats_environment() {
    let base = ["lax", "--type", "B", "--rank", "2"];
    let from_env = run_env(&base, Some("5")).stdout;
    let mut flag = base.to_vec();
    flag.extend(["--seed", "5"]);
    assert_eq!(from_env, run(&flag).stdout);
    assert_ne!(from_env, run(&base).stdout);
    let mut other = base.to_vec();
    other.extend(["--seed", "6"]);
    assert_ne!(from_env, run_env(&other, Some("5")).stdout);
    assert_eq!(run(&other).stdout, run_env(&other, Some("5")).stdout);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("todadual-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = run(&["lax", "--type", "C", "--rank", "2", "--out", p]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["algebra"], "C2");
    std::fs::remove_file(path).ok();
}
