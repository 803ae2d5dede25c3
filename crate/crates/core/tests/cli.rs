use std::io::Write;
use std::process::{Command, Output, Stdio};

use elliptic_tilt::lattice::ChernMatrix;
use elliptic_tilt::laurent::LaurentPoly;
use proptest::prelude::*;
use serde_json::Value;

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_elliptic-tilt"))
        .args(args)
        .env_remove("ELLIPTIC_TILT_BOX_BUDGET")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn run(args: &[&str]) -> Output {
    run_with_stdin(args, "")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    serde_json::from_str(&stdout(&out)).expect("valid json")
}

#[test]
fn point_sheaf_has_zero_charge_phase() {
    let out = run(&["phase", "0,0,0;0,0,1", "--h", "1", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "1/2 (zero charge)");
}

#[test]
fn transform_of_structure_sheaf() {
    let out = run(&["transform", "1,0,0;0,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "0,0,0;-1,0,0");
}

#[test]
fn transform_twice_with_shift_restores_matrix() {
    let once = stdout(&run(&["transform", "3,-1,4;1,-5,9", "--shift", "1"]));
    let twice = stdout(&run(&["transform", once.trim(), "--shift", "1"]));
    assert_eq!(twice.trim(), "-3,1,-4;-1,5,-9");
}

#[test]
fn wall_with_single_rational_root() {
    let v = json(&["wall", "0,1,0;0,1,0", "0,0,1;1,0,0", "--h", "1", "--alpha", "1"]);
    let roots = v["wall"]["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert_eq!(roots[0]["exact"], "1/1");
    let safe: Vec<i64> = v["wall"]["safe_s"].as_str().unwrap().split('/').map(|x| x.parse().unwrap()).collect();
    assert!(safe[0] > safe[1]);

    let text = stdout(&run(&["wall", "0,1,0;0,1,0", "0,0,1;1,0,0", "--h", "1", "--alpha", "1"]));
    assert!(text.contains("s = 1 (multiplicity 1)"), "{text}");
}

#[test]
fn proportional_phases_report_no_wall() {
    let args = ["wall", "0,0,1;1,0,0", "0,0,2;2,0,0", "--h", "1", "--alpha", "1"];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "no wall: proportional phases");
    let v = json(&args);
    assert_eq!(v["wall"], Value::Null);
    assert_eq!(v["reason"], "proportional_phases");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["transform", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["transform", "1,0,0;0,0,x"]).status.code(), Some(2));
    assert_eq!(run(&["phase", "0,0,0;0,0,1"]).status.code(), Some(2));
    assert_eq!(run(&["phase", "0,0,0;0,0,1", "--h", "0", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(run(&["phase", "0,0,0;0,0,1", "--h", "1", "--alpha", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["destab", "1,0,0;0,0,0", "--box=2:1", "--h", "1", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));

    let out = run(&["phase", "0,-1,0;0,0,0", "--h", "1", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).starts_with("error: inadmissible"), "{}", stderr(&out));
    let out = run(&["compare", "0,0,0;1,0,0", "0,0,-1;0,0,0", "--h", "1", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_parameter_is_named() {
    let out = run(&["charge", "1,0,0;0,0,0", "--h", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--alpha"), "{}", stderr(&out));
}

#[test]
fn compare_horizontal_curve_with_shifted_structure_sheaf() {
    let out = run(&["compare", "0,0,0;1,0,0", "-1,0,0;0,0,0", "--h", "1", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "precedes");
}

#[test]
fn classify_structure_sheaf() {
    let v = json(&["classify", "1,0,0;0,0,0"]);
    assert_eq!(v["cells"], serde_json::json!(["C3_{2,0}"]));
    assert_eq!(v["ladder_level"], 11);
}

#[test]
fn structure_sheaf_discriminant_vanishes() {
    let out = run(&["disc", "1,0,0;0,0,0", "--t", "7/3", "--s", "5", "--h", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn stdin_batch_matches_individual_runs() {
    let lines = ["1,0,0;0,0,0", "0,0,1;1,0,0", "0,1,0;0,-1,0"];
    let batch = run_with_stdin(&["transform", "-"], &(lines.join("\n") + "\n"));
    assert_eq!(batch.status.code(), Some(0));
    let single: String = lines.iter().map(|m| stdout(&run(&["transform", m]))).collect();
    assert_eq!(stdout(&batch), single);
}

#[test]
fn stdin_batch_reports_bad_line() {
    let out = run_with_stdin(&["transform", "-"], "1,0,0;0,0,0\nnonsense\n");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plot_csv_rows() {
    let path = std::env::temp_dir().join(format!("elliptic-tilt-plot-{}.csv", std::process::id()));
    let out = run(&[
        "wall",
        "0,1,0;0,1,0",
        "0,0,1;1,0,0",
        "--h",
        "1",
        "--alpha",
        "1",
        "--plot-csv",
        path.to_str().unwrap(),
        "--plot-samples",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "s,nu_A,nu_E");
    assert_eq!(rows.len(), 1 + 4);
    // safe_s = 3, so samples sit at k/4·6 for k = 1..4; at s = 3 (t = 1/3)
    // ν(A) = (2s)/(2·2) and ν(E) = (1/s)/(2s²).
    let third: Vec<f64> = rows[2].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(third[0], 3.0);
    assert!((third[1] - 1.5).abs() < 1e-12);
    assert!((third[2] - 1.0 / 54.0).abs() < 1e-12);
}

#[test]
fn destab_json_is_sorted_and_tagged() {
    let v = json(&["destab", "-1,0,0;0,0,0", "--box=-1:1", "--h", "1", "--alpha", "1"]);
    let found = v["candidates"].as_array().unwrap();
    assert!(!found.is_empty());
    let keys: Vec<Vec<i64>> = found
        .iter()
        .map(|c| c["matrix"]["m"].as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap().iter().map(|x| x.as_i64().unwrap())).collect())
        .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
    assert!(found.iter().all(|c| c["verdict"] == "boundary"));
}

#[test]
fn box_budget_from_environment() {
    let narrow = Command::new(env!("CARGO_BIN_EXE_elliptic-tilt"))
        .args(["--format", "json", "destab", "-1,0,0;0,0,0", "--h", "1", "--alpha", "1"])
        .env("ELLIPTIC_TILT_BOX_BUDGET", "0")
        .output()
        .unwrap();
    assert_eq!(narrow.status.code(), Some(0), "{}", stderr(&narrow));
    let wide = Command::new(env!("CARGO_BIN_EXE_elliptic-tilt"))
        .args(["--format", "json", "destab", "-1,0,0;0,0,0", "--h", "1", "--alpha", "1"])
        .env("ELLIPTIC_TILT_BOX_BUDGET", "1")
        .output()
        .unwrap();
    let count = |o: &Output| serde_json::from_slice::<Value>(&o.stdout).unwrap()["candidates"].as_array().unwrap().len();
    assert!(count(&narrow) <= count(&wide));
}

fn reemit<T: serde::de::DeserializeOwned + serde::Serialize>(v: &Value) -> String {
    serde_json::to_string(&serde_json::from_value::<T>(v.clone()).unwrap()).unwrap()
}

#[test]
fn emitted_matrix_and_polynomials_round_trip() {
    let v = json(&["charge", "1,2,3;4,5,6", "--h", "2", "--alpha", "3/2"]);
    assert_eq!(reemit::<ChernMatrix>(&v["matrix"]), v["matrix"].to_string());
    assert_eq!(reemit::<LaurentPoly>(&v["re"]), v["re"].to_string());
    assert_eq!(reemit::<LaurentPoly>(&v["im"]), v["im"].to_string());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip_is_byte_identical(entries in prop::array::uniform6(-50i64..=50), h in 1i64..5, num in 1i64..9, den in 1i64..9) {
        let m = ChernMatrix::from_flat(entries).to_string();
        let alpha = format!("{num}/{den}");
        let h = h.to_string();
        let v = json(&["charge", &m, "--h", &h, "--alpha", &alpha]);
        prop_assert_eq!(reemit::<ChernMatrix>(&v["matrix"]), v["matrix"].to_string());
        prop_assert_eq!(reemit::<LaurentPoly>(&v["re"]), v["re"].to_string());
        prop_assert_eq!(reemit::<LaurentPoly>(&v["im"]), v["im"].to_string());

        let t = json(&["transform", &m]);
        let back: ChernMatrix = serde_json::from_value(t["transform"].clone()).unwrap();
        let text = stdout(&run(&["transform", &m]));
        prop_assert_eq!(back.to_string(), text.trim());
    }
}
