use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_echeight")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_of(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(out);
    let value: Value = serde_json::from_str(text.trim_end()).unwrap();
    assert_eq!(value.to_string(), text.trim_end(), "re-serialisation changes bytes");
    value
}

#[test]
fn analyze_example_json() {
    let v = json_of(&run(&["analyze", "--a4", "-3", "--a6", "-4", "--t-max", "20", "--json"]));
    assert_eq!(v["delta"]["value"], "0");
    assert_eq!(v["delta"]["provenance"], "ZeroByProposition");
    assert_eq!(v["torsion"], 1);
    let c3 = v["candidates"].as_array().unwrap().iter().find(|c| c["t"] == 3).unwrap();
    assert_eq!(c3["D"], 88);
    assert_eq!(c3["H"], "2/1");
    let floor: f64 = c3["floor"].as_str().unwrap().parse().unwrap();
    assert!((floor - 0.03538).abs() < 5e-4);
    assert!(!v["caveats"].as_array().unwrap().is_empty());
}

#[test]
fn analyze_text_mentions_best() {
    let out = run(&["analyze", "--a4", "-3", "--a6", "-4", "--t-max", "20"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("best_floor"));
    assert!(text.contains("caveat: vacuous if the curve has rank 0"));
}

#[test]
fn height_and_torsion_label() {
    let v = json_of(&run(&["height", "--a4", "-3", "--a6", "-4", "--x", "8", "--y", "22", "--tol", "1e-4", "--json"]));
    let h: f64 = v["value"].as_str().unwrap().parse().unwrap();
    assert!((h - 1.107).abs() < 1e-3);
    assert_eq!(v["method"], "doubling");

    let v = json_of(&run(&["height", "--a4", "0", "--a6", "1", "--x", "2", "--y", "3", "--json"]));
    assert_eq!(v["value"], "0");
    assert_eq!(v["method"], "torsion");
}

#[test]
fn hurwitz_and_pair() {
    let v = json_of(&run(&["hurwitz", "--d", "88", "--json"]));
    assert_eq!(v["H"], "2/1");
    assert_eq!(stdout(&run(&["hurwitz", "--d", "3"])), "1/3\n");

    let v = json_of(&run(&["pair", "--a4", "-3", "--a6", "-4", "--px", "8", "--py", "22", "--t", "3", "--json"]));
    assert_eq!(v["D"], 88);
    assert_eq!(v["form"], serde_json::json!(["2", "0", "11"]));
}

#[test]
fn tamagawa_report() {
    let v = json_of(&run(&["tamagawa", "--a4", "-3", "--a6", "-4", "--json"]));
    assert_eq!(v["criterion"]["holds"], true);
    assert_eq!(v["delta"]["value"], "0");
    let v = json_of(&run(&["tamagawa", "--a4", "-3", "--a6", "-4", "--tamagawa", "2:2", "--json"]));
    assert_eq!(v["criterion"]["holds"], false);
}

#[test]
fn exit_codes() {
    // Singular, malformed, off the curve, bad override.
    assert_eq!(code(&run(&["analyze", "--a4", "0", "--a6", "0"])), 2);
    assert_eq!(code(&run(&["analyze", "--a4", "x", "--a6", "1"])), 2);
    assert_eq!(code(&run(&["height", "--a4", "-3", "--a6", "-4", "--x", "1", "--y", "1"])), 2);
    assert_eq!(code(&run(&["analyze", "--a4", "-3", "--a6", "-4", "--tamagawa", "2"])), 2);
    assert_eq!(code(&run(&["hurwitz", "--d", "5"])), 2);
    // No admissible t.
    assert_eq!(code(&run(&["analyze", "--a4", "-3", "--a6", "-4", "--t-max", "2"])), 3);
    // Tolerance out of reach within the doubling cap.
    assert_eq!(code(&run(&["height", "--a4", "-3", "--a6", "-4", "--x", "8", "--y", "22", "--tol", "1e-30"])), 4);
}

#[test]
fn batch_keeps_order_and_flags_rows() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    let output = dir.path().join("out.jsonl");
    fs::write(&input, "a4,a6,tamagawa\n-3,-4,\n0,0,\nabc,1,\n0,-2,\n-3,4,\n-3,-4,2:2\n").unwrap();
    let out = run(&[
        "batch",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--t-max",
        "60",
        "--jobs",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let lines: Vec<Value> =
        fs::read_to_string(&output).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let statuses: Vec<&str> = lines.iter().map(|v| v["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["ok", "error:singular", "error:parse", "ok", "error:no_admissible_t", "error:no_admissible_t"]);
    assert_eq!(lines[3]["curve"]["a6"], "-2");
    // c_2 = 2 breaks the vanishing test; the Silverman gap closes the window.
    assert_eq!(lines[5]["curve"]["a4"], "-3");
    assert!(lines[5]["message"].as_str().unwrap().contains("no admissible t"));

    fs::write(&input, "a4,a6\n").unwrap();
    let out = run(&["batch", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());

    let missing = dir.path().join("missing.csv");
    assert_eq!(code(&run(&["batch", "--input", missing.to_str().unwrap()])), 2);
}
