use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ftsynth"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn has_solver() -> bool {
    match ftsynth::smt::SolverConfig::from_env() {
        Ok(_) => true,
        Err(e) => {
            eprintln!("skipping: {e}");
            false
        }
    }
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

fn cnot(c: usize, t: usize) -> Value {
    json!({ "gate": "CNOT", "control": c, "target": t })
}

#[test]
fn help_lists_every_subcommand() {
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in ["synth", "verify", "decode", "simulate", "fit", "codes"] {
        assert!(text.contains(sub), "{sub}");
        assert_eq!(code(&run(&[sub, "--help"])), 0);
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&run(&["bogus"])), 2);
    assert_eq!(code(&run(&["codes", "--L", "4"])), 2);
    assert_eq!(code(&run(&["synth", "--spec", "/nonexistent/spec.json"])), 2);
    assert_eq!(code(&run(&["simulate", "--L", "3", "--p", "1.5", "--shots", "1"])), 2);
    assert_eq!(code(&run(&["fit", "--input", "/nonexistent.csv"])), 2);
}

#[test]
fn missing_solver_exits_with_three() {
    let spec = fixture("fig5.json");
    let o = bin()
        .args(["synth", "--spec", spec.to_str().unwrap()])
        .env("FTSYNTH_SOLVER", "/nonexistent/solver")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    let o = run(&["synth", "--spec", spec.to_str().unwrap(), "--solver", "/nonexistent/solver"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--L", "3,5", "--p", "0.05", "--shots", "1000", "--seed", "7", "--log", "/dev/null"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("L,p,shots,x_fails,z_fails,plx,plz,se_x,se_z"));
    assert_eq!(lines.count(), 2);
    let threaded = run(&["simulate", "--L", "3,5", "--p", "0.05", "--shots", "1000", "--seed", "7", "--threads", "1", "--log", "/dev/null"]);
    assert_eq!(threaded.stdout, text.as_bytes());
}

#[test]
fn simulate_log_embeds_config_and_fit_reads_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("mc.csv");
    let log = dir.path().join("mc.log");
    let o = run(&[
        "simulate", "--L", "3,5", "--p", "0.08,0.12", "--shots", "2000", "--seed", "3",
        "--out", csv.to_str().unwrap(), "--log", log.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let first: Value = serde_json::from_str(std::fs::read_to_string(&log).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(first["config"]["L"], json!([3, 5]));
    assert_eq!(first["config"]["seed"], json!(3));
    assert_eq!(first["config"]["convention"], json!("total"));
    let o = run(&["fit", "--input", csv.to_str().unwrap(), "--resamples", "10"]);
    let v = stdout_json(&o);
    assert!(v["report"]["x"]["c"].as_f64().unwrap() > 0.0);
    assert_eq!(code(&o) == 0, v["report"]["errors"].as_array().unwrap().is_empty());
}

#[test]
fn decode_corrects_single_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "e.json", &json!({ "L": 3, "x_error": [5], "z_error": [2] }));
    let o = run(&["decode", "--input", &input]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["x_logical_failure"], json!(false));
    assert_eq!(v["z_logical_failure"], json!(false));
    assert_eq!(v["x_correction"], json!([5]));

    let empty = write(dir.path(), "s.json", &json!({ "L": 3 }));
    let v = stdout_json(&run(&["decode", "--input", &empty]));
    assert_eq!(v["x_correction"], json!([]));
    assert_eq!(v["z_correction"], json!([]));
    assert!(v.get("x_logical_failure").is_none());
}

#[test]
fn codes_dumps_json_and_dot() {
    let v = stdout_json(&run(&["codes", "--L", "3", "--kind", "surface"]));
    assert_eq!(v["n"], json!(9));
    assert_eq!(v["x_stabilizers"].as_array().unwrap().len(), 4);
    assert_eq!(v["logical_x"], json!([1, 4, 7]));
    let o = run(&["codes", "--L", "3", "--format", "dot", "--graph", "z"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("graph syndrome {"));
}

#[test]
fn synthesized_fig5_circuit_verifies() {
    if !has_solver() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let log = dir.path().join("log.jsonl");
    let spec = fixture("fig5.json");
    let o = run(&["synth", "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap(), "--log", log.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let c: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let steps = &c["circuits"][0]["timesteps"];
    let a = json!([[cnot(1, 2)], [cnot(1, 3)]]);
    let b = json!([[cnot(1, 3)], [cnot(1, 2)]]);
    assert!(*steps == a || *steps == b, "{steps}");

    let lines: Vec<Value> =
        std::fs::read_to_string(&log).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["config"]["v"], json!(0));
    assert!(lines[0]["config"]["solver"]["path"].is_string());
    assert_eq!(lines.last().unwrap()["outcome"], json!("found"));

    let o = run(&["verify", "--spec", spec.to_str().unwrap(), "--circuits", out.to_str().unwrap(), "--v", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["ok"], json!(true));
}

#[test]
fn verify_rejects_wrong_effect() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.json", &json!({ "n": 3, "N": 2, "timesteps": [[cnot(1, 2)], []] }));
    let o = run(&["verify", "--spec", fixture("fig5.json").to_str().unwrap(), "--circuits", &c, "--v", "0"]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["circuits"][0]["effect"], json!(false));

    let not_in_graph = write(dir.path(), "d.json", &json!({ "n": 3, "N": 2, "timesteps": [[cnot(2, 3)], []] }));
    let o = run(&["verify", "--spec", fixture("fig5.json").to_str().unwrap(), "--circuits", &not_in_graph]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_reports_aligned_hook_of_column_first_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let steps = json!([
        [cnot(10, 2), cnot(11, 7), cnot(12, 1), cnot(13, 9)],
        [cnot(10, 5), cnot(11, 8)],
        [cnot(10, 3), cnot(11, 4), cnot(13, 8)],
        [cnot(10, 6), cnot(11, 5), cnot(12, 2)],
    ]);
    let c = write(dir.path(), "c.json", &json!({ "n": 13, "N": 4, "timesteps": steps }));
    let o = run(&["verify", "--spec", fixture("surface_x.json").to_str().unwrap(), "--circuits", &c]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    let r = &v["circuits"][0];
    assert_eq!(r["effect"], json!(true));
    assert_eq!(r["fault_tolerant"], json!(false));
    let cex = &r["counterexample"];
    assert_eq!(cex["faults"][0]["operator"], json!("X1"));
    let data: Vec<usize> = cex["propagated"].as_str().unwrap()[..9]
        .char_indices()
        .filter(|&(_, ch)| ch == 'X' || ch == 'Y')
        .map(|(i, _)| i + 1)
        .collect();
    assert_eq!(data, vec![3, 6]);
}

#[test]
fn surface_fixtures_synthesize_and_verify() {
    if !has_solver() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    for name in ["surface_x.json", "surface_z.json"] {
        let out = dir.path().join(name);
        let spec = fixture(name);
        let o = run(&["synth", "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap(), "--log", "/dev/null"]);
        assert_eq!(code(&o), 0, "{name}");
        let o = run(&["verify", "--spec", spec.to_str().unwrap(), "--circuits", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stdout));
    }
}

#[test]
fn exhausted_budget_is_a_negative_verdict() {
    if !has_solver() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.jsonl");
    let o = run(&[
        "synth", "--spec", fixture("color_d3.json").to_str().unwrap(), "--max-iters", "1",
        "--log", log.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let last: Value =
        serde_json::from_str(std::fs::read_to_string(&log).unwrap().lines().last().unwrap()).unwrap();
    assert_eq!(last["outcome"], json!("exhausted"));
    assert!(!last["pending"].as_array().unwrap().is_empty());
}
