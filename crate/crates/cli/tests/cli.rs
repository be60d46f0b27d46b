use std::fs;
use std::path::Path;

use assert_cmd::Command;
use serde_json::Value;
use tempfile::TempDir;

fn lab() -> Command {
    let mut c = Command::cargo_bin("lienard-lab").unwrap();
    c.env_remove("LIENARD_LAB_THREADS");
    c
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn run_in(dir: &TempDir, args: &[&str]) -> assert_cmd::assert::Assert {
    lab().args(args).arg("--out").arg(dir.path()).assert()
}

#[test]
fn cycles_vdp_one_stable() {
    let d = TempDir::new().unwrap();
    run_in(&d, &["cycles", "--builtin", "vdp", "--mu", "1"]).success();
    let v = json(&d.path().join("cycles.json"));
    let cycles = v["cycles"].as_array().unwrap();
    assert_eq!(cycles.len(), 1);
    assert_eq!(cycles[0]["stability"], "stable");
    assert!((cycles[0]["y_plus0"].as_f64().unwrap() - 2.1727).abs() < 1e-3);
    let roots = v["potential_roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    let amp = cycles[0]["amplitude"].as_f64().unwrap();
    assert!((roots[0].as_f64().unwrap() - amp).abs() < 2e-4);

    let csv = fs::read_to_string(d.path().join("return_map.csv")).unwrap();
    assert!(csv.starts_with("y0,D\n"));
    assert_eq!(csv.lines().count(), 201);
    let csv = fs::read_to_string(d.path().join("potential.csv")).unwrap();
    assert!(csv.starts_with("alpha,V\n"));
}

#[test]
fn quintic_without_cycles() {
    let d = TempDir::new().unwrap();
    run_in(&d, &["check", "--builtin", "quintic", "--k", "3.65"]).success();
    assert_eq!(
        json(&d.path().join("theorem_report.json"))["predicted_N"],
        Value::Null
    );
    let text = fs::read_to_string(d.path().join("theorem_report.txt")).unwrap();
    assert!(text.contains("predicted_N: none"));
    run_in(&d, &["cycles", "--builtin", "quintic", "--k", "3.65"]).success();
    assert_eq!(json(&d.path().join("cycles.json"))["count"], 0);
}

#[test]
fn check_named_theorem() {
    let d = TempDir::new().unwrap();
    let out = run_in(
        &d,
        &[
            "check",
            "--builtin",
            "quintic",
            "--k",
            "3",
            "--theorem",
            "two_cycle",
        ],
    )
    .success()
    .get_output()
    .stdout
    .clone();
    assert!(String::from_utf8(out).unwrap().contains("predicted_N: 2"));
    let r = json(&d.path().join("theorem_report.json"));
    assert_eq!(r["theorem"], "two_cycle");
    assert_eq!(r["predicted_N"], 2);
}

#[test]
fn alphabar_from_intercept() {
    let d = TempDir::new().unwrap();
    run_in(
        &d,
        &[
            "alphabar",
            "--builtin",
            "vdp",
            "--mu",
            "1",
            "--y0",
            "2.1727135",
        ],
    )
    .success();
    let r = &json(&d.path().join("alphabar.json"))["results"][0];
    assert!((r["alpha_bar"].as_f64().unwrap() - 2.0327736318).abs() < 1e-6);
    assert_eq!(r["alpha_prime"], r["alpha_double_prime"]);

    run_in(
        &d,
        &[
            "alphabar",
            "--builtin",
            "vdp",
            "--mu",
            "1",
            "--y0",
            "0.1",
            "--alpha-range",
            "1.8:4",
        ],
    )
    .code(3);
}

#[test]
fn phi_quintic_roots() {
    let d = TempDir::new().unwrap();
    run_in(&d, &["phi", "--builtin", "quintic", "--k", "3.5"]).success();
    let v = json(&d.path().join("phi.json"));
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    assert!((roots[0].as_f64().unwrap() - 0.4f64.sqrt()).abs() < 1e-10);
    assert!(fs::read_to_string(d.path().join("phi.csv"))
        .unwrap()
        .starts_with("r,phi\n"));
}

#[test]
fn simulate_writes_trajectory() {
    let d = TempDir::new().unwrap();
    run_in(
        &d,
        &[
            "simulate",
            "--builtin",
            "vdp",
            "--mu",
            "1",
            "--y0",
            "1",
            "--format",
            "csv",
        ],
    )
    .success();
    let csv = fs::read_to_string(d.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,x,y\n0,0,1\n"));
    assert!(!d.path().join("trajectory.json").exists());
    let ev = fs::read_to_string(d.path().join("events.csv")).unwrap();
    assert_eq!(
        ev.lines().filter(|l| l.starts_with("y_axis_cross")).count(),
        2
    );
}

#[test]
fn model_file_round_trip() {
    let d = TempDir::new().unwrap();
    let path = d.path().join("vdp.toml");
    lienard_core::model_file::save(&lienard_core::builtin::vdp(1.0).unwrap(), &path).unwrap();
    let p = path.to_str().unwrap();
    run_in(&d, &["cycles", "--model", p, "--format", "json"]).success();
    assert_eq!(json(&d.path().join("cycles.json"))["count"], 1);
    assert!(!d.path().join("return_map.csv").exists());
}

#[test]
fn artifacts_are_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for d in [&a, &b] {
        run_in(d, &["cycles", "--builtin", "three_cycle"]).success();
    }
    lab()
        .env("LIENARD_LAB_THREADS", "1")
        .args(["cycles", "--builtin", "three_cycle", "--out"])
        .arg(b.path().join("serial"))
        .assert()
        .success();
    for name in ["cycles.json", "return_map.csv", "potential.csv"] {
        let x = fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, fs::read(b.path().join(name)).unwrap(), "{name}");
        assert_eq!(
            x,
            fs::read(b.path().join("serial").join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn reproduce_targets_match_golden() {
    let d = TempDir::new().unwrap();
    run_in(&d, &["reproduce", "--target", "vdp-table"]).success();
    let table = fs::read_to_string(d.path().join("vdp_table.txt")).unwrap();
    assert_eq!(table.lines().count(), 15);
    run_in(&d, &["reproduce", "--target", "examples"]).success();
    let ex = json(&d.path().join("examples.json"));
    assert_eq!(ex.as_array().unwrap().len(), 7);
}

#[test]
fn golden_mismatch_exits_4() {
    let d = TempDir::new().unwrap();
    let g = TempDir::new().unwrap();
    fs::write(
        g.path().join("vdp_table.txt"),
        "mu y_plus0 alpha_bar\n1.0 2.3 2.0327736318\n",
    )
    .unwrap();
    lab()
        .args(["reproduce", "--target", "vdp-table", "--golden"])
        .arg(g.path())
        .arg("--out")
        .arg(d.path())
        .assert()
        .code(4);
    fs::write(g.path().join("examples.json"), "[]").unwrap();
    lab()
        .args(["reproduce", "--target", "examples", "--golden"])
        .arg(g.path())
        .arg("--out")
        .arg(d.path())
        .assert()
        .code(4);
}

#[test]
fn exit_codes() {
    let d = TempDir::new().unwrap();
    lab().arg("frobnicate").assert().code(1);
    lab().args(["cycles"]).assert().code(1);
    lab()
        .args(["cycles", "--builtin", "vdp", "--model", "x.toml"])
        .assert()
        .code(1);
    run_in(&d, &["cycles", "--builtin", "vdp"]).code(1);
    run_in(
        &d,
        &["cycles", "--builtin", "vdp", "--mu", "1", "--rtol", "-1"],
    )
    .code(1);
    run_in(
        &d,
        &[
            "cycles",
            "--builtin",
            "vdp",
            "--mu",
            "1",
            "--alpha-range",
            "2:1",
        ],
    )
    .code(1);
    run_in(
        &d,
        &[
            "check",
            "--builtin",
            "vdp",
            "--mu",
            "1",
            "--theorem",
            "nope",
        ],
    )
    .code(1);
    lab()
        .env("LIENARD_LAB_THREADS", "zero")
        .args(["cycles", "--builtin", "vdp", "--mu", "1"])
        .assert()
        .code(1);
    run_in(&d, &["cycles", "--builtin", "nope"]).code(2);
    run_in(&d, &["cycles", "--model", "/nonexistent/model.toml"]).code(2);
    let bad = d.path().join("bad.toml");
    fs::write(&bad, "name = \"x\"\n").unwrap();
    run_in(&d, &["cycles", "--model", bad.to_str().unwrap()]).code(2);
    run_in(&d, &["phi", "--builtin", "two_cycle"]).code(2);
    lab().arg("--help").assert().success();
}
