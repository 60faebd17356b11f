use std::path::Path;
use std::process::{Command, Output};

use exponent_lab::io::{network_from_json, network_to_json};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_exponent-lab"));
    c.env_remove("EXPONENT_LAB_THREADS");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generated_network_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["generate", "--family", "path", "--n", "8", "--out", "net.json"]);
    let text = std::fs::read_to_string(dir.path().join("net.json")).unwrap();
    let (net, prov) = network_from_json(&text).unwrap();
    assert_eq!(net.vertex_count(), 17);
    assert_eq!(net.root(), 8);
    let prov = prov.unwrap();
    assert_eq!(prov["generator"]["family"], "path");
    assert_eq!(prov["generator"]["size"], 8);
    assert_eq!(network_to_json(&net, Some(&prov)), text);
}

#[test]
fn invalid_gamma_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["generate", "--family", "gff", "--n", "8", "--gamma", "-0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));
    let out = run(dir.path(), &["generate", "--family", "gff", "--n", "8", "--gamma", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn contamination_exits_with_code_4() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["generate", "--family", "path", "--n", "8", "--out", "net.json"]);
    let out = run(dir.path(), &["resist", "--net", "net.json", "--inner", "0", "--outer", "12"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radius 12"));
}

#[test]
fn resist_reports_path_resistance() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["generate", "--family", "path", "--n", "20", "--out", "net.json"]);
    let out = ok(dir.path(), &["resist", "--net", "net.json", "--inner", "2", "--outer", "9", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // two branches of R + 1 − r unit resistors in parallel
    assert!((v["reff"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert!((v["modulus"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    assert_eq!(v["provenance"]["command"], "resist");
}

#[test]
fn estimate_populates_all_exponents_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["estimate", "--family", "gasket", "--level", "7", "--walkers", "1024", "--out", "report.json", "--csv-dir", "csv"],
    );
    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["schema"], 1);
    for k in ["d_f", "d_w", "beta", "d_s", "zeta_tilde", "zeta_0"] {
        let x = report[k]["estimate"].as_f64().unwrap_or(f64::NAN);
        assert!(x.is_finite() && x > 0.0, "{k} = {x}");
    }
    assert_eq!(report["provenance"]["seed"], 0);
    assert!(report["provenance"]["version"].is_string());
    let csv = std::fs::read_to_string(dir.path().join("csv/volume_exact.csv")).unwrap();
    assert!(csv.starts_with("scale,value,stderr,censor_frac\n"));

    let out = ok(dir.path(), &["verify", "--report", "report.json"]);
    let verdict: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(verdict["passed"].is_boolean());
    assert_eq!(verdict["chain"].as_array().unwrap().len(), 8);
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let args = ["estimate", "--family", "gff", "--n", "40", "--gamma", "1", "--environments", "3", "--walkers", "256", "--seed", "5", "--out", "r.json"];
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let out = bin().current_dir(dir.path()).env("EXPONENT_LAB_THREADS", threads).args(args).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(dir.path().join("r.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.json"),
        r#"{"command": "estimate", "family": "gasket", "level": 6, "walkers": 256, "r_window": [4, 16], "out": "r.json"}"#,
    )
    .unwrap();
    ok(dir.path(), &["--config", "run.json"]);
    let from_config = std::fs::read(dir.path().join("r.json")).unwrap();
    ok(
        dir.path(),
        &["estimate", "--family", "gasket", "--level", "6", "--walkers", "256", "--r-window", "4,16", "--out", "r.json"],
    );
    assert_eq!(from_config, std::fs::read(dir.path().join("r.json")).unwrap());

    // explicit flags override the file
    let out = ok(dir.path(), &["estimate", "--config", "run.json", "--walkers", "128", "--out", "s.json"]);
    assert!(out.stdout.is_empty());
    assert_eq!(read_json(&dir.path().join("s.json"))["provenance"]["config"]["walkers"], 128);
}

#[test]
fn walk_and_stretch_emit_summaries() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["generate", "--family", "gasket", "--level", "5", "--out", "g.json"]);
    let out = ok(
        dir.path(),
        &["walk", "--net", "g.json", "--walkers", "200", "--steps", "1e4", "--seed", "7", "--r-max", "8", "--n-max", "64"],
    );
    let stats: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stats["elementary_violations"], 0);
    assert_eq!(stats["sigma"].as_array().unwrap().len(), 4);
    assert_eq!(stats["max_disp"].as_array().unwrap().len(), 7);

    ok(dir.path(), &["stretch", "--net", "g.json", "--eps", "0.3", "--dstar", "1.58", "--kmax", "2", "--seed", "11", "--out", "w.json"]);
    let w = read_json(&dir.path().join("w.json"));
    let net = network_from_json(&std::fs::read_to_string(dir.path().join("g.json")).unwrap()).unwrap().0;
    assert_eq!(w["values"].as_array().unwrap().len(), net.edge_count());
}

#[test]
fn mtp_check_reports_z_scores() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["mtp-check", "--family", "gff", "--n", "8", "--gamma", "1", "--seeds", "100", "--swap"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["diagnostic"]["z_score"].as_f64().unwrap().is_finite());
    assert!(v["swap"]["z_score"].as_f64().unwrap().is_finite());
}
