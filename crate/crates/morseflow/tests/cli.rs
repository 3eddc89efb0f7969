use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use morseflow::manifest::sha256_file;
use serde_json::Value;

fn morseflow(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morseflow"))
        .args(args)
        .current_dir(dir)
        .env_remove("MORSEFLOW_SEED")
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn timemap_writes_requested_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = morseflow(
        dir.path(),
        &[
            "timemap", "--model", "sat:lambda=50", "--emin", "1e-8", "--emax", "10", "--points",
            "40", "--out", "tau.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("tau.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("E,tau_plus,tau_minus,quad_error_estimate"));
    assert_eq!(lines.count(), 40);
}

#[test]
fn manifest_digests_match_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = morseflow(
        dir.path(),
        &["equilibria", "--model", "heaviside:eps=0.2", "--out-dir", "eq"],
    );
    assert_eq!(out.status.code(), Some(0));
    let eq = dir.path().join("eq");
    let index = json(&eq.join("index.json"));
    assert_eq!(index["count"], 3);
    let manifest = json(&eq.join("manifest.json"));
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 4);
    for o in outputs {
        let p = eq.join(o["path"].as_str().unwrap());
        assert_eq!(sha256_file(&p).unwrap(), o["sha256"].as_str().unwrap());
    }
    assert_eq!(manifest["model"], "heaviside:eps=0.2");
}

#[test]
fn homoclinic_graph_fails_check_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("homoclinic.json"),
        r#"{"states": ["1", "2"], "step": {"1": ["1", "2"], "2": ["1"]}, "family": {"Xi1": ["1"]}}"#,
    )
    .unwrap();
    let out = morseflow(dir.path(), &["graph", "check", "--in", "homoclinic.json", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&dir.path().join("r.json"));
    assert_eq!(r["dynamically_gradient"], false);
    assert_eq!(r["homoclinic"]["walks"][0], serde_json::json!(["1", "2", "1"]));
    assert!(dir.path().join("r.json.manifest.json").exists());
}

#[test]
fn graph_reorder_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("g.json"),
        r#"{
          "states": ["a", "b", "c", "d"],
          "step": {"a": ["a"], "b": ["b", "a"], "c": ["a"], "d": ["a"]},
          "neighbors": {"a": ["d"]},
          "family": {"Xb": ["b"], "Xa": ["a"]},
          "eta_family": [
            {"eta": 0.5, "step": {"a": ["a", "c"], "c": ["d"], "d": ["d"]}},
            {"eta": 0.1, "step": {"d": ["d", "a"]}}
          ]
        }"#,
    )
    .unwrap();
    let out = morseflow(dir.path(), &["graph", "reorder", "--in", "g.json", "--out", "o.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&dir.path().join("o.json"))["order"], serde_json::json!(["Xa", "Xb"]));

    let out = morseflow(dir.path(), &["graph", "sweep", "--in", "g.json", "--out", "s.json"]);
    assert_eq!(out.status.code(), Some(2));
    let s = json(&dir.path().join("s.json"));
    assert_eq!(s["eta0"], 0.1);
    assert_eq!(s["first_failure"], 0.5);
    assert_eq!(s["verdicts"][2]["homoclinic"]["sets"], serde_json::json!(["Xa", "Xa"]));
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["timemap", "--model", "nope:x=1", "--emin", "1", "--emax", "2", "--points", "3", "--out", "t.csv"][..],
        &["timemap", "--model", "sat:lambda=50", "--emin", "2", "--emax", "1", "--points", "3", "--out", "t.csv"],
        &["graph", "check", "--in", "missing.json"],
        &["sweep", "--eps", "0.5", "--out", "s.csv"],
        &["no-such-command"],
    ] {
        let out = morseflow(dir.path(), args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn seeded_simulation_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |d: &'static str| {
        [
            "simulate", "--model", "heaviside:eps=0.2", "--init", "random:amp=2", "--t-end", "0.5",
            "--out-dir", d,
        ]
    };
    let run = |d: &'static str, seed: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_morseflow"))
            .args(args(d))
            .current_dir(dir.path())
            .env("MORSEFLOW_SEED", seed)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run("a", "5");
    run("b", "5");
    run("c", "6");
    for f in ["snapshots.csv", "final.csv", "summary.json"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    assert_ne!(
        fs::read(dir.path().join("a/final.csv")).unwrap(),
        fs::read(dir.path().join("c/final.csv")).unwrap()
    );
    assert_eq!(json(&dir.path().join("a/manifest.json"))["seeds"]["init"], 5);
}

#[test]
fn job_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    for (jobs, out) in [("1", "one.csv"), ("4", "four.csv")] {
        let o = morseflow(
            dir.path(),
            &["--jobs", jobs, "morse-sweep", "--eps", "0.15,0.1,0.05", "--cut", "2", "--interior", "255", "--out", out],
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(
        fs::read(dir.path().join("one.csv")).unwrap(),
        fs::read(dir.path().join("four.csv")).unwrap()
    );
}

#[test]
fn connections_emit_json_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let out = morseflow(
        dir.path(),
        &["connections", "--model", "heaviside:eps=0.2", "--interior", "255", "--out-dir", "c"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let g = json(&dir.path().join("c/digraph.json"));
    let edges: Vec<(String, String)> = g["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["src"].as_str().unwrap().into(), e["dst"].as_str().unwrap().into()))
        .collect();
    assert_eq!(edges, [("0".into(), "v1+".into()), ("0".into(), "v1-".into())]);
    assert_eq!(g["verdict"]["label"], "empirical");
    let dot = fs::read_to_string(dir.path().join("c/digraph.dot")).unwrap();
    assert!(dot.contains("\"0\" -> \"v1+\""));
}

#[test]
fn sweep_and_simulate_report_properties() {
    let dir = tempfile::tempdir().unwrap();
    let out = morseflow(dir.path(), &["sweep", "--eps", "0.3,0.2,0.1,0.05", "--out", "s.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(text.starts_with("eps,dist_l2,dist_h10\n"));
    // a terminal tolerance no sweep can meet
    let out = morseflow(
        dir.path(),
        &["sweep", "--eps", "0.3,0.2", "--conv-tol", "1e-9", "--out", "t.csv"],
    );
    assert_eq!(out.status.code(), Some(2));

    let out = morseflow(
        dir.path(),
        &[
            "simulate", "--model", "heaviside:eps=0.2", "--init", "sin:k=1,amp=0.01", "--t-end", "50",
            "--capture", "--out-dir", "cap",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let s = json(&dir.path().join("cap/summary.json"));
    assert_eq!(s["captured"]["id"], "v1+");
    assert_eq!(s["init"], "sin:k=1,amp=0.01");
}

#[test]
fn aggregate_trend_break_keeps_member_distances() {
    let dir = tempfile::tempdir().unwrap();
    let out = morseflow(
        dir.path(),
        &["morse-sweep", "--eps", "0.3,0.2,0.1", "--cut", "1", "--interior", "255", "--out", "ms.csv"],
    );
    assert_eq!(out.status.code(), Some(2));
    let text = fs::read_to_string(dir.path().join("ms.members.csv")).unwrap();
    let v1: Vec<f64> = text
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(1) == Some("v1+"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(v1.len(), 3);
    assert!(v1.windows(2).all(|w| w[1] < w[0]), "{v1:?}");
    assert!(text.contains(",v3-,"));
    let manifest = json(&dir.path().join("ms.csv.manifest.json"));
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}
