//! End-to-end tests of the `icp` binary: the full pipeline, byte-identical
//! replay of data artifacts, and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

fn icp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn assert_exit(out: &Output, code: i32, what: &str) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "{what}: stdout={} stderr={}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn run_pipeline(dir: &Path, sub: &str) {
    std::fs::create_dir_all(dir.join(sub)).unwrap();
    let out = icp(
        &["generate", "--p", "3", "--q", "7", "--generations", "2", "-o", &format!("{sub}/patch.json")],
        dir,
    );
    assert_exit(&out, 0, "generate");
    let out = icp(
        &["validate", &format!("{sub}/patch.json"), "--out-dir", sub],
        dir,
    );
    assert_exit(&out, 0, "validate");
    let out = icp(
        &[
            "solve", &format!("{sub}/patch.json"),
            "--method", "fixed-point", "--tol", "1e-11",
            "-o", &format!("{sub}/metric.json"),
            "--log", &format!("{sub}/solve_log.csv"),
        ],
        dir,
    );
    assert_exit(&out, 0, "solve");
    let out = icp(
        &[
            "layout", &format!("{sub}/patch.json"),
            "--metric", &format!("{sub}/metric.json"),
            "--disk",
            "--svg", &format!("{sub}/packing.svg"),
            "--layout-csv", &format!("{sub}/layout.csv"),
            "--duals-csv", &format!("{sub}/duals.csv"),
            "--out-dir", sub,
        ],
        dir,
    );
    assert_exit(&out, 0, "layout");
    let out = icp(
        &[
            "walk", &format!("{sub}/patch.json"),
            "--layout", &format!("{sub}/layout.csv"),
            "--samples", "40", "--seed", "11", "--bins", "8",
            "--out-dir", sub,
        ],
        dir,
    );
    assert_exit(&out, 0, "walk");
}

#[test]
fn pipeline_replay_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    run_pipeline(tmp.path(), "a");
    run_pipeline(tmp.path(), "b");
    // Every data artifact reproduces byte for byte; manifests and the solver
    // log carry wall-clock timings and are exempt.
    for name in [
        "patch.json",
        "metric.json",
        "packing.svg",
        "layout.csv",
        "duals.csv",
        "rivin_report.json",
        "c1_residuals.csv",
        "layout_report.json",
        "trace_000.csv",
        "histogram.csv",
        "decay.csv",
        "speed.json",
    ] {
        let a = std::fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between replays");
    }
}

#[test]
fn manifests_list_every_output() {
    let tmp = tempfile::tempdir().unwrap();
    run_pipeline(tmp.path(), "m");
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("m/manifest.json")).unwrap(),
    )
    .unwrap();
    // The last command (walk) owns m/manifest.json.
    let outputs: Vec<String> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    for name in ["trace_000.csv", "histogram.csv", "decay.csv", "speed.json"] {
        assert!(
            outputs.iter().any(|o| o.ends_with(name)),
            "{name} missing from manifest outputs {outputs:?}"
        );
        assert!(tmp.path().join("m").join(name).exists());
    }
    assert_eq!(manifest["seed"], 11);
    assert!(manifest["wall_time_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn validate_rejects_bad_angles() {
    let tmp = tempfile::tempdir().unwrap();
    // A triangle with angles that cannot satisfy C1.
    let doc = serde_json::json!({
        "topology": "disk-patch",
        "root": 0,
        "faces": [[0, 1, 2]],
        "theta": [
            {"edge": [0, 1], "value": 1.0},
            {"edge": [1, 2], "value": 1.0},
            {"edge": [0, 2], "value": 1.2}
        ]
    });
    std::fs::write(tmp.path().join("bad.json"), doc.to_string()).unwrap();
    let out = icp(&["validate", "bad.json"], tmp.path());
    assert_exit(&out, 1, "validate must fail C1");
}

#[test]
fn missing_input_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = icp(&["validate", "nope.json"], tmp.path());
    assert_exit(&out, 2, "missing file");
}

#[test]
fn non_convergence_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = icp(
        &["generate", "--p", "3", "--q", "7", "--generations", "2", "-o", "p.json"],
        tmp.path(),
    );
    assert_exit(&out, 0, "generate");
    let out = icp(
        &[
            "solve", "p.json", "--max-iters", "1", "--tol", "1e-15", "-o", "m.json",
        ],
        tmp.path(),
    );
    assert_exit(&out, 3, "impossible tolerance");
    // The best iterate is still written.
    assert!(tmp.path().join("m.json").exists());
}

#[test]
fn corrupt_metric_fails_holonomy() {
    let tmp = tempfile::tempdir().unwrap();
    let out = icp(
        &["generate", "--p", "3", "--q", "7", "--generations", "2", "-o", "p.json"],
        tmp.path(),
    );
    assert_exit(&out, 0, "generate");
    // A uniform metric is not flat on {3,7}: the development must detect the
    // holonomy defect.
    let radii: Vec<serde_json::Value> = (0..29)
        .map(|v| serde_json::json!({"vertex": v, "r": 1.0}))
        .collect();
    std::fs::write(
        tmp.path().join("flat1.json"),
        serde_json::json!({ "radii": radii }).to_string(),
    )
    .unwrap();
    let out = icp(
        &["layout", "p.json", "--metric", "flat1.json", "--svg", "x.svg"],
        tmp.path(),
    );
    assert_exit(&out, 1, "holonomy failure");
}

#[test]
fn analyze_commands_pass_on_reference_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = icp(
        &["generate", "--p", "3", "--q", "6", "--torus-period", "3", "-o", "t.json"],
        tmp.path(),
    );
    assert_exit(&out, 0, "generate torus");
    let out = icp(
        &["analyze", "mtp", "t.json", "--perturb", "0.05", "--seed", "4", "--out-dir", "mtp"],
        tmp.path(),
    );
    assert_exit(&out, 0, "mtp");
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("mtp/mtp_report.json")).unwrap(),
    )
    .unwrap();
    assert!(report["max_outgoing_deviation"].as_f64().unwrap() < 1e-10);

    let out = icp(
        &["analyze", "dichotomy", "--p", "3", "--q", "7", "--generations", "2,3,4", "--out-dir", "d"],
        tmp.path(),
    );
    assert_exit(&out, 0, "dichotomy");
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("d/dichotomy_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["diagnosis"], "hyperbolic-like");
}
