use std::path::Path;
use std::process::{Command, Output};

fn anisodrop(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anisodrop")).args(args).arg("--out").arg(dir).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn experiment_writes_described_outputs_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = anisodrop(&["experiment", "crystal-min"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("crystal-min.csv")).unwrap();
    let first = csv.lines().next().unwrap();
    assert!(first.starts_with("# config_hash=") && first.contains("columns=epsilon;a_star;"), "{first}");
    assert!(csv.contains("\r\n"));

    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["exit_code"], 0);
    let arts = m["artifacts"].as_array().unwrap();
    assert_eq!(arts.len(), 2);
    for a in arts {
        let bytes = std::fs::read(out.join(a["file"].as_str().unwrap())).unwrap();
        use sha2::Digest;
        assert_eq!(a["sha256"].as_str().unwrap(), hex::encode(sha2::Sha256::digest(&bytes)));
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("crystal-min.json")).unwrap()).unwrap();
    assert_eq!(summary["config_hash"], m["config_hash"]);
}

#[test]
fn failed_assertion_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.json",
        r#"{"tension": {"variant": "quadratic", "n": 2, "matrix": [1, 0, 0, 2]},
            "params": {"n": 2, "alpha": 1, "epsilon": 0.1},
            "thresholds": {"max_residual": 0.002}}"#,
    );
    let o = anisodrop(&["experiment", "wulff-noncritical", "--config", &cfg], &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(1));
    // Partial results are still flushed.
    assert!(tmp.path().join("o/wulff-noncritical.json").exists());
    assert!(tmp.path().join("o/manifest.json").exists());
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.json", "{\n  \"tension\": {\"variant\": \"euclidean\", \"n\": 2},\n  \"sweeep\": 1\n}");
    let o = anisodrop(&["wulff", "--config", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("line 3") && msg.contains("sweeep"), "{msg}");

    let o = anisodrop(&["experiment", "no-such-thing"], tmp.path());
    assert_eq!(o.status.code(), Some(2));

    let o = Command::new(env!("CARGO_BIN_EXE_anisodrop"))
        .args(["verify", "--suite", "ball", "--out"])
        .arg(tmp.path())
        .env("ANISODROP_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn wulff_export_of_crystal_is_the_square() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"tension": {"variant": "crystalline", "n": 2, "points": [-0.5, -0.5, 0.5, -0.5, -0.5, 0.5, 0.5, 0.5]}}"#);
    let o = anisodrop(&["wulff", "--config", &cfg], &tmp.path().join("w"));
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("w/wulff.json")).unwrap()).unwrap();
    assert_eq!(v["volume"], 1.0);
    assert_eq!(v["perimeter"], 2.0);
    assert_eq!(v["polygon_vertices"].as_array().unwrap().len(), 4);
}

#[test]
fn energy_of_shape_file() {
    let tmp = tempfile::tempdir().unwrap();
    let shape = write(tmp.path(), "s.json", r#"{"variant": "polygon", "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]}"#);
    let cfg = write(
        tmp.path(),
        "c.json",
        r#"{"tension": {"variant": "crystalline", "n": 2, "points": [-0.5, -0.5, 0.5, -0.5, -0.5, 0.5, 0.5, 0.5]},
            "params": {"n": 2, "alpha": 1, "epsilon": 0},
            "terms": [{"term": "riesz"}, {"term": "none"}]}"#,
    );
    let o = anisodrop(&["energy", "--config", &cfg, "--shape", &shape], &tmp.path().join("e"));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("e/energy.json")).unwrap()).unwrap();
    for e in v["energies"].as_array().unwrap() {
        assert_eq!(e["total"], 2.0);
        assert!(e["error"].is_number());
    }
}

#[test]
fn scan_and_minimize_builtin_configs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfgs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let scan = cfgs.join("crystal-scan.json");
    let o = anisodrop(&["scan", "--parallel-sweep", "--config", scan.to_str().unwrap()], &tmp.path().join("s"));
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("s/scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 5);

    let bx = cfgs.join("box-min.json");
    let o = anisodrop(&["minimize", "--config", bx.to_str().unwrap()], &tmp.path().join("m"));
    assert_eq!(o.status.code(), Some(0));
}
