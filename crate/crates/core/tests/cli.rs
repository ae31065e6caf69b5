use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoperim")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn sphere_profile_at_one_half() {
    let o = run(&["profile", "--kind", "sphere", "--n", "2", "--eval", "0.5,0.1", "--phi"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert!((rows[0]["value"].as_f64().unwrap() - 0.5).abs() <= 1e-8);
    assert!((rows[1]["value"].as_f64().unwrap() - 0.09f64.sqrt()).abs() <= 1e-8);
    assert!((rows[0]["phi"].as_f64().unwrap() - 1.0).abs() <= 1e-8);
}

#[test]
fn profile_outside_its_domain_is_a_usage_error() {
    let o = run(&["profile", "--kind", "sphere", "--n", "2", "--eval", "1.5"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = run(&["profile", "--kind", "torus", "--eval", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"seed": 1, "resolutoin": 64}"#);
    let o = run(&["verify", "--config", &cfg, "--out", &dir.path().join("out").to_string_lossy()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("resolutoin"), "{}", stderr(&o));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn malformed_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"seed": 1,"#);
    let o = run(&["verify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = write(dir.path(), "space.json", r#"{"spaces": [{"kind": "sphere", "n": 2, "resolution": 64, "radius": 1}]}"#);
    let o = run(&["weights", "analyze", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("radius"), "{}", stderr(&o));
}

#[test]
fn invalid_resolution_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["verify", "--resolution", "4", "--out", &out.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn core_suite_passes_and_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, jobs) in [(&a, "1"), (&b, "2")] {
        let o = run(&["verify", "--suite", "core", "--seed", "42", "--resolution", "256", "--jobs", jobs, "--out", &out.to_string_lossy()]);
        assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    }
    let ra = std::fs::read(a.join("report.json")).unwrap();
    assert_eq!(ra, std::fs::read(b.join("report.json")).unwrap());

    let report: Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(report["run"]["seed"], 42);
    assert_eq!(report["run"]["resolution"], 256);
    assert_eq!(report["run"]["hash"].as_str().unwrap().len(), 64);
    let meta: Value = serde_json::from_slice(&std::fs::read(a.join("run_metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["hash"], report["run"]["hash"]);
    assert_eq!(meta["jobs"], 1);

    let curves: Vec<_> = std::fs::read_dir(a.join("curves")).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!curves.is_empty());
    for c in curves {
        let text = std::fs::read_to_string(c).unwrap();
        assert!(text.starts_with("r,lhs,rhs,ratio\n"));
    }

    let o = run(&["report", "diff", &a.join("report.json").to_string_lossy(), &b.join("report.json").to_string_lossy()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 case(s) differ"));
}

#[test]
fn diff_reports_changed_cases() {
    let dir = tempfile::tempdir().unwrap();
    let a = r#"{"run": {"hash": "x"}, "results": [{"case": "k", "ratio": 0.5, "pass": true}, {"case": "gone", "ratio": 1, "pass": true}]}"#;
    let b = r#"{"run": {"hash": "y"}, "results": [{"case": "k", "ratio": 1.2, "pass": false}, {"case": "new", "ratio": 1, "pass": true}]}"#;
    let (pa, pb) = (write(dir.path(), "a.json", a), write(dir.path(), "b.json", b));
    let o = run(&["report", "diff", &pa, &pb]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("~ k: ratio 0.5 -> 1.2 VERDICT"), "{text}");
    assert!(text.contains("- gone") && text.contains("+ new") && text.contains("3 case(s) differ"), "{text}");
}

#[test]
fn custom_config_cases_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "custom.json",
        r#"{
            "suite": "transference",
            "seed": 7,
            "resolution": 64,
            "spaces": [{"kind": "sphere", "n": 2, "resolution": 64}],
            "functions": [{"shape": {"kind": "coordinate", "axis": 2}}],
            "weights": [{"kind": "distance", "offset": 0.1}]
        }"#,
    );
    let out = dir.path().join("out");
    let o = run(&["verify", "--config", &cfg, "--out", &out.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let report: Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    let cases: Vec<&str> = report["results"].as_array().unwrap().iter().map(|r| r["case"].as_str().unwrap()).collect();
    assert!(cases.iter().any(|c| c.starts_with("custom.s0.f0.w0")), "{cases:?}");
    assert!(cases.iter().any(|c| c.starts_with("custom.s0.w0")), "{cases:?}");
    assert_eq!(report["run"]["seed"], 7);
}

#[test]
fn weights_analyze_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "w.json",
        r#"{"spaces": [{"kind": "euclidean_disk", "radius": 4, "resolution": 128}], "weights": [{"kind": "distance"}]}"#,
    );
    let out = dir.path().join("analysis.json");
    let o = run(&["weights", "analyze", "--config", &cfg, "--necessary", "--out", &out.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let row = &rows[0];
    assert_eq!(row["weight"], "1*d^1+0");
    let text = row.to_string();
    assert!(text.contains("0.5") || text.contains("0.49"), "{text}");
}
