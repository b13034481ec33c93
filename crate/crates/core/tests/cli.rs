use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn navtransfer(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_navtransfer"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn record(bytes: &[u8]) -> Value {
    let text = String::from_utf8_lossy(bytes);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("not a JSON record ({e}): {text}"))
}

#[test]
fn pipeline_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for args in [
        &["gen-scene", "--seed", "4", "--clutter", "6", "--out", "w.json"][..],
        &["gen-graph", "--world", "w.json", "--seed", "4", "--out", "g.json"],
        &["gen-episodes", "--world", "w.json", "--graph", "g.json", "--seed", "4", "--count", "6", "--out", "e.json"],
    ] {
        let out = navtransfer(args, d);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(record(&out.stdout)["ok"], true);
    }
    std::fs::write(
        d.join("cfg.json"),
        r#"{"world": "w.json", "graph": "g.json", "episodes": "e.json", "navigator": "oracle", "seed": 1}"#,
    )
    .unwrap();
    for (name, extra) in [("a", &["--agent", "random"][..]), ("b", &["--mode", "vln", "--workers", "2"])] {
        let mut args = vec!["--config", "cfg.json", "run", "--out", name];
        args.extend_from_slice(extra);
        let out = navtransfer(&args, d);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let r = record(&out.stdout);
        assert_eq!(r["result"]["episodes"], 6);
        for f in ["rows.jsonl", "trajectories.jsonl", "report.json", "report.md"] {
            assert!(d.join(name).join(f).is_file(), "{name}/{f}");
        }
    }
    let stored: Value = serde_json::from_slice(&std::fs::read(d.join("a/report.json")).unwrap()).unwrap();
    assert_eq!(stored["run"]["agent"], "random");
    assert_eq!(stored["run"]["navigator"], "oracle");

    let replay = navtransfer(
        &["--config", "cfg.json", "run", "--agent", "replay", "--replay", "a/trajectories.jsonl", "--out", "c"],
        d,
    );
    assert!(replay.status.success(), "{}", String::from_utf8_lossy(&replay.stderr));
    assert_eq!(
        std::fs::read(d.join("a/rows.jsonl")).unwrap(),
        std::fs::read(d.join("c/rows.jsonl")).unwrap()
    );

    let out = navtransfer(&["report", "a", "b", "--out", "summary"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let md = std::fs::read_to_string(d.join("summary/summary.md")).unwrap();
    assert!(md.contains("random") && md.contains("vln"), "{md}");
    let summary: Value = serde_json::from_slice(&std::fs::read(d.join("summary/summary.json")).unwrap()).unwrap();
    assert_eq!(summary.as_array().unwrap().len(), 2);
}

#[test]
fn missing_input_yields_an_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = navtransfer(&["run", "--world", "nope.json", "--graph", "g", "--episodes", "e"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r = record(&out.stderr);
    assert_eq!(r["ok"], false);
    assert_eq!(r["kind"], "io");
    assert!(r["message"].as_str().unwrap().contains("nope.json"));
}

#[test]
fn missing_flag_and_bad_config_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = navtransfer(&["run"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(record(&out.stderr)["kind"], "invalid_parameter");

    std::fs::write(dir.path().join("bad.json"), r#"{"navigatr": "local"}"#).unwrap();
    let out = navtransfer(&["--config", "bad.json", "run"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r = record(&out.stderr);
    assert_eq!(r["kind"], "malformed");
    assert!(r["message"].as_str().unwrap().contains("navigatr"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["run", "--navigator", "warp"][..], &["fly"], &["run", "--workers", "many"]] {
        let out = navtransfer(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let r = record(&out.stderr);
        assert_eq!(r["ok"], false);
        assert_eq!(r["kind"], "usage");
    }
}

#[test]
fn help_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = navtransfer(&["--help"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["gen-scene", "gen-graph", "gen-episodes", "run", "report"] {
        assert!(text.contains(sub), "{text}");
    }
}
