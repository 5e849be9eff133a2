use std::process::Command;

fn qvortex() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qvortex"))
}

#[test]
fn list_presets_shows_figures_and_suites() {
    let out = qvortex().arg("list-presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 8);
    for name in ["fig1", "fig2", "fig3", "fig4", "fig5", "anatomy", "generation", "relativistic", "oracle"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn validate_accepts_presets_and_reports_all_problems() {
    let out = qvortex().args(["validate", "--preset", "fig2"]).output().unwrap();
    assert!(out.status.success());

    let dir = tempfile::tempdir().unwrap();
    let printed = qvortex().args(["validate", "--preset", "fig1", "--print"]).output().unwrap();
    let text = String::from_utf8(printed.stdout).unwrap();
    let broken = text.replace("time_range = [-2.0, 2.0]", "time_range = [2.0, -2.0]").replace("n_frames = 64", "n_frames = 0");
    assert_ne!(broken, text);
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, broken).unwrap();
    let out = qvortex().args(["validate", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("time_range") && err.contains("n_frames"), "{err}");

    let out = qvortex().args(["validate", "--preset", "missing"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn run_writes_artifacts_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = qvortex()
            .args(["run", "--preset", "cylinder", "--grid", "32", "--frames", "4", "--format", "svg", "--seed", "5", "--out"])
            .arg(dir.path().join(sub))
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
        assert!(String::from_utf8(out.stdout).unwrap().contains("cylinder: PASS"));
    };
    run("a");
    run("b");
    for f in ["polylines.jsonl", "summary.json", "events.json", "frames/frame_0000.svg"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn failing_checks_give_nonzero_exit_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    let text = String::from_utf8(qvortex().args(["validate", "--preset", "cylinder", "--print"]).output().unwrap().stdout).unwrap();
    // A wrong expected speed must fail the node-speed check.
    let wrong = text.replace("value = 2.5", "value = 3.0");
    assert_ne!(wrong, text);
    let path = dir.path().join("wrong.toml");
    std::fs::write(&path, wrong).unwrap();
    let out = qvortex()
        .args(["run", "--grid", "32", "--frames", "4", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let summary = std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap();
    assert!(summary.contains("\"pass\": false"));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL  node_speed.value"));
}
