use super::*;
use crate::tracker::io::read_polylines_jsonl;

fn small(name: &str, n: usize) -> ScenarioConfig {
    let mut c = preset(name).unwrap().with_resolution(n);
    c.output.dir = std::env::temp_dir().join(format!("qvortex-unit-{name}-{n}-{}", std::process::id()));
    c
}

#[test]
fn preset_round_trips_through_toml() {
    let c = preset("fig2").unwrap();
    let text = c.to_toml_string().unwrap();
    assert!(text.contains("family = \"FreeTwoLinesSymmetric\""));
    assert_eq!(ScenarioConfig::from_toml_str(&text).unwrap(), c);
    for p in list_presets() {
        let c = preset(p.name).unwrap();
        assert_eq!(ScenarioConfig::from_toml_str(&c.to_toml_string().unwrap()).unwrap(), c, "{}", p.name);
    }
}

#[test]
fn validation_reports_every_problem() {
    let mut c = preset("fig1").unwrap();
    c.time_range = [1.0, 1.0];
    c.n_frames = 0;
    c.expect.events = None;
    let d = c.validate();
    let fields: Vec<&str> = d.iter().map(|d| d.field.as_str()).collect();
    assert!(fields.contains(&"time_range"), "{d:?}");
    assert!(fields.contains(&"n_frames"));
    assert!(fields.contains(&"expect.events"));
    assert!(matches!(c.check(), Err(Error::Config(m)) if m.contains("time_range")));

    let mut m = preset("fig4").unwrap();
    m.checks.push(CheckKind::Oracle);
    assert!(m.validate().iter().any(|d| d.message.contains("oracle is unavailable")));
    let mut r = preset("relativistic").unwrap();
    r.checks = vec![CheckKind::Oracle, CheckKind::Generation];
    let d = r.validate();
    assert!(d.iter().any(|d| d.message.contains("oracle")) && d.iter().any(|d| d.message.contains("generation")));
    let mut o = preset("oracle").unwrap();
    o.grid.dims = [98, 96, 96];
    assert!(o.validate().iter().any(|d| d.field == "grid.dims"));
    let mut bad = preset("fig1").unwrap();
    bad.spec = crate::SolutionSpec::FreeRingSphere { r: -1.0, a: 1.0, k: Default::default() };
    assert!(bad.validate().iter().any(|d| d.field.starts_with("spec.")));
}

#[test]
fn unknown_fields_and_bad_formats_are_rejected() {
    let text = preset("fig1").unwrap().to_toml_string().unwrap();
    let extra = format!("bogus = 1\n{text}");
    assert!(ScenarioConfig::from_toml_str(&extra).is_err());
    assert!("png".parse::<OutputFormat>().is_err());
    assert_eq!("svg".parse::<OutputFormat>().unwrap(), OutputFormat::Svg);
}

#[test]
fn resolution_override_keeps_the_box() {
    let c = preset("fig1").unwrap();
    let r = c.with_resolution(33);
    assert_eq!(r.grid.dims, [33; 3]);
    assert!((r.grid.upper() - c.grid.upper()).norm() < 1e-12);
    let o = preset("oracle").unwrap();
    let r = o.with_resolution(48);
    assert!((r.grid.spacing[0] * 48.0 - o.grid.spacing[0] * 96.0).abs() < 1e-12);
}

#[test]
fn small_sphere_ring_run_passes_and_is_deterministic() {
    let mut c = small("fig1", 40);
    c.n_frames = 16;
    c.output.format = OutputFormat::Table;
    let a = run(&c).unwrap();
    assert!(a.summary.pass, "{:#?}", a.summary);
    let names: Vec<&str> = a.summary.checks.iter().map(|r| r.name.as_str()).collect();
    assert!(names.contains(&"events.creation@-1") && names.contains(&"locus.ring"), "{names:?}");
    let read = |p: &str| std::fs::read(c.output.dir.join(p)).unwrap();
    let (poly, summ) = (read("polylines.jsonl"), read("summary.json"));
    assert!(!read("polylines.csv").is_empty() && !read("events.json").is_empty());
    let frames = read_polylines_jsonl(&poly[..]).unwrap();
    assert!(!frames.is_empty());
    run(&c).unwrap();
    assert_eq!(read("polylines.jsonl"), poly);
    assert_eq!(read("summary.json"), summ);
    std::fs::remove_dir_all(&c.output.dir).ok();
}

#[test]
fn failing_check_is_reported_not_raised() {
    let mut c = small("fig1", 32);
    c.n_frames = 8;
    c.checks = vec![CheckKind::Events];
    c.expect.events = Some(vec![ExpectedEvent { kind: EventKind::Reconnection, t: 0.0 }]);
    c.output.format = OutputFormat::Svg;
    let r = run(&c).unwrap();
    assert!(!r.summary.pass);
    assert!(r.summary.checks.iter().any(|x| x.name == "events.unexpected" && !x.pass));
    assert!(c.output.dir.join("summary.json").exists());
    assert!(c.output.dir.join("frames/frame_0000.svg").exists());
    std::fs::remove_dir_all(&c.output.dir).ok();
}

#[test]
fn quick_formula_presets_pass() {
    for (name, n) in [("cylinder", 40), ("generation", 24), ("relativistic", 40), ("anatomy", 32)] {
        let c = small(name, n);
        let r = run(&c).unwrap();
        assert!(r.summary.pass, "{name}: {:#?}", r.summary);
        std::fs::remove_dir_all(&c.output.dir).ok();
    }
}
