use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_geocatch");

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("geocatch-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(BIN).args(args).arg("--out").arg(out).output().unwrap()
}

fn report(out: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join(format!("{name}.json"))).unwrap()).unwrap()
}

#[test]
fn validation_errors_exit_2() {
    let d = scratch("invalid");
    for args in [
        &["simulate", "--scene", "{not json"][..],
        &["itinerary", "--word", "11"],
        &["catch", "--v", "0"],
        &["evade", "--scene", "torus"],
        &["simulate", "--scene", "torus", "--r0", "0.1"],
    ] {
        let o = run(args, &d);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn period_two_orbit_csv() {
    let d = scratch("sim");
    let o = run(&["simulate", "--horizon", "50.5"], &d);
    assert!(o.status.success());
    let text = std::fs::read_to_string(d.join("trajectory.csv")).unwrap();
    let times: Vec<f64> = text
        .lines()
        .skip(1)
        .filter(|l| l.ends_with("C2") || l.ends_with("C3"))
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(times.len(), 50);
    for w in times.windows(2) {
        assert!((w[1] - w[0] - 1.0).abs() < 1e-12);
    }
    assert!(std::fs::read_to_string(d.join("trajectory.svg")).unwrap().contains("<polyline"));
}

#[test]
fn torus_csv_has_no_bounces() {
    let d = scratch("torus");
    let o = run(&["simulate", "--scene", "torus", "--angle", "0.3826834323650898", "--horizon", "100"], &d);
    assert!(o.status.success());
    let text = std::fs::read_to_string(d.join("trajectory.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn itinerary_width_is_the_tangent_cone() {
    let d = scratch("word");
    let o = run(&["itinerary", "--word", "1", "--start", "0.1,-0.05"], &d);
    assert!(o.status.success());
    let r = report(&d, "itinerary");
    let c1 = (0.0f64, 1.1 / 3f64.sqrt());
    let dist = ((0.1 - c1.0).powi(2) + (-0.05 - c1.1).powi(2)).sqrt();
    let want = 2.0 * (0.05 / dist).asin();
    let got = r["result"]["width"].as_f64().unwrap();
    assert!((got - want).abs() < 1e-12, "{got} vs {want}");

    let o = run(&["itinerary", "--word", "123123121323121232313123132312"], &d);
    assert!(o.status.success());
    assert_eq!(report(&d, "itinerary")["result"]["verified"], true);
}

#[test]
fn flags_override_config_file() {
    let d = scratch("config");
    let cfg = d.join("run.json");
    std::fs::write(&cfg, r#"{"eps": 0.04, "v": 0.005, "T": 150, "seed": 3}"#).unwrap();
    let cfg_s = cfg.to_string_lossy().to_string();
    let o = run(&["evade", "--config", &cfg_s, "--eps", "0.03"], &d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&d, "evade");
    assert_eq!(r["config"]["eps"], 0.03);
    assert_eq!(r["config"]["v"], 0.005);
    assert_eq!(r["config"]["T"], 150.0);
    assert_eq!(r["config"]["ball"]["seed"], 3);
    assert_eq!(r["config"]["scene"]["kind"], "obstacle");
    assert!(r["result"]["certificate"]["min_distance"].as_f64().unwrap() >= 0.03);

    std::fs::write(&cfg, r#"{"unknown": 1}"#).unwrap();
    assert_eq!(run(&["evade", "--config", &cfg_s], &d).status.code(), Some(2));
}

#[test]
fn static_ball_refutes_the_control_condition() {
    let d = scratch("static");
    let o = run(&["tgcc", "--ball", "static", "--T", "100", "--grid-pos", "8", "--grid-ang", "8"], &d);
    assert_eq!(o.status.code(), Some(3));
    let r = report(&d, "tgcc");
    assert!(r["result"]["caught_fraction"].as_f64().unwrap() < 1.0);
    assert!(r["result"]["t0_estimate"].is_null());
    let w = std::fs::read_to_string(d.join("witnesses.csv")).unwrap();
    assert!(w.starts_with("x,y,angle,seeded"));
}

#[test]
fn catcher_path_feeds_back_in() {
    let d = scratch("feed");
    assert!(run(&["catch", "--T", "1e8"], &d).status.success());
    let path = d.join("path.json").to_string_lossy().to_string();
    let o = run(&["tgcc", "--path", &path, "--grid-pos", "8", "--grid-ang", "16"], &d);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&d, "tgcc")["result"]["caught_fraction"], 1.0);
}
