use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn elstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elstat")).args(args).output().expect("binary runs")
}

fn record(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON record")
}

#[test]
fn ball_centre_potential() {
    let out = elstat(&["potential", "--domain", "ball:d=3,R=1,N=1", "--point", "0,0,0", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = record(&out)["value"].as_f64().unwrap();
    assert!((v + 1.5).abs() < 1e-12, "{v}");
}

#[test]
fn unknown_geometry_is_an_argument_error() {
    let out = elstat(&["potential", "--domain", "torus:R=2,r=1", "--point", "0,0,0", "--json"]);
    assert_eq!(out.status.code(), Some(2));
    let r = record(&out);
    assert!(r["error"]["message"].as_str().unwrap().contains("unsupported geometry"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported geometry"));
}

#[test]
fn malformed_arguments_exit_two() {
    assert_eq!(elstat(&["potential", "--domain", "ball:d=3"]).status.code(), Some(2));
    assert_eq!(elstat(&["potential", "--domain", "ball:d=3,R=x", "--point", "0,0,0"]).status.code(), Some(2));
    assert_eq!(elstat(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(elstat(&["--help"]).status.code(), Some(0));
}

#[test]
fn quick_suite_passes() {
    let out = elstat(&["check", "--suite", "quick", "--json"]);
    let r = record(&out);
    assert_eq!(out.status.code(), Some(0), "{r}");
    assert_eq!(r["criteria"].as_array().unwrap().len(), 11);
}

#[test]
fn every_command_emits_parseable_json() {
    let cases: &[&[&str]] = &[
        &["potential", "--domain", "ellipse:a1=2,a2=1", "--point", "3,-1", "--json"],
        &["energy", "--domain", "disk:R=1,N=2", "--points", "0.1,0;-0.3,0.2", "--json"],
        &["coeffs", "--axes", "1,2,3", "--json"],
        &["surface", "--kind", "shell", "--d", "3", "--radius", "1", "--point", "2,0,0", "--json"],
        &["green", "--domain", "halfspace", "--z", "0,0,1", "--w", "1,0,2", "--json"],
        &["capacity", "--map", "interval:h=1", "--point", "2,0", "--json"],
        &["droplet", "--potential", "quadratic:alpha=0.2,area=3.141592653589793", "--json"],
        &["fluct", "--mode", "surface", "--geometry", "disk:R=1", "--p1", "3.141592653589793", "--p2", "0", "--json"],
        &["riesz", "--s", "0", "--n", "16", "--json"],
        &["balayage", "--domain", "ellipse:a1=2,a2=1", "--point", "3,1", "--json"],
        &["hole", "--domain", "ellipse:a1=2,a2=1", "--json"],
        &["sample", "--ensemble", "elliptic", "--tau", "0.5", "--n", "4", "--sweeps", "300", "--json"],
    ];
    for args in cases {
        let out = elstat(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let r = record(&out);
        let again: Value = serde_json::from_str(&r.to_string()).unwrap();
        assert_eq!(r, again);
        assert_eq!(r["command"], args[0]);
    }
}

#[test]
fn floats_round_trip_exactly() {
    let out = elstat(&["coeffs", "--axes", "1,1.3,2.7", "--json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let r: Value = serde_json::from_str(&text).unwrap();
    let a = r["value"]["alpha"][1].as_f64().unwrap();
    assert!(text.contains(&format!("{a:.16e}")));
}

fn sample_csv(dir: &Path, name: &str, seed: &str) -> Vec<u8> {
    let path = dir.join(name);
    let out = elstat(&[
        "sample", "--ensemble", "induced", "--alpha", "1", "--n", "6", "--sweeps", "500", "--chains", "3", "--seed", seed,
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::read(path).unwrap()
}

#[test]
fn identical_seeds_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = sample_csv(dir.path(), "a.csv", "42");
    let b = sample_csv(dir.path(), "b.csv", "42");
    let c = sample_csv(dir.path(), "c.csv", "43");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("chain,sweep,particle,re,im"));
    // 3 chains × 400 measurement sweeps × 6 particles
    assert_eq!(lines.count(), 3 * 400 * 6);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[sampler]\nsweeps = 250\nseed = 9\n\n[ensemble]\nkind = \"sinh\"\nn = 3\nc = 2.0\n").unwrap();
    let out = elstat(&["sample", "--config", cfg.to_str().unwrap(), "--json"]);
    let r = record(&out);
    assert_eq!(r["inputs"]["ensemble"], "sinh");
    assert_eq!(r["inputs"]["sweeps"], 250);
    let out = elstat(&["sample", "--config", cfg.to_str().unwrap(), "--n", "5", "--json"]);
    assert_eq!(record(&out)["inputs"]["n"], 5);

    std::fs::write(&cfg, "[sampler]\nsweps = 3\n").unwrap();
    let out = elstat(&["sample", "--config", cfg.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(2));
}
