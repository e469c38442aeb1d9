use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use terrain_guard::parse_terrain;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_terrain-guard"))
        .args(args)
        .current_dir(crate_dir())
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

const TW: &str = "tests/data/tw.json";

#[test]
fn golden_reports_on_w_terrain() {
    let cases: [(&str, &[&str]); 4] = [
        ("atc_k1", &["atc", "--terrain", TW, "--k", "1"]),
        ("atc_k2", &["atc", "--terrain", TW, "--k", "2"]),
        ("batc_count_h1", &["batc-count", "--terrain", TW, "--height", "1"]),
        ("batc_altitude_k2", &["batc-altitude", "--terrain", TW, "--k", "2"]),
    ];
    for (name, args) in cases {
        let golden: Value = serde_json::from_str(
            &std::fs::read_to_string(crate_dir().join(format!("tests/golden/{name}.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(without_timing(report(args)), golden, "{name}");
    }
}

#[test]
fn atc_values_on_w_terrain() {
    assert_eq!(report(&["atc", "--terrain", TW, "--k", "1"])["solution"]["h_star"], "2");
    assert_eq!(report(&["atc", "--terrain", TW, "--k", "2"])["solution"]["h_star"], "1");
    let bisect = report(&["atc", "--terrain", TW, "--k", "2", "--mode", "bisect", "--eps", "1e-9"]);
    let h: f64 = bisect["solution"]["h_star"].as_str().unwrap().parse().unwrap();
    assert!((h - 1.0).abs() <= 1e-9);
    assert_eq!(bisect["mode"], "float");
}

#[test]
fn batc_values_and_exit_codes() {
    assert_eq!(
        report(&["batc-count", "--terrain", TW, "--height", "1"])["solution"]["count"],
        2
    );
    assert_eq!(
        report(&["batc-altitude", "--terrain", TW, "--k", "2"])["solution"]["h_star"],
        "1"
    );
    let below = run(&["batc-count", "--terrain", TW, "--height", "0.5"]);
    assert_eq!(below.status.code(), Some(2));
    assert_eq!(
        run(&["atc", "--terrain", "tests/data/missing.json", "--k", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["atc", "--terrain", TW, "--k", "0"]).status.code(), Some(2));
}

#[test]
fn every_solve_report_is_verified() {
    for args in [
        &["atc", "--terrain", TW, "--k", "3"][..],
        &["batc-altitude", "--terrain", TW, "--k", "1"],
        &["batc-count", "--terrain", TW, "--height", "3/2"],
    ] {
        let r = report(args);
        assert_eq!(r["verification"]["passed"], true, "{args:?}");
    }
}

/// Checks the `required` lists of the documented schema against a report.
fn assert_schema_fields(r: &Value) {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(crate_dir().join("report.schema.json")).unwrap()).unwrap();
    let required = |node: &Value| -> Vec<String> {
        node["required"]
            .as_array()
            .unwrap()
            .iter()
            .map(|k| k.as_str().unwrap().to_string())
            .collect()
    };
    for key in required(&schema) {
        assert!(r.get(&key).is_some(), "report lacks {key}");
    }
    for sub in ["command", "instance"] {
        for key in required(&schema["properties"][sub]) {
            assert!(r[sub].get(&key).is_some(), "{sub} lacks {key}");
        }
    }
    let kind = if r["solution"].get("pairs").is_some() {
        "batc"
    } else {
        "atc"
    };
    for key in required(&schema["$defs"][kind]) {
        assert!(r["solution"].get(&key).is_some(), "solution lacks {key}");
    }
}

#[test]
fn reports_follow_the_schema() {
    assert_schema_fields(&report(&["atc", "--terrain", TW, "--k", "2"]));
    assert_schema_fields(&report(&["batc-altitude", "--terrain", TW, "--k", "2"]));
    let r = report(&["batc-count", "--terrain", TW, "--height", "1"]);
    assert_schema_fields(&r);
    assert_eq!(r["instance"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn several_terrains_give_an_array() {
    let r = report(&["batc-altitude", "--terrain", TW, TW, TW, "--k", "2", "--jobs", "2"]);
    let items = r.as_array().unwrap();
    assert_eq!(items.len(), 3);
    assert!(items.iter().all(|i| i["solution"]["h_star"] == "1"));
}

#[test]
fn oracles_mirror_the_solvers() {
    assert_eq!(
        report(&["oracle", "min-guards", "--terrain", TW, "--height", "1"])["solution"]["count"],
        2
    );
    assert_eq!(
        report(&["oracle", "batc", "--terrain", TW, "--k", "2"])["solution"]["h_star"],
        "1"
    );
    let cover = |g: &str| report(&["oracle", "cover", "--terrain", TW, "--height", "1", "--guards", g]);
    assert_eq!(cover("1,3")["solution"]["covered"], true);
    assert_eq!(cover("1")["solution"]["covered"], false);
    let h: f64 = report(&["oracle", "atc", "--terrain", TW, "--k", "1"])["solution"]["h_star"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert!((h - 2.0).abs() < 1e-6);
}

#[test]
fn gen_is_deterministic_and_valid() {
    let a = run(&["gen", "--n", "5", "--seed", "7", "--profile", "peaks"]);
    let b = run(&["gen", "--n", "5", "--seed", "7", "--profile", "peaks"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let t = parse_terrain(std::str::from_utf8(&a.stdout).unwrap()).unwrap();
    assert_eq!(t.n(), 5);
    assert!(t.vertices().windows(2).all(|w| w[0].x < w[1].x));
    assert_eq!(run(&["gen", "--n", "1", "--seed", "7"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--n", "5", "--profile", "hills"]).status.code(), Some(2));
}

fn plot(dir: &Path, extra: &[&str]) -> (Output, String) {
    let out_path = dir.join("out.svg");
    let mut args = vec!["plot", "--terrain", TW, "-o", out_path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    let svg = std::fs::read_to_string(&out_path).unwrap_or_default();
    (out, svg)
}

#[test]
fn plots_terrain_solution_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let (out, svg) = plot(dir.path(), &[]);
    assert!(out.status.success());
    assert!(svg.starts_with("<?xml") && svg.contains("version=\"1.1\""));
    assert_eq!(svg.matches("<polyline").count(), 1);

    let sol = dir.path().join("sol.json");
    std::fs::write(&sol, run(&["atc", "--terrain", TW, "--k", "2"]).stdout).unwrap();
    let (out, svg) = plot(dir.path(), &["--solution", sol.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(svg.matches("<circle").count(), 2);
    assert_eq!(svg.matches("stroke-dasharray").count(), 1);

    let curves = dir.path().join("curves.json");
    let c = run(&["curves", "--terrain", TW, "-o", curves.to_str().unwrap()]);
    assert!(c.status.success());
    let (out, svg) = plot(dir.path(), &["--curves", curves.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(svg.matches("<polyline").count() >= 3, "terrain plus f and g");
    assert!(svg.contains(">f</text>") && svg.contains(">g</text>"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"solution\": {\"h_star\": true}}").unwrap();
    let (out, _) = plot(dir.path(), &["--solution", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn batc_plot_colors_each_subchain() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    std::fs::write(&sol, run(&["batc-altitude", "--terrain", TW, "--k", "2"]).stdout).unwrap();
    let (out, svg) = plot(dir.path(), &["--solution", sol.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(svg.matches("<polyline").count(), 3);
    assert_eq!(svg.matches("<circle").count(), 2);
}
