//! Byte-identical reruns and the CLI surface.

use std::fs;
use std::path::Path;
use std::process::Command;

const TINY_SCENARIO: &str = r#"
id = "tiny2d"
kind = "front_run"
seed = 0

[grid]
geometry = "plane"
extent = [[-10.0, 30.0], [-8.0, 8.0]]
dx = 0.5
boundary = "neumann"

[field]
dim = 2
profile = { kind = "ignition", theta0 = 0.25, amp = 4.0 }

[initial]
kind = "front_like"
axis = 0
r1 = 3.0
r2 = 5.0
eps1 = 0.5
eps2 = 1.0

[run]
t_end = 10.0
snapshot_every = 0.5

[diagnostics]
eps_list = [0.25, 0.75]
eps0 = 0.1
h = 0.0
lambda_stride = 4
probe = [0.0, 0.0]
front_mode = "axis"
front_eps = 0.25
pair_eps = 0.9
zeta = 0.1

[output]
snapshots_csv = true
heatmaps = true

[front_run]
speed_expect = 0.77
speed_rtol = 0.5
fit_window = 0.5
"#;

fn collect_files(dir: &Path, out: &mut Vec<std::path::PathBuf>) {
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            collect_files(&p, out);
        } else {
            out.push(p);
        }
    }
}

#[test]
fn scenario_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("tiny2d.toml");
    fs::write(&cfg_path, TINY_SCENARIO).unwrap();
    let (cfg, base) = frontlab::scenario::load_config(cfg_path.to_str().unwrap()).unwrap();

    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    frontlab::scenario::run_scenario(&cfg, &base, &out_a).unwrap();
    frontlab::scenario::run_scenario(&cfg, &base, &out_b).unwrap();

    let mut files_a = Vec::new();
    collect_files(&out_a, &mut files_a);
    files_a.sort();
    assert!(files_a.len() >= 3, "expected report, trace, snapshots");
    for fa in files_a {
        let rel = fa.strip_prefix(&out_a).unwrap();
        let fb = out_b.join(rel);
        let a = fs::read(&fa).unwrap();
        let b = fs::read(&fb).unwrap();
        assert_eq!(a, b, "{rel:?} differs between identical reruns");
    }
}

#[test]
fn trace_schema_is_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("tiny2d.toml");
    fs::write(&cfg_path, TINY_SCENARIO).unwrap();
    let (cfg, base) = frontlab::scenario::load_config(cfg_path.to_str().unwrap()).unwrap();
    let out = tmp.path().join("out");
    frontlab::scenario::run_scenario(&cfg, &base, &out).unwrap();

    let trace = fs::read_to_string(out.join("tiny2d/trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,eps,L_low,L_high,J,L_pair,front_pos,Z_origin,Y_origin,Lambda"
    );
    // LF endings, rows for both eps per snapshot, sentinels spelled out
    assert!(!trace.contains('\r'));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 21 * 2);
    assert!(rows.iter().any(|r| r.contains("inf") || r.contains("nan")));
    for r in rows {
        assert_eq!(r.split(',').count(), 10);
    }
    // snapshot files in both formats
    assert!(out.join("tiny2d/snapshots/snap_0000.csv").exists());
    let pgm = fs::read(out.join("tiny2d/snapshots/snap_0000.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n81 33\n255\n"));
    assert_eq!(pgm.len(), "P5\n81 33\n255\n".len() + 81 * 33);
}

#[test]
fn cli_list_and_frontspeed() {
    let bin = env!("CARGO_BIN_EXE_frontlab");
    let list = Command::new(bin).arg("list").output().unwrap();
    assert!(list.status.success());
    let text = String::from_utf8(list.stdout).unwrap();
    for id in [
        "kpp_speed",
        "terrace",
        "ignition_bounded_width",
        "sandwich",
        "pockets2d",
        "annuli",
        "slab",
        "equilibria_relax",
        "barrier_suite",
    ] {
        assert!(text.contains(id), "list output missing {id}");
    }

    let out = Command::new(bin)
        .args(["frontspeed", "--profile", "bistable,theta0=0.25,amp=1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "c,residual,iterations");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let c: f64 = row[0].parse().unwrap();
    assert!((c - 0.25 / 2f64.sqrt() * 2.0).abs() < 1e-4, "c = {c}");

    // a bistable profile with nonpositive integral is reported, not crashed
    let bad = Command::new(bin)
        .args(["frontspeed", "--profile", "bistable,theta0=0.7,amp=1"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

#[test]
fn cli_run_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_frontlab");
    let tmp = tempfile::tempdir().unwrap();
    // failing check -> nonzero exit
    let cfg_path = tmp.path().join("bad.toml");
    fs::write(
        &cfg_path,
        TINY_SCENARIO.replace("speed_rtol = 0.5", "speed_rtol = 1e-9"),
    )
    .unwrap();
    let out = Command::new(bin)
        .args([
            "run",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            tmp.path().join("o1").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());

    // passing run -> zero exit
    let cfg_path2 = tmp.path().join("ok.toml");
    fs::write(&cfg_path2, TINY_SCENARIO).unwrap();
    let out = Command::new(bin)
        .args([
            "run",
            "--config",
            cfg_path2.to_str().unwrap(),
            "--out",
            tmp.path().join("o2").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
