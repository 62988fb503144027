//! Unburned pockets enclosed behind the leading edge of a 2D sweep past a slow disk.
//!
//! Writes trace/report CSV files under `out/pockets2d/`.

fn main() {
    let (cfg, base) = frontlab::scenario::load_config("pockets2d").unwrap();
    let report = frontlab::scenario::run_scenario(&cfg, &base, std::path::Path::new("out")).unwrap();
    for c in &report.checks {
        println!(
            "{:<32} {}  value {:.6e}  threshold {:.6e}",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.value,
            c.threshold
        );
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    println!("done in {:.1}s -> out/pockets2d/", report.wall_seconds);
    std::process::exit(if report.all_passed() { 0 } else { 1 });
}
