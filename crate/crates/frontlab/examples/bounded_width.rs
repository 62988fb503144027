//! Bump-seeded monotone ignition runs in 1D and 2D: time monotonicity, bounded widths, bounded Lambda, and the two-sided mean-speed inclusions.
//!
//! Writes trace/report CSV files under `out/ignition_bounded_width/`.

fn main() {
    let (cfg, base) = frontlab::scenario::load_config("ignition_bounded_width").unwrap();
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
    println!("done in {:.1}s -> out/ignition_bounded_width/", report.wall_seconds);
    std::process::exit(if report.all_passed() { 0 } else { 1 });
}
