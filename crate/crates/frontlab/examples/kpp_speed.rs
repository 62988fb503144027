//! Measures the pulled-front spreading speed of f(u) = u(1-u) against the linearization value 2.
//!
//! Writes trace/report CSV files under `out/kpp_speed/`.

fn main() {
    let (cfg, base) = frontlab::scenario::load_config("kpp_speed").unwrap();
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
    println!("done in {:.1}s -> out/kpp_speed/", report.wall_seconds);
    std::process::exit(if report.all_passed() { 0 } else { 1 });
}
