//! Thin CLI over the scenario registry and the front-speed solver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use frontlab::reaction::ReactionProfile;
use frontlab::scenario;
use frontlab::speed;

#[derive(Parser)]
#[command(name = "frontlab", about = "reaction-diffusion front propagation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenarios from config files (or built-in ids).
    Run {
        /// Path to a scenario TOML (repeatable); built-in ids also work.
        #[arg(long = "config", required = true)]
        configs: Vec<String>,
        /// Output directory (per-scenario subdirectories are created).
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Run independent scenarios concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Shoot the traveling-front speed of a homogeneous profile.
    Frontspeed {
        /// Profile spec, e.g. `bistable,theta0=0.25,amp=1`,
        /// `ignition,theta0=0.333,amp=2`, `kpp,amp=1`,
        /// or `tabulated,path=profile.csv`.
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// List the built-in scenarios.
    List,
}

fn parse_profile(spec: &str) -> Result<ReactionProfile, String> {
    let mut parts = spec.split(',');
    let kind = parts.next().unwrap_or("").trim();
    let mut theta0 = None;
    let mut amp = None;
    let mut amp_low = None;
    let mut amp_high = None;
    let mut c_scale = None;
    let mut path = None;
    for kv in parts {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got {kv:?}"))?;
        let k = k.trim();
        if k == "path" {
            path = Some(v.trim().to_string());
            continue;
        }
        let num: f64 = v.trim().parse().map_err(|_| format!("bad number in {kv:?}"))?;
        match k {
            "theta0" => theta0 = Some(num),
            "amp" => amp = Some(num),
            "amp_low" => amp_low = Some(num),
            "amp_high" => amp_high = Some(num),
            "c_scale" => c_scale = Some(num),
            other => return Err(format!("unknown key {other:?}")),
        }
    }
    let need = |v: Option<f64>, n: &str| v.ok_or_else(|| format!("{kind} needs {n}"));
    let built = match kind {
        "kpp" => ReactionProfile::kpp(need(amp, "amp")?),
        "ignition" => ReactionProfile::ignition(need(theta0, "theta0")?, need(amp, "amp")?),
        "ignition_kpp_cut" => {
            ReactionProfile::ignition_kpp_cut(need(theta0, "theta0")?, need(amp, "amp")?)
        }
        "ignition_bump" => ReactionProfile::ignition_bump(need(theta0, "theta0")?, need(amp, "amp")?),
        "bistable" => ReactionProfile::bistable(need(theta0, "theta0")?, need(amp, "amp")?),
        "two_step" => ReactionProfile::two_step(need(amp_low, "amp_low")?, need(amp_high, "amp_high")?),
        "terrace" => ReactionProfile::terrace(need(c_scale, "c_scale")?),
        "tabulated" => {
            let p = path.ok_or("tabulated needs path=<csv>")?;
            let text = std::fs::read_to_string(&p).map_err(|e| format!("{p}: {e}"))?;
            ReactionProfile::from_csv(&text)
        }
        other => return Err(format!("unknown profile kind {other:?}")),
    };
    built.map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for b in scenario::BUILTINS {
                println!("{:<24} {}", b.id, b.summary);
            }
            ExitCode::SUCCESS
        }
        Command::Frontspeed { profile, tol } => {
            let profile = match parse_profile(&profile) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("frontspeed: {e}");
                    return ExitCode::FAILURE;
                }
            };
            match speed::shoot_front_speed(&profile, tol) {
                Ok(r) => {
                    println!("c,residual,iterations");
                    println!("{:.8e},{:.8e},{}", r.speed, r.residual, r.iterations);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("frontspeed: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Run { configs, out, jobs } => {
            let loaded: Vec<_> = match configs
                .iter()
                .map(|c| scenario::load_config(c))
                .collect::<Result<Vec<_>, _>>()
            {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("run: {e}");
                    return ExitCode::FAILURE;
                }
            };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .expect("thread pool");
            let results: Vec<_> = if jobs > 1 {
                pool.install(|| {
                    use rayon::prelude::*;
                    loaded
                        .par_iter()
                        .map(|(cfg, base)| scenario::run_scenario(cfg, base, &out))
                        .collect()
                })
            } else {
                loaded
                    .iter()
                    .map(|(cfg, base)| scenario::run_scenario(cfg, base, &out))
                    .collect()
            };
            let mut all_ok = true;
            for res in results {
                match res {
                    Ok(report) => {
                        for c in &report.checks {
                            println!(
                                "{:<24} {:<32} {}  value {:.6e}  threshold {:.6e}",
                                report.scenario,
                                c.name,
                                if c.pass { "PASS" } else { "FAIL" },
                                c.value,
                                c.threshold
                            );
                            all_ok &= c.pass;
                        }
                        for w in &report.warnings {
                            eprintln!("{}: warning: {w}", report.scenario);
                        }
                        println!(
                            "{:<24} done in {:.1}s -> {}",
                            report.scenario,
                            report.wall_seconds,
                            out.join(&report.scenario).display()
                        );
                    }
                    Err(e) => {
                        eprintln!("run: {e}");
                        all_ok = false;
                    }
                }
            }
            if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
