//! The built-in scenario orchestrations. Each maps an explicit config onto
//! the solver/diagnostics/barriers modules and emits its checks.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use super::*;
use crate::barriers::{self, CertLattice, ExpTailParams, StoredRun};
use crate::diagnostics::{self, TraceValue};
use crate::reaction;
use crate::speed;

fn median(xs: &mut Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if xs.is_empty() {
        f64::NAN
    } else {
        xs[xs.len() / 2]
    }
}

fn finite(v: &TraceValue) -> Option<f64> {
    match v {
        TraceValue::Val(x) => Some(*x),
        _ => None,
    }
}

/// Rightmost level crossing on the axis row (j = 0), sub-grid interpolated.
fn axis_crossing(state: &GridState, level: f64) -> Option<f64> {
    let spec = &state.spec;
    for i in (0..spec.n0()).rev() {
        let v = state.u[spec.idx(i, 0)];
        if v >= level {
            let x = spec.coord(i, 0)[0];
            if i + 1 < spec.n0() {
                let v2 = state.u[spec.idx(i + 1, 0)];
                if v2 < level && v > v2 {
                    return Some(x + spec.dx * (v - level) / (v - v2));
                }
            }
            return Some(x);
        }
    }
    None
}

fn warn_outcome(report: &mut RunReport, label: &str, outcome: &solver::RunOutcome) {
    if outcome.quench_warning {
        report.warnings.push(format!("{label}: sup u decayed below theta0 (quenching)"));
    }
    if outcome.boundary_warning {
        report
            .warnings
            .push(format!("{label}: front activity within 10 dx of the boundary"));
    }
}

// ---------------------------------------------------------------------------

pub(super) fn front_run(cfg: &ScenarioConfig, base: &Path, dir: &Path) -> Result<RunReport> {
    let params = required(&cfg.front_run, "front_run")?;
    let grid = required(&cfg.grid, "grid")?.build()?;
    let field = required(&cfg.field, "field")?.build(base)?;
    let diag = required(&cfg.diagnostics, "diagnostics")?;
    let run_cfg = required(&cfg.run, "run")?;
    let mut state = required(&cfg.initial, "initial")?.build(&grid, &field)?;

    let mut obs = TraceObserver::new(diag, None)?;
    let mut idx = 0usize;
    let mut report = RunReport::default();
    let out = cfg.output.clone();
    let outcome = solver::run(&mut state, &field, run_cfg.t_end, run_cfg.snapshot_every, &mut |s| {
        obs.observe(s);
        let _ = dump_snapshot(dir, &out, idx, s);
        idx += 1;
    })?;
    warn_outcome(&mut report, "run", &outcome);

    let trace_path = dir.join("trace.csv");
    write_trace(&trace_path, &obs.rows)?;
    report.trace_paths.push(trace_path);

    let fronts: Vec<(f64, Option<f64>)> = obs
        .column(diag.front_eps, |r| r.front_pos)
        .into_iter()
        .map(|(t, v)| (t, finite(&v)))
        .collect();
    let fit = diagnostics::spreading_speed_fit(&fronts, params.fit_window)?;
    let pass = (fit - params.speed_expect).abs() <= params.speed_rtol * params.speed_expect;
    report.checks.push(CheckResult::new(
        "speed_fit",
        "A2",
        pass,
        fit,
        params.speed_expect,
        format!("rtol {}", params.speed_rtol),
    ));
    Ok(report)
}

// ---------------------------------------------------------------------------

pub(super) fn terrace(cfg: &ScenarioConfig, base: &Path, dir: &Path) -> Result<RunReport> {
    let params = required(&cfg.terrace, "terrace")?;
    let grid = required(&cfg.grid, "grid")?.build()?;
    let field = required(&cfg.field, "field")?.build(base)?;
    let diag = required(&cfg.diagnostics, "diagnostics")?;
    let run_cfg = required(&cfg.run, "run")?;
    let mut state = required(&cfg.initial, "initial")?.build(&grid, &field)?;

    // the envelope zeta comes from the declared (upper-bump) lower bound
    let c0 = speed::shoot_front_speed(&field.bounds.as_ref().unwrap().0, 1e-6)?.speed;
    let env = envelope_for(&grid, diag, c0)?;
    let mut obs = TraceObserver::new(diag, Some(env))?;
    let mut plateau_len = Vec::new();
    let mut mid_dev = Vec::new();
    let mut report = RunReport::default();
    let band = params.plateau_band;
    let outcome = solver::run(&mut state, &field, run_cfg.t_end, run_cfg.snapshot_every, &mut |s| {
        obs.observe(s);
        // longest contiguous run of |u - 1/2| <= band
        let mut best = 0usize;
        let mut cur = 0usize;
        for &v in &s.u {
            if (v - 0.5).abs() <= band {
                cur += 1;
                best = best.max(cur);
            } else {
                cur = 0;
            }
        }
        plateau_len.push((s.t, best as f64 * s.spec.dx));
        // deviation at the midpoint between the two interfaces
        let lo = axis_crossing(s, 0.25);
        let hi = axis_crossing(s, 0.75);
        if let (Some(lo), Some(hi)) = (lo, hi) {
            let mid = 0.5 * (lo + hi);
            let i = ((mid - s.spec.extent[0][0]) / s.spec.dx).round() as usize;
            mid_dev.push((s.t, (s.u[i.min(s.spec.n0() - 1)] - 0.5).abs()));
        }
    })?;
    warn_outcome(&mut report, "run", &outcome);

    let trace_path = dir.join("trace.csv");
    write_trace(&trace_path, &obs.rows)?;
    report.trace_paths.push(trace_path);

    let window = params.fit_window;
    let lower: Vec<(f64, Option<f64>)> = obs
        .column(params.lower_eps, |r| r.front_pos)
        .into_iter()
        .map(|(t, v)| (t, finite(&v)))
        .collect();
    let upper: Vec<(f64, Option<f64>)> = obs
        .column(params.upper_eps, |r| r.front_pos)
        .into_iter()
        .map(|(t, v)| (t, finite(&v)))
        .collect();
    let c_lower = diagnostics::spreading_speed_fit(&lower, window)?;
    let c_upper = diagnostics::spreading_speed_fit(&upper, window)?;
    let ratio = c_lower / c_upper;
    let sqrt2 = 2f64.sqrt();
    report.checks.push(CheckResult::new(
        "terrace_speed_ratio",
        "A3",
        (ratio - sqrt2).abs() <= params.ratio_rtol * sqrt2,
        ratio,
        sqrt2,
        format!("c_lower {c_lower:.4}; c_upper {c_upper:.4}"),
    ));

    // plateau value stays near 1/2 over the late window
    let late = &mid_dev[mid_dev.len() / 2..];
    let worst_mid = late.iter().map(|&(_, d)| d).fold(0.0f64, f64::max);
    report.checks.push(CheckResult::new(
        "terrace_plateau_mid",
        "A3",
        worst_mid <= band,
        worst_mid,
        band,
        "max |u - 1/2| at the inter-front midpoint (late half)",
    ));

    // plateau length growth rate vs (sqrt(2) - 1) c_upper
    let growth_samples: Vec<(f64, f64)> = plateau_len[plateau_len.len() / 2..].to_vec();
    let slope = diagnostics::fit_speed(&growth_samples);
    let expect = (sqrt2 - 1.0) * c_upper;
    report.checks.push(CheckResult::new(
        "terrace_plateau_growth",
        "A3",
        (slope - expect).abs() <= params.slope_rtol * expect,
        slope,
        expect,
        format!("rtol {}", params.slope_rtol),
    ));
    Ok(report)
}

// ---------------------------------------------------------------------------

struct BoundedWidthOutcome {
    rows: Vec<TraceRow>,
    min_ut: f64,
    snaps: Vec<GridState>,
}

fn bounded_width_once(
    grid: &GridSpec,
    field: &ReactionField,
    init: &InitialConfig,
    run_cfg: &RunConfig,
    diag: &DiagnosticsConfig,
    lambda_stride: usize,
    c0: f64,
) -> Result<BoundedWidthOutcome> {
    let mut diag = diag.clone();
    diag.lambda_stride = lambda_stride;
    let env = envelope_for(grid, &diag, c0)?;
    let mut obs = TraceObserver::new(&diag, Some(env))?;
    let mut state = init.build(grid, field)?;
    let mut snaps: Vec<GridState> = Vec::new();
    let mut min_ut = f64::INFINITY;
    solver::run(&mut state, field, run_cfg.t_end, run_cfg.snapshot_every, &mut |s| {
        obs.observe(s);
        if let Some(prev) = snaps.last() {
            let dt = s.t - prev.t;
            for (a, b) in s.u.iter().zip(&prev.u) {
                min_ut = min_ut.min((a - b) / dt);
            }
        }
        snaps.push(s.clone());
    })?;
    Ok(BoundedWidthOutcome {
        rows: obs.rows,
        min_ut,
        snaps,
    })
}

fn bounded_width_checks(
    report: &mut RunReport,
    label: &str,
    out: &BoundedWidthOutcome,
    params: &BoundedWidthParams,
    diag: &DiagnosticsConfig,
    c0: f64,
    c1: f64,
    mean_speed_tau: f64,
) -> Result<()> {
    let dx = out.snaps[0].spec.dx;
    report.checks.push(CheckResult::new(
        &format!("{label}_monotone"),
        "A4",
        out.min_ut >= -params.monotone_tol,
        out.min_ut,
        -params.monotone_tol,
        "min discrete u_t over the run",
    ));

    // width boundedness per eps: max over the late window <= factor * median
    // (plus half a node of measurement slack: widths are grid-quantized)
    for &eps in &diag.eps_list {
        if eps >= 0.5 {
            continue;
        }
        let vals: Vec<f64> = out
            .rows
            .iter()
            .filter(|r| (r.eps - eps).abs() < 1e-12)
            .filter_map(|r| finite(&r.l_low))
            .collect();
        let start = ((vals.len() as f64) * (1.0 - params.window_frac)).floor() as usize;
        let window = &vals[start.min(vals.len())..];
        let mut w = window.to_vec();
        let med = median(&mut w);
        let max = window.iter().copied().fold(0.0f64, f64::max);
        report.checks.push(CheckResult::new(
            &format!("{label}_width_bounded_eps{eps}"),
            "A4",
            max <= params.bound_factor * med + 0.5 * dx,
            max,
            params.bound_factor * med + 0.5 * dx,
            format!("median {med:.4}; window {} snapshots", window.len()),
        ));
    }

    // Lambda boundedness over the same window
    let lam: Vec<f64> = out
        .rows
        .iter()
        .filter(|r| (r.eps - diag.eps_list[0]).abs() < 1e-12)
        .filter_map(|r| finite(&r.lambda))
        .collect();
    let start = ((lam.len() as f64) * (1.0 - params.window_frac)).floor() as usize;
    let window = &lam[start.min(lam.len())..];
    let mut w = window.to_vec();
    let med = median(&mut w);
    let max = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Lambda can be negative; bound the late max against median + spread
    let spread = (params.bound_factor - 1.0) * med.abs().max(1.0);
    report.checks.push(CheckResult::new(
        &format!("{label}_lambda_bounded"),
        "A4",
        max <= med + spread,
        max,
        med + spread,
        format!("median {med:.4}"),
    ));

    // global mean speed in [c0·lo_factor, c1·hi_factor]
    let spacing = out.snaps[1].t - out.snaps[0].t;
    let tau = (mean_speed_tau / spacing).round().max(1.0) * spacing;
    let rep = diagnostics::global_mean_speed_check(
        &out.snaps,
        params.mean_speed_eps,
        c0 * params.speed_lo_factor,
        c1 * params.speed_hi_factor,
        params.delta_factor * c0,
        tau,
    )?;
    report.checks.push(CheckResult::new(
        &format!("{label}_mean_speed"),
        "A4",
        rep.all_passed(),
        rep.passed as f64,
        rep.pairs as f64,
        format!(
            "pairs {}; first_failures {}; second_failures {}; worst_margin {:.3e}",
            rep.pairs, rep.first_failures, rep.second_failures, rep.worst_margin_lo
        ),
    ));
    Ok(())
}

pub(super) fn ignition_bounded_width(cfg: &ScenarioConfig, base: &Path, dir: &Path) -> Result<RunReport> {
    let params = required(&cfg.bounded_width, "bounded_width")?;
    let field = required(&cfg.field, "field")?.build(base)?;
    let diag = required(&cfg.diagnostics, "diagnostics")?;
    let (c0, c1) = {
        let b = speed::speed_bounds(&field)?;
        (b.c0, b.c1)
    };
    let mut report = RunReport::default();

    // 1D sub-run
    let grid1 = required(&cfg.grid, "grid")?.build()?;
    let out1 = bounded_width_once(
        &grid1,
        &field,
        required(&cfg.initial, "initial")?,
        required(&cfg.run, "run")?,
        diag,
        diag.lambda_stride,
        c0,
    )?;
    let sub1 = dir.join("1d");
    fs::create_dir_all(&sub1)?;
    let p1 = sub1.join("trace.csv");
    write_trace(&p1, &out1.rows)?;
    report.trace_paths.push(p1);
    bounded_width_checks(&mut report, "1d", &out1, params, diag, c0, c1, params.mean_speed_tau)?;

    // 2D sub-run
    let grid2 = params.grid2d.build()?;
    let mut diag2 = diag.clone();
    diag2.front_mode = "radial".into();
    if let Some(x0) = params.initial2d.x0 {
        diag2.probe = x0;
    }
    let out2 = bounded_width_once(
        &grid2,
        &field,
        &params.initial2d,
        &params.run2d,
        &diag2,
        params.lambda_stride2d,
        c0,
    )?;
    let sub2 = dir.join("2d");
    fs::create_dir_all(&sub2)?;
    let p2 = sub2.join("trace.csv");
    write_trace(&p2, &out2.rows)?;
    report.trace_paths.push(p2);
    bounded_width_checks(&mut report, "2d", &out2, params, &diag2, c0, c1, params.mean_speed_tau2d)?;

    if cfg.output.heatmaps {
        if let Some(last) = out2.snaps.last() {
            let snaps = dir.join("snapshots");
            fs::create_dir_all(&snaps)?;
            last.write_pgm(&snaps.join("final_2d.pgm"))?;
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------

pub(super) fn sandwich(cfg: &ScenarioConfig, base: &Path, dir: &Path) -> Result<RunReport> {
    let params = required(&cfg.sandwich, "sandwich")?;
    let grid = required(&cfg.grid, "grid")?.build()?;
    let field = required(&cfg.field, "field")?.build(base)?;
    let diag = required(&cfg.diagnostics, "diagnostics")?;
    let run_cfg = required(&cfg.run, "run")?;

    // reference: bump-seeded monotone solution of the same field, stored
    // past the run horizon so that forward time shifts stay in range
    let w0 = solver::bump_w(
        &grid,
        BumpShape::FrontAlongAxis(0),
        params.bump_r2,
        &field.base,
        params.bump_margin,
    )?;
    let reference = StoredRun::record(
        w0,
        &field,
        run_cfg.t_end + params.max_shift,
        run_cfg.snapshot_every,
    )?;

    let mut state = required(&cfg.initial, "initial")?.build(&grid, &field)?;
    let c0 = speed::shoot_front_speed(&field.bounds.as_ref().unwrap().0, 1e-6)?.speed;
    let env = envelope_for(&grid, diag, c0)?;
    let mut obs = TraceObserver::new(diag, Some(env))?;
    let mut snaps = Vec::new();
    let mut report = RunReport::default();
    let outcome = solver::run(&mut state, &field, run_cfg.t_end, run_cfg.snapshot_every, &mut |s| {
        obs.observe(s);
        snaps.push(s.clone());
    })?;
    warn_outcome(&mut report, "run", &outcome);
    let trace_path = dir.join("trace.csv");
    write_trace(&trace_path, &obs.rows)?;
    report.trace_paths.push(trace_path);

    // trapping: find the smallest snapshot shift k with
    // w(t - k·Δ) - eps/2 <= u(t) <= w(t + k·Δ) + eps/2 on the settled window
    let dt = run_cfg.snapshot_every;
    let start = ((snaps.len() as f64) * params.settle_frac) as usize;
    let k_max = (params.max_shift / dt).floor() as usize;
    let mut found: Option<usize> = None;
    'outer: for k in 0..=k_max {
        for (i, s) in snaps.iter().enumerate().skip(start) {
            if i < k || i + k >= reference.snaps.len() {
                continue;
            }
            let wlo = &reference.snaps[i - k];
            let whi = &reference.snaps[i + k];
            for ((uv, lo), hi) in s.u.iter().zip(&wlo.u).zip(&whi.u) {
                if *uv < lo - params.trap_eps / 2.0 || *uv > hi + params.trap_eps / 2.0 {
                    continue 'outer;
                }
            }
        }
        found = Some(k);
        break;
    }
    report.checks.push(CheckResult::new(
        "sandwich_trapped",
        "-",
        found.is_some(),
        found.map(|k| k as f64 * dt).unwrap_or(f64::NAN),
        params.max_shift,
        "minimal time shift trapping u between reference translates",
    ));
    Ok(report)
}

// ---------------------------------------------------------------------------

pub(super) fn pockets2d(cfg: &ScenarioConfig, base: &Path, dir: &Path) -> Result<RunReport> {
    let params = required(&cfg.pockets, "pockets")?;
    let grid = required(&cfg.grid, "grid")?.build()?;
    let field = required(&cfg.field, "field")?.build(base)?;
    let diag = required(&cfg.diagnostics, "diagnostics")?;
    let run_cfg = required(&cfg.run, "run")?;
    let mut state = required(&cfg.initial, "initial")?.build(&grid, &field)?;

    let mut obs = TraceObserver::new(diag, None)?;
    let mut pocket_max = 0usize;
    let mut pocket_final = 0usize;
    let mut idx = 0usize;
    let out = cfg.output.clone();
    let mut report = RunReport::default();
    let outcome = solver::run(&mut state, &field, run_cfg.t_end, run_cfg.snapshot_every, &mut |s| {
        obs.observe(s);
        let n = diagnostics::pocket_count(s, params.pocket_eps);
        pocket_max = pocket_max.max(n);
        pocket_final = n;
        let _ = dump_snapshot(dir, &out, idx, s);
        idx += 1;
    })?;
    warn_outcome(&mut report, "run", &outcome);
    let trace_path = dir.join("trace.csv");
    write_trace(&trace_path, &obs.rows)?;
    report.trace_paths.push(trace_path);

    report.checks.push(CheckResult::new(
        "pockets_transient",
        "-",
        pocket_max >= 1,
        pocket_max as f64,
        1.0,
        "max enclosed unburned pockets over the run",
    ));
    report.checks.push(CheckResult::new(
        "pockets_burn_out",
        "-",
        pocket_final == 0,
        pocket_final as f64,
        0.0,
        "pockets remaining at the final time",
    ));
    Ok(report)
}

// ---------------------------------------------------------------------------

pub(super) fn annuli(cfg: &ScenarioConfig, _base: &Path, dir: &Path) -> Result<RunReport> {
    let params = required(&cfg.annuli, "annuli")?;
    let field = reaction::build_annuli_field(params.beta, params.n_max)?;
    let grid = required(&cfg.grid, "grid")?.build()?;
    let diag = required(&cfg.diagnostics, "diagnostics")?;
    let run_cfg = required(&cfg.run, "run")?;
    let mut report = RunReport::default();

    // bulk speed: shooting on f0; strip speed: front run along a fast strip
    let c_bulk = speed::shoot_front_speed(&field.base, 1e-6)?.speed;
    let strip_speed = {
        let spec = GridSpec::new(
            Geometry::Plane,
            vec![[0.0, params.strip_length], [-params.strip_width, params.strip_width]],
            params.strip_dx,
            Boundary::DirichletZero,
        )?;
        let mut strip_field = ReactionField::homogeneous(field.base.clone(), 2);
        strip_field.modulation = Modulation::Strip {
            beta: params.beta,
            half_width: 3.0,
            collar: 1.0,
        };
        let theta0 = field.base.theta0().unwrap();
        let mut st = GridState::from_fn(Arc::new(spec), move |p| {
            if p[0] < 6.0 && p[1].abs() <= 3.0 {
                0.9
            } else {
                0.0
            }
        });
        let level = 0.5 * (1.0 + theta0) * 0.8;
        let mut fronts = Vec::new();
        solver::run(&mut st, &strip_field, params.strip_t_end, 0.5, &mut |s| {
            fronts.push((
                s.t,
                diagnostics::front_position(s, level, diagnostics::FrontMode::AxisMax(0)),
            ));
        })?;
        diagnostics::spreading_speed_fit(&fronts, 0.5)?
    };
    let ratio = strip_speed / c_bulk;
    report.checks.push(CheckResult::new(
        "annuli_strip_ratio",
        "A5",
        ratio >= params.strip_ratio_min,
        ratio,
        params.strip_ratio_min,
        format!("strip {strip_speed:.3}; bulk {c_bulk:.3}"),
    ));

    // main spark run
    let mut state = required(&cfg.initial, "initial")?.build(&grid, &field)?;
    let mut obs = TraceObserver::new(diag, None)?;
    let mut idx = 0usize;
    let out = cfg.output.clone();
    let outcome = solver::run(&mut state, &field, run_cfg.t_end, run_cfg.snapshot_every, &mut |s| {
        obs.observe(s);
        let _ = dump_snapshot(dir, &out, idx, s);
        idx += 1;
    })?;
    warn_outcome(&mut report, "spark run", &outcome);
    let trace_path = dir.join("trace.csv");
    write_trace(&trace_path, &obs.rows)?;
    report.trace_paths.push(trace_path);

    // complement-side width growth: final vs half-time value
    let high: Vec<(f64, f64)> = obs
        .column(params.high_eps, |r| r.l_high)
        .into_iter()
        .filter_map(|(t, v)| finite(&v).map(|x| (t, x)))
        .collect();
    let t_end = high.last().map(|&(t, _)| t).unwrap_or(0.0);
    let at_half = high
        .iter()
        .min_by(|a, b| {
            (a.0 - t_end / 2.0)
                .abs()
                .partial_cmp(&(b.0 - t_end / 2.0).abs())
                .unwrap()
        })
        .map(|&(_, v)| v)
        .unwrap_or(f64::NAN);
    let at_end = high.last().map(|&(_, v)| v).unwrap_or(f64::NAN);
    report.checks.push(CheckResult::new(
        "annuli_high_growth",
        "A5",
        at_end >= params.high_growth_min * at_half,
        at_end,
        params.high_growth_min * at_half,
        format!("L_high({}) at T/2 = {at_half:.3}", params.high_eps),
    ));

    // low-side width stays bounded: max over run < factor * early median
    let low: Vec<f64> = obs
        .column(params.low_eps, |r| r.l_low)
        .into_iter()
        .filter_map(|(_, v)| finite(&v))
        .collect();
    let early_n = ((low.len() as f64) * params.early_frac).ceil() as usize;
    let mut early: Vec<f64> = low.iter().take(early_n.max(1)).copied().collect();
    let med = median(&mut early);
    let max = low.iter().copied().fold(0.0f64, f64::max);
    report.checks.push(CheckResult::new(
        "annuli_low_bounded",
        "A5",
        max < params.low_bound_factor * med,
        max,
        params.low_bound_factor * med,
        format!("early median {med:.3} over {} finite snapshots", early_n),
    ));
    Ok(report)
}

// ---------------------------------------------------------------------------

pub(super) fn slab(cfg: &ScenarioConfig, _base: &Path, dir: &Path) -> Result<RunReport> {
    let params = required(&cfg.slab, "slab")?;
    let (field, _eq) = reaction::build_slab_field(params.d_eff, params.m_big)?;
    let grid = required(&cfg.grid, "grid")?.build()?;
    let diag = required(&cfg.diagnostics, "diagnostics")?;
    let run_cfg = required(&cfg.run, "run")?;
    let mut state = required(&cfg.initial, "initial")?.build(&grid, &field)?;

    let mut obs = TraceObserver::new(diag, None)?;
    let mut gaps: Vec<(f64, Option<f64>)> = Vec::new();
    let mut report = RunReport::default();
    let (lo, hi) = (params.level_lo, params.level_hi);
    let out = cfg.output.clone();
    let mut idx = 0usize;
    let outcome = solver::run(&mut state, &field, run_cfg.t_end, run_cfg.snapshot_every, &mut |s| {
        obs.observe(s);
        let a = axis_crossing(s, lo);
        let b = axis_crossing(s, hi);
        gaps.push((s.t, a.zip(b).map(|(a, b)| a - b)));
        let _ = dump_snapshot(dir, &out, idx, s);
        idx += 1;
    })?;
    warn_outcome(&mut report, "run", &outcome);
    let trace_path = dir.join("trace.csv");
    write_trace(&trace_path, &obs.rows)?;
    report.trace_paths.push(trace_path);

    let t_end = gaps.last().unwrap().0;
    let gap_at = |t: f64| -> Option<f64> {
        gaps.iter()
            .min_by(|a, b| (a.0 - t).abs().partial_cmp(&(b.0 - t).abs()).unwrap())
            .and_then(|&(_, g)| g)
    };
    let g_half = gap_at(t_end / 2.0).unwrap_or(f64::NAN);
    let g_end = gap_at(t_end).unwrap_or(f64::NAN);
    report.checks.push(CheckResult::new(
        "slab_gap_growth",
        "A6",
        g_end >= params.gap_growth_min * g_half,
        g_end,
        params.gap_growth_min * g_half,
        format!("axial gap {lo} vs {hi}: {g_half:.3} at T/2"),
    ));

    for &eps in &params.trend_eps {
        let vals: Vec<(f64, f64)> = obs
            .column(eps, |r| r.l_low)
            .into_iter()
            .filter_map(|(t, v)| finite(&v).map(|x| (t, x)))
            .collect();
        let at = |t: f64| -> f64 {
            vals.iter()
                .min_by(|a, b| (a.0 - t).abs().partial_cmp(&(b.0 - t).abs()).unwrap())
                .map(|&(_, v)| v)
                .unwrap_or(f64::NAN)
        };
        let half = at(t_end / 2.0);
        let end = at(t_end);
        report.checks.push(CheckResult::new(
            &format!("slab_width_trend_eps{eps}"),
            "A6",
            end > half,
            end,
            half,
            "L must keep growing between T/2 and T",
        ));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------

fn relax_until_steady(
    state: &mut GridState,
    field: &ReactionField,
    t_max: f64,
    check_every: f64,
    steady_tol: f64,
) -> Result<()> {
    let mut prev = state.u.clone();
    while state.t < t_max {
        let target = (state.t + check_every).min(t_max);
        solver::run(state, field, target, check_every, &mut |_s| {})?;
        let rate = state
            .u
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
            / check_every;
        if rate < steady_tol {
            return Ok(());
        }
        prev = state.u.clone();
    }
    Ok(())
}

pub(super) fn equilibria_relax(cfg: &ScenarioConfig, base: &Path, dir: &Path) -> Result<RunReport> {
    let params = required(&cfg.equilibria, "equilibria")?;
    let field = required(&cfg.field, "field")?.build(base)?;
    let run_cfg = required(&cfg.run, "run")?;
    let mut report = RunReport::default();

    // 1D: small seed diffuses flat below the ignition range
    let grid1 = required(&cfg.grid, "grid")?.build()?;
    {
        let (v, r) = (params.seed1d_value, params.seed1d_radius);
        let mut state = GridState::from_fn(Arc::new(grid1.clone()), move |p| {
            if p[0].abs() <= r {
                v
            } else {
                0.0
            }
        });
        relax_until_steady(&mut state, &field, run_cfg.t_end, run_cfg.snapshot_every, 1e-9)?;
        let osc = state.max() - state.min();
        let supf = state
            .u
            .iter()
            .enumerate()
            .map(|(k, &u)| field.eval(state.spec.coord_of(k), u))
            .fold(0.0f64, f64::max);
        report.checks.push(CheckResult::new(
            "relax_flat_1d",
            "A8",
            osc < params.flat_tol,
            osc,
            params.flat_tol,
            "max - min of the relaxed state",
        ));
        report.checks.push(CheckResult::new(
            "relax_zero_reaction_1d",
            "A8",
            supf < params.flat_tol,
            supf,
            params.flat_tol,
            "sup f(x, v) at the relaxed state",
        ));
    }

    // 2D: burning seed relaxes to the flat state u = 1
    {
        let grid2 = params.grid2d.build()?;
        let (v, r) = (params.seed2d_value, params.seed2d_radius);
        let mut state = GridState::from_fn(Arc::new(grid2), move |p| {
            if p[0].hypot(p[1]) <= r {
                v
            } else {
                0.0
            }
        });
        relax_until_steady(&mut state, &field, params.run2d.t_end, params.run2d.snapshot_every, 1e-9)?;
        let osc = state.max() - state.min();
        let supf = state
            .u
            .iter()
            .enumerate()
            .map(|(k, &u)| field.eval(state.spec.coord_of(k), u))
            .fold(0.0f64, f64::max);
        report.checks.push(CheckResult::new(
            "relax_flat_2d",
            "A8",
            osc < params.flat_tol,
            osc,
            params.flat_tol,
            "max - min of the relaxed state",
        ));
        report.checks.push(CheckResult::new(
            "relax_zero_reaction_2d",
            "A8",
            supf < params.flat_tol,
            supf,
            params.flat_tol,
            "sup f(x, v) at the relaxed state",
        ));
    }

    // cylinder d_eff = 3: the radial-cap equilibrium and its weighted
    // reaction integral against the dimensional bound
    {
        let spec = params.cylinder.build()?;
        let d_eff = match spec.geometry {
            Geometry::Cylinder { d_eff } => d_eff,
            _ => return Err(Error::Scenario("equilibria cylinder section must be cylindrical".into())),
        };
        let eq = reaction::RadialEquilibrium::new(d_eff)?;
        let f0 = eq.induced_profile()?;
        let cyl_field = ReactionField::homogeneous(f0, 2);
        let eqc = eq.clone();
        let mut state = GridState::from_fn(Arc::new(spec), move |p| eqc.value(p[0].hypot(p[1])));
        solver::run(
            &mut state,
            &cyl_field,
            params.run_cyl.t_end,
            params.run_cyl.snapshot_every,
            &mut |_s| {},
        )?;
        let integral = diagnostics::weighted_reaction_integral(&state, &cyl_field)?;
        let bound = diagnostics::equilibrium_integral_bound(d_eff);
        report.checks.push(CheckResult::new(
            "equilibrium_integral_bound",
            "A8",
            integral <= bound * (1.0 + params.integral_slack) && integral > 0.0,
            integral,
            bound * (1.0 + params.integral_slack),
            format!("bound {bound:.4}; relaxed to t = {:.1}", state.t),
        ));
        // drift from the constructed equilibrium stays small
        let eqc = eq.clone();
        let drift = state
            .u
            .iter()
            .enumerate()
            .map(|(k, &u)| {
                let p = state.spec.coord_of(k);
                (u - eqc.value(p[0].hypot(p[1]))).abs()
            })
            .fold(0.0f64, f64::max);
        report.checks.push(CheckResult::new(
            "equilibrium_drift",
            "A8",
            drift < 0.05,
            drift,
            0.05,
            "sup |u - q| after relaxation",
        ));
        let _ = dump_snapshot(dir, &cfg.output, 0, &state)?;
    }
    Ok(report)
}

// ---------------------------------------------------------------------------

fn push_cert_pair(
    report: &mut RunReport,
    cert_rows: &mut String,
    name: &str,
    coarse: &barriers::CertReport,
    fine: &barriers::CertReport,
) {
    for rep in [coarse, fine] {
        let _ = writeln!(
            cert_rows,
            "{},{},{:.8e},{:.8e},{}",
            rep.barrier,
            rep.region.replace(',', ";"),
            rep.min_residual,
            rep.max_residual,
            rep.violations
        );
    }
    report.checks.push(CheckResult::new(
        &format!("cert_{name}"),
        "A7",
        coarse.passed() && fine.passed(),
        coarse.violations as f64 + fine.violations as f64,
        0.0,
        format!(
            "coarse [{:.3e},{:.3e}] {} pts; fine [{:.3e},{:.3e}] {} pts",
            coarse.min_residual,
            coarse.max_residual,
            coarse.points,
            fine.min_residual,
            fine.max_residual,
            fine.points
        ),
    ));
    report.checks.push(CheckResult::new(
        &format!("cert_{name}_refinement"),
        "A7",
        fine.worst_violation <= coarse.worst_violation / 2.0 + 1e-15,
        fine.worst_violation,
        coarse.worst_violation / 2.0,
        "worst sign violation must shrink at least 2x under refinement",
    ));
}

pub(super) fn barrier_suite(cfg: &ScenarioConfig, base: &Path, dir: &Path) -> Result<RunReport> {
    let params = required(&cfg.barrier_suite, "barrier_suite")?;
    let field = required(&cfg.field, "field")?.build(base)?;
    let grid = required(&cfg.grid, "grid")?.build()?;
    let mut report = RunReport::default();
    let mut cert_rows = String::from("barrier,region,min_residual,max_residual,violations\n");
    let f0 = field.base.clone();
    let theta = f0.theta_flat();
    let k_lip = field.lipschitz();
    let c0 = speed::shoot_front_speed(&f0, 1e-7)?.speed;

    // 1. annular supersolution, certified against its strengthened reaction
    {
        let ab = barriers::annular_supersolution(&f0, params.delta, 2)?;
        let ext = params.annular_extent;
        let spec = GridSpec::new(
            Geometry::Plane,
            vec![[-ext, ext], [-ext, ext]],
            params.annular_dx,
            Boundary::NeumannZeroFlux,
        )?;
        let lat = CertLattice {
            spec,
            t0: -3.0,
            t1: -0.5,
            dt: params.annular_dt,
        };
        let coarse = barriers::certify(&ab.barrier, &ab.field, &lat);
        let fine = barriers::certify(&ab.barrier, &ab.field, &lat.refined());
        push_cert_pair(&mut report, &mut cert_rows, "annular_super", &coarse, &fine);

        // comparison: seed exactly on the barrier at the window start; the
        // monotone scheme then keeps the run below the supersolution
        let t_start = lat.t0;
        let spec_run = GridSpec::new(
            Geometry::Plane,
            vec![[-ext, ext], [-ext, ext]],
            params.annular_dx,
            Boundary::NeumannZeroFlux,
        )?;
        let barrier = ab.barrier.clone();
        let mut u0 = GridState::from_fn(Arc::new(spec_run), |p| barrier.value(t_start, p));
        u0.t = t_start;
        let mut snaps = Vec::new();
        solver::run(&mut u0, &ab.field, -0.5, 0.25, &mut |s| snaps.push(s.clone()))?;
        let cmp = barriers::comparison_check(&snaps, &ab.barrier);
        report.checks.push(CheckResult::new(
            "comparison_annular_super",
            "A7",
            cmp.passed(params.comparison_tol),
            cmp.worst_violation,
            params.comparison_tol,
            format!("ordered_at_start {}; nodes {}", cmp.ordered_at_start, cmp.checked_nodes),
        ));
    }

    // shared reference run for the exponential-tail barriers
    let w0 = solver::bump_w(
        &grid,
        BumpShape::FrontAlongAxis(0),
        params.ref_r2,
        &f0,
        params.ref_margin,
    )?;
    let reference = Arc::new(StoredRun::record(
        w0.clone(),
        &field,
        params.ref_t_end,
        params.ref_every,
    )?);
    let m = reference.min_ut_in_band(theta / 2.0, 1.0 - theta / 2.0);
    if m <= 0.0 {
        report
            .warnings
            .push(format!("reference run transition band min u_t = {m} <= 0"));
    }

    // choose tau so that w(t + tau - 1) >= 1 - theta left of the validity line
    let tau = {
        let positions = reference.level_positions(1.0 - theta);
        let p = ExpTailParams {
            eps2: params.eps2,
            offset: params.data_r2,
            tau: 0.0,
            theta,
            m: m.max(1e-6),
            k: k_lip,
            c0,
        };
        let mut tau = 2.0;
        'tau: while tau < params.ref_t_end {
            let mut ok = true;
            let mut t = 0.0;
            while t <= params.cert_t_end {
                let line = 0.5 * c0 * t
                    + (p.k / (p.eps2 * p.eps2 * p.m)).max(2.0 / p.theta).ln() / p.eps2
                    + p.offset;
                let idx = ((t + tau - 1.0) / params.ref_every).floor() as usize;
                match positions.get(idx).and_then(|&(_, x)| x) {
                    Some(posn) if posn >= line => {}
                    _ => {
                        ok = false;
                    }
                }
                if !ok {
                    tau += 2.0;
                    continue 'tau;
                }
                t += params.cert_dt.max(0.5);
            }
            break;
        }
        tau
    };

    let super_params = ExpTailParams {
        eps2: params.eps2,
        offset: params.data_r2,
        tau,
        theta,
        m: m.max(1e-6),
        k: k_lip,
        c0,
    };
    let sub_params = ExpTailParams {
        offset: params.sub_offset,
        tau: 0.0,
        ..super_params.clone()
    };

    let cert_spec = GridSpec::new(
        Geometry::Line,
        vec![grid.extent[0]],
        grid.dx,
        Boundary::NeumannZeroFlux,
    )?;

    // 2. exponential-tail supersolution
    {
        let b = barriers::exp_tail_supersolution(reference.clone(), super_params.clone())?;
        let lat = CertLattice {
            spec: cert_spec.clone(),
            t0: 0.0,
            t1: params.cert_t_end,
            dt: params.cert_dt,
        };
        let coarse = barriers::certify(&b, &field, &lat);
        // the stored reference pins the spatial grid; refine in time only
        let fine = barriers::certify(&b, &field, &lat.refined_time());
        push_cert_pair(&mut report, &mut cert_rows, "exp_tail_super", &coarse, &fine);

        // comparison with the front-like run it dominates at t = 0
        let mut u0 = solver::front_like(
            &grid,
            0,
            params.data_r1,
            params.data_r2,
            params.data_eps1,
            params.eps2,
            f0.theta0().unwrap(),
        )?;
        let mut snaps = Vec::new();
        solver::run(&mut u0, &field, params.cmp_t_end, params.cmp_every, &mut |s| {
            snaps.push(s.clone())
        })?;
        let cmp = barriers::comparison_check(&snaps, &b);
        report.checks.push(CheckResult::new(
            "comparison_exp_tail_super",
            "A7",
            cmp.passed(params.comparison_tol),
            cmp.worst_violation,
            params.comparison_tol,
            format!("tau {tau:.1}; m {m:.3e}; nodes {}", cmp.checked_nodes),
        ));

        // 3. exponential-tail subsolution against the same run
        let bsub = barriers::exp_tail_subsolution(reference.clone(), sub_params.clone())?;
        let lat_sub = CertLattice {
            spec: cert_spec.clone(),
            t0: 0.0,
            t1: params.cert_t_end,
            dt: params.cert_dt,
        };
        let coarse = barriers::certify(&bsub, &field, &lat_sub);
        let fine = barriers::certify(&bsub, &field, &lat_sub.refined_time());
        push_cert_pair(&mut report, &mut cert_rows, "exp_tail_sub", &coarse, &fine);
        let cmp = barriers::comparison_check(&snaps, &bsub);
        report.checks.push(CheckResult::new(
            "comparison_exp_tail_sub",
            "A7",
            cmp.passed(params.comparison_tol),
            cmp.worst_violation,
            params.comparison_tol,
            format!("offset {}; nodes {}", params.sub_offset, cmp.checked_nodes),
        ));
    }

    // 4. equilibrium-tail supersolution on the slab field
    {
        let (slab_field, eq) = reaction::build_slab_field(4, params.slab_m)?;
        let (b, c) = barriers::equilibrium_tail_supersolution(eq.clone(), &slab_field.base, params.slab_z);
        let spec = GridSpec::new(
            Geometry::Cylinder { d_eff: 4 },
            vec![[0.0, params.slab_extent[0]], [0.0, params.slab_extent[1]]],
            params.slab_dx,
            Boundary::NeumannZeroFlux,
        )?;
        let lat = CertLattice {
            spec: spec.clone(),
            t0: 0.0,
            t1: params.slab_cert_t_end,
            dt: params.cert_dt,
        };
        let coarse = barriers::certify(&b, &slab_field, &lat);
        let fine = barriers::certify(&b, &slab_field, &lat.refined());
        push_cert_pair(&mut report, &mut cert_rows, "equilibrium_tail_super", &coarse, &fine);

        // run seeded below the barrier stays below
        let theta0 = slab_field.base.theta0().unwrap();
        let mut u0 = solver::front_like(
            &spec,
            0,
            params.slab_z / 2.0,
            params.slab_z,
            0.95 - theta0,
            c / 2.0,
            theta0,
        )?;
        let mut snaps = Vec::new();
        solver::run(&mut u0, &slab_field, params.cmp_t_end, params.cmp_every, &mut |s| {
            snaps.push(s.clone())
        })?;
        let cmp = barriers::comparison_check(&snaps, &b);
        report.checks.push(CheckResult::new(
            "comparison_equilibrium_tail",
            "A7",
            cmp.passed(params.comparison_tol),
            cmp.worst_violation,
            params.comparison_tol,
            format!("c {c:.3}; nodes {}", cmp.checked_nodes),
        ));
    }

    // 5. static bump subsolution
    {
        let profile = solver::BumpProfile::new(&f0, params.ref_margin, params.ref_r2)?;
        let b = barriers::bump_subsolution(profile, BumpShape::FrontAlongAxis(0));
        let lat = CertLattice {
            spec: cert_spec.clone(),
            t0: 0.0,
            t1: 1.0,
            dt: params.cert_dt,
        };
        let coarse = barriers::certify(&b, &field, &lat);
        let fine = barriers::certify(&b, &field, &lat.refined());
        push_cert_pair(&mut report, &mut cert_rows, "bump_sub", &coarse, &fine);
        let cmp = barriers::comparison_check(&reference.snaps, &b);
        report.checks.push(CheckResult::new(
            "comparison_bump_sub",
            "A7",
            cmp.passed(params.comparison_tol),
            cmp.worst_violation,
            params.comparison_tol,
            format!("nodes {}", cmp.checked_nodes),
        ));

        // negative control: the flipped sign must fail (fine dt keeps the
        // tolerance below the bump's strict interior margin)
        let flipped = b.flipped();
        let lat_ctrl = CertLattice {
            spec: cert_spec.clone(),
            t0: 0.0,
            t1: 0.05,
            dt: 1e-3,
        };
        let rep = barriers::certify(&flipped, &field, &lat_ctrl);
        report.checks.push(CheckResult::new(
            "cert_negative_control",
            "A7",
            !rep.passed() && rep.violations > 0,
            rep.violations as f64,
            1.0,
            "deliberately flipped sign must be rejected",
        ));
    }

    fs::write(dir.join("cert.csv"), cert_rows)?;
    Ok(report)
}
