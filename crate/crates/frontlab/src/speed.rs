//! Traveling-front speeds of homogeneous profiles.
//!
//! The front ODE `U'' + cU' + f0(U) = 0` is integrated from the `U = 1`
//! saddle along its unstable manifold with fixed-step RK4; bisection on `c`
//! separates undershoot (U crosses 0 with U' < 0: c too small) from overshoot
//! (U' turns around with U > 0: c too large).

use crate::diagnostics;
use crate::grid::{Boundary, Geometry, GridSpec};
use crate::reaction::{ReactionField, ReactionKind, ReactionProfile};
use crate::solver;
use crate::{Error, Result};

/// RK4 step in the front variable `s`.
const ODE_STEP: f64 = 1e-3;
/// Integration window `|s| <= S_MAX`.
const S_MAX: f64 = 200.0;
/// Launch offset below `U = 1` along the unstable eigenvector.
const LAUNCH_OFFSET: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShotClass {
    /// `U` crossed 0 with `U' < 0`: wave too weakly damped, `c` too small.
    Undershoot,
    /// `U'` reached 0 with `U > 0`: overdamped, `c` too large.
    Overshoot,
}

#[derive(Clone, Debug)]
pub struct FrontSolveResult {
    pub speed: f64,
    /// Decimated `(s, U(s))` samples, strictly decreasing in `U`.
    pub profile_samples: Vec<(f64, f64)>,
    /// Max discrete ODE residual along the returned trajectory.
    pub residual: f64,
    pub iterations: u32,
    /// Final bisection bracket and its certified classifications.
    pub bracket: (f64, f64),
    pub bracket_class: (ShotClass, ShotClass),
}

struct Shooter<'a> {
    profile: &'a ReactionProfile,
    fp_top: f64,
}

impl<'a> Shooter<'a> {
    fn new(profile: &'a ReactionProfile) -> Self {
        let h = 1e-6;
        let fp_top = (profile.eval(1.0) - profile.eval(1.0 - h)) / h;
        Shooter { profile, fp_top }
    }

    fn launch(&self, c: f64) -> (f64, f64) {
        // linearization at the saddle: v'' + cv' + f'(1) v = 0, v = 1 - U
        let disc = (c * c - 4.0 * self.fp_top).max(0.0).sqrt();
        let lambda = (0.5 * (-c + disc)).max(1e-8);
        (1.0 - LAUNCH_OFFSET, -lambda * LAUNCH_OFFSET)
    }

    fn rhs(&self, c: f64, u: f64, v: f64) -> (f64, f64) {
        (v, -c * v - self.profile.eval(u))
    }

    fn rk4(&self, c: f64, u: f64, v: f64, h: f64) -> (f64, f64) {
        let (k1u, k1v) = self.rhs(c, u, v);
        let (k2u, k2v) = self.rhs(c, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        let (k3u, k3v) = self.rhs(c, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        let (k4u, k4v) = self.rhs(c, u + h * k3u, v + h * k3v);
        (
            u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
            v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        )
    }

    fn classify(&self, c: f64) -> ShotClass {
        let (mut u, mut v) = self.launch(c);
        let mut s = 0.0;
        while s < S_MAX {
            let (nu, nv) = self.rk4(c, u, v, ODE_STEP);
            u = nu;
            v = nv;
            s += ODE_STEP;
            if u <= 0.0 {
                return ShotClass::Undershoot;
            }
            if v >= 0.0 {
                return ShotClass::Overshoot;
            }
        }
        // window exhausted inside a flat zone: the asymptote U + U'/c decides
        if c > 0.0 && u + v / c <= 0.0 {
            ShotClass::Undershoot
        } else {
            ShotClass::Overshoot
        }
    }

    /// Integrates at the final `c`, recording decimated samples and the max
    /// central-difference ODE residual on the fine trajectory.
    fn trace(&self, c: f64) -> (Vec<(f64, f64)>, f64) {
        let (mut u, mut v) = self.launch(c);
        let mut s = 0.0;
        let mut samples = vec![(s, u)];
        let mut window = [0.0f64; 3];
        let mut filled = 0usize;
        let mut residual: f64 = 0.0;
        let mut step_idx = 0usize;
        while s < S_MAX {
            window[step_idx % 3] = u;
            filled += 1;
            let (nu, nv) = self.rk4(c, u, v, ODE_STEP);
            u = nu;
            v = nv;
            s += ODE_STEP;
            step_idx += 1;
            if filled >= 2 {
                // central difference around the previous point
                let um = window[(step_idx + 1) % 3];
                let uc = window[(step_idx + 2) % 3];
                if filled >= 3 {
                    let lap = (u - 2.0 * uc + um) / (ODE_STEP * ODE_STEP);
                    let grad = (u - um) / (2.0 * ODE_STEP);
                    residual = residual.max((lap + c * grad + self.profile.eval(uc)).abs());
                }
            }
            if step_idx % 10 == 0 {
                samples.push((s, u));
            }
            if u <= 1e-9 || v >= 0.0 {
                break;
            }
        }
        // enforce a strictly decreasing sampled window
        let mut trimmed = Vec::with_capacity(samples.len());
        let mut last = f64::INFINITY;
        for (s, u) in samples {
            if u < last {
                trimmed.push((s, u));
                last = u;
            } else {
                break;
            }
        }
        (trimmed, residual)
    }
}

/// Bisection shooting for the unique front speed of an ignition or
/// spreading-positive bistable profile.
pub fn shoot_front_speed(profile: &ReactionProfile, tol: f64) -> Result<FrontSolveResult> {
    if tol <= 0.0 {
        return Err(Error::InvalidParam("shooting tolerance must be > 0".into()));
    }
    let shooter = Shooter::new(profile);
    let k = profile.lipschitz();
    let mut lo = 0.0;
    let mut hi = 2.0 * k.sqrt() + 1.0;

    let class_hi = shooter.classify(hi);
    if class_hi != ShotClass::Overshoot {
        return Err(Error::NoConvergence(format!(
            "speed {hi} (= 2 sqrt(K) + 1) did not overshoot; profile outside the solver's class"
        )));
    }
    let class_lo = shooter.classify(lo);
    if class_lo == ShotClass::Overshoot {
        // even c = 0 is overdamped: the connection has speed <= 0
        if profile.kind == ReactionKind::Bistable {
            let integral = profile.integral();
            if integral < -1e-9 {
                return Err(Error::NoFront(format!(
                    "bistable integral {integral:.3e} <= 0 gives non-positive front speed"
                )));
            }
        } else {
            return Err(Error::NoFront(
                "c = 0 already overshoots for a non-bistable profile".into(),
            ));
        }
        // balanced case: the speed is 0 within tolerance
        let (profile_samples, residual) = shooter.trace(0.0);
        return Ok(FrontSolveResult {
            speed: 0.0,
            profile_samples,
            residual,
            iterations: 0,
            bracket: (0.0, 0.0),
            bracket_class: (ShotClass::Overshoot, ShotClass::Overshoot),
        });
    }

    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        iterations += 1;
        match shooter.classify(mid) {
            ShotClass::Undershoot => lo = mid,
            ShotClass::Overshoot => hi = mid,
        }
        if iterations > 200 {
            return Err(Error::NoConvergence(format!(
                "bisection failed to reach tol {tol} after {iterations} iterations"
            )));
        }
    }
    let speed = 0.5 * (lo + hi);
    let (profile_samples, residual) = shooter.trace(speed);
    Ok(FrontSolveResult {
        speed,
        profile_samples,
        residual,
        iterations,
        bracket: (lo, hi),
        bracket_class: (ShotClass::Undershoot, ShotClass::Overshoot),
    })
}

/// KPP linearization speed `2 sqrt(f'(0))`, forward difference at 1e-6.
pub fn kpp_linear_speed(profile: &ReactionProfile) -> f64 {
    let h = 1e-6;
    let slope = profile.eval(h) / h;
    2.0 * slope.max(0.0).sqrt()
}

#[derive(Clone, Debug)]
pub struct SpeedBounds {
    pub c0: f64,
    pub c1: f64,
    /// True when `c1` came from the monostable estimate (linearization vs a
    /// measured spreading run) instead of the shooting solve.
    pub c1_is_estimate: bool,
}

/// Front/spreading speeds of the field's declared sandwich `(f0, f1)`.
pub fn speed_bounds(field: &ReactionField) -> Result<SpeedBounds> {
    let (f0, f1) = field
        .bounds
        .as_ref()
        .ok_or_else(|| Error::InvalidParam("speed_bounds needs declared field bounds".into()))?;
    let c0 = shoot_front_speed(f0, 1e-6)?.speed;
    match f1.kind {
        ReactionKind::Ignition | ReactionKind::Bistable | ReactionKind::Tabulated => {
            let c1 = shoot_front_speed(f1, 1e-6)?.speed;
            Ok(SpeedBounds { c0, c1, c1_is_estimate: false })
        }
        ReactionKind::Kpp | ReactionKind::Monostable => {
            let linear = kpp_linear_speed(f1);
            let measured = measure_spreading_speed(f1)?;
            Ok(SpeedBounds {
                c0,
                c1: linear.max(measured),
                c1_is_estimate: true,
            })
        }
    }
}

/// 1D spreading run used for the monostable `c1` estimate.
fn measure_spreading_speed(profile: &ReactionProfile) -> Result<f64> {
    let k = profile.lipschitz();
    let t_end = 30.0;
    let reach = (2.0 * k.sqrt() + 1.0) * t_end + 40.0;
    let dx = 0.1;
    let spec = GridSpec::new(
        Geometry::Line,
        vec![[-20.0, reach]],
        dx,
        Boundary::NeumannZeroFlux,
    )?;
    let field = ReactionField::homogeneous(profile.clone(), 1);
    let theta0 = profile.theta0().unwrap_or(0.0);
    let mut state = solver::front_like(&spec, 0, 5.0, 10.0, 0.45 * (1.0 - theta0), 1.0, theta0)?;
    let mut fronts = Vec::new();
    solver::run(&mut state, &field, t_end, 1.0, &mut |s| {
        fronts.push((
            s.t,
            diagnostics::front_position(s, 0.25, diagnostics::FrontMode::AxisMax(0)),
        ));
    })?;
    diagnostics::spreading_speed_fit(&fronts, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Closed-form Nagumo front: U(s) = 1/(1+exp(s/sqrt(2))) travels at
    /// (1-2θ)/sqrt(2) for f(u) = u(1-u)(u-θ). The oracle substitutes the
    /// closed form into the ODE before the speed value is trusted.
    fn cubic_oracle_residual(theta: f64) -> f64 {
        let c = (1.0 - 2.0 * theta) / 2f64.sqrt();
        let mut worst: f64 = 0.0;
        let mut s = -20.0;
        while s <= 20.0 {
            let u = 1.0 / (1.0 + (s / 2f64.sqrt()).exp());
            let du = -u * (1.0 - u) / 2f64.sqrt();
            let ddu = u * (1.0 - u) * (1.0 - 2.0 * u) / 2.0;
            let f = u * (1.0 - u) * (u - theta);
            worst = worst.max((ddu + c * du + f).abs());
            s += 0.05;
        }
        worst
    }

    #[test]
    fn cubic_bistable_matches_closed_form() {
        for theta in [0.1, 0.25, 0.4] {
            assert!(cubic_oracle_residual(theta) < 1e-12);
            let p = ReactionProfile::bistable(theta, 1.0).unwrap();
            let r = shoot_front_speed(&p, 1e-6).unwrap();
            let exact = (1.0 - 2.0 * theta) / 2f64.sqrt();
            assert!(
                (r.speed - exact).abs() <= 1e-5,
                "theta = {theta}: got {} want {exact}",
                r.speed
            );
        }
    }

    #[test]
    fn balanced_bistable_speed_zero() {
        let p = ReactionProfile::bistable(0.5, 1.0).unwrap();
        let r = shoot_front_speed(&p, 1e-4).unwrap();
        assert!(r.speed.abs() <= 1e-4, "speed = {}", r.speed);
    }

    #[test]
    fn shot_speed_below_universal_bound() {
        let profiles = [
            ReactionProfile::ignition(0.25, 1.0).unwrap(),
            ReactionProfile::ignition(1.0 / 3.0, 4.0).unwrap(),
            ReactionProfile::bistable(0.2, 2.0).unwrap(),
            ReactionProfile::ignition_bump(0.5, 100.0).unwrap(),
        ];
        for p in &profiles {
            let r = shoot_front_speed(p, 1e-5).unwrap();
            assert!(r.speed <= 2.0 * p.lipschitz().sqrt() + 1e-5);
        }
    }

    #[test]
    fn bracket_certified_and_residual_small() {
        let p = ReactionProfile::bistable(0.25, 1.0).unwrap();
        let tol = 1e-5;
        let r = shoot_front_speed(&p, tol).unwrap();
        assert_eq!(r.bracket_class, (ShotClass::Undershoot, ShotClass::Overshoot));
        assert!(r.bracket.1 - r.bracket.0 <= tol);
        assert!(r.residual <= 10.0 * tol, "residual = {}", r.residual);
        for w in r.profile_samples.windows(2) {
            assert!(w[1].1 < w[0].1, "profile not strictly decreasing");
        }
    }

    #[test]
    fn scaling_never_decreases_speed() {
        let base = ReactionProfile::ignition(0.3, 1.0).unwrap();
        let mut prev = shoot_front_speed(&base, 1e-6).unwrap().speed;
        for lambda in [1.5, 2.0, 4.0] {
            let c = shoot_front_speed(&base.scaled(lambda), 1e-6).unwrap().speed;
            assert!(c >= prev - 2e-6, "lambda = {lambda}: {c} < {prev}");
            prev = c;
        }
    }

    #[test]
    fn random_cubic_thetas_match_closed_form() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let theta = rng.gen_range(0.02..0.48);
            let p = ReactionProfile::bistable(theta, 1.0).unwrap();
            let tol = 1e-5;
            let r = shoot_front_speed(&p, tol).unwrap();
            let exact = (1.0 - 2.0 * theta) / 2f64.sqrt();
            assert!((r.speed - exact).abs() <= tol, "theta = {theta}");
        }
    }

    #[test]
    fn negative_integral_bistable_reports_no_front() {
        let p = ReactionProfile::bistable(0.7, 1.0).unwrap();
        assert!(!p.is_spreading_positive());
        match shoot_front_speed(&p, 1e-4) {
            Err(Error::NoFront(_)) => {}
            other => panic!("expected NoFront, got {other:?}"),
        }
    }

    #[test]
    fn kpp_linear_speed_values() {
        let p = ReactionProfile::kpp(1.0).unwrap();
        assert!((kpp_linear_speed(&p) - 2.0).abs() < 1e-5);
        let p4 = ReactionProfile::kpp(4.0).unwrap();
        assert!((kpp_linear_speed(&p4) - 4.0).abs() < 1e-5);
        let ign = ReactionProfile::ignition(0.25, 1.0).unwrap();
        assert_eq!(kpp_linear_speed(&ign), 0.0);
    }

    #[test]
    fn terrace_segment_speed_ratio_sqrt2() {
        // the two-step segments rescaled to [0,1]: lower -> amp c/4,
        // upper -> amp c/2, both bumps (u-1/2)²(1-u) above theta0 = 1/2
        let c_scale = 400.0;
        let lower = ReactionProfile::ignition_bump(0.5, c_scale / 4.0).unwrap();
        let upper = ReactionProfile::ignition_bump(0.5, c_scale / 2.0).unwrap();
        let cl = shoot_front_speed(&lower, 1e-6).unwrap().speed;
        let cu = shoot_front_speed(&upper, 1e-6).unwrap().speed;
        let ratio = cu / cl;
        assert!(
            (ratio - 2f64.sqrt()).abs() <= 0.02 * 2f64.sqrt(),
            "ratio = {ratio}"
        );
    }

    #[test]
    fn degenerate_sandwich_equal_speeds() {
        let p = ReactionProfile::ignition(0.25, 2.0).unwrap();
        let field = ReactionField::homogeneous(p, 1);
        let b = speed_bounds(&field).unwrap();
        assert!((b.c0 - b.c1).abs() < 1e-9);
        assert!(!b.c1_is_estimate);
        assert!(b.c0 <= b.c1 + 1e-12);
    }
}
