//! Closed-form space-time sub/super-solutions and their discrete residual
//! certification.
//!
//! A barrier carries an evaluator `v(t,x)`, an expected residual sign under
//! `∂_t - Δ - f`, and a validity predicate. `certify` samples the discrete
//! residual `(v(t+dt,x) - v(t,x))/dt - Δ_h v - f(x,v)` on a space-time
//! lattice and checks the sign within a resolution-dependent tolerance.

use std::sync::Arc;

use crate::grid::{Geometry, GridSpec, GridState};
use crate::reaction::{Point, RadialEquilibrium, ReactionField, ReactionProfile, Tabulated};
use crate::solver;
use crate::speed::{self, FrontSolveResult};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpectedSign {
    /// Residual `v_t - Δv - f(x,v) >= 0`.
    Supersolution,
    /// Residual `<= 0`.
    Subsolution,
}

type Evaluator = Arc<dyn Fn(f64, Point) -> f64 + Send + Sync>;
type Validity = Arc<dyn Fn(f64, Point) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct BarrierFn {
    pub name: String,
    pub expected_sign: ExpectedSign,
    eval: Evaluator,
    valid: Validity,
}

impl std::fmt::Debug for BarrierFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BarrierFn")
            .field("name", &self.name)
            .field("expected_sign", &self.expected_sign)
            .finish()
    }
}

impl BarrierFn {
    pub fn new(
        name: impl Into<String>,
        expected_sign: ExpectedSign,
        eval: Evaluator,
        valid: Validity,
    ) -> Self {
        BarrierFn {
            name: name.into(),
            expected_sign,
            eval,
            valid,
        }
    }

    pub fn value(&self, t: f64, x: Point) -> f64 {
        (self.eval)(t, x)
    }

    pub fn is_valid(&self, t: f64, x: Point) -> bool {
        (self.valid)(t, x)
    }

    /// Flips the declared sign (negative-control testing).
    pub fn flipped(&self) -> Self {
        let mut b = self.clone();
        b.expected_sign = match self.expected_sign {
            ExpectedSign::Supersolution => ExpectedSign::Subsolution,
            ExpectedSign::Subsolution => ExpectedSign::Supersolution,
        };
        b.name = format!("{}_flipped", self.name);
        b
    }
}

// ---------------------------------------------------------------------------
// Front profile helper (used by the annular barrier)
// ---------------------------------------------------------------------------

/// Monotone front profile `U(ξ)` connecting `1 + eps_floor` (ξ → -∞) to
/// `eps_floor` (ξ → +∞), assembled from a shooting solve of the rescaled
/// profile and exact exponential extensions at both ends.
#[derive(Clone, Debug)]
struct FrontProfile {
    samples: Vec<(f64, f64)>,
    lambda_top: f64,
    c: f64,
    eps_floor: f64,
    xi_end: f64,
    v_end: f64,
}

impl FrontProfile {
    fn from_solve(result: &FrontSolveResult, shifted: &ReactionProfile, eps_floor: f64) -> Self {
        let c = result.speed;
        let h = 1e-6;
        let fp_top = (shifted.eval(1.0) - shifted.eval(1.0 - h)) / h;
        let lambda_top = (0.5 * (-c + (c * c - 4.0 * fp_top).max(0.0).sqrt())).max(1e-8);
        // keep samples down to the floor where the reaction turns off
        let mut samples = Vec::new();
        for &(s, v) in &result.profile_samples {
            samples.push((s, v));
            if v <= eps_floor {
                break;
            }
        }
        let (xi_end, v_end) = *samples.last().unwrap();
        FrontProfile {
            samples,
            lambda_top,
            c,
            eps_floor,
            xi_end,
            v_end,
        }
    }

    /// `U(ξ) = eps_floor + V(ξ)`.
    fn u(&self, xi: f64) -> f64 {
        self.eps_floor + self.v(xi)
    }

    fn v(&self, xi: f64) -> f64 {
        let (s0, v0) = self.samples[0];
        if xi <= s0 {
            // unstable-manifold tail towards the top equilibrium
            return 1.0 - (1.0 - v0) * (self.lambda_top * (xi - s0)).exp();
        }
        if xi >= self.xi_end {
            // reaction-free decay at rate c
            return self.v_end * (-self.c * (xi - self.xi_end)).exp();
        }
        // uniform decimation step from the solver
        let step = self.samples[1].0 - self.samples[0].0;
        let q = (xi - s0) / step;
        let i = (q.floor() as usize).min(self.samples.len() - 2);
        let w = q - i as f64;
        self.samples[i].1 * (1.0 - w) + self.samples[i + 1].1 * w
    }
}

// ---------------------------------------------------------------------------
// Annular supersolution
// ---------------------------------------------------------------------------

/// Smooth ramp `h` with `h = 0` on `[0, z1]`, `h' = 1` past `z2`, `h' <= 1`
/// and `h'' ∈ [0, δ/6]` in between (plateaued second derivative, piecewise
/// quintic).
#[derive(Clone, Debug)]
pub struct RampH {
    pub z1: f64,
    pub z2: f64,
    delta: f64,
    table: Vec<(f64, f64)>, // (h, h') sampled on [z1, z2]
    step: f64,
    h_at_z2: f64,
}

impl RampH {
    pub fn new(delta: f64, d: usize) -> Result<Self> {
        if delta <= 0.0 {
            return Err(Error::Barrier("ramp needs delta > 0".into()));
        }
        let z1 = 6.0 * d as f64 / delta;
        let z2 = (6.0 * d as f64 + 7.0) / delta;
        let len = z2 - z1;
        let a = 1.0 / 7.0;
        // h''(s) = (δ/6) w((s-z1)/len) with w ramping 0→1→0; ∫w = 1 - a = 6/7
        let w = move |tau: f64| -> f64 {
            if tau <= 0.0 || tau >= 1.0 {
                0.0
            } else if tau < a {
                let x = tau / a;
                x * x * (3.0 - 2.0 * x)
            } else if tau <= 1.0 - a {
                1.0
            } else {
                let x = (1.0 - tau) / a;
                x * x * (3.0 - 2.0 * x)
            }
        };
        // integrate h'' twice on a fine grid
        let n = 20_000usize;
        let step = len / n as f64;
        let mut table = Vec::with_capacity(n + 1);
        let mut hp = 0.0f64;
        let mut h = 0.0f64;
        table.push((h, hp));
        for i in 0..n {
            let tau0 = i as f64 / n as f64;
            let tau1 = (i + 1) as f64 / n as f64;
            let k0 = delta / 6.0 * w(tau0);
            let k1 = delta / 6.0 * w(0.5 * (tau0 + tau1));
            let k2 = delta / 6.0 * w(tau1);
            let old_hp = hp;
            hp += step / 6.0 * (k0 + 4.0 * k1 + k2);
            h += step * 0.5 * (old_hp + hp);
            table.push((h, hp));
        }
        // normalize so h'(z2) is exactly 1 (Simpson residue ~ 1e-12)
        let scale = 1.0 / table.last().unwrap().1;
        for e in table.iter_mut() {
            e.0 *= scale;
            e.1 *= scale;
        }
        let h_at_z2 = table.last().unwrap().0;
        Ok(RampH {
            z1,
            z2,
            delta,
            table,
            step,
            h_at_z2,
        })
    }

    pub fn h(&self, s: f64) -> f64 {
        if s <= self.z1 {
            0.0
        } else if s >= self.z2 {
            self.h_at_z2 + (s - self.z2)
        } else {
            let q = (s - self.z1) / self.step;
            let i = (q.floor() as usize).min(self.table.len() - 2);
            let w = q - i as f64;
            self.table[i].0 * (1.0 - w) + self.table[i + 1].0 * w
        }
    }

    pub fn h_prime(&self, s: f64) -> f64 {
        if s <= self.z1 {
            0.0
        } else if s >= self.z2 {
            1.0
        } else {
            let q = (s - self.z1) / self.step;
            let i = (q.floor() as usize).min(self.table.len() - 2);
            let w = q - i as f64;
            self.table[i].1 * (1.0 - w) + self.table[i + 1].1 * w
        }
    }

    /// Max of `h''` over the ramp (must stay within δ/6).
    pub fn max_second_derivative(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 1..self.table.len() {
            worst = worst.max((self.table[i].1 - self.table[i - 1].1) / self.step);
        }
        worst
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

#[derive(Clone, Debug)]
pub struct AnnularBarrier {
    pub barrier: BarrierFn,
    /// Homogeneous field carrying the strengthened reaction the barrier is a
    /// supersolution of; certify against this field.
    pub field: ReactionField,
    pub c2: f64,
    pub eps_floor: f64,
    pub ramp_z: (f64, f64),
}

/// Builds the inward-collapsing annular supersolution
/// `v(t,x) = U(z2 - h(|x|) - (c2 + δ/3) t)` on `t < 0`, where `U` is a front
/// of a strengthened reaction `f2 >= f1` connecting `eps'` and `1 + eps'`
/// with speed `c2 ∈ [c1, c1 + δ/3]`.
pub fn annular_supersolution(f1: &ReactionProfile, delta: f64, d: usize) -> Result<AnnularBarrier> {
    if delta <= 0.0 || d == 0 {
        return Err(Error::Barrier("annular barrier needs delta > 0, d >= 1".into()));
    }
    let c1 = speed::shoot_front_speed(f1, 1e-7)?.speed;
    let k = f1.lipschitz();

    let mut eps = 0.02f64;
    for _ in 0..6 {
        let amp = 1.0 + 6.0 * k * eps;
        // f2 on [0, 1+eps]: max of the stretched-amplified copy and f1 itself
        let n = 6000usize;
        let mut us = Vec::with_capacity(n + 1);
        let mut fs = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let u = (1.0 + eps) * i as f64 / n as f64;
            let phi = (u - 2.0 * eps) / (1.0 - eps);
            let stretched = if phi > 0.0 { amp * f1.eval(phi) } else { 0.0 };
            us.push(u);
            fs.push(stretched.max(f1.eval(u)));
        }
        let f2 = ReactionProfile::from_table(us.clone(), fs.clone())?;
        // shifted profile on [0,1]: g(v) = f2(eps + v); front speed c2
        let shifted = {
            let mut gs = Vec::with_capacity(n + 1);
            let mut vs = Vec::with_capacity(n + 1);
            let tab = Tabulated::new(us, fs);
            for i in 0..=n {
                let v = i as f64 / n as f64;
                vs.push(v);
                gs.push(if v == 0.0 || v == 1.0 { 0.0 } else { tab.eval(eps + v) });
            }
            ReactionProfile::from_table(vs, gs)?
        };
        let solve = speed::shoot_front_speed(&shifted, 1e-7)?;
        let c2 = solve.speed;
        if c2 > c1 + delta / 3.0 {
            eps *= 0.5;
            continue;
        }
        let c2 = c2.max(c1);
        let profile = FrontProfile::from_solve(&solve, &shifted, eps);
        let ramp = RampH::new(delta, d)?;
        if ramp.max_second_derivative() > delta / 6.0 * (1.0 + 1e-6) {
            return Err(Error::Barrier("ramp h'' exceeded delta/6".into()));
        }
        let z2 = ramp.z2;
        let speed_t = c2 + delta / 3.0;
        let eval: Evaluator = Arc::new(move |t: f64, x: Point| {
            let r = x[0].hypot(x[1]);
            profile.u(z2 - ramp.h(r) - speed_t * t)
        });
        let valid: Validity = Arc::new(|t: f64, _x: Point| t < 0.0);
        let field = ReactionField::homogeneous(f2, d.min(2));
        return Ok(AnnularBarrier {
            barrier: BarrierFn::new("annular_super", ExpectedSign::Supersolution, eval, valid),
            field,
            c2,
            eps_floor: eps,
            ramp_z: (6.0 * d as f64 / delta, z2),
        });
    }
    Err(Error::Barrier(format!(
        "could not bring the strengthened front speed within delta/3 of c1 = {c1}"
    )))
}

// ---------------------------------------------------------------------------
// Stored reference runs and the exponential-tail barriers
// ---------------------------------------------------------------------------

/// A reference solution stored as equally spaced snapshots, looked up by
/// node coordinate with linear interpolation in time.
#[derive(Clone, Debug)]
pub struct StoredRun {
    pub snaps: Vec<GridState>,
    pub dt_snap: f64,
    spec: Arc<GridSpec>,
}

impl StoredRun {
    pub fn record(
        mut state: GridState,
        field: &ReactionField,
        until_t: f64,
        every: f64,
    ) -> Result<Self> {
        let spec = state.spec.clone();
        let mut snaps = Vec::new();
        solver::run(&mut state, field, until_t, every, &mut |s| snaps.push(s.clone()))?;
        Ok(StoredRun {
            snaps,
            dt_snap: every,
            spec,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.snaps.last().map(|s| s.t).unwrap_or(0.0)
    }

    fn node_of(&self, p: Point) -> usize {
        let i = ((p[0] - self.spec.extent[0][0]) / self.spec.dx)
            .round()
            .clamp(0.0, (self.spec.n0() - 1) as f64) as usize;
        let j = if self.spec.n1() > 1 {
            ((p[1] - self.spec.extent[1][0]) / self.spec.dx)
                .round()
                .clamp(0.0, (self.spec.n1() - 1) as f64) as usize
        } else {
            0
        };
        self.spec.idx(i, j)
    }

    /// `w(t, x)` with linear interpolation between snapshots.
    pub fn value(&self, t: f64, p: Point) -> Result<f64> {
        let t0 = self.snaps[0].t;
        let q = (t - t0) / self.dt_snap;
        if q < -1e-9 || q > (self.snaps.len() - 1) as f64 + 1e-9 {
            return Err(Error::Barrier(format!(
                "reference run sampled outside stored range: t = {t}"
            )));
        }
        let q = q.clamp(0.0, (self.snaps.len() - 1) as f64);
        let i = (q.floor() as usize).min(self.snaps.len() - 2);
        let w = q - i as f64;
        let k = self.node_of(p);
        Ok(self.snaps[i].u[k] * (1.0 - w) + self.snaps[i + 1].u[k] * w)
    }

    /// Measured `m = inf w_t` over the u-window `[lo, hi]` (central snapshot
    /// differences).
    pub fn min_ut_in_band(&self, lo: f64, hi: f64) -> f64 {
        let mut m = f64::INFINITY;
        for i in 1..self.snaps.len().saturating_sub(1) {
            let prev = &self.snaps[i - 1];
            let next = &self.snaps[i + 1];
            for (k, &v) in self.snaps[i].u.iter().enumerate() {
                if v >= lo && v <= hi {
                    m = m.min((next.u[k] - prev.u[k]) / (2.0 * self.dt_snap));
                }
            }
        }
        m
    }

    /// Per-snapshot axis position of the level-`eps` crossing.
    pub fn level_positions(&self, eps: f64) -> Vec<(f64, Option<f64>)> {
        self.snaps
            .iter()
            .map(|s| {
                (
                    s.t,
                    crate::diagnostics::front_position(s, eps, crate::diagnostics::FrontMode::AxisMax(0)),
                )
            })
            .collect()
    }
}

/// Parameters shared by the two exponential-tail barriers.
#[derive(Clone, Debug)]
pub struct ExpTailParams {
    pub eps2: f64,
    /// Spatial offset of the exponential (`R2` for the super, `r` for the sub).
    pub offset: f64,
    /// Time shift `tau` (super-solution only).
    pub tau: f64,
    /// Flat/monotone zone width `theta` of the reaction.
    pub theta: f64,
    /// Measured `inf w_t` over the transition band.
    pub m: f64,
    /// Lipschitz constant of the reaction.
    pub k: f64,
    /// `c0` of the base profile, setting the slope of the validity line.
    pub c0: f64,
}

impl ExpTailParams {
    /// `x1 >= c0 t / 2 + log(max(K/(eps2² m), 2/θ))/eps2 + offset` marks the
    /// exponentially-safe region.
    fn line(&self, t: f64) -> f64 {
        let log_arg = (self.k / (self.eps2 * self.eps2 * self.m)).max(2.0 / self.theta);
        0.5 * self.c0 * t + log_arg.ln() / self.eps2 + self.offset
    }
}

/// Super-solution `v(t,x) = w(t + β(t), x) + exp(eps2² t - eps2 (x1 - R2))`
/// with `β(t) = tau - exp(-eps2² t)`.
pub fn exp_tail_supersolution(w: Arc<StoredRun>, params: ExpTailParams) -> Result<BarrierFn> {
    if params.eps2 > params.c0 / 4.0 {
        return Err(Error::Barrier(format!(
            "need eps2 <= c0/4 (got eps2 = {}, c0 = {})",
            params.eps2, params.c0
        )));
    }
    if !(params.m > 0.0) {
        return Err(Error::Barrier(format!(
            "measured transition-band m = {} must be positive",
            params.m
        )));
    }
    let p = params.clone();
    let w_eval = w.clone();
    let eval: Evaluator = Arc::new(move |t: f64, x: Point| {
        let beta = p.tau - (-p.eps2 * p.eps2 * t).exp();
        let base = w_eval.value(t + beta, x).unwrap_or(f64::NAN);
        base + (p.eps2 * p.eps2 * t - p.eps2 * (x[0] - p.offset)).exp()
    });
    let p = params.clone();
    let valid: Validity = Arc::new(move |t: f64, x: Point| {
        if t < 0.0 {
            return false;
        }
        let beta = p.tau - (-p.eps2 * p.eps2 * t).exp();
        let base = match w.value(t + beta, x) {
            Ok(v) => v,
            Err(_) => return false,
        };
        if base >= 1.0 - p.theta {
            return true;
        }
        let e = (p.eps2 * p.eps2 * t - p.eps2 * (x[0] - p.offset)).exp();
        (base <= p.theta / 2.0 && e <= p.theta / 2.0) || x[0] >= p.line(t)
    });
    Ok(BarrierFn::new(
        "exp_tail_super",
        ExpectedSign::Supersolution,
        eval,
        valid,
    ))
}

/// Sub-solution `v(t,x) = w(t - 1 + exp(-eps2² t), x) - exp(eps2² t - eps2(x1 - r))`,
/// valid where the exponential is safely small or `v >= 1 - θ`.
pub fn exp_tail_subsolution(w: Arc<StoredRun>, params: ExpTailParams) -> Result<BarrierFn> {
    if params.eps2 > params.c0 / 4.0 {
        return Err(Error::Barrier("need eps2 <= c0/4".into()));
    }
    if !(params.m > 0.0) {
        return Err(Error::Barrier("measured m must be positive".into()));
    }
    let p = params.clone();
    let w_eval = w.clone();
    let eval: Evaluator = Arc::new(move |t: f64, x: Point| {
        let shift = t - 1.0 + (-p.eps2 * p.eps2 * t).exp();
        let base = w_eval.value(shift, x).unwrap_or(f64::NAN);
        base - (p.eps2 * p.eps2 * t - p.eps2 * (x[0] - p.offset)).exp()
    });
    let p = params.clone();
    let w2 = w.clone();
    let valid: Validity = Arc::new(move |t: f64, x: Point| {
        if t < 0.0 {
            return false;
        }
        if x[0] >= p.line(t) {
            return true;
        }
        let shift = t - 1.0 + (-p.eps2 * p.eps2 * t).exp();
        let base = match w2.value(shift, x) {
            Ok(v) => v,
            Err(_) => return false,
        };
        let v = base - (p.eps2 * p.eps2 * t - p.eps2 * (x[0] - p.offset)).exp();
        v >= 1.0 - p.theta
    });
    Ok(BarrierFn::new(
        "exp_tail_sub",
        ExpectedSign::Subsolution,
        eval,
        valid,
    ))
}

// ---------------------------------------------------------------------------
// Equilibrium-tail supersolution (slab geometry)
// ---------------------------------------------------------------------------

/// `v(t,x) = p(x) + exp(-c (x1 - z - c t)/2)` with
/// `c = max(2 sqrt(sup|f0'|), 1)`; a supersolution of the slab field
/// everywhere, bounding the upper transition's advance.
pub fn equilibrium_tail_supersolution(
    p: Arc<RadialEquilibrium>,
    f0: &ReactionProfile,
    z: f64,
) -> (BarrierFn, f64) {
    let c = (2.0 * f0.sup_deriv().sqrt()).max(1.0);
    let eval: Evaluator = Arc::new(move |t: f64, x: Point| {
        p.value(x[1].abs()) + (-0.5 * c * (x[0] - z - c * t)).exp()
    });
    let valid: Validity = Arc::new(|_t, _x| true);
    (
        BarrierFn::new("equilibrium_tail_super", ExpectedSign::Supersolution, eval, valid),
        c,
    )
}

/// Static bump barrier: `v(t,x) = W(x·e)` (or `W(|x - c|)`) is a subsolution
/// because `ΔW + f0(W) >= margin > 0` away from the favorable kinks.
pub fn bump_subsolution(profile: solver::BumpProfile, shape: solver::BumpShape) -> BarrierFn {
    let eval: Evaluator = Arc::new(move |_t: f64, x: Point| match shape {
        solver::BumpShape::FrontAlongAxis(axis) => profile.value(x[axis]),
        solver::BumpShape::Radial(c) => profile.value((x[0] - c[0]).hypot(x[1] - c[1])),
    });
    let valid: Validity = Arc::new(|_t, _x| true);
    BarrierFn::new("bump_sub", ExpectedSign::Subsolution, eval, valid)
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CertLattice {
    pub spec: GridSpec,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

impl CertLattice {
    pub fn refined(&self) -> Self {
        let mut spec = self.spec.clone();
        spec = GridSpec::new(
            spec.geometry,
            spec.extent.clone(),
            spec.dx / 2.0,
            spec.boundary,
        )
        .expect("refinement keeps extents compatible");
        CertLattice {
            spec,
            t0: self.t0,
            t1: self.t1,
            dt: self.dt / 4.0,
        }
    }

    /// Time-only refinement, for barriers sampling a stored reference run
    /// whose spatial grid is fixed.
    pub fn refined_time(&self) -> Self {
        CertLattice {
            spec: self.spec.clone(),
            t0: self.t0,
            t1: self.t1,
            dt: self.dt / 4.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertReport {
    pub barrier: String,
    pub region: String,
    pub min_residual: f64,
    pub max_residual: f64,
    pub violations: usize,
    /// Largest wrong-signed residual magnitude beyond the tolerance.
    pub worst_violation: f64,
    pub tolerance: f64,
    pub points: usize,
}

impl CertReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Samples the discrete residual of the barrier against the field on the
/// lattice; pass iff the sign matches within `10 (dx² + dt)`.
pub fn certify(barrier: &BarrierFn, field: &ReactionField, lattice: &CertLattice) -> CertReport {
    let spec = &lattice.spec;
    let dx = spec.dx;
    let dt = lattice.dt;
    let inv_dx2 = 1.0 / (dx * dx);
    let tol = 10.0 * (dx * dx + dt);
    let mut min_res = f64::INFINITY;
    let mut max_res = f64::NEG_INFINITY;
    let mut violations = 0usize;
    let mut worst: f64 = 0.0;
    let mut points = 0usize;

    let mut t = lattice.t0;
    while t <= lattice.t1 - dt + 1e-12 {
        for j in 0..spec.n1() {
            for i in 0..spec.n0() {
                let x = spec.coord(i, j);
                if !barrier.is_valid(t, x) {
                    continue;
                }
                let c = barrier.value(t, x);
                if !c.is_finite() {
                    continue;
                }
                let xp = [x[0] + dx, x[1]];
                let xm = [x[0] - dx, x[1]];
                let mut lap =
                    (barrier.value(t, xm) - 2.0 * c + barrier.value(t, xp)) * inv_dx2;
                if spec.n1() > 1 {
                    match spec.geometry {
                        Geometry::Cylinder { d_eff } => {
                            if j == 0 {
                                let up = barrier.value(t, [x[0], dx]);
                                lap += 2.0 * (d_eff as f64 - 1.0) * (up - c) * inv_dx2;
                            } else {
                                let r = x[1];
                                let up = barrier.value(t, [x[0], x[1] + dx]);
                                let dn = barrier.value(t, [x[0], x[1] - dx]);
                                lap += (dn - 2.0 * c + up) * inv_dx2
                                    + (d_eff as f64 - 2.0) / r * (up - dn) / (2.0 * dx);
                            }
                        }
                        _ => {
                            let up = barrier.value(t, [x[0], x[1] + dx]);
                            let dn = barrier.value(t, [x[0], x[1] - dx]);
                            lap += (dn - 2.0 * c + up) * inv_dx2;
                        }
                    }
                }
                let vt = (barrier.value(t + dt, x) - c) / dt;
                let res = vt - lap - field.eval(x, c);
                if !res.is_finite() {
                    continue;
                }
                points += 1;
                min_res = min_res.min(res);
                max_res = max_res.max(res);
                let bad = match barrier.expected_sign {
                    ExpectedSign::Supersolution => (-res - tol).max(0.0),
                    ExpectedSign::Subsolution => (res - tol).max(0.0),
                };
                if bad > 0.0 {
                    violations += 1;
                    worst = worst.max(bad);
                }
            }
        }
        t += dt;
    }
    if points == 0 {
        min_res = 0.0;
        max_res = 0.0;
    }
    CertReport {
        barrier: barrier.name.clone(),
        region: format!(
            "t[{},{}] x{:?} dx={} dt={}",
            lattice.t0, lattice.t1, spec.extent, dx, dt
        ),
        min_residual: min_res,
        max_residual: max_res,
        violations,
        worst_violation: worst,
        tolerance: tol,
        points,
    }
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub barrier: String,
    pub ordered_at_start: bool,
    /// Worst violation of the claimed ordering over all snapshots/nodes in
    /// the barrier's valid region (0 when the ordering holds).
    pub worst_violation: f64,
    pub checked_nodes: usize,
}

impl ComparisonReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.ordered_at_start && self.worst_violation <= tol
    }
}

/// Discrete comparison against a run: supersolutions must dominate the
/// solution at every snapshot (and vice versa), given ordering at the start.
pub fn comparison_check(snaps: &[GridState], barrier: &BarrierFn) -> ComparisonReport {
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    let mut ordered_at_start = true;
    for (si, s) in snaps.iter().enumerate() {
        let spec = &s.spec;
        for (k, &uv) in s.u.iter().enumerate() {
            let x = spec.coord_of(k);
            if !barrier.is_valid(s.t, x) {
                continue;
            }
            let bv = barrier.value(s.t, x);
            if !bv.is_finite() {
                continue;
            }
            let gap = match barrier.expected_sign {
                ExpectedSign::Supersolution => uv - bv,
                ExpectedSign::Subsolution => bv - uv,
            };
            if si == 0 {
                if gap > 1e-12 {
                    ordered_at_start = false;
                }
            } else {
                checked += 1;
                worst = worst.max(gap.max(0.0));
            }
        }
    }
    ComparisonReport {
        barrier: barrier.name.clone(),
        ordered_at_start,
        worst_violation: worst,
        checked_nodes: checked,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;

    #[test]
    fn ramp_meets_constraints() {
        for delta in [0.2, 1.0, 5.0, 40.0] {
            let ramp = RampH::new(delta, 2).unwrap();
            assert!(ramp.max_second_derivative() <= delta / 6.0 * (1.0 + 1e-6));
            assert_eq!(ramp.h(ramp.z1 * 0.5), 0.0);
            assert!((ramp.h_prime(ramp.z2 + 1.0) - 1.0).abs() < 1e-12);
            // h' <= 1 throughout, h continuous at z2
            let mut s = ramp.z1;
            let mut prev_hp = 0.0;
            while s <= ramp.z2 {
                let hp = ramp.h_prime(s);
                assert!(hp <= 1.0 + 1e-9 && hp >= prev_hp - 1e-9);
                prev_hp = hp;
                s += (ramp.z2 - ramp.z1) / 500.0;
            }
        }
    }

    #[test]
    fn constant_one_barrier_certifies_both_signs() {
        let f0 = ReactionProfile::ignition(0.25, 1.0).unwrap();
        let field = ReactionField::homogeneous(f0, 1);
        let eval: Evaluator = Arc::new(|_t, _x| 1.0);
        let valid: Validity = Arc::new(|_t, _x| true);
        let spec = GridSpec::line(0.0, 10.0, 0.1, Boundary::NeumannZeroFlux).unwrap();
        let lat = CertLattice { spec, t0: 0.0, t1: 0.5, dt: 0.05 };
        for sign in [ExpectedSign::Supersolution, ExpectedSign::Subsolution] {
            let b = BarrierFn::new("unit", sign, eval.clone(), valid.clone());
            let rep = certify(&b, &field, &lat);
            assert!(rep.passed(), "{rep:?}");
            assert!(rep.min_residual.abs() < 1e-12 && rep.max_residual.abs() < 1e-12);
        }
    }

    #[test]
    fn flipped_sign_fails_with_violations() {
        // v(t,x) = small stationary hump with f = 0: residual = -Δv has both
        // signs; a genuine supersolution needs Δv <= 0 which fails at the
        // hump's shoulders, so certify must flag the flipped claims.
        let field = ReactionField::homogeneous(ReactionProfile::zero(), 1);
        let eval: Evaluator = Arc::new(|_t, x: Point| 0.5 * (-x[0] * x[0]).exp());
        let valid: Validity = Arc::new(|_t, _x| true);
        let spec = GridSpec::line(-5.0, 5.0, 0.05, Boundary::NeumannZeroFlux).unwrap();
        let lat = CertLattice { spec, t0: 0.0, t1: 0.2, dt: 0.01 };
        let b = BarrierFn::new("hump", ExpectedSign::Supersolution, eval, valid);
        let rep = certify(&b, &field, &lat);
        assert!(!rep.passed());
        assert!(rep.violations > 0);
        let rep2 = certify(&b.flipped(), &field, &lat);
        assert!(!rep2.passed(), "hump is neither a sub- nor a supersolution");
    }

    #[test]
    fn annular_barrier_certifies_and_refines() {
        let f1 = ReactionProfile::ignition(0.25, 4.0).unwrap();
        let delta = 2.0;
        let ab = annular_supersolution(&f1, delta, 2).unwrap();
        assert!(ab.c2 >= speed::shoot_front_speed(&f1, 1e-6).unwrap().speed - 1e-6);
        // residual at |x| <= z1 equals -(c2 + δ/3) U' >= 0: check the sign on
        // a small lattice around the origin and a mid-ramp annulus
        let spec = GridSpec::new(
            Geometry::Plane,
            vec![[-4.0, 4.0], [-4.0, 4.0]],
            0.1,
            Boundary::NeumannZeroFlux,
        )
        .unwrap();
        let lat = CertLattice { spec, t0: -3.0, t1: -1.0, dt: 0.01 };
        let rep = certify(&ab.barrier, &ab.field, &lat);
        assert!(rep.passed(), "coarse: {rep:?}");
        let rep2 = certify(&ab.barrier, &ab.field, &lat.refined());
        assert!(rep2.passed(), "refined: {rep2:?}");
        assert!(
            rep2.worst_violation <= rep.worst_violation / 2.0 + 1e-12,
            "violations must shrink under refinement"
        );
    }

    #[test]
    fn equilibrium_tail_positive_residual() {
        let (field, eq) = crate::reaction::build_slab_field(4, 40.0).unwrap();
        let f0 = field.base.clone();
        let (b, c) = equilibrium_tail_supersolution(eq, &f0, 5.0);
        assert!(c >= 1.0);
        let spec = GridSpec::new(
            Geometry::Cylinder { d_eff: 4 },
            vec![[0.0, 20.0], [0.0, 10.0]],
            0.1,
            Boundary::NeumannZeroFlux,
        )
        .unwrap();
        let lat = CertLattice { spec, t0: 0.0, t1: 0.4, dt: 0.01 };
        let rep = certify(&b, &field, &lat);
        assert!(rep.passed(), "{rep:?}");
        // barrier tends to p(x) far downstream
        let far = b.value(0.0, [200.0, 2.0]);
        let eqv = crate::reaction::build_slab_field(4, 40.0).unwrap().1.value(2.0);
        assert!((far - eqv).abs() < 1e-12);
    }
}
