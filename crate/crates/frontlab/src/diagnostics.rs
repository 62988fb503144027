//! Level-set, width, speed, and envelope diagnostics computed from grid
//! snapshots.
//!
//! Width conventions (super-level sets `Ω_eps = {u >= eps}`):
//! * `width_l(eps)`, eps < 1/2 — sup over `Ω_eps` of the distance to
//!   `Ω_{1-eps}`.
//! * `width_l_high(eps)`, eps > 1/2 — sup over `{u < eps}` of the distance to
//!   `{u < 1-eps}`.
//! * `width_j(eps)` — sup over all nodes of the distance to
//!   `Ω_{1-eps} ∪ {u < eps}`.
//! * `width_l_pair(eps, eps')` — as `width_l` with target `Ω_{eps'}`.
//!
//! Empty-set conventions: the value is 0 when the constrained set is empty
//! and the `Inf` sentinel when the target set is empty while the constrained
//! set is not. Sentinels are explicit enum values, never floating infinities.

use rayon::prelude::*;

use crate::dist::edt_sq;
use crate::grid::{Geometry, GridState};
use crate::reaction::{Point, ReactionField};
use crate::{Error, Result};

/// A width value or the explicit infinity sentinel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WidthValue {
    Finite(f64),
    Inf,
}

impl WidthValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            WidthValue::Finite(v) => Some(v),
            WidthValue::Inf => None,
        }
    }

    pub fn is_inf(self) -> bool {
        matches!(self, WidthValue::Inf)
    }
}

/// Trace cell: a value, the "inf" sentinel, or "nan" (undefined).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceValue {
    Val(f64),
    Inf,
    Undef,
}

impl std::fmt::Display for TraceValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TraceValue::Val(v) => write!(f, "{v:.8e}"),
            TraceValue::Inf => write!(f, "inf"),
            TraceValue::Undef => write!(f, "nan"),
        }
    }
}

impl From<WidthValue> for TraceValue {
    fn from(w: WidthValue) -> Self {
        match w {
            WidthValue::Finite(v) => TraceValue::Val(v),
            WidthValue::Inf => TraceValue::Inf,
        }
    }
}

/// Mask of the super-level set `{u >= eps}`.
pub fn level_mask(state: &GridState, eps: f64) -> Vec<bool> {
    state.u.iter().map(|&v| v >= eps).collect()
}

fn sup_distance_to(state: &GridState, constrained: &[bool], target: &[bool]) -> WidthValue {
    let spec = &state.spec;
    if !constrained.iter().any(|&b| b) {
        return WidthValue::Finite(0.0);
    }
    if !target.iter().any(|&b| b) {
        return WidthValue::Inf;
    }
    let d2 = edt_sq(target, spec.n0(), spec.n1());
    let sup2 = constrained
        .iter()
        .zip(&d2)
        .filter(|(c, _)| **c)
        .map(|(_, &d)| d)
        .fold(0.0f64, f64::max);
    WidthValue::Finite(sup2.sqrt() * spec.dx)
}

/// Transition width from `eps` to `1 - eps` (eps < 1/2).
pub fn width_l(state: &GridState, eps: f64) -> WidthValue {
    assert!(eps > 0.0 && eps < 0.5, "width_l needs eps in (0, 1/2)");
    let lo = level_mask(state, eps);
    let hi = level_mask(state, 1.0 - eps);
    sup_distance_to(state, &lo, &hi)
}

/// Complement-side width for eps > 1/2.
pub fn width_l_high(state: &GridState, eps: f64) -> WidthValue {
    assert!(eps > 0.5 && eps < 1.0, "width_l_high needs eps in (1/2, 1)");
    let below_eps: Vec<bool> = state.u.iter().map(|&v| v < eps).collect();
    let below_lo: Vec<bool> = state.u.iter().map(|&v| v < 1.0 - eps).collect();
    sup_distance_to(state, &below_eps, &below_lo)
}

/// Minimal length of transition to either `eps` or `1 - eps` (eps < 1/2):
/// every node must be within the returned distance of
/// `Ω_{1-eps} ∪ (complement of Ω_eps)`.
pub fn width_j(state: &GridState, eps: f64) -> WidthValue {
    assert!(eps > 0.0 && eps < 0.5, "width_j needs eps in (0, 1/2)");
    let union: Vec<bool> = state.u.iter().map(|&v| v >= 1.0 - eps || v < eps).collect();
    let all = vec![true; state.u.len()];
    sup_distance_to(state, &all, &union)
}

/// Width of the transition from `eps` to `eps'` (eps < eps').
pub fn width_l_pair(state: &GridState, eps: f64, eps_prime: f64) -> WidthValue {
    assert!(
        eps > 0.0 && eps < eps_prime && eps_prime < 1.0,
        "width_l_pair needs 0 < eps < eps' < 1"
    );
    let lo = level_mask(state, eps);
    let hi = level_mask(state, eps_prime);
    sup_distance_to(state, &lo, &hi)
}

// ---------------------------------------------------------------------------
// Radial exponential envelope psi
// ---------------------------------------------------------------------------

/// Radial solution of `Δψ = ζψ` with `ψ(0) = 1`, `ψ'(0) = 0`:
/// `ψ'' + (d-1)/r ψ' = ζψ`. Closed form `cosh(√ζ r)` in 1D, cached RK4
/// integration otherwise, with transparent (uncached) extension past the
/// cached range.
#[derive(Clone, Debug)]
pub struct BesselEnvelope {
    pub zeta: f64,
    pub dim: usize,
    dr: f64,
    psi: Vec<f64>,
    dpsi: Vec<f64>,
}

impl BesselEnvelope {
    pub fn new(zeta: f64, dim: usize, r_max: f64) -> Result<Self> {
        if zeta <= 0.0 || dim == 0 {
            return Err(Error::InvalidParam("envelope needs zeta > 0, dim >= 1".into()));
        }
        let dr = 5e-4;
        let mut env = BesselEnvelope {
            zeta,
            dim,
            dr,
            psi: vec![1.0],
            dpsi: vec![0.0],
        };
        if dim > 1 {
            let n = (r_max.max(1.0) / dr).ceil() as usize;
            env.psi.reserve(n);
            env.dpsi.reserve(n);
            let mut y = (1.0, 0.0);
            for i in 0..n {
                let r = i as f64 * dr;
                y = env.rk4(r, y);
                env.psi.push(y.0);
                env.dpsi.push(y.1);
            }
        }
        Ok(env)
    }

    /// Series start near r = 0 avoids the (d-1)/r singularity:
    /// ψ ≈ 1 + ζr²/(2d) + ζ²r⁴ / (8d(d+2)).
    fn series(&self, r: f64) -> (f64, f64) {
        let d = self.dim as f64;
        let z = self.zeta;
        let psi = 1.0 + z * r * r / (2.0 * d) + z * z * r.powi(4) / (8.0 * d * (d + 2.0));
        let dpsi = z * r / d + z * z * r.powi(3) / (2.0 * d * (d + 2.0));
        (psi, dpsi)
    }

    fn rhs(&self, r: f64, y: (f64, f64)) -> (f64, f64) {
        if r < 1e-12 {
            // symmetric limit: ψ'' = ζψ/d at the origin
            (y.1, self.zeta * y.0 / self.dim as f64)
        } else {
            (y.1, self.zeta * y.0 - (self.dim as f64 - 1.0) / r * y.1)
        }
    }

    fn rk4(&self, r: f64, y: (f64, f64)) -> (f64, f64) {
        if r < 10.0 * self.dr {
            return self.series(r + self.dr);
        }
        let h = self.dr;
        let k1 = self.rhs(r, y);
        let k2 = self.rhs(r + 0.5 * h, (y.0 + 0.5 * h * k1.0, y.1 + 0.5 * h * k1.1));
        let k3 = self.rhs(r + 0.5 * h, (y.0 + 0.5 * h * k2.0, y.1 + 0.5 * h * k2.1));
        let k4 = self.rhs(r + h, (y.0 + h * k3.0, y.1 + h * k3.1));
        (
            y.0 + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            y.1 + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        )
    }

    fn eval(&self, r: f64, deriv: bool) -> f64 {
        assert!(r >= 0.0, "envelope is radial: r >= 0");
        if self.dim == 1 {
            let sz = self.zeta.sqrt();
            return if deriv { sz * (sz * r).sinh() } else { (sz * r).cosh() };
        }
        let q = r / self.dr;
        let i = q.floor() as usize;
        if i + 1 < self.psi.len() {
            let w = q - i as f64;
            let (a, b) = if deriv {
                (self.dpsi[i], self.dpsi[i + 1])
            } else {
                (self.psi[i], self.psi[i + 1])
            };
            return a * (1.0 - w) + b * w;
        }
        // transparent extension beyond the cache
        let last = self.psi.len() - 1;
        let mut y = (self.psi[last], self.dpsi[last]);
        let mut rr = last as f64 * self.dr;
        while rr < r {
            y = self.rk4(rr, y);
            rr += self.dr;
        }
        if deriv {
            y.1
        } else {
            y.0
        }
    }

    pub fn psi(&self, r: f64) -> f64 {
        self.eval(r, false)
    }

    pub fn psi_prime(&self, r: f64) -> f64 {
        self.eval(r, true)
    }

    /// `ψ'(r)/ψ(r)` by direct Riccati integration (no overflow at large r):
    /// `λ' = ζ - (d-1)λ/r - λ²`, `λ(0) = 0`.
    pub fn log_derivative(&self, r: f64) -> f64 {
        if self.dim == 1 {
            let sz = self.zeta.sqrt();
            return sz * (sz * r).tanh();
        }
        let h = 1e-3;
        let d = self.dim as f64;
        let z = self.zeta;
        let rhs = |r: f64, l: f64| -> f64 {
            if r < 1e-9 {
                0.0
            } else {
                z - (d - 1.0) * l / r - l * l
            }
        };
        // series start
        let mut rr = 1e-3;
        let mut l = z * rr / d;
        while rr < r {
            let k1 = rhs(rr, l);
            let k2 = rhs(rr + 0.5 * h, l + 0.5 * h * k1);
            let k3 = rhs(rr + 0.5 * h, l + 0.5 * h * k2);
            let k4 = rhs(rr + h, l + h * k3);
            l += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            rr += h;
        }
        l
    }

    /// Inverse of `ψ` on `[0, ∞)` for `v >= 1`, by bisection.
    pub fn psi_inv(&self, v: f64) -> f64 {
        assert!(v >= 1.0, "psi >= 1 everywhere");
        if v == 1.0 {
            return 0.0;
        }
        let mut hi = 1.0f64;
        while self.psi(hi) < v {
            hi *= 2.0;
            if hi > 1e5 {
                return hi;
            }
        }
        let mut lo = 0.0f64;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.psi(mid) < v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

// ---------------------------------------------------------------------------
// Z, Y, Lambda functionals
// ---------------------------------------------------------------------------

/// `Z_y = inf { |x - y| : u(x) >= 1 - eps0 }`; `Inf` when the set is empty.
pub fn z_y(state: &GridState, y: Point, eps0: f64) -> Result<WidthValue> {
    if !state.spec.contains(y) {
        return Err(Error::InvalidParam(format!("probe {y:?} outside the grid")));
    }
    let mut best = f64::INFINITY;
    let spec = &state.spec;
    for (k, &v) in state.u.iter().enumerate() {
        if v >= 1.0 - eps0 {
            let p = spec.coord_of(k);
            let d = (p[0] - y[0]).hypot(p[1] - y[1]);
            best = best.min(d);
        }
    }
    if best.is_finite() {
        Ok(WidthValue::Finite(best))
    } else {
        Ok(WidthValue::Inf)
    }
}

/// `Y^h_y = sup { ρ : u(x) <= h + ψ(|x-y|)/ψ(ρ) for all x }`, computed as
/// `ψ^{-1}( inf_x ψ(|x-y|) / (u(x) - h)+ )`; `Inf` when `u <= h` everywhere.
pub fn y_h_y(state: &GridState, y: Point, h: f64, env: &BesselEnvelope) -> WidthValue {
    let spec = &state.spec;
    let mut inf = f64::INFINITY;
    for (k, &v) in state.u.iter().enumerate() {
        let excess = v - h;
        if excess > 0.0 {
            let p = spec.coord_of(k);
            let r = (p[0] - y[0]).hypot(p[1] - y[1]);
            let ratio = env.psi(r) / excess;
            if ratio < inf {
                inf = ratio;
            }
        }
    }
    if inf.is_finite() {
        WidthValue::Finite(env.psi_inv(inf.max(1.0)))
    } else {
        WidthValue::Inf
    }
}

/// `Λ^h = sup_y (Z_y - Y^h_y)` over probes on a stride-coarsened sub-grid;
/// probe pairs with a sentinel on either side are skipped.
pub fn lambda_h(
    state: &GridState,
    h: f64,
    env: &BesselEnvelope,
    eps0: f64,
    stride: usize,
) -> TraceValue {
    let spec = &state.spec;
    let stride = stride.max(1);
    // precompute Z for all nodes at once
    let burned = level_mask(state, 1.0 - eps0);
    if !burned.iter().any(|&b| b) {
        return TraceValue::Undef;
    }
    let z2 = edt_sq(&burned, spec.n0(), spec.n1());
    let probes: Vec<usize> = (0..spec.len())
        .filter(|&k| (k % spec.n0()) % stride == 0 && (k / spec.n0()) % stride == 0)
        .collect();
    let best = probes
        .par_iter()
        .map(|&k| {
            let y = spec.coord_of(k);
            let z = z2[k].sqrt() * spec.dx;
            match y_h_y(state, y, h, env) {
                WidthValue::Finite(yv) => z - yv,
                WidthValue::Inf => f64::NEG_INFINITY,
            }
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    if best.is_finite() {
        TraceValue::Val(best)
    } else {
        TraceValue::Undef
    }
}

// ---------------------------------------------------------------------------
// Front positions and speeds
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub enum FrontMode {
    /// Rightmost crossing of the level along a coordinate axis, sub-grid
    /// interpolated (front-like data).
    AxisMax(usize),
    /// Maximal radius of the super-level set around a center (spark-like).
    RadialMax(Point),
}

/// Level-`eps` front position, `None` when the level set is empty.
pub fn front_position(state: &GridState, eps: f64, mode: FrontMode) -> Option<f64> {
    let spec = &state.spec;
    match mode {
        FrontMode::AxisMax(axis) => {
            let mut best: Option<f64> = None;
            let (na, nb) = if axis == 0 {
                (spec.n0(), spec.n1())
            } else {
                (spec.n1(), spec.n0())
            };
            for b in 0..nb {
                // scan from the far end towards the origin of the axis
                for a in (0..na).rev() {
                    let (i, j) = if axis == 0 { (a, b) } else { (b, a) };
                    let v = state.u[spec.idx(i, j)];
                    if v >= eps {
                        let p = spec.coord(i, j)[axis];
                        let pos = if a + 1 < na {
                            let (i2, j2) = if axis == 0 { (a + 1, b) } else { (b, a + 1) };
                            let v2 = state.u[spec.idx(i2, j2)];
                            if v2 < eps && v > v2 {
                                p + spec.dx * (v - eps) / (v - v2)
                            } else {
                                p
                            }
                        } else {
                            p
                        };
                        best = Some(best.map_or(pos, |b: f64| b.max(pos)));
                        break;
                    }
                }
            }
            best
        }
        FrontMode::RadialMax(c) => {
            let mut best: Option<f64> = None;
            for (k, &v) in state.u.iter().enumerate() {
                if v >= eps {
                    let p = spec.coord_of(k);
                    let r = (p[0] - c[0]).hypot(p[1] - c[1]);
                    best = Some(best.map_or(r, |b: f64| b.max(r)));
                }
            }
            best
        }
    }
}

/// Least-squares slope of `(t, x)` samples.
pub fn fit_speed(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let (mut st, mut sx, mut stt, mut stx) = (0.0, 0.0, 0.0, 0.0);
    for &(t, x) in samples {
        st += t;
        sx += x;
        stt += t * t;
        stx += t * x;
    }
    (n * stx - st * sx) / (n * stt - st * st)
}

/// Slope of the front position over the late-time window (fraction of the
/// trace, default semantics: last half for `window_frac = 0.5`). Errors when
/// the window holds < 10 defined positions.
pub fn spreading_speed_fit(trace: &[(f64, Option<f64>)], window_frac: f64) -> Result<f64> {
    let start = ((trace.len() as f64) * (1.0 - window_frac)).floor() as usize;
    let window: Vec<(f64, f64)> = trace[start.min(trace.len())..]
        .iter()
        .filter_map(|(t, x)| x.map(|x| (*t, x)))
        .collect();
    if window.len() < 10 {
        return Err(Error::Scenario(format!(
            "speed fit window has {} defined front positions (need >= 10)",
            window.len()
        )));
    }
    Ok(fit_speed(&window))
}

// ---------------------------------------------------------------------------
// Global mean speed check
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Default)]
pub struct MeanSpeedReport {
    pub pairs: usize,
    pub passed: usize,
    /// Worst signed margin of the first inclusion, in `u` units
    /// (`min u(t+tau) - (1-eps)` over the dilated set); >= 0 passes.
    pub worst_margin_lo: f64,
    pub first_failures: usize,
    pub second_failures: usize,
}

impl MeanSpeedReport {
    pub fn all_passed(&self) -> bool {
        self.pairs > 0 && self.passed == self.pairs
    }
}

/// Verifies both inclusions of the global-mean-speed contract on every
/// admissible snapshot pair `(t, t + tau)`:
/// `B_{(c_lo-δ)τ}(Ω_eps(t)) ⊆ Ω_{1-eps}(t+τ)` and
/// `Ω_eps(t+τ) ⊆ B_{(c_hi+δ)τ}(Ω_{1-eps}(t))`.
/// Admissible pairs have compatible spacing and a nonempty `Ω_{1-eps}(t)`.
pub fn global_mean_speed_check(
    snaps: &[GridState],
    eps: f64,
    c_lo: f64,
    c_hi: f64,
    delta: f64,
    tau: f64,
) -> Result<MeanSpeedReport> {
    if snaps.len() < 2 {
        return Err(Error::Scenario("mean-speed check needs >= 2 snapshots".into()));
    }
    let spacing = snaps[1].t - snaps[0].t;
    let k = tau / spacing;
    if (k - k.round()).abs() > 1e-9 || k.round() < 1.0 {
        return Err(Error::Scenario(format!(
            "snapshot spacing {spacing} does not divide tau = {tau}"
        )));
    }
    let k = k.round() as usize;
    let mut rep = MeanSpeedReport {
        worst_margin_lo: f64::INFINITY,
        ..Default::default()
    };
    for a in 0..snaps.len().saturating_sub(k) {
        let b = a + k;
        let s0 = &snaps[a];
        let s1 = &snaps[b];
        let spec = &s0.spec;
        let hi_mask0 = level_mask(s0, 1.0 - eps);
        if !hi_mask0.iter().any(|&m| m) {
            continue;
        }
        rep.pairs += 1;
        let mut ok = true;

        // first inclusion: dilate Ω_eps(t) by (c_lo - δ)τ
        let lo_mask0 = level_mask(s0, eps);
        let r1 = (c_lo - delta) * tau;
        if lo_mask0.iter().any(|&m| m) && r1 > 0.0 {
            let d2 = edt_sq(&lo_mask0, spec.n0(), spec.n1());
            for (kx, &dd) in d2.iter().enumerate() {
                if dd.sqrt() * spec.dx <= r1 {
                    let margin = s1.u[kx] - (1.0 - eps);
                    rep.worst_margin_lo = rep.worst_margin_lo.min(margin);
                    if margin < 0.0 {
                        ok = false;
                    }
                }
            }
            if !ok {
                rep.first_failures += 1;
            }
        }

        // second inclusion: Ω_eps(t+τ) within (c_hi + δ)τ of Ω_{1-eps}(t)
        let r2 = (c_hi + delta) * tau;
        let d2 = edt_sq(&hi_mask0, spec.n0(), spec.n1());
        let lo_mask1 = level_mask(s1, eps);
        let mut second_ok = true;
        for (kx, &m) in lo_mask1.iter().enumerate() {
            if m && d2[kx].sqrt() * spec.dx > r2 {
                second_ok = false;
                break;
            }
        }
        if !second_ok {
            rep.second_failures += 1;
            ok = false;
        }
        if ok {
            rep.passed += 1;
        }
    }
    if rep.worst_margin_lo == f64::INFINITY {
        rep.worst_margin_lo = 0.0;
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Pockets and equilibrium integrals
// ---------------------------------------------------------------------------

/// Number of connected components of `{u < eps}` that do not touch the grid
/// boundary (unburned pockets enclosed behind the leading edge).
pub fn pocket_count(state: &GridState, eps: f64) -> usize {
    let spec = &state.spec;
    let n0 = spec.n0();
    let n1 = spec.n1();
    let cold: Vec<bool> = state.u.iter().map(|&v| v < eps).collect();
    let mut seen = vec![false; cold.len()];
    let mut stack = Vec::new();
    let mut count = 0usize;
    for start in 0..cold.len() {
        if !cold[start] || seen[start] {
            continue;
        }
        // flood the component, tracking boundary contact
        let mut touches = false;
        stack.push(start);
        seen[start] = true;
        while let Some(k) = stack.pop() {
            let (i, j) = (k % n0, k / n0);
            if i == 0 || i == n0 - 1 || (n1 > 1 && (j == 0 || j == n1 - 1)) {
                touches = true;
            }
            let mut push = |kk: usize| {
                if cold[kk] && !seen[kk] {
                    seen[kk] = true;
                    stack.push(kk);
                }
            };
            if i > 0 {
                push(k - 1);
            }
            if i + 1 < n0 {
                push(k + 1);
            }
            if j > 0 {
                push(k - n0);
            }
            if j + 1 < n1 {
                push(k + n0);
            }
        }
        if !touches {
            count += 1;
        }
    }
    count
}

fn unit_sphere_area(d: usize) -> f64 {
    // |∂B_1| in R^d for the small d used here
    match d {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        4 => 2.0 * std::f64::consts::PI * std::f64::consts::PI,
        _ => {
            // Γ(d/2) via the double-factorial forms would do; not needed
            panic!("unit_sphere_area: unsupported dimension {d}")
        }
    }
}

/// Discrete `∫ |x|^{2-d} f(x, u(x)) dx` on a cylinder grid (d = d_eff),
/// with volume element `σ_{m}(1) r^{m-1} dr dx1`, m = d_eff - 1.
pub fn weighted_reaction_integral(state: &GridState, field: &ReactionField) -> Result<f64> {
    let spec = &state.spec;
    let d_eff = match spec.geometry {
        Geometry::Cylinder { d_eff } => d_eff,
        _ => {
            return Err(Error::Geometry(
                "weighted reaction integral needs a cylinder grid".into(),
            ))
        }
    };
    let m = d_eff - 1;
    let sigma = unit_sphere_area(m);
    let mut acc = 0.0;
    for j in 0..spec.n1() {
        let r = j as f64 * spec.dx;
        // trapezoid weights on the axes
        let wj = if j == 0 || j == spec.n1() - 1 { 0.5 } else { 1.0 };
        for i in 0..spec.n0() {
            let wi = if i == 0 || i == spec.n0() - 1 { 0.5 } else { 1.0 };
            let p = spec.coord(i, j);
            let rho = p[0].hypot(r);
            if rho < 1e-12 {
                continue; // zero volume weight at the origin node
            }
            let f = field.eval(p, state.u[spec.idx(i, j)]);
            acc += wi * wj * rho.powf(2.0 - d_eff as f64) * f * sigma * r.powi(m as i32 - 1)
                * spec.dx
                * spec.dx;
        }
    }
    Ok(acc)
}

/// Bound `(d-2)·|∂B_1|` in `ℝ^d` for the equilibrium integral.
pub fn equilibrium_integral_bound(d_eff: usize) -> f64 {
    (d_eff as f64 - 2.0) * unit_sphere_area(d_eff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Boundary, GridSpec};
    use rand::{Rng, SeedableRng};
    use std::sync::Arc;

    fn ramp_state(d_len: f64, dx: f64) -> GridState {
        // u(x) = clamp(-x/D + 1, 0, 1) on [0, 3D]: level eps sits at x = D(1-eps)
        let spec = GridSpec::line(0.0, 3.0 * d_len, dx, Boundary::NeumannZeroFlux).unwrap();
        GridState::from_fn(Arc::new(spec), move |p| (1.0 - p[0] / d_len).clamp(0.0, 1.0))
    }

    #[test]
    fn width_constants() {
        let spec = GridSpec::line(0.0, 4.0, 0.5, Boundary::NeumannZeroFlux).unwrap();
        let ones = GridState::constant(Arc::new(spec.clone()), 1.0);
        let zeros = GridState::constant(Arc::new(spec), 0.0);
        assert_eq!(width_l(&ones, 0.25), WidthValue::Finite(0.0));
        assert_eq!(width_l_high(&zeros, 0.75), WidthValue::Finite(0.0));
        assert_eq!(width_j(&zeros, 0.25), WidthValue::Finite(0.0));
        assert_eq!(width_j(&ones, 0.25), WidthValue::Finite(0.0));
    }

    #[test]
    fn width_inf_sentinel() {
        let spec = GridSpec::line(0.0, 4.0, 0.5, Boundary::NeumannZeroFlux).unwrap();
        let mid = GridState::constant(Arc::new(spec), 0.25);
        // Ω_{0.25} is everything, Ω_{0.75} empty
        assert!(width_l(&mid, 0.25).is_inf());
    }

    #[test]
    fn ramp_widths_match_geometry() {
        let d = 8.0;
        let dx = 0.1;
        let s = ramp_state(d, dx);
        // distance from the u = 0.25 locus (x = 0.75 D) to the 0.75 locus (0.25 D)
        let w = width_l(&s, 0.25).finite().unwrap();
        assert!((w - d / 2.0).abs() <= dx + 1e-12, "w = {w}");
        let wh = width_l_high(&s, 0.75).finite().unwrap();
        assert!((wh - d / 2.0).abs() <= dx + 1e-12, "wh = {wh}");
        let wp = width_l_pair(&s, 0.25, 0.75).finite().unwrap();
        assert!((wp - d / 2.0).abs() <= dx + 1e-12);
    }

    #[test]
    fn plateau_j_width() {
        // long plateau at 1/2 of length D: every plateau point is within
        // ~D/2 of the transition union; J ≈ D/2
        let d = 10.0;
        let dx = 0.1;
        let spec = GridSpec::line(0.0, 30.0, dx, Boundary::NeumannZeroFlux).unwrap();
        let s = GridState::from_fn(Arc::new(spec), move |p| {
            let x = p[0];
            if x < 8.0 {
                1.0
            } else if x < 8.0 + 1.0 {
                1.0 - 0.5 * (x - 8.0)
            } else if x < 9.0 + d {
                0.5
            } else if x < 10.0 + d {
                0.5 - 0.5 * (x - 9.0 - d)
            } else {
                0.0
            }
        });
        let j = width_j(&s, 0.25).finite().unwrap();
        assert!((j - d / 2.0).abs() <= 1.0, "J = {j}");
        let l = width_l(&s, 0.25).finite().unwrap();
        assert!(j <= l + 1e-12, "J = {j} must not exceed L = {l}");
    }

    #[test]
    fn widths_match_brute_force_oracle() {
        // criterion-9 style equivalence on random 32² fields
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let spec = GridSpec::new(
            crate::grid::Geometry::Plane,
            vec![[0.0, 3.1], [0.0, 3.1]],
            0.1,
            Boundary::NeumannZeroFlux,
        )
        .unwrap();
        let spec = Arc::new(spec);
        for _ in 0..3 {
            let s = GridState {
                t: 0.0,
                u: (0..spec.len()).map(|_| rng.gen_range(0.0..1.0)).collect(),
                spec: spec.clone(),
            };
            for eps in [0.2, 0.4] {
                let fast = width_l(&s, eps);
                let slow = brute_width(&s, eps, 1.0 - eps);
                match (fast, slow) {
                    (WidthValue::Finite(a), WidthValue::Finite(b)) => {
                        assert!((a - b).abs() <= 1e-12 * b.max(1.0))
                    }
                    (a, b) => assert_eq!(a, b),
                }
            }
        }
    }

    fn brute_width(s: &GridState, eps: f64, target: f64) -> WidthValue {
        let spec = &s.spec;
        let cons: Vec<usize> = (0..s.u.len()).filter(|&k| s.u[k] >= eps).collect();
        let tgt: Vec<usize> = (0..s.u.len()).filter(|&k| s.u[k] >= target).collect();
        if cons.is_empty() {
            return WidthValue::Finite(0.0);
        }
        if tgt.is_empty() {
            return WidthValue::Inf;
        }
        let mut sup = 0.0f64;
        for &a in &cons {
            let pa = spec.coord_of(a);
            let mut best = f64::INFINITY;
            for &b in &tgt {
                let pb = spec.coord_of(b);
                best = best.min((pa[0] - pb[0]).hypot(pa[1] - pb[1]));
            }
            sup = sup.max(best);
        }
        WidthValue::Finite(sup)
    }

    #[test]
    fn width_l_monotone_in_eps() {
        let s = ramp_state(6.0, 0.1);
        let mut prev = f64::INFINITY;
        for eps in [0.05, 0.1, 0.2, 0.3, 0.45] {
            let w = width_l(&s, eps).finite().unwrap();
            assert!(w <= prev + 1e-12, "L not non-increasing in eps");
            prev = w;
        }
    }

    #[test]
    fn envelope_matches_closed_forms() {
        // d = 1: cosh; d = 3: sinh(r)/r for zeta = 1
        let e1 = BesselEnvelope::new(4.0, 1, 10.0).unwrap();
        assert!((e1.psi(1.0) - 2f64.cosh()).abs() < 1e-12);
        let e3 = BesselEnvelope::new(1.0, 3, 60.0).unwrap();
        let mut r = 0.1f64;
        while r <= 50.0 {
            let exact = r.sinh() / r;
            let got = e3.psi(r);
            assert!(
                ((got - exact) / exact).abs() < 1e-6,
                "r = {r}: {got} vs {exact}"
            );
            r += 1.7;
        }
        // psi, psi' positive on r > 0
        for r in [0.5, 3.0, 20.0] {
            assert!(e3.psi(r) > 0.0 && e3.psi_prime(r) > 0.0);
        }
        assert_eq!(e3.psi(0.0), 1.0);
        assert_eq!(e3.psi_prime(0.0), 0.0);
    }

    #[test]
    fn envelope_log_derivative_limit() {
        let e1 = BesselEnvelope::new(1.0, 1, 60.0).unwrap();
        assert!((e1.log_derivative(50.0) - 1.0).abs() < 1e-3);
        // d = 3, zeta = 1: λ = coth r - 1/r approaches 1 like 1/r
        let e3 = BesselEnvelope::new(1.0, 3, 60.0).unwrap();
        let l = e3.log_derivative(40.0);
        let exact = 1.0 / 40f64.tanh() - 1.0 / 40.0;
        assert!((l - exact).abs() < 1e-6, "{l} vs {exact}");
    }

    #[test]
    fn envelope_extends_past_cache() {
        let e = BesselEnvelope::new(1.0, 2, 5.0).unwrap();
        // beyond the cached range: still positive, increasing
        let a = e.psi(6.0);
        let b = e.psi(7.0);
        assert!(b > a && a > e.psi(5.0));
    }

    #[test]
    fn z_and_y_functionals() {
        let spec = GridSpec::line(0.0, 40.0, 0.1, Boundary::NeumannZeroFlux).unwrap();
        let spec = Arc::new(spec);
        let ones = GridState::constant(spec.clone(), 1.0);
        let zeros = GridState::constant(spec.clone(), 0.0);
        assert_eq!(z_y(&ones, [5.0, 0.0], 0.1).unwrap(), WidthValue::Finite(0.0));
        assert!(z_y(&zeros, [5.0, 0.0], 0.1).unwrap().is_inf());
        assert!(z_y(&zeros, [500.0, 0.0], 0.1).is_err());

        let env = BesselEnvelope::new(1.0, 1, 80.0).unwrap();
        assert!(y_h_y(&zeros, [5.0, 0.0], 0.0, &env).is_inf());
        // equality case: u(x) = ψ(|x-y|)/ψ(10) gives Y = 10
        let y0 = [20.0, 0.0];
        let cap = GridState::from_fn(spec.clone(), |p| {
            env.psi((p[0] - y0[0]).abs()) / env.psi(10.0)
        });
        match y_h_y(&cap, y0, 0.0, &env) {
            WidthValue::Finite(v) => assert!((v - 10.0).abs() < 0.05, "Y = {v}"),
            WidthValue::Inf => panic!("unexpected sentinel"),
        }
        // Λ on the all-ones state: Z = 0 everywhere, so Λ <= 0
        match lambda_h(&ones, 0.0, &env, 0.1, 4) {
            TraceValue::Val(v) => assert!(v <= 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fit_speed_slope() {
        let samples: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, 3.0 + 2.5 * i as f64)).collect();
        assert!((fit_speed(&samples) - 2.5).abs() < 1e-12);
        let trace: Vec<(f64, Option<f64>)> = samples.iter().map(|&(t, x)| (t, Some(x))).collect();
        assert!((spreading_speed_fit(&trace, 0.5).unwrap() - 2.5).abs() < 1e-12);
        let stationary: Vec<(f64, Option<f64>)> = (0..20).map(|i| (i as f64, Some(7.0))).collect();
        assert!(spreading_speed_fit(&stationary, 0.5).unwrap().abs() < 1e-12);
        let sparse: Vec<(f64, Option<f64>)> = (0..6).map(|i| (i as f64, Some(1.0))).collect();
        assert!(spreading_speed_fit(&sparse, 0.5).is_err());
    }

    #[test]
    fn mean_speed_check_trivial_pass() {
        let spec = Arc::new(GridSpec::line(0.0, 10.0, 0.5, Boundary::NeumannZeroFlux).unwrap());
        let snaps: Vec<GridState> = (0..5)
            .map(|i| {
                let mut s = GridState::constant(spec.clone(), 1.0);
                s.t = i as f64;
                s
            })
            .collect();
        let rep = global_mean_speed_check(&snaps, 0.25, 1.0, 1.0, 0.1, 2.0).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
        // incompatible tau rejected
        assert!(global_mean_speed_check(&snaps, 0.25, 1.0, 1.0, 0.1, 1.5).is_err());
    }

    #[test]
    fn pocket_counting() {
        let spec = GridSpec::new(
            crate::grid::Geometry::Plane,
            vec![[0.0, 10.0], [0.0, 10.0]],
            0.5,
            Boundary::NeumannZeroFlux,
        )
        .unwrap();
        let s = GridState::from_fn(Arc::new(spec), |p| {
            let d1 = (p[0] - 3.0).hypot(p[1] - 3.0);
            let d2 = (p[0] - 7.0).hypot(p[1] - 7.0);
            if d1 < 1.0 || d2 < 1.0 {
                0.0
            } else {
                1.0
            }
        });
        assert_eq!(pocket_count(&s, 0.5), 2);
        let all_hot = GridState::constant(s.spec.clone(), 1.0);
        assert_eq!(pocket_count(&all_hot, 0.5), 0);
    }
}
