//! Reaction profiles `f0(u)` and spatially inhomogeneous fields `f(x,u)`.
//!
//! Profiles are closed-form families (plus tabulated data) that vanish at
//! `u = 0` and at the top equilibrium; fields modulate a base profile in
//! space. Out-of-range `u` always evaluates to zero, which is the common
//! extension of both the clamped and the signed conventions because every
//! profile vanishes at the ends of its range.

use std::sync::Arc;

use crate::{Error, Result};

/// A spatial point. 1D geometries use only the first component.
pub type Point = [f64; 2];

pub fn norm(x: Point) -> f64 {
    x[0].hypot(x[1])
}

/// Step used for dense `u`-sampling (Lipschitz estimates, `alpha_f` scans).
pub const U_GRID_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReactionKind {
    Ignition,
    Monostable,
    Kpp,
    Bistable,
    Tabulated,
}

#[derive(Clone, Debug)]
pub struct Tabulated {
    /// Strictly increasing sample abscissae, `us[0] = 0`.
    pub us: Vec<f64>,
    pub fs: Vec<f64>,
    /// Uniform segment index: `seg[k]` is the table segment containing
    /// `k · seg_step`, making lookups O(1) without changing values.
    seg: Vec<u32>,
    seg_step: f64,
}

impl Tabulated {
    pub fn new(us: Vec<f64>, fs: Vec<f64>) -> Self {
        let n_cells = 8192usize;
        let u_max = *us.last().unwrap();
        let seg_step = u_max / n_cells as f64;
        let mut seg = Vec::with_capacity(n_cells + 2);
        let mut lo = 0usize;
        for k in 0..=n_cells + 1 {
            let u = (k as f64 * seg_step).min(u_max);
            while lo + 2 < us.len() && us[lo + 1] <= u {
                lo += 1;
            }
            seg.push(lo as u32);
        }
        Tabulated { us, fs, seg, seg_step }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        let n = self.us.len();
        if u <= self.us[0] || u >= self.us[n - 1] {
            return 0.0;
        }
        let k = ((u / self.seg_step) as usize).min(self.seg.len() - 1);
        let mut lo = self.seg[k] as usize;
        while lo + 2 < n && self.us[lo + 1] <= u {
            lo += 1;
        }
        let w = (u - self.us[lo]) / (self.us[lo + 1] - self.us[lo]);
        self.fs[lo] + w * (self.fs[lo + 1] - self.fs[lo])
    }
}

/// Closed-form profile shapes. All vanish outside their `u`-range.
#[derive(Clone, Debug)]
pub enum Shape {
    Zero,
    /// `amp · u(1-u)` on (0,1).
    Kpp { amp: f64 },
    /// `amp · (u-theta0)(1-u)` on (theta0,1) — constant ignition temperature.
    Ignition { theta0: f64, amp: f64 },
    /// `amp · u(1-u)(u-theta0)` on (theta0,1).
    IgnitionKppCut { theta0: f64, amp: f64 },
    /// `amp · (u-theta0)²(1-u)` on (theta0,1) — degenerate corner at theta0.
    IgnitionBump { theta0: f64, amp: f64 },
    /// `amp · u(1-u)(u-theta0)` on (0,1); negative on (0,theta0).
    BistableCubic { theta0: f64, amp: f64 },
    /// Two-step reaction: zeros on [0,1/4] ∪ [1/2,3/4] ∪ {1}, bumps
    /// `amp_low·b(u)` on (1/4,1/2) and `amp_high·b(u-1/2)` on (3/4,1),
    /// with `b(w) = (w-1/4)²(1/2-w)`.
    TwoStep { amp_low: f64, amp_high: f64 },
    Table(Arc<Tabulated>),
}

fn two_step_bump(w: f64) -> f64 {
    if w <= 0.25 || w >= 0.5 {
        0.0
    } else {
        (w - 0.25) * (w - 0.25) * (0.5 - w)
    }
}

/// A homogeneous reaction profile together with its structural metadata.
#[derive(Clone, Debug)]
pub struct ReactionProfile {
    pub kind: ReactionKind,
    pub shape: Shape,
    /// Sampled Lipschitz constant, floored at 1.
    lipschitz: f64,
    /// Half-width of the flat zone at u=0 / monotone zone at u=1, capped at 1/3.
    theta_flat: f64,
    /// Upper end of the u-range (1 for closed forms, table end otherwise).
    u_max: f64,
}

impl ReactionProfile {
    fn build(kind: ReactionKind, shape: Shape) -> Self {
        let u_max = match &shape {
            Shape::Table(t) => *t.us.last().unwrap(),
            _ => 1.0,
        };
        let mut p = ReactionProfile {
            kind,
            shape,
            lipschitz: 1.0,
            theta_flat: 0.0,
            u_max,
        };
        p.lipschitz = p.sample_lipschitz().max(1.0);
        p.theta_flat = p.sample_theta_flat();
        p
    }

    pub fn zero() -> Self {
        Self::build(ReactionKind::Ignition, Shape::Zero)
    }

    pub fn kpp(amp: f64) -> Result<Self> {
        if amp <= 0.0 {
            return Err(Error::InvalidParam("kpp amplitude must be > 0".into()));
        }
        Ok(Self::build(ReactionKind::Kpp, Shape::Kpp { amp }))
    }

    pub fn ignition(theta0: f64, amp: f64) -> Result<Self> {
        check_theta0(theta0)?;
        Ok(Self::build(
            ReactionKind::Ignition,
            Shape::Ignition { theta0, amp },
        ))
    }

    pub fn ignition_kpp_cut(theta0: f64, amp: f64) -> Result<Self> {
        check_theta0(theta0)?;
        Ok(Self::build(
            ReactionKind::Ignition,
            Shape::IgnitionKppCut { theta0, amp },
        ))
    }

    pub fn ignition_bump(theta0: f64, amp: f64) -> Result<Self> {
        check_theta0(theta0)?;
        Ok(Self::build(
            ReactionKind::Ignition,
            Shape::IgnitionBump { theta0, amp },
        ))
    }

    pub fn bistable(theta0: f64, amp: f64) -> Result<Self> {
        check_theta0(theta0)?;
        Ok(Self::build(
            ReactionKind::Bistable,
            Shape::BistableCubic { theta0, amp },
        ))
    }

    pub fn two_step(amp_low: f64, amp_high: f64) -> Result<Self> {
        if amp_low <= 0.0 || amp_high <= 0.0 {
            return Err(Error::InvalidParam("two-step amplitudes must be > 0".into()));
        }
        Ok(Self::build(
            ReactionKind::Ignition,
            Shape::TwoStep { amp_low, amp_high },
        ))
    }

    /// Tabulated profile from `(u, f0(u))` samples. Requires strictly
    /// increasing `us` starting at 0, with `f0` vanishing at both ends.
    pub fn from_table(us: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if us.len() != fs.len() || us.len() < 2 {
            return Err(Error::InvalidParam("table needs >= 2 matching rows".into()));
        }
        if us[0] != 0.0 {
            return Err(Error::InvalidParam("table must start at u = 0".into()));
        }
        for w in us.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidParam("table u-column must be strictly increasing".into()));
            }
        }
        if fs[0] != 0.0 || *fs.last().unwrap() != 0.0 {
            return Err(Error::InvalidParam("table must vanish at both ends".into()));
        }
        let tab = Tabulated::new(us, fs);
        Ok(Self::build(ReactionKind::Tabulated, Shape::Table(Arc::new(tab))))
    }

    /// Parse the two-column CSV form: header `u,f0`, strictly increasing `u`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "u,f0" => {}
            other => {
                return Err(Error::InvalidParam(format!(
                    "tabulated CSV must start with header `u,f0`, got {other:?}"
                )))
            }
        }
        let mut us = Vec::new();
        let mut fs = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let (u, f) = match (cols.next(), cols.next(), cols.next()) {
                (Some(u), Some(f), None) => (u, f),
                _ => {
                    return Err(Error::InvalidParam(format!(
                        "CSV row {} must have exactly two columns",
                        i + 2
                    )))
                }
            };
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse()
                    .map_err(|_| Error::InvalidParam(format!("bad number {s:?} in CSV row {}", i + 2)))
            };
            us.push(parse(u)?);
            fs.push(parse(f)?);
        }
        Self::from_table(us, fs)
    }

    /// The two-step terrace profile: `f(0.8) = 2 f(0.3)` (upper bump doubled).
    pub fn terrace(c_scale: f64) -> Result<Self> {
        Self::two_step(c_scale, 2.0 * c_scale)
    }

    /// Raw evaluation; zero outside the profile's `u`-range.
    pub fn eval(&self, u: f64) -> f64 {
        match &self.shape {
            Shape::Zero => 0.0,
            Shape::Kpp { amp } => {
                if u <= 0.0 || u >= 1.0 {
                    0.0
                } else {
                    amp * u * (1.0 - u)
                }
            }
            Shape::Ignition { theta0, amp } => {
                if u <= *theta0 || u >= 1.0 {
                    0.0
                } else {
                    amp * (u - theta0) * (1.0 - u)
                }
            }
            Shape::IgnitionKppCut { theta0, amp } => {
                if u <= *theta0 || u >= 1.0 {
                    0.0
                } else {
                    amp * u * (1.0 - u) * (u - theta0)
                }
            }
            Shape::IgnitionBump { theta0, amp } => {
                if u <= *theta0 || u >= 1.0 {
                    0.0
                } else {
                    amp * (u - theta0) * (u - theta0) * (1.0 - u)
                }
            }
            Shape::BistableCubic { theta0, amp } => {
                if u <= 0.0 || u >= 1.0 {
                    0.0
                } else {
                    amp * u * (1.0 - u) * (u - theta0)
                }
            }
            Shape::TwoStep { amp_low, amp_high } => {
                if u < 0.5 {
                    amp_low * two_step_bump(u)
                } else {
                    amp_high * two_step_bump(u - 0.5)
                }
            }
            Shape::Table(t) => t.eval(u),
        }
    }

    /// Rescale the amplitude by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let shape = match &self.shape {
            Shape::Zero => Shape::Zero,
            Shape::Kpp { amp } => Shape::Kpp { amp: amp * lambda },
            Shape::Ignition { theta0, amp } => Shape::Ignition { theta0: *theta0, amp: amp * lambda },
            Shape::IgnitionKppCut { theta0, amp } => Shape::IgnitionKppCut { theta0: *theta0, amp: amp * lambda },
            Shape::IgnitionBump { theta0, amp } => Shape::IgnitionBump { theta0: *theta0, amp: amp * lambda },
            Shape::BistableCubic { theta0, amp } => Shape::BistableCubic { theta0: *theta0, amp: amp * lambda },
            Shape::TwoStep { amp_low, amp_high } => Shape::TwoStep { amp_low: amp_low * lambda, amp_high: amp_high * lambda },
            Shape::Table(t) => Shape::Table(Arc::new(Tabulated::new(
                t.us.clone(),
                t.fs.iter().map(|f| f * lambda).collect(),
            ))),
        };
        Self::build(self.kind, shape)
    }

    /// Ignition temperature when the profile has one.
    pub fn theta0(&self) -> Option<f64> {
        match &self.shape {
            Shape::Ignition { theta0, .. }
            | Shape::IgnitionKppCut { theta0, .. }
            | Shape::IgnitionBump { theta0, .. }
            | Shape::BistableCubic { theta0, .. } => Some(*theta0),
            Shape::TwoStep { .. } => Some(0.25),
            Shape::Table(t) => {
                // first u below which the table vanishes identically
                let mut th = 0.0;
                for (u, f) in t.us.iter().zip(&t.fs) {
                    if *f > 0.0 {
                        break;
                    }
                    th = *u;
                }
                if th > 0.0 {
                    Some(th)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn theta_flat(&self) -> f64 {
        self.theta_flat
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    /// `∫_0^{u_max} f0(u) du` on the dense u-grid (trapezoid).
    pub fn integral(&self) -> f64 {
        let n = (self.u_max / U_GRID_STEP).ceil() as usize;
        let h = self.u_max / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let a = self.eval(i as f64 * h);
            let b = self.eval((i + 1) as f64 * h);
            acc += 0.5 * (a + b) * h;
        }
        acc
    }

    /// Bistable spreading flag: `∫_0^{theta1} f0 > 0`.
    pub fn is_spreading_positive(&self) -> bool {
        self.integral() > 0.0
    }

    /// Sampled `sup |f0'|` over the u-range.
    pub fn sup_deriv(&self) -> f64 {
        let n = (self.u_max / U_GRID_STEP).ceil() as usize;
        let h = self.u_max / n as f64;
        let mut sup: f64 = 0.0;
        let mut prev = self.eval(0.0);
        for i in 1..=n {
            let cur = self.eval(i as f64 * h);
            sup = sup.max(((cur - prev) / h).abs());
            prev = cur;
        }
        sup
    }

    fn sample_lipschitz(&self) -> f64 {
        self.sup_deriv()
    }

    fn sample_theta_flat(&self) -> f64 {
        // flat zone at 0
        let n = (self.u_max / U_GRID_STEP).ceil() as usize;
        let h = self.u_max / n as f64;
        let mut flat0 = 0.0;
        for i in 0..=n {
            let u = i as f64 * h;
            if self.eval(u) != 0.0 {
                break;
            }
            flat0 = u;
        }
        // monotone non-increasing zone at the top
        let mut mono = 0.0;
        let mut prev = self.eval(self.u_max);
        for i in 1..=n {
            let u = self.u_max - i as f64 * h;
            let cur = self.eval(u);
            if cur < prev - 1e-14 {
                break;
            }
            prev = cur;
            mono = self.u_max - u;
        }
        flat0.min(mono).min(1.0 / 3.0)
    }
}

fn check_theta0(theta0: f64) -> Result<()> {
    if theta0 <= 0.0 || theta0 >= 1.0 {
        return Err(Error::InvalidParam(format!("theta0 = {theta0} must lie in (0,1)")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Radial equilibrium for the slab construction
// ---------------------------------------------------------------------------

/// Radially decreasing equilibrium `q(ρ)` in `ℝ^m` (m >= 3): harmonic tail
/// `3^{m-3} ρ^{2-m}` for ρ >= 3, and an inner cap with `q(B_1) ⊂ (2/3, 3/4)`
/// and `Δ_m q < 0` on ρ < 3. Satisfies `Δ_m q + f0(q) = 0` with the induced
/// ignition profile `f0` (theta0 = 1/3).
///
/// The cap is built from the Laplacian side: `Δq = -g` with a hand-shaped
/// positive source `g` vanishing to second order at ρ = 3, so monotonicity
/// and concavity hold by construction:
///   `q'(ρ) = -ρ^{1-m} ∫_0^ρ s^{m-1} g(s) ds`.
/// The tail-slope match pins `∫_0^3 s^{m-1} g = 3^{m-3}(m-2)` (which also
/// makes q'' and q''' continuous, g having a double zero at 3), and the
/// bump center of `g` is tuned so `q(0) ≈ 0.71`.
#[derive(Clone, Debug)]
pub struct RadialEquilibrium {
    pub m: usize,
    tail_coef: f64,
    // analytic source g(ρ) = gamma (1-(ρ/3)²)² [eps + exp(-((ρ²-a²)/w)²)]
    gamma: f64,
    g_eps: f64,
    g_a: f64,
    g_w: f64,
    // dense tables of q, q', and I(ρ) = ∫_0^ρ s^{m-1} g on [0, 3]
    step: f64,
    q: Vec<f64>,
    dq: Vec<f64>,
}

const EQ_EPS: f64 = 0.02;

impl RadialEquilibrium {
    pub fn new(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidParam(format!(
                "radial equilibrium needs m >= 3 (got {m}); no such equilibrium exists below"
            )));
        }
        // tune the bump center so q(0) lands on the target, then make sure
        // the whole unit ball stays above 2/3
        for target in [0.71, 0.72, 0.73, 0.74] {
            let mut lo = 0.4f64;
            let mut hi = 2.9f64;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let eq = Self::with_center(m, mid)?;
                if eq.center_value() > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let eq = Self::with_center(m, 0.5 * (lo + hi))?;
            let q0 = eq.center_value();
            let q1 = eq.value(1.0);
            if q0 > 2.0 / 3.0 && q0 < 0.748 && q1 > 2.0 / 3.0 + 1e-3 {
                return Ok(eq);
            }
        }
        Err(Error::InvalidParam(format!(
            "could not shape the equilibrium cap with q(B_1) in (2/3, 3/4) for m = {m}"
        )))
    }

    fn with_center(m: usize, a: f64) -> Result<Self> {
        let mf = m as f64;
        let tail_coef = 3f64.powi(m as i32 - 3);
        let w = (2.0 * a * 0.3).max(0.3);
        let shape = move |r: f64| -> f64 {
            let x = r / 3.0;
            let cut = (1.0 - x * x).max(0.0);
            let z = (r * r - a * a) / w;
            cut * cut * (EQ_EPS + (-z * z).exp())
        };
        // normalize: ∫_0^3 s^{m-1} g = 3^{m-3} (m-2)
        let n = 6000usize;
        let h = 3.0 / n as f64;
        let mut raw = 0.0;
        for i in 0..n {
            let s0 = i as f64 * h;
            let s1 = s0 + h;
            let sm = s0 + 0.5 * h;
            raw += h / 6.0
                * (s0.powf(mf - 1.0) * shape(s0)
                    + 4.0 * sm.powf(mf - 1.0) * shape(sm)
                    + s1.powf(mf - 1.0) * shape(s1));
        }
        let gamma = tail_coef * (mf - 2.0) / raw;
        // accumulate I, q', q by composite Simpson from the matched tail end
        let mut cum = vec![0.0f64; n + 1];
        for i in 0..n {
            let s0 = i as f64 * h;
            let s1 = s0 + h;
            let sm = s0 + 0.5 * h;
            cum[i + 1] = cum[i]
                + gamma * h / 6.0
                    * (s0.powf(mf - 1.0) * shape(s0)
                        + 4.0 * sm.powf(mf - 1.0) * shape(sm)
                        + s1.powf(mf - 1.0) * shape(s1));
        }
        let dq_at = |r: f64, cum_v: f64| -> f64 {
            if r < 1e-12 {
                0.0
            } else {
                -cum_v * r.powf(1.0 - mf)
            }
        };
        let mut q = vec![0.0f64; n + 1];
        let mut dq = vec![0.0f64; n + 1];
        for i in 0..=n {
            dq[i] = dq_at(i as f64 * h, cum[i]);
        }
        q[n] = tail_coef * 3f64.powf(2.0 - mf);
        for i in (0..n).rev() {
            let r0 = i as f64 * h;
            let rm = r0 + 0.5 * h;
            // midpoint I by one Simpson half-cell
            let s0 = r0;
            let sm4 = r0 + 0.25 * h;
            let cum_mid = cum[i]
                + gamma * h / 12.0
                    * (s0.powf(mf - 1.0) * shape(s0)
                        + 4.0 * sm4.powf(mf - 1.0) * shape(sm4)
                        + rm.powf(mf - 1.0) * shape(rm));
            let dqm = dq_at(rm, cum_mid);
            q[i] = q[i + 1] - h / 6.0 * (dq[i] + 4.0 * dqm + dq[i + 1]);
        }
        Ok(RadialEquilibrium {
            m,
            tail_coef,
            gamma,
            g_eps: EQ_EPS,
            g_a: a,
            g_w: w,
            step: h,
            q,
            dq,
        })
    }

    fn source(&self, r: f64) -> f64 {
        let x = r / 3.0;
        let cut = (1.0 - x * x).max(0.0);
        let z = (r * r - self.g_a * self.g_a) / self.g_w;
        self.gamma * cut * cut * (self.g_eps + (-z * z).exp())
    }

    pub fn value(&self, r: f64) -> f64 {
        if r >= 3.0 {
            self.tail_coef * r.powf(2.0 - self.m as f64)
        } else {
            // cubic Hermite on the table, exact nodal derivatives
            let qf = r / self.step;
            let i = (qf.floor() as usize).min(self.q.len() - 2);
            let t = qf - i as f64;
            let h = self.step;
            let (y0, y1, d0, d1) = (self.q[i], self.q[i + 1], self.dq[i], self.dq[i + 1]);
            let t2 = t * t;
            let t3 = t2 * t;
            (2.0 * t3 - 3.0 * t2 + 1.0) * y0
                + (t3 - 2.0 * t2 + t) * h * d0
                + (-2.0 * t3 + 3.0 * t2) * y1
                + (t3 - t2) * h * d1
        }
    }

    /// dq/dρ.
    pub fn deriv(&self, r: f64) -> f64 {
        if r >= 3.0 {
            let p = 2.0 - self.m as f64;
            self.tail_coef * p * r.powf(p - 1.0)
        } else {
            let qf = r / self.step;
            let i = (qf.floor() as usize).min(self.dq.len() - 2);
            let t = qf - i as f64;
            self.dq[i] * (1.0 - t) + self.dq[i + 1] * t
        }
    }

    /// Radial Laplacian `q'' + (m-1)/ρ · q'` in `ℝ^m`: exactly `-g` on the
    /// cap, zero on the harmonic tail.
    pub fn laplacian(&self, r: f64) -> f64 {
        if r >= 3.0 {
            0.0
        } else {
            -self.source(r)
        }
    }

    pub fn center_value(&self) -> f64 {
        self.q[0]
    }

    /// The ignition profile `f0` induced by `f0(q(ρ)) = -Δq(ρ)` on the cap
    /// range `(1/3, q(0)]`, theta0 = 1/3, extended above `q(0)` by
    /// `g(0)·(1 - s) + A s(1-s)(1-q(0))` in `s = (u - q(0))/(1 - q(0))`
    /// (positive, vanishing at 1, non-increasing near 1).
    pub fn induced_profile(&self) -> Result<ReactionProfile> {
        let n = 2400;
        let mut us = vec![0.0, 1.0 / 3.0];
        let mut fs = vec![0.0, 0.0];
        for i in 1..=n {
            let r = 3.0 * (n - i) as f64 / n as f64;
            let u = self.value(r);
            let f = self.source(r);
            if u > *us.last().unwrap() + 1e-12 {
                us.push(u);
                fs.push(f);
            }
        }
        let p0 = self.center_value();
        let f_p0 = *fs.last().unwrap();
        let a_ext = 2.0;
        let m_ext = 60;
        for i in 1..=m_ext {
            let s = i as f64 / m_ext as f64;
            let u = p0 + s * (1.0 - p0);
            us.push(u);
            fs.push(f_p0 * (1.0 - s) + a_ext * s * (1.0 - s) * (1.0 - p0));
        }
        ReactionProfile::from_table(us, fs)
    }
}

// ---------------------------------------------------------------------------
// Fields
// ---------------------------------------------------------------------------

/// Spatial modulation applied to a base profile.
#[derive(Clone, Debug)]
pub enum Modulation {
    /// `f(x,u) = f0(u)`.
    Uniform,
    /// `f(x,u) = a(|x|) f0(u)` with `a = beta` on `| |x| - 2^n | <= 3`
    /// (3 <= n <= n_max), `a = 1` at distance >= 4 from every ring, cubic
    /// smoothstep on the unit collars.
    Annuli { beta: f64, n_max: u32 },
    /// `a = 1` inside the listed disks (slow inclusions), `beta` outside,
    /// cubic smoothstep across a collar of the given width.
    Pockets {
        beta: f64,
        centers: Vec<Point>,
        radius: f64,
        collar: f64,
    },
    /// `a = beta` on the strip `|x2| <= half_width`, 1 beyond
    /// `half_width + collar`, smoothstep in between.
    Strip { beta: f64, half_width: f64, collar: f64 },
    /// Slab excess `f0(u) + M (u - 1/2)(p(x) - u)` for `u ∈ (1/2, p(x))`,
    /// where `p(x) = q(r)` is the transverse radial equilibrium.
    SlabExcess { m_big: f64, equilibrium: Arc<RadialEquilibrium> },
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// An inhomogeneous reaction field `f(x,u)`.
#[derive(Clone, Debug)]
pub struct ReactionField {
    pub base: ReactionProfile,
    pub modulation: Modulation,
    pub dim: usize,
    /// Declared sandwich bounds `f0 <= f <= f1`.
    pub bounds: Option<(ReactionProfile, ReactionProfile)>,
}

impl ReactionField {
    pub fn homogeneous(base: ReactionProfile, dim: usize) -> Self {
        let bounds = Some((base.clone(), base.clone()));
        ReactionField {
            base,
            modulation: Modulation::Uniform,
            dim,
            bounds,
        }
    }

    pub fn with_bounds(mut self, lower: ReactionProfile, upper: ReactionProfile) -> Self {
        self.bounds = Some((lower, upper));
        self
    }

    /// Multiplicative factor `a(x) >= 1`.
    pub fn a(&self, x: Point) -> f64 {
        match &self.modulation {
            Modulation::Uniform | Modulation::SlabExcess { .. } => 1.0,
            Modulation::Annuli { beta, n_max } => {
                let r = norm(x);
                let mut w: f64 = 0.0;
                for n in 3..=*n_max {
                    let d = (r - 2f64.powi(n as i32)).abs();
                    // 1 inside |d|<=3, 0 beyond 4, smooth in between
                    let wn = if d <= 3.0 {
                        1.0
                    } else if d >= 4.0 {
                        0.0
                    } else {
                        smoothstep(4.0 - d)
                    };
                    w = w.max(wn);
                }
                1.0 + (beta - 1.0) * w
            }
            Modulation::Strip { beta, half_width, collar } => {
                let d = x[1].abs();
                let w = if d <= *half_width {
                    1.0
                } else if d >= half_width + collar {
                    0.0
                } else {
                    smoothstep(1.0 - (d - half_width) / collar)
                };
                1.0 + (beta - 1.0) * w
            }
            Modulation::Pockets { beta, centers, radius, collar } => {
                // w = 1 away from every disk, 0 inside
                let mut w: f64 = 1.0;
                for c in centers {
                    let d = norm([x[0] - c[0], x[1] - c[1]]);
                    let wn = if d <= *radius {
                        0.0
                    } else if d >= radius + collar {
                        1.0
                    } else {
                        smoothstep((d - radius) / collar)
                    };
                    w = w.min(wn);
                }
                1.0 + (beta - 1.0) * w
            }
        }
    }

    /// Evaluates `f(x, u)`; out-of-range `u` contributes zero.
    pub fn eval(&self, x: Point, u: f64) -> f64 {
        match &self.modulation {
            Modulation::Uniform => self.base.eval(u),
            Modulation::Annuli { .. } | Modulation::Pockets { .. } | Modulation::Strip { .. } => {
                self.a(x) * self.base.eval(u)
            }
            Modulation::SlabExcess { m_big, equilibrium } => {
                let mut f = self.base.eval(u);
                let p = equilibrium.value(x[1].abs());
                if u > 0.5 && u < p {
                    f += m_big * (u - 0.5) * (p - u);
                }
                f
            }
        }
    }

    /// Lipschitz-in-u constant over the field.
    pub fn lipschitz(&self) -> f64 {
        match &self.modulation {
            Modulation::Uniform => self.base.lipschitz(),
            Modulation::Annuli { beta, .. }
            | Modulation::Pockets { beta, .. }
            | Modulation::Strip { beta, .. } => beta * self.base.lipschitz(),
            Modulation::SlabExcess { m_big, equilibrium } => {
                // |∂u [M(u-1/2)(p-u)]| <= M (p - 1/2) on the excess interval
                self.base.lipschitz() + m_big * (equilibrium.center_value() - 0.5).max(0.0)
            }
        }
    }

    /// Ignition temperature of the declared lower bound (or base).
    pub fn declared_theta0(&self) -> Option<f64> {
        self.bounds
            .as_ref()
            .map(|(lo, _)| lo)
            .unwrap_or(&self.base)
            .theta0()
    }
}

/// §7-style ring field in the plane: `f(x,u) = a(|x|) f0(u)` with
/// `f0(u) = (2u-1)(1-u)` on [1/2,1].
pub fn build_annuli_field(beta: f64, n_max: u32) -> Result<ReactionField> {
    if beta <= 1.0 {
        return Err(Error::InvalidParam(format!("annuli beta = {beta} must be > 1")));
    }
    if n_max < 3 {
        return Err(Error::InvalidParam("annuli n_max must be >= 3".into()));
    }
    let f0 = ReactionProfile::ignition(0.5, 2.0)?;
    let f1 = f0.scaled(beta);
    Ok(ReactionField {
        base: f0.clone(),
        modulation: Modulation::Annuli { beta, n_max },
        dim: 2,
        bounds: Some((f0, f1)),
    })
}

/// §6-style slab field on the cylinder `(x1, r)` with effective dimension
/// `d_eff >= 4`: returns `(f^M, q)` where `q` is the transverse equilibrium
/// and `f^M(x,u) = f0(u) + M(u - 1/2)(p(x) - u)` on `u ∈ (1/2, p(x))`.
pub fn build_slab_field(d_eff: usize, m_big: f64) -> Result<(ReactionField, Arc<RadialEquilibrium>)> {
    if d_eff < 4 {
        return Err(Error::InvalidParam(format!(
            "slab construction needs d_eff >= 4 (got {d_eff}): constant-free equilibria are excluded below"
        )));
    }
    if m_big < 0.0 {
        return Err(Error::InvalidParam("slab M must be >= 0".into()));
    }
    let eq = Arc::new(RadialEquilibrium::new(d_eff - 1)?);
    let f0 = eq.induced_profile()?;
    // upper bound: add the maximal excess bump as a profile
    let p0 = eq.center_value();
    let f1 = {
        let n = 4000;
        let mut us = Vec::with_capacity(n + 1);
        let mut fs = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let u = i as f64 / n as f64;
            let mut f = f0.eval(u);
            if u > 0.5 && u < p0 {
                f += m_big * (u - 0.5) * (p0 - u);
            }
            us.push(u);
            fs.push(f);
        }
        ReactionProfile::from_table(us, fs)?
    };
    let field = ReactionField {
        base: f0.clone(),
        modulation: Modulation::SlabExcess { m_big, equilibrium: eq.clone() },
        dim: 2,
        bounds: Some((f0, f1)),
    };
    Ok((field, eq))
}

// ---------------------------------------------------------------------------
// alpha_f and class membership
// ---------------------------------------------------------------------------

/// `alpha_f(x; zeta) = inf { u >= 0 : f(x,u) > zeta·u }` scanned on the
/// u-grid; `f64::INFINITY` when the excess set is empty.
pub fn alpha_f(field: &ReactionField, x: Point, zeta: f64, u_step: f64) -> f64 {
    assert!(zeta > 0.0, "alpha_f requires zeta > 0");
    let n = (field.base.u_max() / u_step).ceil() as usize;
    for i in 0..=n {
        let u = i as f64 * u_step;
        if field.eval(x, u) > zeta * u {
            return u;
        }
    }
    f64::INFINITY
}

/// Class-membership report for the `(zeta, eta)` structural condition.
#[derive(Clone, Debug)]
pub struct ClassFReport {
    pub zeta: f64,
    pub eta: f64,
    /// theta0 of the declared lower bound used for the u-window.
    pub theta0: f64,
    /// `alpha_f` per sample point.
    pub alpha_grid: Vec<(Point, f64)>,
    pub member: bool,
    /// False when `alpha_f = ∞` at every sample (vacuous membership).
    pub resolved: bool,
    /// Sample `(x, u)` attaining the infimum, with the attained value.
    pub worst_point: Option<(Point, f64, f64)>,
}

/// Checks `inf_{x, u ∈ [alpha_f(x), theta0]} f(x,u) >= eta` over the sample
/// points. The u-window is empty wherever `alpha_f(x) > theta0`, which makes
/// the membership vacuously true there.
pub fn check_class_f(
    field: &ReactionField,
    xs: &[Point],
    zeta: f64,
    eta: f64,
    u_step: f64,
) -> Result<ClassFReport> {
    let theta0 = field.declared_theta0().ok_or_else(|| {
        Error::InvalidParam("class-F check needs an ignition lower bound with theta0".into())
    })?;
    let mut alpha_grid = Vec::with_capacity(xs.len());
    let mut inf = f64::INFINITY;
    let mut worst: Option<(Point, f64, f64)> = None;
    let mut any_finite = false;
    for &x in xs {
        let a = alpha_f(field, x, zeta, u_step);
        alpha_grid.push((x, a));
        if a.is_finite() {
            any_finite = true;
            let mut u = a;
            while u <= theta0 + 1e-15 {
                let f = field.eval(x, u);
                if f < inf {
                    inf = f;
                    worst = Some((x, u, f));
                }
                u += u_step;
            }
        }
    }
    Ok(ClassFReport {
        zeta,
        eta,
        theta0,
        alpha_grid,
        member: inf >= eta,
        resolved: any_finite,
        worst_point: worst,
    })
}

/// Uniform sample points for a `dim`-dimensional box.
pub fn sample_points(dim: usize, half_extent: f64, per_axis: usize) -> Vec<Point> {
    let mut pts = Vec::new();
    let step = 2.0 * half_extent / (per_axis.max(2) - 1) as f64;
    if dim == 1 {
        for i in 0..per_axis {
            pts.push([-half_extent + i as f64 * step, 0.0]);
        }
    } else {
        for i in 0..per_axis {
            for j in 0..per_axis {
                pts.push([-half_extent + i as f64 * step, -half_extent + j as f64 * step]);
            }
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_ignition_below_theta_is_zero() {
        let p = ReactionProfile::ignition(1.0 / 3.0, 1.0).unwrap();
        let f = ReactionField::homogeneous(p, 1);
        assert_eq!(f.eval([0.7, 0.0], 0.2), 0.0);
        assert_eq!(f.eval([-3.0, 0.0], 0.0), 0.0);
        assert_eq!(f.eval([0.0, 0.0], 1.0), 0.0);
    }

    #[test]
    fn eval_modulated_cutoff_profile() {
        // f(x,u) = a(x) · u(1-u)(u-0.25)+ with a(x) = 2 at u = 0.5.
        // Direct arithmetic: 2 · 0.5 · 0.5 · 0.25 = 0.125.
        let p = ReactionProfile::ignition_kpp_cut(0.25, 1.0).unwrap();
        let f = ReactionField::homogeneous(p.scaled(2.0), 1);
        let direct = 2.0 * 0.5 * 0.5 * 0.25;
        assert!((f.eval([0.0, 0.0], 0.5) - direct).abs() < 1e-15);
        assert!((direct - 0.125).abs() < 1e-15);
    }

    #[test]
    fn eval_out_of_range_clamps_to_zero() {
        let p = ReactionProfile::kpp(1.0).unwrap();
        let f = ReactionField::homogeneous(p, 1);
        assert_eq!(f.eval([0.0, 0.0], -0.1), 0.0);
        assert_eq!(f.eval([0.0, 0.0], 1.1), 0.0);
    }

    #[test]
    fn alpha_f_ignition_constant_temperature() {
        let p = ReactionProfile::ignition(1.0 / 3.0, 1.0).unwrap();
        let f = ReactionField::homogeneous(p, 1);
        let a = alpha_f(&f, [0.0, 0.0], 0.01, U_GRID_STEP);
        assert!(a >= 1.0 / 3.0, "alpha_f = {a}");
    }

    #[test]
    fn alpha_f_zero_reaction_is_infinite() {
        let f = ReactionField::homogeneous(ReactionProfile::zero(), 1);
        assert!(alpha_f(&f, [0.0, 0.0], 0.5, U_GRID_STEP).is_infinite());
    }

    #[test]
    fn alpha_f_kpp_first_grid_point() {
        // u(1-u) > 0.5u holds for every u in (0, 0.5): the infimum of the
        // excess set is 0+, so the scan returns the first grid point above 0.
        let p = ReactionProfile::kpp(1.0).unwrap();
        let f = ReactionField::homogeneous(p, 1);
        let a = alpha_f(&f, [0.0, 0.0], 0.5, U_GRID_STEP);
        // brute-force oracle over the same grid
        let mut oracle = f64::INFINITY;
        let mut u = 0.0;
        while u <= 1.0 {
            if u * (1.0 - u) > 0.5 * u {
                oracle = u;
                break;
            }
            u += U_GRID_STEP;
        }
        assert_eq!(a, oracle);
        assert!((a - U_GRID_STEP).abs() < 1e-12, "a = {a}");
    }

    #[test]
    fn class_f_constant_ignition_temperature_member() {
        let p = ReactionProfile::ignition(1.0 / 3.0, 1.0).unwrap();
        let f = ReactionField::homogeneous(p, 1);
        let xs = sample_points(1, 5.0, 9);
        let rep = check_class_f(&f, &xs, 0.01, 0.5, U_GRID_STEP).unwrap();
        // alpha_f > theta0 everywhere: vacuous membership for any (zeta, eta)
        assert!(rep.member);
        let rep2 = check_class_f(&f, &xs, 2.0, 10.0, U_GRID_STEP).unwrap();
        assert!(rep2.member);
    }

    #[test]
    fn class_f_two_step_fails_for_small_zeta() {
        // declared lower bound: the upper bump alone (theta0 = 3/4)
        let two_step = ReactionProfile::terrace(400.0).unwrap();
        let lower = {
            let n = 4000;
            let mut us = Vec::new();
            let mut fs = Vec::new();
            for i in 0..=n {
                let u = i as f64 / n as f64;
                us.push(u);
                fs.push(if u >= 0.75 { two_step.eval(u) } else { 0.0 });
            }
            ReactionProfile::from_table(us, fs).unwrap()
        };
        let f = ReactionField::homogeneous(two_step.clone(), 1).with_bounds(lower, two_step);
        let xs = sample_points(1, 2.0, 5);
        let rep = check_class_f(&f, &xs, 1e-3, 1e-3, U_GRID_STEP).unwrap();
        assert!(rep.resolved);
        assert!(!rep.member, "dead zone [1/2,3/4] must break membership");
        // large zeta: the excess set empties out and membership is vacuous
        let zeta_big = 2.0 * f.base.sup_deriv() + 1.0;
        let rep2 = check_class_f(&f, &xs, zeta_big, 1e-3, U_GRID_STEP).unwrap();
        assert!(rep2.member);
        assert!(!rep2.resolved);
    }

    #[test]
    fn class_f_zero_reaction_flagged_vacuous() {
        let lower = ReactionProfile::ignition(0.5, 1.0).unwrap();
        let f = ReactionField::homogeneous(ReactionProfile::zero(), 1)
            .with_bounds(lower, ReactionProfile::zero());
        let xs = sample_points(1, 1.0, 3);
        let rep = check_class_f(&f, &xs, 0.1, 0.1, U_GRID_STEP).unwrap();
        assert!(!rep.resolved);
        assert!(rep.member);
    }

    #[test]
    fn class_f_monotone_in_arguments() {
        let two_step = ReactionProfile::terrace(400.0).unwrap();
        let lower = ReactionProfile::ignition(0.75, 1.0).unwrap();
        let f = ReactionField::homogeneous(two_step.clone(), 1).with_bounds(lower, two_step);
        let xs = sample_points(1, 2.0, 5);
        let zetas = [1e-3, 1e-2, 0.1, 1.0, 3.0];
        let etas = [1e-4, 1e-3, 1e-2];
        for zi in 0..zetas.len() {
            for ei in 0..etas.len() {
                let r = check_class_f(&f, &xs, zetas[zi], etas[ei], 1e-3).unwrap();
                if r.member {
                    // member(zeta, eta) implies member(zeta' >= zeta, eta' <= eta)
                    for zj in zi..zetas.len() {
                        for ej in 0..=ei {
                            let r2 = check_class_f(&f, &xs, zetas[zj], etas[ej], 1e-3).unwrap();
                            assert!(r2.member, "monotonicity broken at zeta={} eta={}", zetas[zj], etas[ej]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn terrace_profile_doubling_relation() {
        let f = ReactionProfile::terrace(1.0).unwrap();
        assert!(f.eval(0.3) > 0.0);
        assert!((f.eval(0.8) - 2.0 * f.eval(0.3)).abs() < 1e-15);
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(1.0), 0.0);
        assert_eq!(f.eval(0.6), 0.0); // dead zone [1/2, 3/4]
    }

    #[test]
    fn annuli_field_ring_values() {
        let field = build_annuli_field(8.0, 7).unwrap();
        let beta = 8.0;
        assert!((field.a([8.0, 0.0]) - beta).abs() < 1e-12);
        assert!((field.a([12.0, 0.0]) - 1.0).abs() < 1e-12);
        assert!((field.a([16.0, 0.0]) - beta).abs() < 1e-12);
        // chi_{[1/2,1]} support
        for r in [1.0f64, 8.0, 20.0] {
            assert_eq!(field.eval([r, 0.0], 0.4), 0.0);
        }
        // f0(0.75) = (2·0.75-1)(1-0.75) = 0.125 where a = 1
        assert!((field.eval([12.0, 0.0], 0.75) - 0.125).abs() < 1e-12);
        assert!(build_annuli_field(1.0, 7).is_err());
    }

    #[test]
    fn slab_equilibrium_values() {
        let (field, eq) = build_slab_field(4, 50.0).unwrap();
        // p(3) = 3^{d-4} · 3^{3-d} = 1/3
        assert!((eq.value(3.0) - 1.0 / 3.0).abs() < 1e-12);
        // d = 4: tail is 1/r, harmonic in the 3 transverse dimensions
        assert!((eq.value(6.0) - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(eq.laplacian(5.0), 0.0);
        // f0(u) = 0 for u <= 1/3
        assert_eq!(field.base.eval(0.3), 0.0);
        assert_eq!(field.base.eval(1.0 / 3.0), 0.0);
        // f^M(x,u) = f0(u) for u <= 1/2 and u >= p(x)
        let x = [0.0, 0.5];
        let p = eq.value(0.5);
        for u in [0.1, 0.45, 0.5, p, 0.95] {
            if u <= 0.5 || u >= p {
                assert!((field.eval(x, u) - field.base.eval(u)).abs() < 1e-14);
            }
        }
        // strict excess inside
        assert!(field.eval(x, 0.6) > field.base.eval(0.6));
        assert!(build_slab_field(3, 1.0).is_err());
    }

    #[test]
    fn slab_equilibrium_discrete_residual() {
        // Δ_m q + f0(q) -> 0 at O(dr²) on r ∈ [0.5, 20]
        let eq = RadialEquilibrium::new(3).unwrap();
        let f0 = eq.induced_profile().unwrap();
        let worst = |dr: f64| -> f64 {
            let mut w: f64 = 0.0;
            let mut r = 0.5;
            while r <= 20.0 {
                let lap = (eq.value(r + dr) - 2.0 * eq.value(r) + eq.value(r - dr)) / (dr * dr)
                    + (eq.m as f64 - 1.0) / r * (eq.value(r + dr) - eq.value(r - dr)) / (2.0 * dr);
                w = w.max((lap + f0.eval(eq.value(r))).abs());
                r += dr / 3.0;
            }
            w
        };
        let w1 = worst(0.04);
        let w2 = worst(0.02);
        assert!(w1 < 5e-3, "w1 = {w1}");
        // observed order >= 1.5
        assert!(w2 < w1 / 2.8, "w1 = {w1}, w2 = {w2} (order {})", (w1 / w2).log2());
    }

    #[test]
    fn field_bounds_hold_pointwise() {
        let field = build_annuli_field(6.0, 5).unwrap();
        let (lo, hi) = field.bounds.clone().unwrap();
        for &x in &sample_points(2, 40.0, 17) {
            let mut u = 0.0;
            while u <= 1.0 {
                let f = field.eval(x, u);
                assert!(f >= lo.eval(u) - 1e-12);
                assert!(f <= hi.eval(u) + 1e-12);
                u += 0.01;
            }
        }
    }

    #[test]
    fn sampled_lipschitz_quotient_bounded() {
        let profiles = [
            ReactionProfile::kpp(1.7).unwrap(),
            ReactionProfile::ignition(0.25, 4.0).unwrap(),
            ReactionProfile::bistable(0.25, 1.0).unwrap(),
            ReactionProfile::terrace(400.0).unwrap(),
        ];
        for p in &profiles {
            let k = p.lipschitz();
            let mut u = 0.0;
            while u + U_GRID_STEP <= p.u_max() {
                let q = (p.eval(u + U_GRID_STEP) - p.eval(u)).abs() / U_GRID_STEP;
                assert!(q <= k * (1.0 + 1e-6), "quotient {q} > K {k}");
                u += U_GRID_STEP;
            }
        }
    }

    #[test]
    fn tabulated_csv_round_trip() {
        let p = ReactionProfile::from_csv("u,f0\n0,0\n0.5,0.25\n1,0\n").unwrap();
        assert_eq!(p.kind, ReactionKind::Tabulated);
        assert!((p.eval(0.25) - 0.125).abs() < 1e-15);
        assert!(ReactionProfile::from_csv("x,y\n0,0\n").is_err());
        assert!(ReactionProfile::from_csv("u,f0\n0,0\n0,0.1\n1,0\n").is_err());
        assert!(ReactionProfile::from_csv("u,f0\n0,0.2\n1,0\n").is_err());
    }
}
