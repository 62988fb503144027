//! Numerical laboratory for reaction-diffusion front propagation,
//! `u_t = Δu + f(x,u)` on 1D/2D Cartesian and axisymmetric cylindrical grids.
//!
//! The crate is organized around six pieces:
//!
//! * [`reaction`] — homogeneous reaction profiles `f0(u)`, inhomogeneous
//!   fields `f(x,u)`, structural checks (`alpha_f`, class-membership) and the
//!   explicit constructions (two-step terrace, annuli ring field, the
//!   high-dimensional slab field with its radial equilibrium).
//! * [`speed`] — traveling-front speeds by phase-plane shooting, the KPP
//!   linearization speed, and sandwich bounds `(c0, c1)` for a field.
//! * [`grid`] / [`solver`] — grid geometry and the explicit-Euler stepper with
//!   the canonical spark-like / front-like / bump initial data.
//! * [`diagnostics`] — level-set widths via an exact distance transform,
//!   the radial exponential envelope `ψ` (Δψ = ζψ), the `Z`/`Y`/`Λ`
//!   functionals, spreading-speed fits and the global-mean-speed check.
//! * [`barriers`] — closed-form sub/super-solutions with discrete residual
//!   certification.
//! * [`scenario`] — config-driven scenario registry behind the `frontlab` CLI.
//!
//! Runnable entry points live in `examples/` (one per capability) and in the
//! thin `frontlab` binary.

pub mod barriers;
pub mod diagnostics;
pub mod dist;
pub mod grid;
pub mod reaction;
pub mod scenario;
pub mod solver;
pub mod speed;

use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("no positive-speed front exists: {0}")]
    NoFront(String),

    #[error("front solve did not converge: {0}")]
    NoConvergence(String),

    #[error("time step {dt} exceeds stability bound {bound}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("non-finite value {value} at node {index} (t = {t}); diagnostic snapshot attached")]
    NonFinite {
        t: f64,
        index: usize,
        value: f64,
        snapshot: Box<grid::GridState>,
    },

    #[error("state out of range at node {index}: u = {value} (t = {t})")]
    OutOfRange { t: f64, index: usize, value: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("bump profile construction failed: {0}")]
    BumpProfile(String),

    #[error("barrier construction failed: {0}")]
    Barrier(String),

    #[error("config error in {path:?}: {msg}")]
    Config { path: PathBuf, msg: String },

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
