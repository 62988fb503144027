//! Pure diffusion sanity check: the discrete solution of a Gaussian bump
//! against the exact heat-kernel evolution, in 1D and on the d_eff = 3
//! cylinder.

use std::sync::Arc;

use frontlab::grid::{Boundary, Geometry, GridSpec, GridState};
use frontlab::reaction::{ReactionField, ReactionProfile};
use frontlab::solver;

fn main() {
    let field = ReactionField::homogeneous(ReactionProfile::zero(), 1);
    let spec = GridSpec::line(-12.0, 12.0, 0.05, Boundary::NeumannZeroFlux).unwrap();
    let s0 = 1.0;
    let mut state = GridState::from_fn(Arc::new(spec), |p| (-p[0] * p[0] / (4.0 * s0)).exp());
    solver::run(&mut state, &field, 1.0, 0.5, &mut |_s| {}).unwrap();
    let mut worst = 0.0f64;
    for (k, &v) in state.u.iter().enumerate() {
        let x = state.spec.coord_of(k)[0];
        let exact = (s0 / (s0 + 1.0)).sqrt() * (-x * x / (4.0 * (s0 + 1.0))).exp();
        worst = worst.max((v - exact).abs());
    }
    println!("1D Gaussian, t = 1, dx = 0.05: sup |u - exact| = {worst:.2e}");

    let spec = GridSpec::new(
        Geometry::Cylinder { d_eff: 3 },
        vec![[-10.0, 10.0], [0.0, 10.0]],
        0.1,
        Boundary::NeumannZeroFlux,
    )
    .unwrap();
    let field = ReactionField::homogeneous(ReactionProfile::zero(), 2);
    let mut state = GridState::from_fn(Arc::new(spec), |p| {
        (-(p[0] * p[0] + p[1] * p[1]) / (4.0 * s0)).exp()
    });
    solver::run(&mut state, &field, 1.0, 0.5, &mut |_s| {}).unwrap();
    let mut worst = 0.0f64;
    for (k, &v) in state.u.iter().enumerate() {
        let p = state.spec.coord_of(k);
        let rho2 = p[0] * p[0] + p[1] * p[1];
        let exact = (s0 / (s0 + 1.0)).powf(1.5) * (-rho2 / (4.0 * (s0 + 1.0))).exp();
        worst = worst.max((v - exact).abs());
    }
    println!("cylinder d_eff = 3 radial Gaussian, t = 1, dx = 0.1: sup error = {worst:.2e}");
}
