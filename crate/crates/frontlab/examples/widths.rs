//! Level-set width functionals on a synthetic ramp and on a mid-level
//! plateau, showing the sentinel conventions.

use std::sync::Arc;

use frontlab::diagnostics::{width_j, width_l, width_l_high, width_l_pair, WidthValue};
use frontlab::grid::{Boundary, GridSpec, GridState};

fn show(name: &str, w: WidthValue) {
    match w {
        WidthValue::Finite(v) => println!("  {name:<18} = {v:.4}"),
        WidthValue::Inf => println!("  {name:<18} = inf"),
    }
}

fn main() {
    // ramp from 1 to 0 over D = 8: the eps <-> 1-eps distance is D/2
    let d = 8.0;
    let spec = GridSpec::line(0.0, 24.0, 0.1, Boundary::NeumannZeroFlux).unwrap();
    let ramp = GridState::from_fn(Arc::new(spec.clone()), move |p| {
        (1.0 - p[0] / d).clamp(0.0, 1.0)
    });
    println!("ramp over D = {d} (expect D/2 = {}):", d / 2.0);
    show("width_l(0.25)", width_l(&ramp, 0.25));
    show("width_l_high(0.75)", width_l_high(&ramp, 0.75));
    show("width_l_pair(.25,.75)", width_l_pair(&ramp, 0.25, 0.75));
    show("width_j(0.25)", width_j(&ramp, 0.25));

    // a long plateau at 1/2 keeps J moderate while L is unaffected
    let plateau = GridState::from_fn(Arc::new(spec), |p| {
        let x = p[0];
        if x < 6.0 {
            1.0
        } else if x < 7.0 {
            1.0 - 0.5 * (x - 6.0)
        } else if x < 17.0 {
            0.5
        } else if x < 18.0 {
            0.5 - 0.5 * (x - 17.0)
        } else {
            0.0
        }
    });
    println!("plateau of length 10 at u = 1/2:");
    show("width_l(0.25)", width_l(&plateau, 0.25));
    show("width_j(0.25)", width_j(&plateau, 0.25));

    // sentinel: constant u = 0.25 has a nonempty eps-set but empty 1-eps set
    let flat = GridState::constant(ramp.spec.clone(), 0.25);
    println!("constant u = 0.25:");
    show("width_l(0.25)", width_l(&flat, 0.25));
}
