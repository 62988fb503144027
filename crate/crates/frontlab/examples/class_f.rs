//! Structural reaction checks: the excess threshold `alpha_f` and the
//! (zeta, eta)-class membership, including the two-step reaction that only
//! qualifies for large zeta.

use frontlab::reaction::{
    alpha_f, check_class_f, sample_points, ReactionField, ReactionProfile, U_GRID_STEP,
};

fn main() {
    let xs = sample_points(1, 2.0, 5);

    let constant_theta = ReactionField::homogeneous(
        ReactionProfile::ignition(1.0 / 3.0, 1.0).unwrap(),
        1,
    );
    let a = alpha_f(&constant_theta, [0.0, 0.0], 0.01, U_GRID_STEP);
    println!("constant ignition temperature 1/3: alpha_f(zeta = 0.01) = {a:.4}");
    let rep = check_class_f(&constant_theta, &xs, 0.01, 0.5, U_GRID_STEP).unwrap();
    println!("  member = {} (resolved = {})", rep.member, rep.resolved);

    let two_step = ReactionProfile::terrace(400.0).unwrap();
    let lower = ReactionProfile::ignition_bump(0.75, 400.0).unwrap();
    let field = ReactionField::homogeneous(two_step.clone(), 1).with_bounds(lower, two_step);
    for zeta in [1e-3, 0.1, 3.0] {
        let rep = check_class_f(&field, &xs, zeta, 1e-3, U_GRID_STEP).unwrap();
        let worst = rep
            .worst_point
            .map(|(x, u, f)| format!("worst f = {f:.2e} at (x = {:.1}, u = {u:.3})", x[0]))
            .unwrap_or_else(|| "no sampled window".into());
        println!(
            "two-step, zeta = {zeta}: member = {} (resolved = {}); {worst}",
            rep.member, rep.resolved
        );
    }
}
