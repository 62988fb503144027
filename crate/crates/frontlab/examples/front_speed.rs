//! Phase-plane shooting: the cubic bistable family against its closed form,
//! and the two-step segment speeds whose ratio is sqrt(2).

use frontlab::reaction::ReactionProfile;
use frontlab::speed::shoot_front_speed;

fn main() {
    println!("cubic bistable u(1-u)(u-theta): closed-form speed (1-2 theta)/sqrt(2)");
    for theta in [0.1, 0.25, 0.4] {
        let p = ReactionProfile::bistable(theta, 1.0).unwrap();
        let r = shoot_front_speed(&p, 1e-6).unwrap();
        let exact = (1.0 - 2.0 * theta) / 2f64.sqrt();
        println!(
            "  theta = {theta}: c = {:.6} (exact {:.6}, residual {:.2e}, {} bisections)",
            r.speed, exact, r.residual, r.iterations
        );
    }

    let c_scale = 400.0;
    let lower = ReactionProfile::ignition_bump(0.5, c_scale / 4.0).unwrap();
    let upper = ReactionProfile::ignition_bump(0.5, c_scale / 2.0).unwrap();
    let cl = shoot_front_speed(&lower, 1e-6).unwrap().speed;
    let cu = shoot_front_speed(&upper, 1e-6).unwrap().speed;
    println!("two-step segments (rescaled to [0,1]):");
    println!("  lower {cl:.5}, upper {cu:.5}, ratio {:.6} (sqrt 2 = {:.6})", cu / cl, 2f64.sqrt());
}
