//! Radial exponential envelope: closed forms, growth, and the log-derivative
//! limit used by the propagation diagnostics.

use frontlab::diagnostics::BesselEnvelope;

fn main() {
    let e1 = BesselEnvelope::new(4.0, 1, 60.0).unwrap();
    println!("d = 1, zeta = 4:");
    println!("  psi(1)      = {:.6}   (cosh 2 = {:.6})", e1.psi(1.0), 2f64.cosh());
    println!("  psi'(1)     = {:.6}   (2 sinh 2 = {:.6})", e1.psi_prime(1.0), 2.0 * 2f64.sinh());

    let e3 = BesselEnvelope::new(1.0, 3, 60.0).unwrap();
    println!("d = 3, zeta = 1:");
    println!("  psi(1)      = {:.6}   (sinh 1 / 1 = {:.6})", e3.psi(1.0), 1f64.sinh());
    for r in [5.0, 20.0, 50.0, 400.0] {
        println!(
            "  psi'/psi at r = {r:>5}: {:.6}  (-> sqrt(zeta) = 1)",
            e3.log_derivative(r)
        );
    }
}
