//! Bers embedding of a small harmonic differential.

use utkit::qc_solver::{bers_embedding, bers_sup_norm, solve_beltrami, Normalization};
use utkit::series::basis_mu;
use utkit::C64;

fn main() -> utkit::Result<()> {
    let mu = basis_mu(3)?.scaled(C64::new(0.1, 0.0));
    let phi = bers_embedding(&mu, 8, 1e-12)?;
    for (k, c) in phi.coeffs.iter().enumerate().take(5) {
        println!("phi_{k} = {c:.8}");
    }
    let qc = solve_beltrami(&mu, Normalization::ModelB, 1e-12)?;
    println!("sup (1-|z|^2)^2 |S f| = {:.6}, 6 sup|mu| = {:.6}", bers_sup_norm(&qc), 6.0 * mu.sup_norm());
    Ok(())
}
