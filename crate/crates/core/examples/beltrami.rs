//! Solve the Beltrami equation for a harmonic differential and inspect both normalizations.

use utkit::qc_solver::{solve_beltrami, welding_decompose, Normalization};
use utkit::series::basis_mu;
use utkit::C64;

fn main() -> utkit::Result<()> {
    let mut mu = basis_mu(2)?;
    mu = mu.scaled(C64::new(0.2, 0.0));
    let b = solve_beltrami(&mu, Normalization::ModelB, 1e-12)?;
    println!("model B: {} Neumann terms, residual {:.2e}", b.series_terms, b.residual_norm);
    for z in [C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 2.0)] {
        println!("  f({z}) = {:.10}", b.eval(z)?);
    }
    let a = solve_beltrami(&mu, Normalization::ModelA, 1e-12)?;
    println!("model A: normalization error {:.2e}", a.normalization_error()?);
    let w = welding_decompose(&a, 32)?;
    println!("welding: capacity {:.10}, K {:.3e}, area residual {:.2e}", w.capacity, w.potential_k, w.area_residual);
    Ok(())
}
