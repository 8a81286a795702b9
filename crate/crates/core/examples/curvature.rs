//! Riemann tensor, sectional curvatures and the Ricci limit on the harmonic basis.

use utkit::curvature::{holomorphic_sectional, ricci_diagonal, riemann, sectional, wp_inner};
use utkit::series::basis_mu;

fn main() -> utkit::Result<()> {
    let (m2, m3) = (basis_mu(2)?, basis_mu(3)?);
    println!("<mu2, mu2> = {:.10}", wp_inner(&m2, &m2)?);
    println!("R(mu2, mu3, mu3, mu2) = {:.10}", riemann(&m2, &m3, &m3, &m2)?.value);
    println!("K(mu2, mu3) = {:.10}", sectional(&m2, &m3)?);
    println!("H(mu2) = {:.10}", holomorphic_sectional(&m2)?);
    let r = ricci_diagonal(2, 80)?;
    println!("Ricci(mu2) partial sum N=80: {:.8}, extrapolated {:.8}", r.partial_sums.last().unwrap(), r.fit_quadratic.limit);
    println!("-13/(12 pi) = {:.8}", -13.0 / (12.0 * std::f64::consts::PI));
    Ok(())
}
