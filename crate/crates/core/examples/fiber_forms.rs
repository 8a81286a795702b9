//! VK metric on the fiber and the forms kappa_n.

use utkit::forms::{kappa_form, theta_components, vk_fiber_components, FiberPoint};
use utkit::quadrature::QuadRule;
use utkit::series::basis_mu;
use utkit::C64;

fn main() -> utkit::Result<()> {
    let mu = basis_mu(2)?;
    for z in [FiberPoint::new(C64::new(2.0, 0.0))?, FiberPoint::infinity()] {
        let c = vk_fiber_components(&mu, &z)?;
        println!("horizontal {:.12}  series {:.12}  vertical {:.6}", c.horizontal, c.horizontal_series, c.vertical);
        println!("  theta horizontal {:.12}", theta_components(&mu, &z)?.horizontal);
    }
    let rule = QuadRule::new(32, 64)?;
    let k1 = kappa_form(1, &[mu.clone()], &[mu.clone()], &rule)?;
    println!("kappa_1(mu2, mu2) = {:.12}  (i/(2 pi^2) = {:.12}i)", k1.value, 0.5 / std::f64::consts::PI.powi(2));
    let m3 = basis_mu(3)?;
    let k2 = kappa_form(2, &[mu.clone(), m3.clone()], &[mu, m3], &rule)?;
    println!("kappa_2 = {:.10e}", k2.value);
    Ok(())
}
