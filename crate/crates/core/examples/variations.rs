//! Finite-difference variations of the pulled-back density against the resolvent formula.

use utkit::curvature::{density_first_variation, density_second_variation};
use utkit::series::basis_mu;
use utkit::C64;

fn main() -> utkit::Result<()> {
    let mu = basis_mu(2)?;
    let zs = [C64::new(1.5, 0.0), C64::new(0.0, 2.0), C64::new(-1.2, 0.8)];
    let (d1, d1_half) = density_first_variation(&mu, &zs, 1e-2)?;
    let (fd, exact) = density_second_variation(&mu, &zs, 1e-2)?;
    for (k, z) in zs.iter().enumerate() {
        println!(
            "z = {z}: first {:.2e} / {:.2e}, second fd {:.8} vs {:.8}",
            d1[k], d1_half[k], fd.extrapolated[k].re, exact[k]
        );
    }
    Ok(())
}
