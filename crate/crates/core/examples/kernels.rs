//! Resolvent kernel and its normalization ∬ G(z,w) ρ(w) = 1.

use utkit::geometry::{disk_density, resolvent_kernel, DiskPoint};
use utkit::quadrature::{apply_resolvent, QuadRule};
use utkit::C64;

fn main() -> utkit::Result<()> {
    let rule = QuadRule::default_rule();
    let z = DiskPoint::disk(C64::new(0.3, -0.2))?;
    for w in [C64::new(0.0, 0.0), C64::new(0.5, 0.5), C64::new(-0.9, 0.0)] {
        let g = resolvent_kernel(&z, &DiskPoint::disk(w)?)?;
        println!("G({}, {w}) = {g:.10}   rho(w) = {:.6}", z.value(), disk_density(w));
    }
    let one = apply_resolvent(|_| C64::new(1.0, 0.0), &z, &rule)?;
    println!("G applied to 1 at z: {:.12} (expect 1)", one.re);
    Ok(())
}
