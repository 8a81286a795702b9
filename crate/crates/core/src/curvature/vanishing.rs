//! Integrals of harmonic fields on 𝕌 that vanish identically, and the
//! Ahlfors identity F[μ] = ((z−z̄)²/2) conj(Φ″) + (z−z̄) conj(Φ′) + conj(Φ).
//!
//! Everything is integrated in the chart u = (z − z̄ζ)/(1−ζ), ζ ∈ 𝔻, which
//! sends 0 to z. Principal values around u = z become sums over circles
//! |ζ| = r, each of which is taken with uniform angles.

use crate::error::{Error, Result};
use crate::geometry::{CayleyMap, DiskPoint, Domain};
use crate::harness::{Provenance, Report};
use crate::quadrature::{gauss_legendre, pairwise_sum};
use crate::series::{reflect, BeltramiField};
use crate::C64;
use rayon::prelude::*;
use std::f64::consts::PI;

const RADIAL: usize = 64;
const ANGULAR: usize = 256;

/// The field on 𝕌 obtained from a harmonic field on 𝔻* by reflection onto 𝔻
/// and the Cayley map c(u) = (u−i)/(u+i): μ_𝕌(u) = ν(c(u)) conj(c′(u))/c′(u).
pub fn uhp_field(mu: &BeltramiField) -> Result<impl Fn(C64) -> C64 + Sync> {
    let disk = match mu.domain {
        Domain::ExteriorDisk => reflect(mu)?,
        Domain::UnitDisk => mu.clone(),
        Domain::UpperHalfPlane => return Err(Error::DomainMismatch),
    };
    disk.harmonic_coeffs()?;
    let c = CayleyMap::to_disk();
    Ok(move |u: C64| {
        let d = c.derivative_c(u);
        disk.eval(c.map_c(u)).unwrap_or_default() * d.conj() / d
    })
}

/// ∬_𝕌 f(u) d²u through the chart centered at z.
fn centered_integral(z: C64, f: impl Fn(C64) -> C64 + Sync) -> C64 {
    let gl = gauss_legendre(RADIAL).mapped(0.0, 1.0);
    let zb = z.conj();
    let dz = z - zb;
    let rows: Vec<C64> = gl
        .nodes
        .par_iter()
        .zip(gl.weights.par_iter())
        .map(|(r, wr)| {
            let circle: Vec<C64> = (0..ANGULAR)
                .map(|j| {
                    let zeta = C64::from_polar(*r, 2.0 * PI * (j as f64 + 0.5) / ANGULAR as f64);
                    let om = 1.0 - zeta;
                    let u = (z - zb * zeta) / om;
                    // |du/dζ|² = |z−z̄|²/|1−ζ|⁴
                    f(u) * (dz.norm_sqr() / om.norm_sqr().powi(2))
                })
                .collect();
            pairwise_sum(&circle) * (wr * r * 2.0 * PI / ANGULAR as f64)
        })
        .collect();
    pairwise_sum(&rows)
}

fn uhp_point(z: &DiskPoint) -> Result<C64> {
    if z.domain() != Domain::UpperHalfPlane {
        return Err(Error::DomainMismatch);
    }
    Ok(z.value())
}

/// PV ∬ μ/((u−z)²(u−z̄)²) d²u and ∬ μ/((u−z)(u−z̄)³) d²u.
pub fn vanishing_integrals(mu: &BeltramiField, z: &DiskPoint) -> Result<[C64; 2]> {
    let z = uhp_point(z)?;
    let m = uhp_field(mu)?;
    let zb = z.conj();
    let a = centered_integral(z, |u| m(u) / ((u - z) * (u - z) * (u - zb) * (u - zb)));
    let b = centered_integral(z, |u| m(u) / ((u - z) * (u - zb).powi(3)));
    Ok([a, b])
}

/// R(z,v) = 1/(v−z) + (z−1)/v − z/(v−1) and its first two z-derivatives.
fn kernel_r(z: C64, v: C64) -> [C64; 3] {
    let d = 1.0 / (v - z);
    [d + (z - 1.0) / v - z / (v - 1.0), d * d + 1.0 / v - 1.0 / (v - 1.0), 2.0 * d * d * d]
}

/// F[μ](z), Φ[μ] with two derivatives, and the residual of the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct AhlforsData {
    pub f: C64,
    pub phi: [C64; 3],
    pub residual: f64,
}

/// F[μ](z) = −(1/π)∬ R(z,u) μ(u) d²u and Φ[μ](z) = −(1/π)∬ R(z,ū) conj(μ(u)) d²u.
pub fn ahlfors_residual(mu: &BeltramiField, z: &DiskPoint) -> Result<AhlforsData> {
    let z = uhp_point(z)?;
    let m = uhp_field(mu)?;
    let f = centered_integral(z, |u| kernel_r(z, u)[0] * m(u)) * (-1.0 / PI);
    let mut phi = [C64::new(0.0, 0.0); 3];
    for (k, p) in phi.iter_mut().enumerate() {
        *p = centered_integral(z, |u| kernel_r(z, u.conj())[k] * m(u).conj()) * (-1.0 / PI);
    }
    let d = z - z.conj();
    let rhs = 0.5 * d * d * phi[2].conj() + d * phi[1].conj() + phi[0].conj();
    Ok(AhlforsData { f, phi, residual: (f - rhs).norm() })
}

/// Largest |value| of the two vanishing integrals at z.
pub fn verify_vanishing_integrals(mu: &BeltramiField, z: &DiskPoint) -> Result<Vec<Report>> {
    let [a, b] = vanishing_integrals(mu, z)?;
    let at = z.value();
    Ok(vec![
        Report::compare("vanishing-integrals", &format!("mu/((u-z)^2(u-zbar)^2) at {at}"), a.norm(), 0.0, 1e-8, Provenance::Paper)
            .absolute(),
        Report::compare("vanishing-integrals", &format!("mu/((u-z)(u-zbar)^3) at {at}"), b.norm(), 0.0, 1e-8, Provenance::Paper)
            .absolute(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_gives_exact_zero() {
        let z = DiskPoint::uhp(C64::new(0.3, 1.2)).unwrap();
        let v = vanishing_integrals(&BeltramiField::exterior(vec![C64::new(0.0, 0.0); 3]), &z).unwrap();
        assert_eq!(v, [C64::new(0.0, 0.0); 2]);
    }

    #[test]
    fn nonvanishing_control() {
        // μ/(u−z̄)⁴ is not one of the vanishing kernels
        let mu = crate::series::basis_mu(2).unwrap();
        let m = uhp_field(&mu).unwrap();
        let z = C64::new(0.2, 0.9);
        let v = centered_integral(z, |u| m(u) / (u - z.conj()).powi(4));
        assert!(v.norm() > 1e-3, "{v}");
    }
}
