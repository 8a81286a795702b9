//! Points of the hyperbolic plane models, Möbius maps, densities and the
//! resolvent kernel G(z,w) = (2u+1)/(2π)·log((u+1)/u) − 1/π.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    UnitDisk,
    ExteriorDisk,
    UpperHalfPlane,
}

/// A point of 𝔻, 𝔻* or 𝕌. The exterior disk carries ∞ as a distinguished point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    value: C64,
    domain: Domain,
    infinite: bool,
}

impl DiskPoint {
    pub fn new(value: C64, domain: Domain) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::OutsideDomain(format!("{value}")));
        }
        let r2 = value.norm_sqr();
        let ok = match domain {
            Domain::UnitDisk => r2 < 1.0,
            Domain::ExteriorDisk => r2 > 1.0,
            Domain::UpperHalfPlane => value.im > 0.0,
        };
        if ok {
            return Ok(Self { value, domain, infinite: false });
        }
        let on_boundary = match domain {
            Domain::UnitDisk | Domain::ExteriorDisk => r2 == 1.0,
            Domain::UpperHalfPlane => value.im == 0.0,
        };
        if on_boundary {
            Err(Error::BoundaryPoint(format!("{value}")))
        } else {
            Err(Error::OutsideDomain(format!("{value}")))
        }
    }

    pub fn disk(value: C64) -> Result<Self> {
        Self::new(value, Domain::UnitDisk)
    }

    pub fn exterior(value: C64) -> Result<Self> {
        Self::new(value, Domain::ExteriorDisk)
    }

    pub fn uhp(value: C64) -> Result<Self> {
        Self::new(value, Domain::UpperHalfPlane)
    }

    pub fn infinity() -> Self {
        Self { value: C64::new(0.0, 0.0), domain: Domain::ExteriorDisk, infinite: true }
    }

    pub fn is_infinite(&self) -> bool {
        self.infinite
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Finite coordinate. For ∞ this returns 0, use [`DiskPoint::is_infinite`] first.
    pub fn value(&self) -> C64 {
        self.value
    }

    /// The image under z ↦ 1/z̄, which swaps 𝔻 and 𝔻* and sends ∞ to 0.
    pub fn inverted(&self) -> Result<DiskPoint> {
        match self.domain {
            Domain::UpperHalfPlane => Err(Error::DomainMismatch),
            Domain::UnitDisk => {
                if self.value.norm_sqr() == 0.0 {
                    Ok(DiskPoint::infinity())
                } else {
                    DiskPoint::exterior(1.0 / self.value.conj())
                }
            }
            Domain::ExteriorDisk => {
                if self.infinite {
                    DiskPoint::disk(C64::new(0.0, 0.0))
                } else {
                    DiskPoint::disk(1.0 / self.value.conj())
                }
            }
        }
    }
}

/// ρ = 4/(1−|z|²)² on the disk models and Im(z)⁻² on 𝕌.
pub fn hyperbolic_density(z: &DiskPoint) -> Result<f64> {
    if z.infinite {
        return Err(Error::BoundaryPoint("∞ has no finite density".into()));
    }
    Ok(match z.domain {
        Domain::UnitDisk | Domain::ExteriorDisk => disk_density(z.value),
        Domain::UpperHalfPlane => 1.0 / (z.value.im * z.value.im),
    })
}

/// Unchecked disk density 4/(1−|z|²)².
#[inline]
pub fn disk_density(z: C64) -> f64 {
    let d = 1.0 - z.norm_sqr();
    4.0 / (d * d)
}

fn disk_pair(z: &DiskPoint, w: &DiskPoint) -> Result<(C64, C64)> {
    if z.domain != w.domain || z.domain == Domain::UpperHalfPlane {
        return Err(Error::DomainMismatch);
    }
    // ∞ is handled through inversion, which is an isometry of 𝔻*.
    if z.infinite || w.infinite {
        let zi = z.inverted()?;
        let wi = w.inverted()?;
        return Ok((zi.value, wi.value));
    }
    Ok((z.value, w.value))
}

/// u(z,w) = |z−w|²/((1−|z|²)(1−|w|²)).
pub fn point_pair_invariant(z: &DiskPoint, w: &DiskPoint) -> Result<f64> {
    let (a, b) = disk_pair(z, w)?;
    Ok(pair_u(a, b))
}

#[inline]
pub fn pair_u(z: C64, w: C64) -> f64 {
    (z - w).norm_sqr() / ((1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr()))
}

/// G as a function of the point-pair invariant.
///
/// Small u keeps the logarithm split as log1p(u) − log u; large u uses the
/// series (1/2π)Σ_{m≥2} (−1)^m (m−1)/(m(m+1)) u^{−m}, since the closed form
/// cancels to O(u⁻²).
pub fn green_of_u(u: f64) -> f64 {
    if u > 8.0 {
        let x = 1.0 / u;
        let mut s = 0.0;
        let mut p = x * x;
        for m in 2..60 {
            let mf = m as f64;
            let term = (mf - 1.0) / (mf * (mf + 1.0)) * p;
            s += if m % 2 == 0 { term } else { -term };
            if p < 1e-18 * s.abs() {
                break;
            }
            p *= x;
        }
        s / (2.0 * PI)
    } else {
        (2.0 * u + 1.0) * (u.ln_1p() - u.ln()) / (2.0 * PI) - 1.0 / PI
    }
}

/// G(0,w) written in t = |w|², t ∈ (0,1).
pub fn green_origin(t: f64) -> f64 {
    green_of_u(t / (1.0 - t))
}

/// The resolvent kernel of ½(Δ₀+½)⁻¹, identical on 𝔻 and 𝔻*.
pub fn resolvent_kernel(z: &DiskPoint, w: &DiskPoint) -> Result<f64> {
    let (a, b) = disk_pair(z, w)?;
    if a == b {
        return Err(Error::DiagonalSingularity);
    }
    Ok(green_of_u(pair_u(a, b)))
}

/// z ↦ (az+b)/(b̄z+ā) with |a|²−|b|² = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    pub a: C64,
    pub b: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaVariant {
    /// Carries a point of 𝔻 to 0.
    Center,
    /// σ_w(z) = ((1−w)/(1−w̄))·(1−zw̄)/(z−w) for w ∈ 𝔻*, which sends w to ∞ and fixes 1.
    Fiber,
}

impl MoebiusMap {
    pub fn identity() -> Self {
        Self { a: C64::new(1.0, 0.0), b: C64::new(0.0, 0.0) }
    }

    /// Normalizes (a,b) so that |a|²−|b|² = 1. Fails if the pair is not a
    /// disk automorphism.
    pub fn new(a: C64, b: C64) -> Result<Self> {
        let det = a.norm_sqr() - b.norm_sqr();
        if !(det > 0.0) {
            return Err(Error::Config(format!("|a|²−|b|² = {det} is not positive")));
        }
        let s = det.sqrt();
        Ok(Self { a: a / s, b: b / s })
    }

    /// Rotation z ↦ e^{iθ}z.
    pub fn rotation(theta: f64) -> Self {
        Self { a: C64::from_polar(1.0, theta / 2.0), b: C64::new(0.0, 0.0) }
    }

    pub fn determinant(&self) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr()
    }

    pub fn apply_c(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.b.conj() * z + self.a.conj())
    }

    /// γ′(z) = 1/(b̄z+ā)² when the determinant is one.
    pub fn derivative(&self, z: C64) -> C64 {
        let d = self.b.conj() * z + self.a.conj();
        1.0 / (d * d)
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.a.conj(), b: -self.b }
    }

    /// self ∘ other
    pub fn compose(&self, other: &MoebiusMap) -> Self {
        // matrices [[a, b], [b̄, ā]] multiply within the same family
        let a = self.a * other.a + self.b * other.b.conj();
        let b = self.a * other.b + self.b * other.a.conj();
        Self { a, b }
    }

    pub fn apply(&self, z: &DiskPoint) -> Result<DiskPoint> {
        if z.domain == Domain::UpperHalfPlane {
            return Err(Error::DomainMismatch);
        }
        if z.infinite {
            // γ(∞) = a/b̄
            if self.b.norm_sqr() == 0.0 {
                return Ok(*z);
            }
            return DiskPoint::new(self.a / self.b.conj(), z.domain);
        }
        let den = self.b.conj() * z.value + self.a.conj();
        if den.norm_sqr() == 0.0 {
            return Ok(DiskPoint::infinity());
        }
        DiskPoint::new(self.apply_c(z.value), z.domain)
    }
}

/// σ_center(z) for z ∈ 𝔻 is w ↦ (w−z)/(1−z̄w); the fiber variant is the
/// automorphism used for the fiber coordinate at z ∈ 𝔻*.
pub fn sigma(z: &DiskPoint, variant: SigmaVariant) -> Result<MoebiusMap> {
    match variant {
        SigmaVariant::Center => {
            if z.domain != Domain::UnitDisk {
                return Err(Error::DomainMismatch);
            }
            sigma_center_c(z.value)
        }
        SigmaVariant::Fiber => {
            if z.domain != Domain::ExteriorDisk {
                return Err(Error::DomainMismatch);
            }
            if z.infinite {
                return Ok(MoebiusMap::identity());
            }
            Ok(sigma_fiber_c(z.value))
        }
    }
}

pub fn sigma_center(z: &DiskPoint) -> Result<MoebiusMap> {
    sigma(z, SigmaVariant::Center)
}

pub(crate) fn sigma_center_c(z: C64) -> Result<MoebiusMap> {
    let s = (1.0 - z.norm_sqr()).sqrt();
    if !(s > 0.0) {
        return Err(Error::BoundaryPoint(format!("{z}")));
    }
    Ok(MoebiusMap { a: C64::new(1.0 / s, 0.0), b: -z / s })
}

/// σ_w(z) = k(1−zw̄)/(z−w), k = (1−w)/(1−w̄), recast as (az+b)/(b̄z+ā).
pub(crate) fn sigma_fiber_c(w: C64) -> MoebiusMap {
    let k = (1.0 - w) / (1.0 - w.conj());
    // λ with λ/λ̄ = k̄ and |λ|² = 1/(|w|²−1)
    let lam = C64::from_polar(1.0 / (w.norm_sqr() - 1.0).sqrt(), -k.arg() / 2.0);
    MoebiusMap { a: -lam * k * w.conj(), b: lam * k }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CayleyDirection {
    DiskToUhp,
    UhpToDisk,
}

/// T(z) = (z−i)/(z+i) from 𝕌 to 𝔻 (so i ↦ 0) and its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CayleyMap {
    pub direction: CayleyDirection,
}

const I: C64 = C64::new(0.0, 1.0);

impl CayleyMap {
    pub fn to_disk() -> Self {
        Self { direction: CayleyDirection::UhpToDisk }
    }

    pub fn to_uhp() -> Self {
        Self { direction: CayleyDirection::DiskToUhp }
    }

    pub fn map_c(&self, z: C64) -> C64 {
        match self.direction {
            CayleyDirection::UhpToDisk => (z - I) / (z + I),
            CayleyDirection::DiskToUhp => I * (1.0 + z) / (1.0 - z),
        }
    }

    pub fn derivative_c(&self, z: C64) -> C64 {
        match self.direction {
            CayleyDirection::UhpToDisk => 2.0 * I / ((z + I) * (z + I)),
            CayleyDirection::DiskToUhp => 2.0 * I / ((1.0 - z) * (1.0 - z)),
        }
    }

    pub fn map(&self, z: &DiskPoint) -> Result<DiskPoint> {
        match (self.direction, z.domain) {
            (CayleyDirection::UhpToDisk, Domain::UpperHalfPlane) => DiskPoint::disk(self.map_c(z.value)),
            (CayleyDirection::DiskToUhp, Domain::UnitDisk) => DiskPoint::uhp(self.map_c(z.value)),
            _ => Err(Error::DomainMismatch),
        }
    }

    /// |T′(z)|².
    pub fn jacobian(&self, z: &DiskPoint) -> Result<f64> {
        self.map(z)?;
        Ok(self.derivative_c(z.value).norm_sqr())
    }

    pub fn inverse(&self) -> Self {
        match self.direction {
            CayleyDirection::UhpToDisk => Self::to_uhp(),
            CayleyDirection::DiskToUhp => Self::to_disk(),
        }
    }
}
