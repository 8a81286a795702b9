//! Schwarzian derivatives from exact 3-jets, and the Bers embedding
//! β([μ]) = S(f^μ|_𝔻).

use super::{QCMap, Normalization};
use crate::error::{Error, Result};
use crate::geometry::MoebiusMap;
use crate::series::{grid_sup, BeltramiField, HoloCoeffs};
use crate::C64;

/// Values (f, f′, f″, f‴) at a point.
pub trait Jet3 {
    fn jet3(&self, z: C64) -> Result<[C64; 4]>;
}

fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

impl Jet3 for HoloCoeffs {
    fn jet3(&self, z: C64) -> Result<[C64; 4]> {
        if self.domain != crate::geometry::Domain::UnitDisk {
            return Err(Error::DomainMismatch);
        }
        let mut d = [czero(); 4];
        for c in self.coeffs.iter().rev() {
            d[3] = d[3] * z + d[2] * 3.0;
            d[2] = d[2] * z + d[1] * 2.0;
            d[1] = d[1] * z + d[0];
            d[0] = d[0] * z + c;
        }
        Ok(d)
    }
}

/// z ↦ (az+b)/(cz+d) with ad − bc ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mobius {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        if (a * d - b * c).norm() < 1e-300 {
            return Err(Error::CriticalPoint("singular Möbius matrix".into()));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn apply(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn compose(&self, o: &Mobius) -> Mobius {
        Mobius {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// The map sending p_k to q_k, k = 1, 2, 3 (all finite and distinct).
    pub fn from_three_points(p: [C64; 3], q: [C64; 3]) -> Result<Self> {
        // z ↦ (z−p1)(p2−p3)/((z−p3)(p2−p1)) sends p1, p2, p3 to 0, 1, ∞
        let cross = |p: [C64; 3]| Mobius::new(p[1] - p[2], -p[0] * (p[1] - p[2]), p[1] - p[0], -p[2] * (p[1] - p[0]));
        let tp = cross(p)?;
        let tq = cross(q)?;
        Ok(tq.inverse().compose(&tp))
    }
}

impl From<MoebiusMap> for Mobius {
    fn from(m: MoebiusMap) -> Self {
        Mobius { a: m.a, b: m.b, c: m.b.conj(), d: m.a.conj() }
    }
}

impl Jet3 for Mobius {
    fn jet3(&self, z: C64) -> Result<[C64; 4]> {
        let den = self.c * z + self.d;
        if den.norm() == 0.0 {
            return Err(Error::CriticalPoint(format!("pole at {z}")));
        }
        let det = self.a * self.d - self.b * self.c;
        let f1 = det / (den * den);
        let f2 = -2.0 * self.c * f1 / den;
        let f3 = -3.0 * self.c * f2 / den;
        Ok([self.apply(z), f1, f2, f3])
    }
}

impl Jet3 for MoebiusMap {
    fn jet3(&self, z: C64) -> Result<[C64; 4]> {
        Mobius::from(*self).jet3(z)
    }
}

/// outer ∘ inner by the chain rule.
pub struct Composed<'a, A: ?Sized, B: ?Sized> {
    pub outer: &'a A,
    pub inner: &'a B,
}

impl<A: Jet3 + ?Sized, B: Jet3 + ?Sized> Jet3 for Composed<'_, A, B> {
    fn jet3(&self, z: C64) -> Result<[C64; 4]> {
        let [g0, g1, g2, g3] = self.inner.jet3(z)?;
        let [_, f1, f2, f3] = self.outer.jet3(g0)?;
        let f0 = self.outer.jet3(g0)?[0];
        Ok([f0, f1 * g1, f2 * g1 * g1 + f1 * g2, f3 * g1 * g1 * g1 + 3.0 * f2 * g1 * g2 + f1 * g3])
    }
}

/// S(f) = f‴/f′ − (3/2)(f″/f′)².
pub fn schwarzian(f: &(impl Jet3 + ?Sized), z: C64) -> Result<C64> {
    let [_, f1, f2, f3] = f.jet3(z)?;
    if f1.norm() < 1e-12 {
        return Err(Error::CriticalPoint(format!("|f′| = {:e} at {z}", f1.norm())));
    }
    let r = f2 / f1;
    Ok(f3 / f1 - 1.5 * r * r)
}

fn series_mul(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![czero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn series_div(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut q = vec![czero(); n];
    for k in 0..n {
        let mut s = a.get(k).copied().unwrap_or_default();
        for j in 1..=k.min(b.len().saturating_sub(1)) {
            s -= b[j] * q[k - j];
        }
        q[k] = s / b[0];
    }
    q
}

fn series_deriv(a: &[C64]) -> Vec<C64> {
    a.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

/// Taylor coefficients c_0..c_{N−1} of S(f^μ) on 𝔻 for the Model B map.
pub fn bers_embedding(mu: &BeltramiField, truncation: usize, tol: f64) -> Result<HoloCoeffs> {
    let qc = super::solve_beltrami(mu, Normalization::ModelB, tol)?;
    Ok(bers_coeffs(&qc, truncation))
}

pub(crate) fn bers_coeffs(qc: &QCMap, truncation: usize) -> HoloCoeffs {
    let m = truncation + 4;
    let mut f = vec![czero(); m];
    for (n, a) in qc.interior_coeffs(m - 1).into_iter().enumerate() {
        f[n + 1] = a;
    }
    let f1 = series_deriv(&f);
    let f2 = series_deriv(&f1);
    let f3 = series_deriv(&f2);
    let r = series_div(&f2, &f1, truncation);
    let t = series_div(&f3, &f1, truncation);
    let rr = series_mul(&r, &r, truncation);
    HoloCoeffs::disk((0..truncation).map(|k| t[k] - 1.5 * rr[k]).collect())
}

/// S(f^μ)(z) for z ∈ 𝔻 from the exact rational form of the interior map.
pub fn bers_embedding_at(qc: &QCMap, z: C64) -> Result<C64> {
    schwarzian(qc, z)
}

/// sup (1−|z|²)² |S(f^μ)(z)| over 𝔻.
pub fn bers_sup_norm(qc: &QCMap) -> f64 {
    grid_sup(|z| (1.0 - z.norm_sqr()).powi(2) * bers_embedding_at(qc, z).map(|v| v.norm()).unwrap_or(f64::INFINITY))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_map() {
        let f = HoloCoeffs::disk(vec![czero(), czero(), C64::new(1.0, 0.0)]);
        let s = schwarzian(&f, C64::new(1.0, 0.0)).unwrap();
        assert!((s + 1.5).norm() < 1e-15);
        assert!(matches!(schwarzian(&f, czero()), Err(Error::CriticalPoint(_))));
    }

    #[test]
    fn three_point_map() {
        let p = [C64::new(0.3, 0.1), C64::new(-1.0, 2.0), C64::new(4.0, 0.0)];
        let q = [C64::new(-1.0, 0.0), C64::new(0.0, -1.0), C64::new(1.0, 0.0)];
        let m = Mobius::from_three_points(p, q).unwrap();
        for k in 0..3 {
            assert!((m.apply(p[k]) - q[k]).norm() < 1e-13);
        }
        assert!(schwarzian(&m, C64::new(0.2, 0.7)).unwrap().norm() < 1e-12);
    }
}
