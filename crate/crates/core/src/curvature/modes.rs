//! Exact action of G on products of harmonic fields.
//!
//! In the chart w = 1/z̄ a product μν̄ of harmonic fields on 𝔻* is a finite
//! sum of f_ab = (1−t)⁴ w^{a−2} w̄^{b−2}, t = |w|². With j = a − b and
//! q = min(a,b) − 2, G(f_ab) = w^j (1−t)² P(t) for j ≥ 0 (w̄^{|j|} for j < 0)
//! where P has degree q + 1. Matching powers of t in
//! −½(1−t)²(t h″ + (|j|+1) h′) + h = (1−t)⁴ t^q, h = (1−t)² P,
//! leaves a tridiagonal system for the coefficients of P.

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::series::{weight, BeltramiField};
use crate::C64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Coefficients p_0..p_{q+1} of P for the mode (j, q).
pub fn resolvent_poly(j: usize, q: usize) -> Vec<f64> {
    let n = q + 2;
    let b: Vec<f64> = (0..n).map(|m| ((m + 1) * (m + j + 1)) as f64 / 2.0).collect();
    let mut rhs = vec![0.0; n];
    rhs[q] = 1.0;
    rhs[q + 1] = -2.0;
    // Thomas sweep for −B_m p_{m−1} + (2B_m+1) p_m − B_m p_{m+1} = rhs_m
    let mut cp = vec![0.0; n];
    let mut rp = vec![0.0; n];
    for m in 0..n {
        let (lo, prev_c, prev_r) = if m > 0 { (-b[m], cp[m - 1], rp[m - 1]) } else { (0.0, 0.0, 0.0) };
        let den = 2.0 * b[m] + 1.0 - lo * prev_c;
        cp[m] = -b[m] / den;
        rp[m] = (rhs[m] - lo * prev_r) / den;
    }
    let mut p = vec![0.0; n];
    for m in (0..n).rev() {
        p[m] = rp[m] - if m + 1 < n { cp[m] * p[m + 1] } else { 0.0 };
    }
    p
}

fn beta5(m: usize) -> f64 {
    // ∫₀¹ t^m (1−t)⁴ dt
    let m = m as f64;
    24.0 / ((m + 1.0) * (m + 2.0) * (m + 3.0) * (m + 4.0) * (m + 5.0))
}

/// ∬_𝔻 f_ab G(f_cd) ρ d²w, zero unless a − b = d − c.
pub fn pair_modes(a: usize, b: usize, c: usize, d: usize) -> f64 {
    if a as i64 - b as i64 != d as i64 - c as i64 {
        return 0.0;
    }
    let j = (a as i64 - b as i64).unsigned_abs() as usize;
    let (q1, q2) = (a.min(b) - 2, c.min(d) - 2);
    // G is symmetric, so solve on the side with the shorter polynomial
    let (qs, ql) = if q2 <= q1 { (q2, q1) } else { (q1, q2) };
    let p = resolvent_poly(j, qs);
    4.0 * PI * p.iter().enumerate().map(|(k, pk)| pk * beta5(ql + j + k)).sum::<f64>()
}

/// Σ C_ab f_ab in the chart w = 1/z̄, indices a, b ≥ 2.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProductField {
    pub terms: BTreeMap<(usize, usize), C64>,
}

fn exterior_coeffs(mu: &BeltramiField) -> Result<&[C64]> {
    if mu.domain != Domain::ExteriorDisk {
        return Err(Error::DomainMismatch);
    }
    mu.harmonic_coeffs()
}

impl ProductField {
    /// μν̄ for harmonic fields on 𝔻*.
    pub fn product(mu: &BeltramiField, nu: &BeltramiField) -> Result<Self> {
        let (x, y) = (exterior_coeffs(mu)?, exterior_coeffs(nu)?);
        let mut terms = BTreeMap::new();
        for (i, al) in x.iter().enumerate() {
            if *al == czero() {
                continue;
            }
            for (k, be) in y.iter().enumerate() {
                if *be == czero() {
                    continue;
                }
                let c = al * be.conj() * (0.25 * weight(i + 2) * weight(k + 2));
                *terms.entry((i + 2, k + 2)).or_insert(czero()) += c;
            }
        }
        Ok(Self { terms })
    }

    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(|((a, b), c)| ((*b, *a), c.conj())).collect() }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect() }
    }

    pub fn add(&self, other: &ProductField) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            *out.terms.entry(*k).or_insert(czero()) += c;
        }
        out
    }

    /// Value at w ∈ 𝔻, i.e. at the point 1/w̄ of 𝔻*.
    pub fn eval(&self, w: C64) -> C64 {
        let t = w.norm_sqr();
        let s: C64 = self.terms.iter().map(|((a, b), c)| c * w.powi(*a as i32 - 2) * w.conj().powi(*b as i32 - 2)).sum();
        s * (1.0 - t).powi(4)
    }

    /// G(X)(w) from the exact mode polynomials.
    pub fn resolvent_at(&self, w: C64) -> C64 {
        let t = w.norm_sqr();
        let mut acc = czero();
        for ((a, b), c) in &self.terms {
            let j = *a as i64 - *b as i64;
            let p = resolvent_poly(j.unsigned_abs() as usize, a.min(b) - 2);
            let pt = p.iter().rev().fold(0.0, |s, v| s * t + v);
            let mode = if j >= 0 { w.powi(j as i32) } else { w.conj().powi((-j) as i32) };
            acc += c * mode * ((1.0 - t) * (1.0 - t) * pt);
        }
        acc
    }

    /// G(X) as a polynomial in w, w̄.
    pub fn resolvent_poly(&self) -> BiPoly {
        let mut out = BiPoly::default();
        for ((a, b), c) in &self.terms {
            let j = *a as i64 - *b as i64;
            let p = resolvent_poly(j.unsigned_abs() as usize, a.min(b) - 2);
            // (1−t)² P(t) = Σ e_k t^k
            let mut e = vec![0.0; p.len() + 2];
            for (k, pk) in p.iter().enumerate() {
                e[k] += pk;
                e[k + 1] -= 2.0 * pk;
                e[k + 2] += pk;
            }
            let (dp, dq) = if j >= 0 { (j as u32, 0) } else { (0, (-j) as u32) };
            for (k, ek) in e.iter().enumerate() {
                out.add_term(k as u32 + dp, k as u32 + dq, c * ek);
            }
        }
        out
    }

    /// ∬ |X|² ρ d²w in closed form.
    pub fn l2_norm_sq(&self) -> f64 {
        // ∬ f_ab conj(f_cd) ρ = 4π ∫ (1−t)⁶ t^{a+d−4} dt when a − b = c − d
        let mut s = 0.0;
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &self.terms {
                if a + d != b + c {
                    continue;
                }
                let m = (a + d - 4) as f64;
                let beta7 = 720.0 / (1..=7).fold(1.0, |acc, k| acc * (m + k as f64));
                s += (x * y.conj()).re * 4.0 * PI * beta7;
            }
        }
        s
    }
}

/// ∬ X G(Y) ρ d²w, bilinear in both arguments.
pub fn pairing(x: &ProductField, y: &ProductField) -> C64 {
    let mut by_mode: BTreeMap<i64, Vec<(usize, usize, C64)>> = BTreeMap::new();
    for ((c, d), v) in &y.terms {
        by_mode.entry(*d as i64 - *c as i64).or_default().push((*c, *d, *v));
    }
    let mut acc = czero();
    for ((a, b), u) in &x.terms {
        if let Some(list) = by_mode.get(&(*a as i64 - *b as i64)) {
            for (c, d, v) in list {
                acc += u * v * pair_modes(*a, *b, *c, *d);
            }
        }
    }
    acc
}

/// (X, G(Y)) = ∬ X conj(G(Y)) ρ d²w.
pub fn hermitian_pairing(x: &ProductField, y: &ProductField) -> C64 {
    pairing(x, &y.conj())
}

/// Polynomial Σ c w^p w̄^q.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BiPoly {
    pub terms: BTreeMap<(u32, u32), C64>,
}

impl BiPoly {
    pub fn add_term(&mut self, p: u32, q: u32, c: C64) {
        *self.terms.entry((p, q)).or_insert(czero()) += c;
    }

    pub fn eval(&self, w: C64) -> C64 {
        self.terms.iter().map(|((p, q), c)| c * w.powi(*p as i32) * w.conj().powi(*q as i32)).sum()
    }

    pub fn d_w(&self) -> BiPoly {
        let mut out = BiPoly::default();
        for ((p, q), c) in &self.terms {
            if *p > 0 {
                out.add_term(p - 1, *q, c * *p as f64);
            }
        }
        out
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly::default();
        for ((p, q), c) in &self.terms {
            for ((r, s), d) in &other.terms {
                out.add_term(p + r, q + s, c * d);
            }
        }
        out
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for ((p, q), c) in &other.terms {
            out.add_term(*p, *q, *c);
        }
        out
    }

    pub fn scaled(&self, s: C64) -> BiPoly {
        BiPoly { terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect() }
    }

    /// 1 − w w̄
    pub fn one_minus_t() -> BiPoly {
        let mut b = BiPoly::default();
        b.add_term(0, 0, C64::new(1.0, 0.0));
        b.add_term(1, 1, C64::new(-1.0, 0.0));
        b
    }

    /// ∬_𝔻 A conj(B) d²w in closed form.
    pub fn disk_inner(&self, other: &BiPoly) -> C64 {
        let mut acc = czero();
        for ((p, q), c) in &self.terms {
            for ((r, s), d) in &other.terms {
                if p + s == q + r {
                    acc += c * d.conj() * (PI / (p + s + 1) as f64);
                }
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_eval(p: &[f64], t: f64) -> f64 {
        p.iter().rev().fold(0.0, |s, v| s * t + v)
    }

    fn deriv(p: &[f64]) -> Vec<f64> {
        p.iter().enumerate().skip(1).map(|(k, v)| v * k as f64).collect()
    }

    #[test]
    fn mode_polynomial_solves_radial_equation() {
        for (j, q) in [(0, 0), (0, 7), (3, 2), (12, 5), (1, 20)] {
            let p = resolvent_poly(j, q);
            // h = (1−t)² P as a polynomial
            let mut h = vec![0.0; p.len() + 2];
            for (k, pk) in p.iter().enumerate() {
                h[k] += pk;
                h[k + 1] -= 2.0 * pk;
                h[k + 2] += pk;
            }
            let (h1, h2) = (deriv(&h), deriv(&deriv(&h)));
            for t in [0.0, 0.13, 0.5, 0.91] {
                let lhs = -0.5 * (1.0 - t) * (1.0 - t) * (t * poly_eval(&h2, t) + (j as f64 + 1.0) * poly_eval(&h1, t))
                    + poly_eval(&h, t);
                let rhs = (1.0 - t).powi(4) * t.powi(q as i32);
                assert!((lhs - rhs).abs() < 1e-12, "j={j} q={q} t={t}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn pairing_is_symmetric() {
        for (a, b, c, d) in [(2, 2, 3, 3), (5, 2, 2, 5), (7, 4, 3, 6), (3, 9, 9, 3)] {
            let x = pair_modes(a, b, c, d);
            let y = pair_modes(c, d, a, b);
            assert!((x - y).abs() < 1e-14 * x.abs().max(1e-300), "{x} {y}");
        }
        assert_eq!(pair_modes(2, 3, 2, 3), 0.0);
    }

    #[test]
    fn resolvent_matches_quadrature() {
        use crate::geometry::DiskPoint;
        use crate::quadrature::{apply_resolvent, QuadRule};
        let mu = crate::series::basis_mu(3).unwrap();
        let nu = crate::series::basis_mu_in(2, 3).unwrap().scaled(C64::new(0.3, -0.7));
        let x = ProductField::product(&mu, &nu).unwrap().add(&ProductField::product(&nu, &nu).unwrap());
        let rule = QuadRule::default_rule();
        for w in [C64::new(0.2, 0.1), C64::new(-0.5, 0.4)] {
            let exact = x.resolvent_at(w);
            let quad = apply_resolvent(|v| x.eval(v), &DiskPoint::disk(w).unwrap(), &rule).unwrap();
            assert!((exact - quad).norm() < 1e-9 * exact.norm().max(1e-3), "{exact} {quad}");
            assert!((x.resolvent_poly().eval(w) - exact).norm() < 1e-14);
        }
    }
}
