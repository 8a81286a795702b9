//! Finite sums Σ c · r^a (log r)^p e^{ibθ} on the closed unit disk, with the
//! Cauchy transform P, its z-derivative H and exact ∂_z, ∂_z̄ acting term by
//! term. Keys are kept in a BTreeMap so every traversal is deterministic.

use crate::error::{Error, Result};
use crate::C64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// (a, b, p) ↦ r^a (log r)^p e^{ibθ}
pub type Key = (i32, i32, u32);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolarSeries {
    pub terms: BTreeMap<Key, C64>,
}

/// Laurent polynomial Σ c_k z^k valid on |z| ≥ 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Laurent {
    pub coeffs: BTreeMap<i32, C64>,
}

impl Laurent {
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().map(|(k, c)| c * z.powi(*k)).sum()
    }

    pub fn derivative(&self) -> Laurent {
        let mut out = Laurent::default();
        for (k, c) in &self.coeffs {
            if *k != 0 {
                out.coeffs.insert(k - 1, c * *k as f64);
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &Laurent) {
        for (k, c) in &other.coeffs {
            *self.coeffs.entry(*k).or_default() += c;
        }
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

impl PolarSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        let mut s = Self::zero();
        s.add_term((0, 0, 0), c);
        s
    }

    /// z^p z̄^q
    pub fn monomial(p: u32, q: u32, c: C64) -> Self {
        let mut s = Self::zero();
        s.add_term(((p + q) as i32, p as i32 - q as i32, 0), c);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, key: Key, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let e = self.terms.entry(key).or_default();
        *e += c;
        if *e == C64::new(0.0, 0.0) {
            self.terms.remove(&key);
        }
    }

    pub fn add_assign(&mut self, other: &PolarSeries) {
        for (k, c) in &other.terms {
            self.add_term(*k, *c);
        }
    }

    pub fn scaled(&self, s: C64) -> PolarSeries {
        PolarSeries { terms: self.terms.iter().map(|(k, c)| (*k, c * s)).filter(|(_, c)| c.norm_sqr() > 0.0).collect() }
    }

    pub fn mul(&self, other: &PolarSeries) -> PolarSeries {
        let mut out = PolarSeries::zero();
        for ((a1, b1, p1), c1) in &self.terms {
            for ((a2, b2, p2), c2) in &other.terms {
                *out.terms.entry((a1 + a2, b1 + b2, p1 + p2)).or_default() += c1 * c2;
            }
        }
        out.terms.retain(|_, c| c.norm_sqr() > 0.0);
        out
    }

    /// Drops terms whose coefficient is below `tol` in modulus.
    pub fn pruned(mut self, tol: f64) -> PolarSeries {
        self.terms.retain(|_, c| c.norm() > tol);
        self
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// True when every term is a monomial z^p z̄^q.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|(a, b, p)| *p == 0 && *a >= b.abs() && (a - b) % 2 == 0)
    }

    pub fn eval(&self, z: C64) -> C64 {
        if self.terms.is_empty() {
            return C64::new(0.0, 0.0);
        }
        let r = z.norm();
        if r == 0.0 {
            let mut v = C64::new(0.0, 0.0);
            for ((a, b, p), c) in &self.terms {
                if *a == 0 && *p == 0 && *b == 0 {
                    v += c;
                } else if *a < 0 || (*a == 0 && *p > 0) {
                    return C64::new(f64::INFINITY, f64::INFINITY);
                }
            }
            return v;
        }
        let (amin, amax) = self.terms.keys().fold((i32::MAX, i32::MIN), |(lo, hi), k| (lo.min(k.0), hi.max(k.0)));
        let (bmin, bmax) = self.terms.keys().fold((i32::MAX, i32::MIN), |(lo, hi), k| (lo.min(k.1), hi.max(k.1)));
        let pmax = self.terms.keys().map(|k| k.2).max().unwrap_or(0);
        let ra: Vec<f64> = (amin..=amax).map(|a| r.powi(a)).collect();
        let u = z / r;
        let eb: Vec<C64> = (bmin..=bmax).map(|b| u.powi(b)).collect();
        let l = r.ln();
        let lp: Vec<f64> = (0..=pmax).map(|p| l.powi(p as i32)).collect();
        let mut v = C64::new(0.0, 0.0);
        for ((a, b, p), c) in &self.terms {
            v += c * eb[(b - bmin) as usize] * (ra[(a - amin) as usize] * lp[*p as usize]);
        }
        v
    }

    /// ∂_z(r^a L^p e^{ibθ}) = r^{a−1} e^{i(b−1)θ} [((a+b)/2) L^p + (p/2) L^{p−1}].
    pub fn d_z(&self) -> PolarSeries {
        let mut out = PolarSeries::zero();
        for ((a, b, p), c) in &self.terms {
            let f = 0.5 * (a + b) as f64;
            if f != 0.0 {
                out.add_term((a - 1, b - 1, *p), c * f);
            }
            if *p > 0 {
                out.add_term((a - 1, b - 1, p - 1), c * (0.5 * *p as f64));
            }
        }
        out
    }

    /// ∂_z̄(r^a L^p e^{ibθ}) = r^{a−1} e^{i(b+1)θ} [((a−b)/2) L^p + (p/2) L^{p−1}].
    pub fn d_zbar(&self) -> PolarSeries {
        let mut out = PolarSeries::zero();
        for ((a, b, p), c) in &self.terms {
            let f = 0.5 * (a - b) as f64;
            if f != 0.0 {
                out.add_term((a - 1, b + 1, *p), c * f);
            }
            if *p > 0 {
                out.add_term((a - 1, b + 1, p - 1), c * (0.5 * *p as f64));
            }
        }
        out
    }

    /// Complex conjugate: e^{ibθ} ↦ e^{−ibθ}.
    pub fn conj(&self) -> PolarSeries {
        PolarSeries { terms: self.terms.iter().map(|((a, b, p), c)| ((*a, -*b, *p), c.conj())).collect() }
    }

    /// Cauchy transform P(h)(z) = −(1/π)∬_𝔻 h(ζ)/(ζ−z) d²ζ, as the series valid
    /// on |z| ≤ 1 and the Laurent polynomial valid on |z| ≥ 1.
    ///
    /// For a term of angular mode m and exponent e = a − m + 2 the angular
    /// integral keeps only the part of the kernel expansion with the matching
    /// power, which leaves a one-dimensional ∫ ρ^{e−1}(log ρ)^p dρ.
    pub fn cauchy(&self) -> Result<(PolarSeries, Laurent)> {
        let mut inside = PolarSeries::zero();
        let mut outside = Laurent::default();
        for (&(s, m, p), &c) in &self.terms {
            let e = s - m + 2;
            let pf = factorial(p);
            if m <= 0 {
                if e <= 0 {
                    return Err(Error::TruncationExceeded(format!("term r^{s} log^{p} e^{{i{m}θ}} is not integrable")));
                }
                let ef = e as f64;
                for j in 0..=p {
                    let sign = if (p - j) % 2 == 0 { 1.0 } else { -1.0 };
                    let coef = sign * pf / factorial(j) / ef.powi((p - j + 1) as i32);
                    inside.add_term((s + 1, m - 1, j), c * (2.0 * coef));
                }
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                *outside.coeffs.entry(m - 1).or_default() += c * (2.0 * sign * pf / ef.powi((p + 1) as i32));
            } else if e != 0 {
                let ef = e as f64;
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                let f1 = sign * pf / ef.powi((p + 1) as i32);
                inside.add_term((m - 1, m - 1, 0), c * (-2.0 * f1));
                for j in 0..=p {
                    let sign = if (p - j) % 2 == 0 { 1.0 } else { -1.0 };
                    let coef = sign * pf / factorial(j) / ef.powi((p - j + 1) as i32);
                    inside.add_term((s + 1, m - 1, j), c * (2.0 * coef));
                }
            } else {
                inside.add_term((m - 1, m - 1, p + 1), c * (2.0 / (p + 1) as f64));
            }
        }
        outside.coeffs.retain(|_, c| c.norm_sqr() > 0.0);
        Ok((inside, outside))
    }

    /// H(h) = ∂_z P(h) on the disk and on the exterior.
    pub fn beurling(&self) -> Result<(PolarSeries, Laurent)> {
        let (pin, pout) = self.cauchy()?;
        Ok((pin.d_z(), pout.derivative()))
    }

    /// Σ |c|, a bound for the rounding error of [`PolarSeries::eval`] on the disk.
    pub fn l1_coeffs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// ∬_𝔻 |h|² d²z from ∫₀¹ r^{c+1}(log r)^P dr = (−1)^P P!/(c+2)^{P+1}.
    pub fn l2_norm_sq(&self) -> f64 {
        self.l2_norm_sq_with_bound().0.max(0.0)
    }

    /// The Gram value together with a bound on its rounding error, which
    /// exceeds the value itself when the monomial coefficients cancel.
    pub fn l2_norm_sq_with_bound(&self) -> (f64, f64) {
        let mut by_mode: BTreeMap<i32, Vec<(i32, u32, C64)>> = BTreeMap::new();
        for ((a, b, p), c) in &self.terms {
            by_mode.entry(*b).or_default().push((*a, *p, *c));
        }
        let mut total = 0.0;
        let mut bound = 0.0;
        for terms in by_mode.values() {
            let mut acc = 0.0;
            let mut mag = 0.0;
            for (a1, p1, c1) in terms {
                for (a2, p2, c2) in terms {
                    let cc = (a1 + a2) as f64;
                    let pp = p1 + p2;
                    let sign = if pp % 2 == 0 { 1.0 } else { -1.0 };
                    let m = sign * factorial(pp) / (cc + 2.0).powi(pp as i32 + 1);
                    let v = (c1 * c2.conj()).re * m;
                    acc += v;
                    mag += v.abs();
                }
            }
            total += 2.0 * PI * acc;
            bound += 2.0 * PI * mag * 1e-15;
        }
        (total, bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cauchy_of_indicator() {
        let one = PolarSeries::constant(c(1.0, 0.0));
        let (pin, pout) = one.cauchy().unwrap();
        for z in [c(0.3, 0.2), c(-0.5, 0.1)] {
            assert!((pin.eval(z) - z.conj()).norm() < 1e-15);
        }
        for z in [c(1.5, 0.2), c(-2.0, 1.0)] {
            assert!((pout.eval(z) - 1.0 / z).norm() < 1e-15);
        }
        let (hin, hout) = one.beurling().unwrap();
        assert!(hin.eval(c(0.2, 0.1)).norm() < 1e-15);
        let z = c(1.3, -0.4);
        assert!((hout.eval(z) + 1.0 / (z * z)).norm() < 1e-15);
    }

    #[test]
    fn monomial_transform_inside_and_outside() {
        // P(z^p z̄^q) = z^p z̄^{q+1}/(q+1) inside, z^{p−q−1}/(q+1) outside (p ≤ q)
        let h = PolarSeries::monomial(1, 3, c(1.0, 0.0));
        let (pin, pout) = h.cauchy().unwrap();
        let z = c(0.4, -0.3);
        let want = z * z.conj().powi(4) / 4.0;
        assert!((pin.eval(z) - want).norm() < 1e-15);
        let z = c(1.4, 0.7);
        assert!((pout.eval(z) - z.powi(-3) / 4.0).norm() < 1e-15);
    }

    #[test]
    fn derivatives_of_monomials() {
        let h = PolarSeries::monomial(3, 2, c(1.0, 0.0));
        let z = c(0.3, 0.5);
        let dz = h.d_z().eval(z);
        let dzb = h.d_zbar().eval(z);
        assert!((dz - 3.0 * z.powi(2) * z.conj().powi(2)).norm() < 1e-14);
        assert!((dzb - 2.0 * z.powi(3) * z.conj()).norm() < 1e-14);
    }

    #[test]
    fn gram_norm_matches_closed_form() {
        // ∬_𝔻 |z|^4 d²z = π/3
        let h = PolarSeries::monomial(1, 1, c(1.0, 0.0));
        assert!((h.l2_norm_sq() - PI / 3.0).abs() < 1e-14);
    }
}
