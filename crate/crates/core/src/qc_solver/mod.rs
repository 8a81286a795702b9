//! Beltrami equation on the sphere for fields supported on 𝔻*.
//!
//! Everything is done in the chart ζ = 1/z, where the field becomes
//! ν(ζ) = μ(1/ζ) ζ²/ζ̄² on the closed unit disk and the map
//! W(ζ) = 1/w(1/ζ) = ζ + Σ_k P(T_k), T_0 = ν, T_{k+1} = ν H(T_k).
//! On |ζ| ≥ 1 the transform is a Laurent polynomial ζ + Σ_{k≤−1} d_k ζ^k,
//! so the interior (Model B) map is the rational function f(z) = z/D(z) with
//! D(z) = 1 + Σ d_k z^{1−k}; f(0) = 0, f′(0) = 1, f″(0) = 0 hold identically.

pub mod polar;
mod schwarzian;
mod welding;

pub use schwarzian::{bers_embedding, bers_embedding_at, bers_sup_norm, schwarzian, Composed, Jet3, Mobius};
pub use welding::{welding_decompose, Theodorsen, WeldingData};

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::quadrature::{GridFunction, QuadRule};
use crate::series::{fit_chart_polynomial, reflect, weight, BeltramiField, FieldRepr};
use crate::C64;
use polar::{Laurent, PolarSeries};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

pub const MAX_TERMS: usize = 50;
pub const MAX_SUP_NORM: f64 = 0.5;
/// Allowed slack on the contraction ‖T_{k+1}‖ ≤ ‖ν‖∞ ‖T_k‖.
pub const DECAY_SLACK: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// μ on 𝔻*, its reflection on 𝔻, fixing −1, −i and 1
    ModelA,
    /// μ on 𝔻*, zero on 𝔻, f(0) = 0, f′(0) = 1, f″(0) = 0
    ModelB,
}

fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

/// ν(ζ) = −½(1−|ζ|²)² Σ (n³−n) a_n ζ̄^{n−2} for a harmonic exterior field.
fn harmonic_chart(a: &[C64]) -> PolarSeries {
    let mut s = PolarSeries::zero();
    for (i, c) in a.iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let q = i as u32;
        let k = c * (-0.5 * weight(i + 2));
        s.add_assign(&PolarSeries::monomial(0, q, k));
        s.add_assign(&PolarSeries::monomial(1, q + 1, k * -2.0));
        s.add_assign(&PolarSeries::monomial(2, q + 2, k));
    }
    s
}

/// Chart series of an exterior field and the truncation error of that
/// representation (zero unless the field was sampled).
pub fn chart_series(mu: &BeltramiField) -> Result<(PolarSeries, f64)> {
    let field = match mu.domain {
        Domain::ExteriorDisk => mu.clone(),
        Domain::UnitDisk => reflect(mu)?,
        Domain::UpperHalfPlane => return Err(Error::DomainMismatch),
    };
    match &field.repr {
        FieldRepr::Harmonic(a) => Ok((harmonic_chart(a), 0.0)),
        FieldRepr::Chart(p) => Ok((p.clone(), 0.0)),
        FieldRepr::Sampled(g) => fit_chart_polynomial(g, 12),
    }
}

/// Exact Cauchy transform P(h)(z) = −(1/π)∬_𝔻 h(ζ)/(ζ−z) d²ζ.
pub fn cauchy_transform(h: &PolarSeries, z: C64) -> Result<C64> {
    let (inside, outside) = h.cauchy()?;
    Ok(if z.norm() <= 1.0 { inside.eval(z) } else { outside.eval(z) })
}

/// H(h) = ∂_z P(h), from the monomial action of P followed by exact differentiation.
pub fn beurling_transform(h: &PolarSeries, z: C64) -> Result<C64> {
    let (inside, outside) = h.beurling()?;
    Ok(if z.norm() <= 1.0 { inside.eval(z) } else { outside.eval(z) })
}

/// P(h)(z) by quadrature in polar coordinates centred at z, which removes the
/// 1/|ζ−z| singularity; `radial` Gauss points per ray and `angular` rays.
pub fn cauchy_transform_quad(h: impl Fn(C64) -> C64 + Sync, z: C64, radial: usize, angular: usize) -> C64 {
    let gl = crate::quadrature::gauss_legendre(radial);
    if z.norm() >= 1.0 {
        let rule = QuadRule::new(radial, angular.max(8) & !1).expect("valid rule");
        return crate::quadrature::integrate_disk(|w| h(w) / (w - z), &rule, crate::quadrature::Measure::Euclidean)
            .unwrap_or(C64::new(f64::NAN, f64::NAN))
            * (-1.0 / PI);
    }
    let terms: Vec<C64> = (0..angular)
        .into_par_iter()
        .map(|j| {
            let phi = 2.0 * PI * (j as f64 + 0.5) / angular as f64;
            let e = C64::from_polar(1.0, phi);
            let b = (z.conj() * e).re;
            let reach = -b + (b * b + 1.0 - z.norm_sqr()).sqrt();
            let mut acc = czero();
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                acc += h(z + e * (reach * x)) * (w * reach);
            }
            acc / e * (2.0 * PI / angular as f64)
        })
        .collect();
    crate::quadrature::pairwise_sum(&terms) * (-1.0 / PI)
}

/// Outcome of the Neumann series in the ζ-chart.
#[derive(Debug, Clone)]
pub struct ChartSolution {
    pub nu: PolarSeries,
    pub inside: PolarSeries,
    pub outside: Laurent,
    pub term_norms: Vec<f64>,
    /// largest observed ‖T_{k+1}‖/(‖ν‖∞‖T_k‖)
    pub decay_constant: f64,
    pub last_term: PolarSeries,
}

/// L² norm of a chart series: the exact Gram form when it is well conditioned,
/// otherwise samples on a small product rule, since the Gram form cancels
/// catastrophically once the terms are small.
fn sampled_l2(s: &PolarSeries, rule: &QuadRule) -> f64 {
    let (g, bound) = s.l2_norm_sq_with_bound();
    if g > 1e3 * bound {
        return g.sqrt();
    }
    let v: Vec<f64> = (0..rule.node_count())
        .into_par_iter()
        .map(|k| s.eval(rule.node(k)).norm_sqr() * rule.weight(k))
        .collect();
    crate::quadrature::pairwise_sum_real(&v).sqrt()
}

pub fn neumann_solve(nu: &PolarSeries, sup: f64, tol: f64) -> Result<ChartSolution> {
    let rule = QuadRule::new(24, 48)?;
    let mut inside = PolarSeries::monomial(1, 0, C64::new(1.0, 0.0));
    let mut outside = Laurent::default();
    outside.coeffs.insert(1, C64::new(1.0, 0.0));
    let mut term = nu.clone();
    let mut norms = Vec::new();
    let mut decay: f64 = 0.0;
    let n0 = sampled_l2(nu, &rule);
    if n0 == 0.0 {
        return Ok(ChartSolution { nu: nu.clone(), inside, outside, term_norms: vec![0.0], decay_constant: 0.0, last_term: term });
    }
    for k in 0..MAX_TERMS {
        let nk = sampled_l2(&term, &rule);
        norms.push(nk);
        if k > 0 && sup > 0.0 {
            let prev = norms[k - 1];
            // rounding in the monomial form sets a floor below which ratios are noise
            let floor = 1e-17 * term.l1_coeffs();
            if nk > 1e3 * floor && nk > 1e-8 * n0 && prev > 0.0 {
                let ratio = nk / (prev * sup);
                decay = decay.max(ratio);
                if ratio > DECAY_SLACK {
                    return Err(Error::NoConvergence(k));
                }
            }
        }
        let (pin, pout) = term.cauchy()?;
        inside.add_assign(&pin);
        outside.add_assign(&pout);
        if nk <= tol * PI.sqrt() {
            return Ok(ChartSolution { nu: nu.clone(), inside, outside, term_norms: norms, decay_constant: decay, last_term: term });
        }
        // the monomial recursion amplifies rounding; once a term is at the
        // rounding floor further terms carry no information
        if nk <= 3e-17 * term.l1_coeffs() {
            return Ok(ChartSolution { nu: nu.clone(), inside, outside, term_norms: norms, decay_constant: decay, last_term: term });
        }
        let scale = term.max_abs_coeff();
        let (h, _) = term.beurling()?;
        term = nu.mul(&h).pruned(1e-30 * scale.max(1e-300));
    }
    Err(Error::NoConvergence(MAX_TERMS))
}

/// Data of the Model A normalization on top of the welding.
#[derive(Debug, Clone)]
struct ModelAData {
    moebius: Mobius,
}

/// A solved quasiconformal map.
#[derive(Debug)]
pub struct QCMap {
    pub mu: BeltramiField,
    pub normalization: Normalization,
    pub chart: ChartSolution,
    /// D(z) = Σ d_j z^j with d_0 = 1
    pub denominator: Vec<C64>,
    pub series_terms: usize,
    /// max |W_ζ̄ − ν W_ζ| over the nodes of a 32×64 rule in the ζ-chart
    pub residual_norm: f64,
    pub truncation_error: f64,
    theodorsen: OnceLock<std::result::Result<Arc<Theodorsen>, Error>>,
    model_a: OnceLock<std::result::Result<ModelAData, Error>>,
}

pub fn solve_beltrami(mu: &BeltramiField, normalization: Normalization, tol: f64) -> Result<QCMap> {
    let sup = mu.sup_norm();
    if sup > MAX_SUP_NORM * (1.0 + 1e-12) {
        return Err(Error::NormTooLarge(sup));
    }
    let (nu, trunc) = chart_series(mu)?;
    let chart = neumann_solve(&nu, sup, tol)?;
    let mut denominator = vec![C64::new(1.0, 0.0)];
    for (k, c) in &chart.outside.coeffs {
        if *k <= -1 {
            let j = (1 - k) as usize;
            if denominator.len() <= j {
                denominator.resize(j + 1, czero());
            }
            denominator[j] += c;
        } else if *k != 1 || (c - 1.0).norm() > 1e-12 {
            return Err(Error::TruncationExceeded(format!("unexpected exterior term ζ^{k}")));
        }
    }
    let residual = chart_residual(&chart)?;
    let qc = QCMap {
        mu: mu.clone(),
        normalization,
        series_terms: chart.term_norms.len(),
        chart,
        denominator,
        residual_norm: residual,
        truncation_error: trunc,
        theodorsen: OnceLock::new(),
        model_a: OnceLock::new(),
    };
    if normalization == Normalization::ModelA {
        qc.model_a_data()?;
    }
    Ok(qc)
}

fn chart_residual(c: &ChartSolution) -> Result<f64> {
    let rule = QuadRule::new(32, 64)?;
    let wz = c.inside.d_z();
    let wzb = c.inside.d_zbar();
    let v: Vec<f64> = (0..rule.node_count())
        .into_par_iter()
        .map(|k| {
            let z = rule.node(k);
            (wzb.eval(z) - c.nu.eval(z) * wz.eval(z)).norm()
        })
        .collect();
    Ok(v.into_iter().fold(0.0, f64::max))
}

impl QCMap {
    /// W(ζ) in the inverted chart.
    pub fn chart_eval(&self, zeta: C64) -> C64 {
        if zeta.norm() <= 1.0 {
            self.chart.inside.eval(zeta)
        } else {
            self.chart.outside.eval(zeta)
        }
    }

    pub fn d_eval(&self, z: C64) -> C64 {
        self.denominator.iter().rev().fold(czero(), |acc, c| acc * z + c)
    }

    /// The Model B map f^μ: z/D(z) on the closed disk, 1/W(1/z) outside.
    pub fn model_b(&self, z: C64) -> C64 {
        if z.norm() <= 1.0 {
            z / self.d_eval(z)
        } else {
            1.0 / self.chart.inside.eval(1.0 / z)
        }
    }

    /// |W(0)|; zero means f^μ fixes ∞.
    pub fn chart_origin_value(&self) -> f64 {
        self.chart.inside.eval(czero()).norm()
    }

    pub fn theodorsen(&self) -> Result<Arc<Theodorsen>> {
        self.theodorsen.get_or_init(|| Theodorsen::compute(self).map(Arc::new)).clone()
    }

    fn model_a_data(&self) -> Result<ModelAData> {
        self.model_a
            .get_or_init(|| {
                let th = self.theodorsen()?;
                let src = [
                    th.welded_exterior(self, C64::new(-1.0, 0.0))?,
                    th.welded_exterior(self, C64::new(0.0, -1.0))?,
                    th.welded_exterior(self, C64::new(1.0, 0.0))?,
                ];
                let dst = [C64::new(-1.0, 0.0), C64::new(0.0, -1.0), C64::new(1.0, 0.0)];
                Ok(ModelAData { moebius: Mobius::from_three_points(src, dst)? })
            })
            .clone()
    }

    /// γ_μ: the welded map g⁻¹∘f^μ on 𝔻*, rotated so that γ_μ(1) = 1, and its
    /// reflection on 𝔻.
    pub fn welded(&self, z: C64) -> Result<C64> {
        let th = self.theodorsen()?;
        if z.norm() >= 1.0 {
            th.welded_exterior(self, z)
        } else if z.norm() == 0.0 {
            Ok(czero())
        } else {
            Ok(1.0 / th.welded_exterior(self, 1.0 / z.conj())?.conj())
        }
    }

    /// The Model A map: Möbius-normalized welded map fixing −1, −i, 1.
    pub fn model_a(&self, z: C64) -> Result<C64> {
        let m = &self.model_a_data()?.moebius;
        if z.norm() >= 1.0 {
            Ok(m.apply(self.theodorsen()?.welded_exterior(self, z)?))
        } else {
            let r = m.apply(self.theodorsen()?.welded_exterior(self, 1.0 / z.conj())?);
            Ok(1.0 / r.conj())
        }
    }

    /// The normalized map w^μ.
    pub fn eval(&self, z: C64) -> Result<C64> {
        match self.normalization {
            Normalization::ModelB => Ok(self.model_b(z)),
            Normalization::ModelA => self.model_a(z),
        }
    }

    /// Largest violation of the normalization conditions: the three jets of
    /// Model B or the three fixed points of Model A.
    pub fn normalization_error(&self) -> Result<f64> {
        match self.normalization {
            Normalization::ModelB => {
                let [f0, f1, f2, _] = self.jet3(czero())?;
                Ok(f0.norm().max((f1 - 1.0).norm()).max(f2.norm()))
            }
            Normalization::ModelA => {
                let pts = [C64::new(-1.0, 0.0), C64::new(0.0, -1.0), C64::new(1.0, 0.0)];
                let mut e: f64 = 0.0;
                for p in pts {
                    e = e.max((self.model_a(p)? - p).norm());
                }
                Ok(e)
            }
        }
    }

    /// Beltrami residual of the normalized map at z by central differences,
    /// with the field reflected onto 𝔻 for Model A.
    pub fn residual_fd(&self, z: C64, h: f64) -> Result<f64> {
        let f = |p: C64| self.eval(p);
        let (fx1, fx0) = (f(z + h)?, f(z - h)?);
        let (fy1, fy0) = (f(z + C64::new(0.0, h))?, f(z - C64::new(0.0, h))?);
        let fx = (fx1 - fx0) / (2.0 * h);
        let fy = (fy1 - fy0) / (2.0 * h);
        let fz = 0.5 * (fx - C64::i() * fy);
        let fzb = 0.5 * (fx + C64::i() * fy);
        let mu = if z.norm() > 1.0 {
            self.mu.eval(z)?
        } else {
            match self.normalization {
                Normalization::ModelB => czero(),
                Normalization::ModelA => reflect(&self.mu)?.eval(z)?,
            }
        };
        Ok((fzb - mu * fz).norm())
    }

    /// Samples of the normalized map on 𝔻 and on 𝔻* (nodes 1/w̄).
    pub fn grid(&self, rule: Arc<QuadRule>) -> Result<(GridFunction, GridFunction)> {
        let disk: Result<Vec<C64>> = (0..rule.node_count()).into_par_iter().map(|k| self.eval(rule.node(k))).collect();
        let ext: Result<Vec<C64>> =
            (0..rule.node_count()).into_par_iter().map(|k| self.eval(1.0 / rule.node(k).conj())).collect();
        Ok((
            GridFunction::new(rule.clone(), disk?, Domain::UnitDisk)?,
            GridFunction::new(rule, ext?, Domain::ExteriorDisk)?,
        ))
    }

    /// Taylor coefficients of 1/D, i.e. f(z) = Σ a_n z^{n+1}.
    pub fn interior_coeffs(&self, count: usize) -> Vec<C64> {
        let d = &self.denominator;
        let mut a = vec![czero(); count];
        for n in 0..count {
            let mut s = if n == 0 { C64::new(1.0, 0.0) } else { czero() };
            for j in 1..=n.min(d.len() - 1) {
                s -= d[j] * a[n - j];
            }
            a[n] = s;
        }
        a
    }
}

impl Jet3 for QCMap {
    /// (f, f′, f″, f‴) of the interior map z/D from f·D = z.
    fn jet3(&self, z: C64) -> Result<[C64; 4]> {
        let d = &self.denominator;
        let mut dj = [czero(); 4];
        for c in d.iter().rev() {
            dj[3] = dj[3] * z + dj[2] * 3.0;
            dj[2] = dj[2] * z + dj[1] * 2.0;
            dj[1] = dj[1] * z + dj[0];
            dj[0] = dj[0] * z + c;
        }
        let (d0, d1, d2, d3) = (dj[0], dj[1], dj[2], dj[3]);
        if d0.norm() == 0.0 {
            return Err(Error::CriticalPoint(format!("pole at {z}")));
        }
        let f0 = z / d0;
        let f1 = (1.0 - f0 * d1) / d0;
        let f2 = -(2.0 * f1 * d1 + f0 * d2) / d0;
        let f3 = -(3.0 * f2 * d1 + 3.0 * f1 * d2 + f0 * d3) / d0;
        Ok([f0, f1, f2, f3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_gives_identity() {
        let q = solve_beltrami(&BeltramiField::zero(Domain::ExteriorDisk), Normalization::ModelB, 1e-12).unwrap();
        for z in [C64::new(0.3, 0.1), C64::new(1.7, -0.4)] {
            assert!((q.model_b(z) - z).norm() < 1e-15);
        }
    }

    #[test]
    fn radial_field_exact_solution() {
        let q = solve_beltrami(&BeltramiField::radial(0.2), Normalization::ModelB, 1e-12).unwrap();
        let alpha = 0.25;
        for z in [C64::new(1.5, 0.3), C64::new(-2.0, 2.0), C64::new(0.0, 2.9)] {
            let exact = z * z.norm().powf(2.0 * alpha);
            assert!((q.model_b(z) - exact).norm() < 1e-9, "{}", (q.model_b(z) - exact).norm());
        }
        assert!(q.residual_norm < 1e-10);
    }

    #[test]
    fn jet_matches_value() {
        let q = solve_beltrami(&crate::series::basis_mu(3).unwrap().scaled(C64::new(0.5, 0.2)), Normalization::ModelB, 1e-12)
            .unwrap();
        let z = C64::new(0.2, 0.1);
        let j = q.jet3(z).unwrap();
        assert!((j[0] - q.model_b(z)).norm() < 1e-15);
        let h = 1e-5;
        let fd = (q.model_b(z + h) - q.model_b(z - h)) / (2.0 * h);
        assert!((fd - j[1]).norm() < 1e-8);
    }
}
