//! Finite-difference comparators through the solver: the pulled-back
//! density ρ^{εμ} = 4|w_z|²/(|w|²−1)² and the metric g_{μν̄}(εκ).
//!
//! Both use the welded map w = g̃⁻¹∘f^{εμ}, a quasiconformal self-map of 𝔻*.
//! Möbius normalization does not matter for either quantity.

use super::czero;
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::qc_solver::polar::PolarSeries;
use crate::qc_solver::{solve_beltrami, Normalization, QCMap, Theodorsen};
use crate::quadrature::{pairwise_sum, QuadRule};
use crate::series::{weight, BeltramiField, DEFAULT_TRUNCATION};
use crate::C64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

use super::MetricValue;

const SOLVE_TOL: f64 = 1e-13;

struct Welded {
    qc: QCMap,
    th: Arc<Theodorsen>,
    w_zeta: PolarSeries,
}

impl Welded {
    fn new(field: &BeltramiField) -> Result<Self> {
        let qc = solve_beltrami(field, Normalization::ModelB, SOLVE_TOL)?;
        let th = qc.theodorsen()?;
        let w_zeta = qc.chart.inside.d_z();
        Ok(Self { qc, th, w_zeta })
    }

    /// (w, w_z) at z ∈ 𝔻*.
    fn jet(&self, z: C64) -> Result<(C64, C64)> {
        let zeta = 1.0 / z;
        let big_w = self.qc.chart.inside.eval(zeta);
        // f = 1/W(1/z) gives f_z = W_ζ ζ²/W²
        let fz = self.w_zeta.eval(zeta) * zeta * zeta / (big_w * big_w);
        let w = self.th.welded_exterior(&self.qc, z)?;
        Ok((w, fz / self.th.g_prime(w)))
    }
}

fn scaled_field(mu: &BeltramiField, eps: C64) -> BeltramiField {
    mu.scaled(eps)
}

/// ρ^{εμ}(z) = 4|w_z|²/(|w|²−1)² at points of 𝔻* for the map solved with field `field`.
pub fn pulled_back_density(field: &BeltramiField, zs: &[C64]) -> Result<Vec<f64>> {
    if field.domain != Domain::ExteriorDisk {
        return Err(Error::DomainMismatch);
    }
    let m = Welded::new(field)?;
    zs.iter()
        .map(|z| {
            let (w, wz) = m.jet(*z)?;
            let d = w.norm_sqr() - 1.0;
            Ok(4.0 * wz.norm_sqr() / (d * d))
        })
        .collect()
}

/// ∂_ε∂_ε̄ = ¼(∂_t² + ∂_s²) by 5-point differences at steps h and h/2.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSecond {
    pub coarse: Vec<C64>,
    pub fine: Vec<C64>,
    /// one Richardson level, (16·fine − coarse)/15
    pub extrapolated: Vec<C64>,
}

fn mixed_second(f: impl Fn(C64) -> Result<Vec<C64>> + Sync, h: f64) -> Result<FdSecond> {
    let steps = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
    let mut eps: Vec<C64> = vec![czero()];
    for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
        for s in steps {
            eps.push(dir * (s * h));
        }
    }
    let vals: Vec<Vec<C64>> = eps.par_iter().map(|e| f(*e)).collect::<Result<_>>()?;
    let f0 = &vals[0];
    let n = f0.len();
    let at = |dir: usize, s: f64| -> &Vec<C64> {
        let k = steps.iter().position(|x| *x == s).expect("step in stencil");
        &vals[1 + dir * steps.len() + k]
    };
    let lap = |step: f64| -> Vec<C64> {
        // with stencil spacing `step` (in units of h)
        let (a, b) = (step, 2.0 * step);
        let hh = step * h;
        (0..n)
            .map(|i| {
                let mut s = czero();
                for dir in 0..2 {
                    s += (-at(dir, b)[i] + 16.0 * at(dir, a)[i] - 30.0 * f0[i] + 16.0 * at(dir, -a)[i] - at(dir, -b)[i])
                        / (12.0 * hh * hh);
                }
                0.25 * s
            })
            .collect()
    };
    let coarse = lap(1.0);
    let fine = lap(0.5);
    let extrapolated = coarse.iter().zip(&fine).map(|(c, f)| (16.0 * f - c) / 15.0).collect();
    Ok(FdSecond { coarse, fine, extrapolated })
}

/// Symmetric first differences (ρ^{hμ} − ρ^{−hμ})/(2h) at steps h and h/2.
pub fn density_first_variation(mu: &BeltramiField, zs: &[C64], h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = |step: f64| -> Result<Vec<f64>> {
        let p = pulled_back_density(&scaled_field(mu, C64::new(step, 0.0)), zs)?;
        let m = pulled_back_density(&scaled_field(mu, C64::new(-step, 0.0)), zs)?;
        Ok(p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * step)).collect())
    };
    Ok((d(h)?, d(h / 2.0)?))
}

/// ∂_ε∂_ε̄ ρ^{εμ}(z) by finite differences, next to ρ(z) G(|μ|²)(z).
pub fn density_second_variation(mu: &BeltramiField, zs: &[C64], h: f64) -> Result<(FdSecond, Vec<f64>)> {
    let fd = mixed_second(
        |e| Ok(pulled_back_density(&scaled_field(mu, e), zs)?.into_iter().map(|v| C64::new(v, 0.0)).collect()),
        h,
    )?;
    let x = super::product(mu, mu)?;
    let expected = zs
        .iter()
        .map(|z| {
            let d = z.norm_sqr() - 1.0;
            4.0 / (d * d) * x.resolvent_at(1.0 / z.conj()).re
        })
        .collect();
    Ok((fd, expected))
}

/// Moments M_n = ∬_{𝔻*} R(μ,κ)(u) u^{−n−2} d²u of the pushed-forward field
/// R(μ,κ) = (μ/(1−|κ|²) · w_z/conj(w_z)) ∘ w⁻¹, computed in the chart ζ = 1/z as
/// ∬_𝔻 ν(ζ) W_ζ²/(W⁴ g̃′(w)²) w^{−n−2} d²ζ.
fn pushed_moments(m: &Welded, fields: &[&BeltramiField], rule: &QuadRule, truncation: usize) -> Result<Vec<Vec<C64>>> {
    let rows: Vec<Vec<Vec<C64>>> = (0..rule.node_count())
        .into_par_iter()
        .map(|k| -> Result<Vec<Vec<C64>>> {
            let zeta = rule.node(k);
            let z = 1.0 / zeta;
            let big_w = m.qc.chart.inside.eval(zeta);
            let wz = m.w_zeta.eval(zeta);
            let w = m.th.welded_exterior(&m.qc, z)?;
            let gp = m.th.g_prime(w);
            let w2 = big_w * big_w;
            let common = wz * wz / (w2 * w2 * gp * gp) * rule.weight(k);
            let winv = 1.0 / w;
            fields
                .iter()
                .map(|f| {
                    let nu_c = f.eval(z)? * zeta * zeta / (zeta.conj() * zeta.conj());
                    let mut p = nu_c * common * winv.powi(4);
                    let mut out = Vec::with_capacity(truncation);
                    for _ in 0..truncation {
                        out.push(p);
                        p *= winv;
                    }
                    Ok(out)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok((0..fields.len())
        .map(|fi| {
            (0..truncation)
                .map(|n| {
                    let col: Vec<C64> = rows.iter().map(|r| r[fi][n]).collect();
                    pairwise_sum(&col)
                })
                .collect()
        })
        .collect())
}

/// g_{μν̄}(κ) for several pairs sharing one solve of w_κ.
pub fn wp_metric_at_many(kappa: &BeltramiField, pairs: &[(&BeltramiField, &BeltramiField)], rule: &QuadRule) -> Result<Vec<C64>> {
    if kappa.sup_norm() > 0.3 {
        return Err(Error::NormTooLarge(kappa.sup_norm()));
    }
    let m = Welded::new(kappa)?;
    let mut fields: Vec<&BeltramiField> = Vec::new();
    for (a, b) in pairs {
        fields.push(a);
        fields.push(b);
    }
    let trunc = DEFAULT_TRUNCATION;
    let moments = pushed_moments(&m, &fields, rule, trunc)?;
    Ok((0..pairs.len())
        .map(|p| {
            let (ma, mb) = (&moments[2 * p], &moments[2 * p + 1]);
            // a_n = −M_n/π, g = 2π Σ (n³−n) a_n b̄_n
            (0..trunc).map(|i| ma[i] * mb[i].conj() * weight(i + 2)).sum::<C64>() * (2.0 / PI)
        })
        .collect())
}

/// g_{μν̄}(κ) = ∬ P(R(μ,κ)) conj(P(R(ν,κ))) ρ d²z.
pub fn wp_metric_at(kappa: &BeltramiField, mu: &BeltramiField, nu: &BeltramiField, rule: &QuadRule) -> Result<MetricValue> {
    let v = wp_metric_at_many(kappa, &[(mu, nu)], rule)?;
    Ok(MetricValue { value: v[0], rule: rule.params(), truncation: DEFAULT_TRUNCATION })
}

/// (g_{μν̄}(hκ) − g_{μν̄}(−hκ))/(2h).
pub fn metric_first_variation(mu: &BeltramiField, nu: &BeltramiField, kappa: &BeltramiField, h: f64, rule: &QuadRule) -> Result<C64> {
    let p = wp_metric_at(&kappa.scaled(C64::new(h, 0.0)), mu, nu, rule)?.value;
    let m = wp_metric_at(&kappa.scaled(C64::new(-h, 0.0)), mu, nu, rule)?.value;
    Ok((p - m) / (2.0 * h))
}

/// ∂_ε∂_ε̄ g_{μν̄}(εκ) at 0 by finite differences of [`wp_metric_at`].
pub fn metric_second_variation_fd(
    pairs: &[(&BeltramiField, &BeltramiField)],
    kappa: &BeltramiField,
    h: f64,
    rule: &QuadRule,
) -> Result<FdSecond> {
    mixed_second(|e| wp_metric_at_many(&kappa.scaled(e), pairs, rule), h)
}
