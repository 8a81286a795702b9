//! G(f)(z) = ∬ G(z,w) f(w) ρ(w) d²w by recentering: with w = σ_z⁻¹(ω),
//! G(z,w) = G(0,ω) and ρ d²w = ρ d²ω, so only the radial factor
//! G(0,ω)ρ(ω) = (A(t) log t + B)·4/(1−t)² has to be integrated carefully.
//! The log part on [0,δ] uses a Gauss rule for the weight −log x.

use super::{gauss_legendre, gauss_log, pairwise_sum, QuadRule};
use crate::error::{Error, Result};
use crate::geometry::{green_origin, DiskPoint, Domain};
use crate::C64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Radial nodes t_k and weights W_k with G(f)(z) = Σ_k W_k · mean_θ f(σ_z⁻¹(√t_k e^{iθ})).
#[derive(Debug, Clone)]
pub struct RadialPanelRule {
    pub t: Vec<f64>,
    pub w: Vec<f64>,
    pub angular_count: usize,
}

fn log_coeff(t: f64) -> f64 {
    -(1.0 + t) / (2.0 * PI * (1.0 - t))
}

fn rho_t(t: f64) -> f64 {
    4.0 / ((1.0 - t) * (1.0 - t))
}

impl RadialPanelRule {
    pub fn from_rule(rule: &QuadRule) -> Self {
        let delta = rule.patch.radius * rule.patch.radius;
        let gl = gauss_legendre(rule.panel_nodes);
        let mut t = Vec::new();
        let mut w = Vec::new();
        if rule.patch.enabled {
            let n = rule.patch.node_count;
            let glp = gauss_legendre(n);
            let lg = gauss_log(n);
            for (x, g) in glp.nodes.iter().zip(&glp.weights) {
                let tt = delta * x;
                t.push(tt);
                w.push(PI * delta * g * rho_t(tt) * (log_coeff(tt) * delta.ln() - 1.0 / PI));
            }
            for (y, l) in lg.nodes.iter().zip(&lg.weights) {
                let tt = delta * y;
                t.push(tt);
                w.push(-PI * delta * l * rho_t(tt) * log_coeff(tt));
            }
        } else {
            let p = gl.mapped(0.0, delta);
            for (x, g) in p.nodes.iter().zip(&p.weights) {
                t.push(*x);
                w.push(PI * g * rho_t(*x) * green_origin(*x));
            }
        }
        let mut edges = vec![delta];
        while edges.last().unwrap() * 4.0 < 0.25 {
            let e = edges.last().unwrap() * 4.0;
            edges.push(e);
        }
        for e in [0.25, 0.5, 0.75, 0.875, 0.9375, 1.0] {
            if e > *edges.last().unwrap() {
                edges.push(e);
            }
        }
        for pair in edges.windows(2) {
            let p = gl.mapped(pair[0], pair[1]);
            for (x, g) in p.nodes.iter().zip(&p.weights) {
                t.push(*x);
                w.push(PI * g * rho_t(*x) * green_origin(*x));
            }
        }
        Self { t, w, angular_count: rule.angular_count }
    }

    /// Recentered sum at an interior point z ∈ 𝔻.
    pub fn apply(&self, f: &(impl Fn(C64) -> C64 + Sync), z: C64) -> C64 {
        let m = self.angular_count;
        let zc = z.conj();
        let terms: Vec<C64> = self
            .t
            .iter()
            .zip(&self.w)
            .map(|(t, wk)| {
                let r = t.sqrt();
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..m {
                    let om = C64::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / m as f64);
                    acc += f((om + z) / (1.0 + zc * om));
                }
                acc * (wk / m as f64)
            })
            .collect();
        pairwise_sum(&terms)
    }

    pub fn apply_par(&self, f: &(impl Fn(C64) -> C64 + Sync), z: C64) -> C64 {
        let m = self.angular_count;
        let zc = z.conj();
        let terms: Vec<C64> = self
            .t
            .par_iter()
            .zip(self.w.par_iter())
            .map(|(t, wk)| {
                let r = t.sqrt();
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..m {
                    let om = C64::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / m as f64);
                    acc += f((om + z) / (1.0 + zc * om));
                }
                acc * (wk / m as f64)
            })
            .collect();
        pairwise_sum(&terms)
    }
}

/// G(f)(z) for z ∈ 𝔻 (f on 𝔻) or z ∈ 𝔻* (f on 𝔻*, evaluated through 1/z̄).
pub fn apply_resolvent(f: impl Fn(C64) -> C64 + Sync, z: &DiskPoint, rule: &QuadRule) -> Result<C64> {
    let pr = RadialPanelRule::from_rule(rule);
    let v = match z.domain() {
        Domain::UnitDisk => pr.apply_par(&f, z.value()),
        Domain::ExteriorDisk => {
            let zi = z.inverted()?;
            pr.apply_par(&|w: C64| f(1.0 / w.conj()), zi.value())
        }
        Domain::UpperHalfPlane => return Err(Error::DomainMismatch),
    };
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::QuadratureFailure(format!("non-finite resolvent value at {}", z.value())));
    }
    Ok(v)
}

/// G(f)(z) on 𝔻* with f given on 𝔻*.
pub fn apply_resolvent_exterior(f: impl Fn(C64) -> C64 + Sync, z: &DiskPoint, rule: &QuadRule) -> Result<C64> {
    if z.domain() != Domain::ExteriorDisk {
        return Err(Error::DomainMismatch);
    }
    apply_resolvent(f, z, rule)
}

/// ∬_𝔻∬_𝔻 G(z,w) k(z,w) ρ(z)ρ(w) d²z d²w, outer sum over the nodes of `rule`
/// in z and a recentered inner rule in w with the diagonal patch.
pub fn integrate_double(k: impl Fn(C64, C64) -> C64 + Sync, rule: &QuadRule) -> Result<C64> {
    let pr = RadialPanelRule::from_rule(rule);
    let vals: Vec<C64> = (0..rule.node_count())
        .into_par_iter()
        .map(|idx| {
            let z = rule.node(idx);
            let inner = pr.apply(&|w: C64| k(z, w), z);
            inner * (rule.weight(idx) * crate::geometry::disk_density(z))
        })
        .collect();
    if let Some(p) = vals.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFiniteValue(p));
    }
    Ok(pairwise_sum(&vals))
}
