//! Product quadrature on 𝔻 (Gauss–Legendre in t = r² times uniform angles),
//! the exterior disk through z ↦ 1/z̄, and the resolvent operator G.

mod gauss;
mod resolvent;

pub use gauss::{gauss_legendre, gauss_log, Rule1d};
pub use resolvent::{apply_resolvent, apply_resolvent_exterior, integrate_double, RadialPanelRule};

use crate::error::{Error, Result};
use crate::geometry::{disk_density, Domain};
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    Euclidean,
    Hyperbolic,
}

/// Settings of the log-weighted patch around the diagonal of G.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalPatch {
    pub enabled: bool,
    /// patch radius in r; the patch covers t = r² ∈ [0, radius²]
    pub radius: f64,
    pub node_count: usize,
}

/// Product rule: Gauss–Legendre in t = r² on [0,1) and `angular_count`
/// uniform angles.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub t_nodes: Vec<f64>,
    pub t_weights: Vec<f64>,
    pub angular_count: usize,
    pub patch: DiagonalPatch,
    /// Gauss points per panel of the recentered resolvent rule
    pub panel_nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleParams {
    pub radial_nodes: usize,
    pub angular_count: usize,
    pub patch_enabled: bool,
    pub patch_radius: f64,
    pub patch_node_count: usize,
    pub panel_nodes: usize,
}

impl Default for RuleParams {
    fn default() -> Self {
        Self {
            radial_nodes: 64,
            angular_count: 128,
            patch_enabled: true,
            patch_radius: 2.0 / 64.0,
            patch_node_count: 16,
            panel_nodes: 16,
        }
    }
}

impl QuadRule {
    pub fn new(radial_nodes: usize, angular_count: usize) -> Result<Self> {
        Self::with_params(RuleParams {
            radial_nodes,
            angular_count,
            patch_radius: (2.0 / radial_nodes.max(1) as f64).min(0.25),
            ..RuleParams::default()
        })
    }

    pub fn with_params(p: RuleParams) -> Result<Self> {
        if p.angular_count < 8 || p.angular_count % 2 != 0 {
            return Err(Error::Config(format!("angular count {} must be even and ≥ 8", p.angular_count)));
        }
        if p.radial_nodes == 0 || p.panel_nodes == 0 || p.patch_node_count == 0 {
            return Err(Error::Config("node counts must be positive".into()));
        }
        if !(p.patch_radius > 0.0 && p.patch_radius < 0.5) {
            return Err(Error::Config(format!("patch radius {} outside (0, 0.5)", p.patch_radius)));
        }
        let gl = gauss_legendre(p.radial_nodes);
        Ok(Self {
            t_nodes: gl.nodes,
            t_weights: gl.weights,
            angular_count: p.angular_count,
            patch: DiagonalPatch { enabled: p.patch_enabled, radius: p.patch_radius, node_count: p.patch_node_count },
            panel_nodes: p.panel_nodes,
        })
    }

    pub fn default_rule() -> Self {
        Self::with_params(RuleParams::default()).expect("default rule is valid")
    }

    pub fn params(&self) -> RuleParams {
        RuleParams {
            radial_nodes: self.t_nodes.len(),
            angular_count: self.angular_count,
            patch_enabled: self.patch.enabled,
            patch_radius: self.patch.radius,
            patch_node_count: self.patch.node_count,
            panel_nodes: self.panel_nodes,
        }
    }

    pub fn node_count(&self) -> usize {
        self.t_nodes.len() * self.angular_count
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.angular_count as f64
    }

    /// Node index i·M + j sits at √t_i e^{iθ_j}.
    pub fn node(&self, idx: usize) -> C64 {
        let (i, j) = (idx / self.angular_count, idx % self.angular_count);
        C64::from_polar(self.t_nodes[i].sqrt(), self.angle(j))
    }

    /// Euclidean area weight of a node: ½ w_i · 2π/M.
    pub fn weight(&self, idx: usize) -> f64 {
        PI * self.t_weights[idx / self.angular_count] / self.angular_count as f64
    }

    pub fn nodes(&self) -> Vec<C64> {
        (0..self.node_count()).map(|k| self.node(k)).collect()
    }
}

/// Sum in a fixed binary tree so the result does not depend on scheduling.
pub fn pairwise_sum(v: &[C64]) -> C64 {
    match v.len() {
        0 => C64::new(0.0, 0.0),
        1 => v[0],
        n if n <= 8 => v.iter().fold(C64::new(0.0, 0.0), |a, b| a + b),
        n => {
            let (l, r) = v.split_at(n / 2);
            if n > 4096 {
                let (a, b) = rayon::join(|| pairwise_sum(l), || pairwise_sum(r));
                a + b
            } else {
                pairwise_sum(l) + pairwise_sum(r)
            }
        }
    }
}

pub fn pairwise_sum_real(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        n if n <= 8 => v.iter().sum(),
        n => {
            let (l, r) = v.split_at(n / 2);
            pairwise_sum_real(l) + pairwise_sum_real(r)
        }
    }
}

fn check_finite(vals: &[C64]) -> Result<()> {
    match vals.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        Some(k) => Err(Error::NonFiniteValue(k)),
        None => Ok(()),
    }
}

/// Samples aligned with the nodes of a rule. Exterior-domain functions are
/// stored in the inverted chart: entry k holds the value at 1/z̄_k.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub rule: Arc<QuadRule>,
    pub values: Vec<C64>,
    pub domain: Domain,
}

impl GridFunction {
    pub fn new(rule: Arc<QuadRule>, values: Vec<C64>, domain: Domain) -> Result<Self> {
        if values.len() != rule.node_count() {
            return Err(Error::Config(format!("{} values for {} nodes", values.len(), rule.node_count())));
        }
        Ok(Self { rule, values, domain })
    }

    pub fn sample(rule: Arc<QuadRule>, domain: Domain, f: impl Fn(C64) -> C64 + Sync) -> Self {
        let values = (0..rule.node_count())
            .into_par_iter()
            .map(|k| {
                let w = rule.node(k);
                match domain {
                    Domain::ExteriorDisk => f(1.0 / w.conj()),
                    _ => f(w),
                }
            })
            .collect();
        Self { rule, values, domain }
    }

    /// Actual point of node k in the function's own domain.
    pub fn point(&self, k: usize) -> C64 {
        let w = self.rule.node(k);
        match self.domain {
            Domain::ExteriorDisk => 1.0 / w.conj(),
            _ => w,
        }
    }

    pub fn integrate(&self, measure: Measure) -> Result<C64> {
        check_finite(&self.values)?;
        let terms: Vec<C64> = (0..self.values.len())
            .map(|k| {
                let w = self.rule.node(k);
                let wt = self.rule.weight(k);
                let jac = match (self.domain, measure) {
                    (_, Measure::Hyperbolic) => disk_density(w),
                    (Domain::ExteriorDisk, Measure::Euclidean) => 1.0 / (w.norm_sqr() * w.norm_sqr()),
                    _ => 1.0,
                };
                self.values[k] * (wt * jac)
            })
            .collect();
        Ok(pairwise_sum(&terms))
    }

    /// CSV with header `re,im,value_re,value_im`, points in the function's domain.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["re", "im", "value_re", "value_im"]).map_err(|e| Error::IoFailure(e.to_string()))?;
        for k in 0..self.values.len() {
            let p = self.point(k);
            let v = self.values[k];
            wtr.write_record([p.re.to_string(), p.im.to_string(), v.re.to_string(), v.im.to_string()])
                .map_err(|e| Error::IoFailure(e.to_string()))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// ∬_𝔻 f d²z or ∬_𝔻 f ρ d²z.
pub fn integrate_disk(f: impl Fn(C64) -> C64 + Sync, rule: &QuadRule, measure: Measure) -> Result<C64> {
    let vals: Vec<C64> = (0..rule.node_count())
        .into_par_iter()
        .map(|k| {
            let z = rule.node(k);
            let m = match measure {
                Measure::Euclidean => 1.0,
                Measure::Hyperbolic => disk_density(z),
            };
            f(z) * (rule.weight(k) * m)
        })
        .collect();
    check_finite(&vals)?;
    Ok(pairwise_sum(&vals))
}

/// ∬_{𝔻*} f d²z through w = 1/z̄: d²z = |w|⁻⁴ d²w, while ρ d²z is invariant.
pub fn integrate_exterior(f: impl Fn(C64) -> C64 + Sync, rule: &QuadRule, measure: Measure) -> Result<C64> {
    integrate_disk(
        |w| {
            let z = 1.0 / w.conj();
            match measure {
                Measure::Euclidean => f(z) / (w.norm_sqr() * w.norm_sqr()),
                Measure::Hyperbolic => f(z),
            }
        },
        rule,
        measure,
    )
}
