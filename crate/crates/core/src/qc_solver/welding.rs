//! Conformal welding of the Model B map by Theodorsen's method.
//!
//! With Ω = f(𝔻), f = z/D, the exterior map g: 𝔻* → Ĉ∖Ω̄ with g(∞) = ∞ is
//! written g(ζ) = ζ exp(Σ_{k≥0} c_k ζ^{−k}). On the circle g(e^{is}) = f(e^{iθ(s)}),
//! so with L = −log D,
//!
//!   Re L(e^{iθ(s)}) = Re Σ c_k e^{−iks},   θ(s) + Im L(e^{iθ(s)}) = s + Im Σ_{k≥1} c_k e^{−iks}.
//!
//! The first relation gives c_k from the Fourier coefficients of the left side,
//! the second is solved for θ by Newton; the two steps alternate to a fixed point.

use super::QCMap;
use crate::error::{Error, Result};
use crate::C64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

pub const THEODORSEN_POINTS: usize = 512;
const MAX_SWEEPS: usize = 400;

fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

#[derive(Debug, Clone)]
pub struct Theodorsen {
    pub theta: Vec<f64>,
    /// c_0..c_{N/2−1} of the unrotated exterior map
    pub c: Vec<C64>,
    /// rotation making the welded map fix 1
    pub psi: f64,
    /// c_k e^{−ikψ}
    pub rotated: Vec<C64>,
    pub sweeps: usize,
    /// max |g(e^{is_j}) − f(e^{iθ_j})|
    pub boundary_residual: f64,
    d: Vec<C64>,
    d1: Vec<C64>,
    arg_table: Vec<f64>,
}

fn horner(p: &[C64], z: C64) -> C64 {
    p.iter().rev().fold(czero(), |acc, c| acc * z + c)
}

impl Theodorsen {
    pub fn compute(qc: &QCMap) -> Result<Self> {
        let n = THEODORSEN_POINTS;
        let d = qc.denominator.clone();
        let d1: Vec<C64> = d.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
        // continuous arg D along the circle, used to pick the branch of log D
        let m = 8 * n;
        let mut arg_table = Vec::with_capacity(m + 1);
        let mut prev = horner(&d, C64::new(1.0, 0.0)).arg();
        for j in 0..=m {
            let z = C64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
            let a = horner(&d, z).arg();
            let k = ((prev - a) / (2.0 * PI)).round();
            let v = a + 2.0 * PI * k;
            arg_table.push(v);
            prev = v;
        }
        if (arg_table[m] - arg_table[0]).abs() > 1e-6 {
            return Err(Error::FitFailure("D winds around 0 on the circle".into()));
        }
        let mut th = Theodorsen {
            theta: (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect(),
            c: vec![czero(); n / 2],
            psi: 0.0,
            rotated: Vec::new(),
            sweeps: 0,
            boundary_residual: 0.0,
            d,
            d1,
            arg_table,
        };
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(n);
        let mut converged = false;
        for sweep in 0..MAX_SWEEPS {
            let mut buf: Vec<C64> = th.theta.iter().map(|t| C64::new(th.log_d(*t).re, 0.0)).collect();
            fft.process(&mut buf);
            let mut c = vec![czero(); n / 2];
            c[0] = buf[0] / n as f64;
            for k in 1..n / 2 {
                c[k] = 2.0 * buf[k].conj() / n as f64;
            }
            // V(s_j) = Im Σ_{k≥1} c_k e^{−iks_j}
            let mut vb = vec![czero(); n];
            vb[1..n / 2].copy_from_slice(&c[1..n / 2]);
            fft.process(&mut vb);
            let mut delta: f64 = 0.0;
            for j in 0..n {
                let s = 2.0 * PI * j as f64 / n as f64;
                let target = s + vb[j].im;
                let mut t = th.theta[j];
                for _ in 0..30 {
                    let (l, dl) = th.log_d_and_slope(t);
                    let step = (t + l.im - target) / (1.0 + dl);
                    t -= step;
                    if step.abs() < 1e-16 {
                        break;
                    }
                }
                delta = delta.max((t - th.theta[j]).abs());
                th.theta[j] = t;
            }
            th.c = c;
            th.sweeps = sweep + 1;
            if delta < 1e-14 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        // ψ solves θ(ψ) = 0, i.e. ψ = Im L(1) − V(ψ)
        let l1 = th.log_d(0.0).im;
        let mut psi = l1;
        for _ in 0..200 {
            let next = l1 - th.v_at(psi);
            if (next - psi).abs() < 1e-16 {
                psi = next;
                break;
            }
            psi = next;
        }
        th.psi = psi;
        th.rotated = th.c.iter().enumerate().map(|(k, c)| c * C64::from_polar(1.0, -(k as f64) * psi)).collect();
        let mut res: f64 = 0.0;
        for j in 0..n {
            let s = 2.0 * PI * j as f64 / n as f64;
            let z = C64::from_polar(1.0, th.theta[j]);
            res = res.max((th.g_unrotated(C64::from_polar(1.0, s)) - z / horner(&th.d, z)).norm());
        }
        th.boundary_residual = res;
        Ok(th)
    }

    /// L(e^{iθ}) = −log D(e^{iθ}) on the continuous branch.
    fn log_d(&self, theta: f64) -> C64 {
        let z = C64::from_polar(1.0, theta);
        let dv = horner(&self.d, z);
        let m = self.arg_table.len() - 1;
        let u = (theta / (2.0 * PI)).rem_euclid(1.0) * m as f64;
        let reference = self.arg_table[(u.round() as usize).min(m)];
        let a = dv.arg();
        let a = a + 2.0 * PI * ((reference - a) / (2.0 * PI)).round();
        -C64::new(dv.norm().ln(), a)
    }

    /// L and d/dθ Im L(e^{iθ}) = Re(z L′(z)).
    fn log_d_and_slope(&self, theta: f64) -> (C64, f64) {
        let z = C64::from_polar(1.0, theta);
        let lp = -horner(&self.d1, z) / horner(&self.d, z);
        (self.log_d(theta), (z * lp).re)
    }

    fn v_at(&self, s: f64) -> f64 {
        self.c.iter().enumerate().skip(1).map(|(k, c)| (c * C64::from_polar(1.0, -(k as f64) * s)).im).sum()
    }

    fn exp_arg(c: &[C64], zeta: C64) -> (C64, C64) {
        // S(ζ) = Σ c_k ζ^{−k} and Σ k c_k ζ^{−k}
        let w = 1.0 / zeta;
        let mut s = czero();
        let mut ks = czero();
        for (k, ck) in c.iter().enumerate().rev() {
            s = s * w + ck;
            ks = ks * w + ck * k as f64;
        }
        (s, ks)
    }

    fn g_unrotated(&self, zeta: C64) -> C64 {
        zeta * Self::exp_arg(&self.c, zeta).0.exp()
    }

    /// Exterior map rotated so the welding fixes 1: g̃(ζ) = g(e^{iψ}ζ).
    pub fn g(&self, zeta: C64) -> C64 {
        C64::from_polar(1.0, self.psi) * zeta * Self::exp_arg(&self.rotated, zeta).0.exp()
    }

    pub fn g_prime(&self, zeta: C64) -> C64 {
        let (s, ks) = Self::exp_arg(&self.rotated, zeta);
        C64::from_polar(1.0, self.psi) * s.exp() * (1.0 - ks)
    }

    /// s(θ) with g(e^{is}) = f(e^{iθ}), by inverting the sampled θ(s).
    fn s_of_theta(&self, theta: f64) -> f64 {
        let n = self.theta.len();
        let t = theta.rem_euclid(2.0 * PI);
        let t0 = self.theta[0];
        // θ_j increases by 2π over one period
        let find = |x: f64| -> f64 {
            let mut lo = 0usize;
            let mut hi = n;
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if self.theta[mid] <= x {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (a, b) = (self.theta[lo], if lo + 1 < n { self.theta[lo + 1] } else { self.theta[0] + 2.0 * PI });
            let sa = 2.0 * PI * lo as f64 / n as f64;
            sa + (x - a) / (b - a) * (2.0 * PI / n as f64)
        };
        let x = if t < t0 { t + 2.0 * PI } else { t };
        let x = if x >= t0 + 2.0 * PI { x - 2.0 * PI } else { x };
        find(x)
    }

    /// g̃⁻¹(w) by Newton, seeded from the boundary correspondence.
    pub fn g_inverse(&self, w: C64, seed: C64) -> Result<C64> {
        let mut z = seed;
        for _ in 0..50 {
            let step = (self.g(z) - w) / self.g_prime(z);
            z -= step;
            if step.norm() < 1e-15 * z.norm().max(1.0) {
                return Ok(z);
            }
        }
        let r = (self.g(z) - w).norm();
        if r < 1e-12 * w.norm().max(1.0) {
            Ok(z)
        } else {
            Err(Error::NoConvergence(50))
        }
    }

    /// γ_μ(z) = g̃⁻¹(f^μ(z)) for |z| ≥ 1.
    pub fn welded_exterior(&self, qc: &QCMap, z: C64) -> Result<C64> {
        let w = qc.model_b(z);
        let s = self.s_of_theta(z.arg());
        let seed = C64::from_polar(z.norm(), s - self.psi);
        let r = self.g_inverse(w, seed)?;
        if r.norm() < 1.0 - 1e-9 {
            return Err(Error::NoConvergence(0));
        }
        Ok(r)
    }

    /// Boundary welding θ ↦ arg γ_μ(e^{iθ}).
    pub fn circle_map(&self, theta: f64) -> f64 {
        // s = θ + Im L(e^{iθ}) − V(s), a contraction for near-circles
        let base = theta + self.log_d(theta).im;
        let mut s = self.s_of_theta(theta);
        s = theta + (s - theta).rem_euclid(2.0 * PI);
        if s - theta > PI {
            s -= 2.0 * PI;
        }
        for _ in 0..200 {
            let next = base - self.v_at(s);
            if (next - s).abs() < 1e-16 {
                s = next;
                break;
            }
            s = next;
        }
        s - self.psi
    }
}

/// Coefficients of the welding γ = g⁻¹∘f: f(z) = Σ a_n z^{n+1} on 𝔻,
/// g(z) = Σ b_n z^{1−n} on 𝔻*.
#[derive(Debug, Clone)]
pub struct WeldingData {
    pub f_coeffs: Vec<C64>,
    pub g_coeffs: Vec<C64>,
    /// |g′(∞)| = |b_0|
    pub capacity: f64,
    /// K = log |g′(∞)|
    pub potential_k: f64,
    /// |b_0|² − Σ(n+1)|a_n|² − Σ(n−1)|b_n|² over the truncation
    pub area_residual: f64,
    pub boundary_residual: f64,
}

pub fn welding_decompose(qc: &QCMap, truncation: usize) -> Result<WeldingData> {
    let th = qc.theodorsen()?;
    if th.boundary_residual > 1e-8 {
        return Err(Error::FitFailure(format!("boundary residual {:e}", th.boundary_residual)));
    }
    let a = qc.interior_coeffs(truncation);
    // exp(Σ_{k≥1} c̃_k x^k) by n E_n = Σ k c̃_k E_{n−k}
    let mut e = vec![czero(); truncation];
    if truncation > 0 {
        e[0] = C64::new(1.0, 0.0);
    }
    for nn in 1..truncation {
        let mut s = czero();
        for k in 1..=nn.min(th.rotated.len() - 1) {
            s += th.rotated[k] * e[nn - k] * k as f64;
        }
        e[nn] = s / nn as f64;
    }
    let b0 = C64::from_polar(1.0, th.psi) * th.c[0].exp();
    let b: Vec<C64> = e.iter().map(|v| v * b0).collect();
    let mut area = b0.norm_sqr();
    for (nn, v) in a.iter().enumerate() {
        area -= (nn + 1) as f64 * v.norm_sqr();
    }
    for (nn, v) in b.iter().enumerate().skip(2) {
        area -= (nn as f64 - 1.0) * v.norm_sqr();
    }
    Ok(WeldingData {
        f_coeffs: a,
        g_coeffs: b,
        capacity: b0.norm(),
        potential_k: th.c[0].re,
        area_residual: area,
        boundary_residual: th.boundary_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::qc_solver::{solve_beltrami, Normalization};
    use crate::series::{basis_mu, BeltramiField};

    #[test]
    fn identity_welding() {
        let q = solve_beltrami(&BeltramiField::zero(Domain::ExteriorDisk), Normalization::ModelB, 1e-12).unwrap();
        let w = welding_decompose(&q, 8).unwrap();
        assert!((w.capacity - 1.0).abs() < 1e-15 && w.potential_k.abs() < 1e-15);
        assert!(w.area_residual.abs() < 1e-15);
    }

    #[test]
    fn welded_map_fixes_one() {
        let mu = basis_mu(2).unwrap().scaled(C64::new(0.2, 0.1));
        let q = solve_beltrami(&mu, Normalization::ModelB, 1e-12).unwrap();
        let g = q.welded(C64::new(1.0, 0.0)).unwrap();
        assert!((g - 1.0).norm() < 1e-10, "{g}");
        let th = q.theodorsen().unwrap();
        let t = 0.7;
        let gt = q.welded(C64::from_polar(1.0, t)).unwrap();
        assert!((gt.arg() - th.circle_map(t)).abs() < 1e-10);
        assert!((gt.norm() - 1.0).abs() < 1e-10);
    }
}
