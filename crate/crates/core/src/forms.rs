//! Velling-Kirillov metric, fiber components of the VK metric and of Θ,
//! σ_z-pullbacks of quadratic differentials, and the characteristic forms κ_n.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::curvature::ProductField;
use crate::error::{Error, Result};
use crate::geometry::{disk_density, sigma, DiskPoint, Domain, MoebiusMap, SigmaVariant};
use crate::quadrature::{apply_resolvent_exterior, gauss_legendre, gauss_log, pairwise_sum, QuadRule, RadialPanelRule};
use crate::qc_solver::{solve_beltrami, welding_decompose, Normalization};
use crate::series::{d0_beta, weight, BeltramiField, FourierVectorField, HoloCoeffs};
use crate::C64;

const SAMPLE_RADIUS: f64 = 0.5;
const SAMPLES: usize = 256;

fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

/// A point of the fiber over the origin, |z| > 1 or z = ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberPoint {
    pub z: DiskPoint,
}

impl FiberPoint {
    pub fn new(z: C64) -> Result<Self> {
        Ok(Self { z: DiskPoint::exterior(z)? })
    }

    pub fn infinity() -> Self {
        Self { z: DiskPoint::infinity() }
    }

    pub fn from_point(z: DiskPoint) -> Result<Self> {
        if z.domain() != Domain::ExteriorDisk {
            return Err(Error::DomainMismatch);
        }
        Ok(Self { z })
    }

    /// |z|², infinite at the zero section.
    fn norm_sqr(&self) -> f64 {
        if self.z.is_infinite() {
            f64::INFINITY
        } else {
            self.z.value().norm_sqr()
        }
    }
}

/// ‖v‖² = Σ_{n≥1} n|c_n|².
pub fn vk_norm(v: &FourierVectorField) -> f64 {
    (1..=v.truncation()).map(|n| n as f64 * v.c(n as i64).norm_sqr()).sum()
}

/// Coefficients a_2, a_3, ... of m*φ = φ∘m·(m′)² in the basis (n³−n)u^{n−2},
/// read off an FFT of samples on |u| = r. Coefficients are kept while the
/// sampled spectrum stays above the rounding floor.
pub fn pullback_by(phi: &HoloCoeffs, m: &MoebiusMap, r: f64) -> Result<Vec<C64>> {
    if phi.domain != Domain::UnitDisk {
        return Err(Error::DomainMismatch);
    }
    let mut buf: Vec<C64> = (0..SAMPLES)
        .map(|j| {
            let u = C64::from_polar(r, 2.0 * PI * j as f64 / SAMPLES as f64);
            let d = m.derivative(u);
            phi.eval(m.apply_c(u)) * d * d
        })
        .collect();
    if buf.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::TruncationExceeded("pullback has a pole inside the sampling circle".into()));
    }
    FftPlanner::new().plan_fft_forward(SAMPLES).process(&mut buf);
    let scale = buf.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(vec![czero(); phi.truncation()]);
    }
    let floor = 2e-15 * scale;
    let mut out = Vec::new();
    let mut rk = 1.0;
    for (k, v) in buf.iter().enumerate().take(SAMPLES / 2) {
        if v.norm() < floor && k >= phi.truncation() {
            break;
        }
        out.push(v / (SAMPLES as f64 * rk) / weight(k + 2));
        rk *= r;
    }
    if out.len() == SAMPLES / 2 {
        return Err(Error::TruncationExceeded(format!("pullback spectrum not resolved with {SAMPLES} samples")));
    }
    Ok(out)
}

/// a_n^z, the coefficients of (σ_z⁻¹)*φ. At z = ∞ these are the a_n of φ.
pub fn pullback_coeffs(phi: &HoloCoeffs, z: &FiberPoint) -> Result<Vec<C64>> {
    if phi.domain != Domain::UnitDisk {
        return Err(Error::DomainMismatch);
    }
    if z.z.is_infinite() {
        return Ok(phi.to_basis());
    }
    let s = sigma(&z.z, SigmaVariant::Fiber)?;
    let a = pullback_by(phi, &s.inverse(), SAMPLE_RADIUS)?;
    // geometric tail beyond the last resolved coefficient, against the VK sum
    let n = a.len();
    if n >= 2 && n > phi.truncation() {
        let norm: f64 = a.iter().enumerate().map(|(i, c)| (i + 2) as f64 * c.norm_sqr()).sum();
        let q = (a[n - 1].norm() / a[n - 2].norm()).min(1.0 - 1e-12);
        let tail = (n + 1) as f64 * a[n - 1].norm_sqr() * q * q / (1.0 - q * q);
        if tail > 1e-8 * norm {
            return Err(Error::TruncationExceeded(format!("pullback tail {tail:e} at n = {}", n + 1)));
        }
    }
    Ok(a)
}

/// VK metric at (0, z) on the vertical vector ∂_z and a horizontal lift τ_μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FiberComponents {
    pub vertical: f64,
    pub mixed: f64,
    /// ½∬G(z,u)|μ(u)|²ρ d²u by quadrature
    pub horizontal: f64,
    /// Σ n|a_n^z|²
    pub horizontal_series: f64,
}

impl FiberComponents {
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            vertical: s * self.vertical,
            mixed: s * self.mixed,
            horizontal: s * self.horizontal,
            horizontal_series: s * self.horizontal_series,
        }
    }
}

pub fn vk_fiber_components(mu: &BeltramiField, z: &FiberPoint) -> Result<FiberComponents> {
    vk_fiber_components_with(mu, z, &QuadRule::default_rule())
}

pub fn vk_fiber_components_with(mu: &BeltramiField, z: &FiberPoint, rule: &QuadRule) -> Result<FiberComponents> {
    let a = mu.harmonic_coeffs()?;
    if mu.domain != Domain::ExteriorDisk {
        return Err(Error::DomainMismatch);
    }
    // ∂_z moves only the c_1 mode of the fiber vector field; τ_μ has no c_1
    let t = z.norm_sqr();
    let c1 = if t.is_infinite() {
        czero()
    } else {
        let w = z.z.value();
        (1.0 - w.conj()) / ((1.0 - w) * (t - 1.0))
    };
    let vertical = c1.norm_sqr();
    let mixed = (c1 * czero().conj()).re;
    let h = apply_resolvent_exterior(|u| C64::new(mu.eval(u).map(|v| v.norm_sqr()).unwrap_or(f64::NAN), 0.0), &z.z, rule)?;
    let phi = d0_beta(mu, a.len())?;
    let an = pullback_coeffs(&phi, z)?;
    let series = an.iter().enumerate().map(|(i, c)| (i + 2) as f64 * c.norm_sqr()).sum();
    Ok(FiberComponents { vertical, mixed, horizontal: 0.5 * h.re, horizontal_series: series })
}

/// Θ at (0, z): −2 times the VK components.
pub fn theta_components(mu: &BeltramiField, z: &FiberPoint) -> Result<FiberComponents> {
    Ok(vk_fiber_components(mu, z)?.scaled(-2.0))
}

/// κ_n evaluated on ordered arguments μ_1..μ_n, ν̄_1..ν̄_n.
#[derive(Debug, Clone, PartialEq)]
pub struct FormValue {
    pub n: usize,
    pub mus: Vec<Vec<C64>>,
    pub nus: Vec<Vec<C64>>,
    pub value: C64,
}

/// All permutations of 0..n with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(vec![], 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        // insert n−1 at position k; moving it left past n−1−k entries
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            let sign = if (n - 1 - k) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

fn kappa_prefactor(n: usize) -> C64 {
    let fact: f64 = (1..=n + 1).map(|k| k as f64).product();
    C64::i().powu(n as u32) * fact / (2.0 * PI).powi(n as i32 + 1)
}

fn check_degree(n: usize, mus: &[BeltramiField], nus: &[BeltramiField]) -> Result<()> {
    if n > 4 {
        return Err(Error::DegreeTooLarge(n));
    }
    if n == 0 || mus.len() != n || nus.len() != n {
        return Err(Error::Config(format!("κ_{n} needs {n} μ and {n} ν arguments")));
    }
    Ok(())
}

fn form_value(n: usize, mus: &[BeltramiField], nus: &[BeltramiField], value: C64) -> Result<FormValue> {
    let coeffs = |v: &[BeltramiField]| -> Result<Vec<Vec<C64>>> { v.iter().map(|f| Ok(f.harmonic_coeffs()?.to_vec())).collect() };
    Ok(FormValue { n, mus: coeffs(mus)?, nus: coeffs(nus)?, value })
}

/// Permutation sum over a table g[i][j] of grid samples of G(μ_i ν̄_j).
fn permutation_integral(n: usize, g: &[Vec<Vec<C64>>], rule: &QuadRule) -> Result<C64> {
    let perms = permutations(n);
    let vals: Vec<C64> = (0..rule.node_count())
        .into_par_iter()
        .map(|k| {
            perms
                .iter()
                .map(|(p, s)| (0..n).map(|i| g[i][p[i]][k]).product::<C64>() * *s)
                .sum::<C64>()
        })
        .collect();
    // node k is w = 1/z̄ and ρ d²z = ρ d²w
    let terms: Vec<C64> = vals.iter().enumerate().map(|(k, v)| v * (rule.weight(k) * disk_density(rule.node(k)))).collect();
    Ok(pairwise_sum(&terms))
}

/// κ_n(μ_1..μ_n, ν̄_1..ν̄_n) with G(μ_i ν̄_j) from the exact mode resolvent,
/// one field per (i, j) pair, then integrated over 𝔻* on `rule`.
pub fn kappa_form(n: usize, mus: &[BeltramiField], nus: &[BeltramiField], rule: &QuadRule) -> Result<FormValue> {
    check_degree(n, mus, nus)?;
    let mut cache: HashMap<(usize, usize), Vec<C64>> = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            let pf = ProductField::product(&mus[i], &nus[j])?;
            let v: Vec<C64> = (0..rule.node_count()).into_par_iter().map(|k| pf.resolvent_at(rule.node(k))).collect();
            cache.insert((i, j), v);
        }
    }
    let g: Vec<Vec<Vec<C64>>> = (0..n).map(|i| (0..n).map(|j| cache.remove(&(i, j)).unwrap_or_default()).collect()).collect();
    let value = kappa_prefactor(n) * permutation_integral(n, &g, rule)?;
    form_value(n, mus, nus, value)
}

/// The same form with every G(μ_i ν̄_j) computed by direct resolvent
/// quadrature at each node of `outer`.
pub fn kappa_form_nested(n: usize, mus: &[BeltramiField], nus: &[BeltramiField], outer: &QuadRule, inner: &QuadRule) -> Result<FormValue> {
    check_degree(n, mus, nus)?;
    let pr = RadialPanelRule::from_rule(inner);
    let mut g = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let (m, v) = (&mus[i], &nus[j]);
            let f = |w: C64| m.eval_inverted(w).unwrap_or(C64::new(f64::NAN, 0.0)) * v.eval_inverted(w).unwrap_or(C64::new(f64::NAN, 0.0)).conj();
            g[i][j] = (0..outer.node_count()).into_par_iter().map(|k| pr.apply(&f, outer.node(k))).collect();
        }
    }
    let value = kappa_prefactor(n) * permutation_integral(n, &g, outer)?;
    form_value(n, mus, nus, value)
}

/// ∫₀¹ h(r) r^{2n−4} r dr by Gauss rules in t = r², and 1/(π(n³−n)(n²−1)).
pub fn moment_identity(n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::IndexOutOfRange(n as i64));
    }
    let k = (n - 2) as i32;
    let m = n + 4;
    // ½∫ [(1−t²)(−log t)/(2π) − (1−t)²/π] t^{n−2} dt
    let log_part = gauss_log(m).integrate(|t| (1.0 - t * t) * t.powi(k)) / (2.0 * PI);
    let poly_part = gauss_legendre(m).integrate(|t| (1.0 - t) * (1.0 - t) * t.powi(k)) / PI;
    let nf = n as f64;
    Ok((0.5 * (log_part - poly_part), 1.0 / (PI * (nf.powi(3) - nf) * (nf * nf - 1.0))))
}

/// h(r) from the fiber moment lemma.
pub fn moment_kernel(r: f64) -> f64 {
    let t = r * r;
    ((1.0 + t) / (2.0 * PI * (1.0 - t)) * (1.0 / t).ln() - 1.0 / PI) * (1.0 - t) * (1.0 - t)
}

/// Finite differences of K = log|g′(∞)| along t ↦ tμ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PotentialCheck {
    pub h: f64,
    /// (K(h) − 2K(0) + K(−h))/h²
    pub k_second: f64,
    /// 2Σ n|ȧ_n|² with ȧ_n central differences of the interior coefficients
    pub series: f64,
    /// (K(h) − K(−h))/(2h) at h and h/2
    pub k_first: [f64; 2],
    /// the same differences of the capacity |g′(∞)|
    pub capacity_first: [f64; 2],
}

struct Sample {
    k: f64,
    capacity: f64,
    f: Vec<C64>,
}

fn k_and_coeffs(mu: &BeltramiField, t: f64, trunc: usize) -> Result<Sample> {
    if t == 0.0 {
        let mut f = vec![czero(); trunc];
        f[0] = C64::new(1.0, 0.0);
        return Ok(Sample { k: 0.0, capacity: 1.0, f });
    }
    let qc = solve_beltrami(&mu.scaled(C64::new(t, 0.0)), Normalization::ModelB, 1e-13)?;
    let w = welding_decompose(&qc, trunc)?;
    let mut f = w.f_coeffs.clone();
    f.resize(trunc, czero());
    Ok(Sample { k: w.potential_k, capacity: w.capacity, f })
}

pub fn potential_check(mu: &BeltramiField, h: f64) -> Result<PotentialCheck> {
    if !(h > 0.0 && h <= 0.05) {
        return Err(Error::Config(format!("step {h} outside (0, 0.05]")));
    }
    let trunc = crate::series::DEFAULT_TRUNCATION;
    let steps = [h, -h, 0.5 * h, -0.5 * h];
    let v: Vec<Sample> = steps.par_iter().map(|t| k_and_coeffs(mu, *t, trunc)).collect::<Result<_>>()?;
    let k0 = k_and_coeffs(mu, 0.0, trunc)?.k;
    let k_second = (v[0].k - 2.0 * k0 + v[1].k) / (h * h);
    let series = 2.0
        * (1..trunc)
            .map(|n| {
                let d = (v[0].f[n] - v[1].f[n]) / (2.0 * h);
                n as f64 * d.norm_sqr()
            })
            .sum::<f64>();
    let k_first = [(v[0].k - v[1].k) / (2.0 * h), (v[2].k - v[3].k) / h];
    let capacity_first = [(v[0].capacity - v[1].capacity) / (2.0 * h), (v[2].capacity - v[3].capacity) / h];
    Ok(PotentialCheck { h, k_second, series, k_first, capacity_first })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::basis_mu;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vk_examples() {
        assert_eq!(vk_norm(&FourierVectorField::from_positive(&[c(1.0, 0.0)], true)), 1.0);
        assert_eq!(vk_norm(&FourierVectorField::from_positive(&[czero(); 3], true)), 0.0);
        let h: Vec<C64> = (1..=5).map(|n| c(1.0 / n as f64, 0.0)).collect();
        assert!((vk_norm(&FourierVectorField::from_positive(&h, false)) - 137.0 / 60.0).abs() < 1e-14);
    }

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        let total: f64 = p.iter().map(|(_, s)| s).sum();
        assert_eq!(total, 0.0);
        for (q, s) in permutations(4) {
            let inv = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| q[i] > q[j]).count();
            assert_eq!(if inv % 2 == 0 { 1.0 } else { -1.0 }, s);
        }
    }

    #[test]
    fn pullback_two_radii() {
        let phi = HoloCoeffs::disk(vec![c(1.0, 0.0)]);
        let s = sigma(&DiskPoint::exterior(c(2.0, 0.0)).unwrap(), SigmaVariant::Fiber).unwrap().inverse();
        let a = pullback_by(&phi, &s, 0.5).unwrap();
        let b = pullback_by(&phi, &s, 0.3).unwrap();
        for (x, y) in a.iter().zip(&b).take(8) {
            assert!((x - y).norm() < 1e-10 * a[0].norm(), "{x} {y}");
        }
    }

    #[test]
    fn pullback_round_trip() {
        let phi = HoloCoeffs::from_basis(&[c(0.3, 0.1), c(-0.2, 0.05), c(0.1, 0.0)]);
        let m = sigma(&DiskPoint::exterior(c(2.2, -1.1)).unwrap(), SigmaVariant::Fiber).unwrap();
        let once = pullback_by(&phi, &m.inverse(), 0.5).unwrap();
        let back = pullback_by(&HoloCoeffs::from_basis(&once), &m, 0.5).unwrap();
        for (k, a) in phi.to_basis().iter().enumerate() {
            assert!((back[k] - a).norm() < 1e-10, "{k}: {} vs {a}", back[k]);
        }
        for b in &back[3..] {
            assert!(b.norm() < 1e-9, "{b}");
        }
    }

    #[test]
    fn fiber_vertical_and_series() {
        let mu = basis_mu(2).unwrap();
        let v = vk_fiber_components(&mu, &FiberPoint::new(c(2.0, 0.0)).unwrap()).unwrap();
        assert!((v.vertical - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(v.mixed, 0.0);
        let v = vk_fiber_components(&mu, &FiberPoint::new(c(1.5, 0.0)).unwrap()).unwrap();
        assert!((v.horizontal / v.horizontal_series - 1.0).abs() < 1e-6, "{v:?}");
        let th = theta_components(&mu, &FiberPoint::new(c(1.5, 0.0)).unwrap()).unwrap();
        assert!(th.horizontal < 0.0);
    }

    #[test]
    fn moments() {
        for n in 2..=8 {
            let (a, b) = moment_identity(n).unwrap();
            assert!((a / b - 1.0).abs() < 1e-10, "n = {n}: {a} vs {b}");
        }
        // direct radial quadrature of h agrees as well
        let g = gauss_legendre(200);
        let d = g.integrate(|r| moment_kernel(r) * r.powi(2) * r);
        assert!((d / moment_identity(3).unwrap().1 - 1.0).abs() < 1e-7, "{d}");
    }

    #[test]
    fn kappa_one() {
        let rule = QuadRule::default_rule();
        let mu = basis_mu(2).unwrap();
        let k = kappa_form(1, &[mu.clone()], &[mu.clone()], &rule).unwrap();
        let want = C64::new(0.0, 1.0 / (2.0 * PI * PI));
        assert!((k.value - want).norm() < 1e-9 * want.norm(), "{}", k.value);
        let z = kappa_form(2, &[mu.clone(), mu.clone()], &[mu.clone(), mu.clone()], &rule).unwrap();
        assert!(z.value.norm() < 1e-14);
        assert!(matches!(kappa_form(5, &[], &[], &rule), Err(Error::DegreeTooLarge(5))));
    }
}
