//! Coefficient-space views of holomorphic functions and harmonic Beltrami
//! differentials, the maps D₀β, Λ, P between them, reflection across the
//! circle and the Fourier description of tangent vectors.
//!
//! A harmonic field on 𝔻* is stored by its coefficients a_n (n ≥ 2):
//!
//! μ(z) = −½(1−|z|²)² Σ (n³−n) a_n z̄^{−n−2},
//!
//! so the orthonormal basis vector μ_n has the single entry 1/√(2π(n³−n)).
//! On 𝔻 the stored a_n describe μ(z) = −½(1−|z|²)² Σ (n³−n) a_n z̄^{n−2}.

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::qc_solver::polar::PolarSeries;
use crate::quadrature::{integrate_exterior, pairwise_sum, GridFunction, Measure, QuadRule};
use crate::C64;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

pub const DEFAULT_TRUNCATION: usize = 16;

/// n³ − n
pub fn weight(n: usize) -> f64 {
    let n = n as f64;
    n * n * n - n
}

fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Maximum of `f` over 𝔻 from a 64×128 polar grid in r, refined by a local
/// pattern search around the best node.
pub(crate) fn grid_sup(f: impl Fn(C64) -> f64) -> f64 {
    let (nr, na) = (64usize, 128usize);
    let mut best = (f(czero()), 0.0, 0.0);
    for i in 1..nr {
        let r = i as f64 / nr as f64;
        for j in 0..na {
            let th = 2.0 * PI * j as f64 / na as f64;
            let v = f(C64::from_polar(r, th));
            if v > best.0 {
                best = (v, r, th);
            }
        }
    }
    let (mut v, mut r, mut th) = best;
    let (mut dr, mut dth) = (1.0 / nr as f64, 2.0 * PI / na as f64);
    for _ in 0..60 {
        let mut moved = false;
        for (er, et) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let rr = (r + er * dr).clamp(0.0, 1.0);
            let tt = th + et * dth;
            let vv = f(C64::from_polar(rr, tt));
            if vv > v {
                v = vv;
                r = rr;
                th = tt;
                moved = true;
            }
        }
        if !moved {
            dr *= 0.5;
            dth *= 0.5;
        }
    }
    v
}

/// Holomorphic function as a coefficient vector. On 𝔻, φ(z) = Σ c_k z^k;
/// on 𝔻*, φ(z) = Σ c_k z^{−k−4}, the decay of a quadratic differential at ∞.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloCoeffs {
    pub domain: Domain,
    pub coeffs: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CoeffJson {
    domain: Domain,
    truncation: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn coeffs_to_json(domain: Domain, c: &[C64]) -> String {
    let j = CoeffJson {
        domain,
        truncation: c.len(),
        re: c.iter().map(|z| z.re).collect(),
        im: c.iter().map(|z| z.im).collect(),
    };
    serde_json::to_string(&j).expect("coefficient vectors always serialize")
}

fn coeffs_from_json(s: &str) -> Result<(Domain, Vec<C64>)> {
    let j: CoeffJson = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
    if j.re.len() != j.truncation || j.im.len() != j.truncation {
        return Err(Error::Config("coefficient arrays do not match the truncation".into()));
    }
    Ok((j.domain, j.re.iter().zip(&j.im).map(|(a, b)| C64::new(*a, *b)).collect()))
}

impl HoloCoeffs {
    pub fn new(domain: Domain, coeffs: Vec<C64>) -> Result<Self> {
        if domain == Domain::UpperHalfPlane {
            return Err(Error::DomainMismatch);
        }
        Ok(Self { domain, coeffs })
    }

    pub fn disk(coeffs: Vec<C64>) -> Self {
        Self { domain: Domain::UnitDisk, coeffs }
    }

    pub fn zeros(domain: Domain, n: usize) -> Self {
        Self { domain, coeffs: vec![czero(); n] }
    }

    /// φ = Σ_{n≥2} (n³−n) a_n z^{n−2} from basis coefficients a_2, a_3, ...
    pub fn from_basis(a: &[C64]) -> Self {
        Self::disk(a.iter().enumerate().map(|(i, c)| c * weight(i + 2)).collect())
    }

    /// Inverse of [`HoloCoeffs::from_basis`].
    pub fn to_basis(&self) -> Vec<C64> {
        self.coeffs.iter().enumerate().map(|(k, c)| c / weight(k + 2)).collect()
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, z: C64) -> C64 {
        match self.domain {
            Domain::ExteriorDisk => {
                let w = 1.0 / z;
                let mut acc = czero();
                for c in self.coeffs.iter().rev() {
                    acc = acc * w + c;
                }
                acc * w.powi(4)
            }
            _ => self.coeffs.iter().rev().fold(czero(), |acc, c| acc * z + c),
        }
    }

    /// k-th derivative on 𝔻.
    pub fn derivative(&self, k: usize) -> HoloCoeffs {
        let mut c = self.coeffs.clone();
        for _ in 0..k {
            c = c.iter().enumerate().skip(1).map(|(j, v)| v * j as f64).collect();
        }
        HoloCoeffs { domain: self.domain, coeffs: c }
    }

    /// ∬_𝔻 |φ|² ρ⁻¹ d²z = Σ |c_k|² π / (2(k+1)(k+2)(k+3)).
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let k = k as f64;
                c.norm_sqr() * PI / (2.0 * (k + 1.0) * (k + 2.0) * (k + 3.0))
            })
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// sup (1−|z|²)² |φ(z)| on 𝔻. For polynomials the weighted modulus
    /// vanishes on the circle, so the grid maximum is the supremum.
    pub fn sup_norm(&self) -> f64 {
        match self.domain {
            Domain::ExteriorDisk => grid_sup(|w| {
                let t = w.norm_sqr();
                if t == 0.0 {
                    return 0.0;
                }
                let z = 1.0 / w.conj();
                (1.0 - 1.0 / t).powi(2) * self.eval(z).norm() * t * t
            }),
            _ => grid_sup(|z| (1.0 - z.norm_sqr()).powi(2) * self.eval(z).norm()),
        }
    }

    pub fn sub(&self, other: &HoloCoeffs) -> HoloCoeffs {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &Vec<C64>, k: usize| v.get(k).copied().unwrap_or_default();
        HoloCoeffs { domain: self.domain, coeffs: (0..n).map(|k| get(&self.coeffs, k) - get(&other.coeffs, k)).collect() }
    }

    pub fn to_json(&self) -> String {
        coeffs_to_json(self.domain, &self.coeffs)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let (domain, coeffs) = coeffs_from_json(s)?;
        Self::new(domain, coeffs)
    }
}

/// How a Beltrami field is stored.
#[derive(Debug, Clone)]
pub enum FieldRepr {
    /// basis coefficients a_n, entry 0 ↔ n = 2
    Harmonic(Vec<C64>),
    Sampled(GridFunction),
    /// exterior field given through ν(ζ) = μ(1/ζ) ζ²/ζ̄² on the closed disk,
    /// the Beltrami coefficient of 1/w(1/ζ)
    Chart(PolarSeries),
}

#[derive(Debug, Clone)]
pub struct BeltramiField {
    pub domain: Domain,
    pub repr: FieldRepr,
    sup: OnceLock<f64>,
}

impl BeltramiField {
    pub fn harmonic(domain: Domain, a: Vec<C64>) -> Result<Self> {
        if domain == Domain::UpperHalfPlane {
            return Err(Error::DomainMismatch);
        }
        Ok(Self { domain, repr: FieldRepr::Harmonic(a), sup: OnceLock::new() })
    }

    /// Harmonic field on 𝔻* with the given basis coefficients.
    pub fn exterior(a: Vec<C64>) -> Self {
        Self { domain: Domain::ExteriorDisk, repr: FieldRepr::Harmonic(a), sup: OnceLock::new() }
    }

    pub fn zero(domain: Domain) -> Self {
        Self { domain, repr: FieldRepr::Harmonic(Vec::new()), sup: OnceLock::new() }
    }

    pub fn sampled(grid: GridFunction) -> Self {
        Self { domain: grid.domain, repr: FieldRepr::Sampled(grid), sup: OnceLock::new() }
    }

    /// Exterior field through its chart series ν(ζ), ζ = 1/z.
    pub fn chart(nu: PolarSeries) -> Self {
        Self { domain: Domain::ExteriorDisk, repr: FieldRepr::Chart(nu), sup: OnceLock::new() }
    }

    /// μ(z) = k z/z̄ on 𝔻*.
    pub fn radial(k: f64) -> Self {
        let mut nu = PolarSeries::zero();
        nu.add_term((0, 2, 0), C64::new(k, 0.0));
        Self::chart(nu)
    }

    pub fn coeffs(&self) -> Option<&[C64]> {
        match &self.repr {
            FieldRepr::Harmonic(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_harmonic(&self) -> bool {
        matches!(self.repr, FieldRepr::Harmonic(_))
    }

    /// Coefficients of a harmonic field, or DomainMismatch for other forms.
    pub fn harmonic_coeffs(&self) -> Result<&[C64]> {
        self.coeffs().ok_or(Error::DomainMismatch)
    }

    pub fn scaled(&self, s: C64) -> BeltramiField {
        let repr = match &self.repr {
            FieldRepr::Harmonic(a) => FieldRepr::Harmonic(a.iter().map(|c| c * s).collect()),
            FieldRepr::Sampled(g) => {
                let mut g = g.clone();
                g.values.iter_mut().for_each(|v| *v *= s);
                FieldRepr::Sampled(g)
            }
            FieldRepr::Chart(p) => FieldRepr::Chart(p.scaled(s)),
        };
        BeltramiField { domain: self.domain, repr, sup: OnceLock::new() }
    }

    /// Sum of two harmonic fields on the same domain.
    pub fn add(&self, other: &BeltramiField) -> Result<BeltramiField> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        let (a, b) = (self.harmonic_coeffs()?, other.harmonic_coeffs()?);
        let n = a.len().max(b.len());
        let c = (0..n).map(|k| a.get(k).copied().unwrap_or_default() + b.get(k).copied().unwrap_or_default()).collect();
        BeltramiField::harmonic(self.domain, c)
    }

    /// Pointwise value. Sampled fields are only known at their nodes.
    pub fn eval(&self, z: C64) -> Result<C64> {
        match (&self.repr, self.domain) {
            (FieldRepr::Harmonic(a), Domain::ExteriorDisk) => {
                let w = 1.0 / z.conj();
                Ok(harmonic_inverted(a, w))
            }
            (FieldRepr::Harmonic(a), _) => {
                let t = z.norm_sqr();
                let zb = z.conj();
                let s = a.iter().enumerate().rev().fold(czero(), |acc, (i, c)| acc * zb + c * weight(i + 2));
                Ok(-0.5 * (1.0 - t) * (1.0 - t) * s)
            }
            (FieldRepr::Chart(nu), _) => {
                let zeta = 1.0 / z;
                Ok(nu.eval(zeta) * (zeta.conj() * zeta.conj()) / (zeta * zeta))
            }
            (FieldRepr::Sampled(_), _) => Err(Error::Config("sampled fields are only known at grid nodes".into())),
        }
    }

    /// Value at 1/w̄ for an exterior field, w ∈ 𝔻.
    pub fn eval_inverted(&self, w: C64) -> Result<C64> {
        match (&self.repr, self.domain) {
            (FieldRepr::Harmonic(a), Domain::ExteriorDisk) => Ok(harmonic_inverted(a, w)),
            (_, Domain::ExteriorDisk) => self.eval(1.0 / w.conj()),
            _ => Err(Error::DomainMismatch),
        }
    }

    /// ‖μ‖∞, computed once.
    pub fn sup_norm(&self) -> f64 {
        *self.sup.get_or_init(|| match &self.repr {
            FieldRepr::Harmonic(a) => 0.5 * HoloCoeffs::from_basis(a).sup_norm(),
            FieldRepr::Sampled(g) => g.values.iter().fold(0.0, |m, v| m.max(v.norm())),
            FieldRepr::Chart(nu) => grid_sup(|z| nu.eval(z).norm()),
        })
    }

    /// ∬ |μ|² ρ d²z; 2π Σ (n³−n)|a_n|² for harmonic fields.
    pub fn l2_norm_sq(&self) -> Result<f64> {
        match &self.repr {
            FieldRepr::Harmonic(a) => Ok(2.0 * PI * a.iter().enumerate().map(|(i, c)| weight(i + 2) * c.norm_sqr()).sum::<f64>()),
            FieldRepr::Sampled(g) => {
                let mut h = g.clone();
                h.values.iter_mut().for_each(|v| *v = C64::new(v.norm_sqr(), 0.0));
                Ok(h.integrate(Measure::Hyperbolic)?.re)
            }
            FieldRepr::Chart(_) => {
                Ok(integrate_exterior(|z| C64::new(self.eval(z).unwrap_or_default().norm_sqr(), 0.0), &QuadRule::default_rule(), Measure::Hyperbolic)?.re)
            }
        }
    }

    /// Samples on the nodes of `rule` (exterior values stored at 1/z̄).
    pub fn sample(&self, rule: Arc<QuadRule>) -> Result<GridFunction> {
        if let FieldRepr::Sampled(g) = &self.repr {
            return Ok(g.clone());
        }
        let g = GridFunction::sample(rule, self.domain, |z| self.eval(z).unwrap_or(C64::new(f64::NAN, f64::NAN)));
        if g.values.iter().any(|v| !v.re.is_finite()) {
            return Err(Error::NonFiniteValue(0));
        }
        Ok(g)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(coeffs_to_json(self.domain, self.harmonic_coeffs()?))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let (domain, a) = coeffs_from_json(s)?;
        Self::harmonic(domain, a)
    }
}

/// Harmonic exterior field at 1/w̄: −½(1−|w|²)² w̄^{−2} Σ (n³−n) a_n w^n.
fn harmonic_inverted(a: &[C64], w: C64) -> C64 {
    let t = w.norm_sqr();
    let s = a.iter().enumerate().rev().fold(czero(), |acc, (i, c)| acc * w + c * weight(i + 2));
    // Σ (n³−n) a_n w^n = w² s
    -0.5 * (1.0 - t) * (1.0 - t) * s * (w * w) / (w.conj() * w.conj())
}

/// μ_n, the n-th orthonormal basis vector of harmonic fields on 𝔻*.
pub fn basis_mu(n: usize) -> Result<BeltramiField> {
    basis_mu_in(n, n.saturating_sub(1))
}

/// μ_n padded to `truncation` coefficients.
pub fn basis_mu_in(n: usize, truncation: usize) -> Result<BeltramiField> {
    if n < 2 {
        return Err(Error::IndexOutOfRange(n as i64));
    }
    let mut a = vec![czero(); truncation.max(n - 1)];
    a[n - 2] = C64::new(1.0 / (2.0 * PI * weight(n)).sqrt(), 0.0);
    Ok(BeltramiField::exterior(a))
}

/// Λ(φ)(z) = −½(1−|z|²)² φ(1/z̄) z̄⁻⁴, right inverse of D₀β.
pub fn lambda_map(phi: &HoloCoeffs) -> Result<BeltramiField> {
    if phi.domain != Domain::UnitDisk {
        return Err(Error::DomainMismatch);
    }
    Ok(BeltramiField::exterior(phi.to_basis()))
}

/// M_n = ∬_{𝔻*} μ(ζ) ζ^{−n−2} d²ζ for n = 2..truncation+1.
fn exterior_moments(mu: &BeltramiField, truncation: usize, rule: &QuadRule) -> Result<Vec<C64>> {
    let field = match mu.domain {
        Domain::ExteriorDisk => mu.clone(),
        Domain::UnitDisk => reflect(mu)?,
        Domain::UpperHalfPlane => return Err(Error::DomainMismatch),
    };
    match &field.repr {
        // only the matching basis element survives the angular integral
        FieldRepr::Harmonic(a) => Ok((0..truncation).map(|i| -PI * a.get(i).copied().unwrap_or_default()).collect()),
        FieldRepr::Sampled(g) => {
            let r = &g.rule;
            (0..truncation)
                .map(|i| {
                    let n = (i + 2) as i32;
                    let terms: Vec<C64> = (0..g.values.len())
                        .map(|k| {
                            let w = r.node(k);
                            let t = w.norm_sqr();
                            g.values[k] * w.conj().powi(n + 2) * (r.weight(k) / (t * t))
                        })
                        .collect();
                    if terms.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                        return Err(Error::QuadratureFailure("non-finite moment".into()));
                    }
                    Ok(pairwise_sum(&terms))
                })
                .collect()
        }
        FieldRepr::Chart(_) => (0..truncation)
            .map(|i| {
                let n = (i + 2) as i32;
                integrate_exterior(|z| field.eval(z).unwrap_or_default() * z.powi(-n - 2), rule, Measure::Euclidean)
                    .map_err(|e| Error::QuadratureFailure(e.to_string()))
            })
            .collect(),
    }
}

/// D₀β(μ)(z) = −(6/π) ∬_{𝔻*} μ(ζ)/(ζ−z)⁴ d²ζ as Taylor coefficients c_0..c_{N−1}.
/// Harmonic inputs use the diagonal action c_{n−2} = (n³−n) a_n.
pub fn d0_beta(mu: &BeltramiField, truncation: usize) -> Result<HoloCoeffs> {
    d0_beta_with(mu, truncation, &QuadRule::default_rule())
}

pub fn d0_beta_with(mu: &BeltramiField, truncation: usize, rule: &QuadRule) -> Result<HoloCoeffs> {
    if mu.domain != Domain::ExteriorDisk {
        return Err(Error::DomainMismatch);
    }
    if let FieldRepr::Harmonic(a) = &mu.repr {
        let mut c: Vec<C64> = a.iter().enumerate().map(|(i, v)| v * weight(i + 2)).collect();
        c.resize(truncation.max(c.len()), czero());
        c.truncate(truncation);
        return Ok(HoloCoeffs::disk(c));
    }
    let m = exterior_moments(mu, truncation, rule)?;
    // 1/(ζ−z)⁴ = Σ_k C(k+3,3) z^k ζ^{−k−4}
    Ok(HoloCoeffs::disk(
        m.iter()
            .enumerate()
            .map(|(k, mk)| {
                let kf = k as f64;
                let binom = (kf + 1.0) * (kf + 2.0) * (kf + 3.0) / 6.0;
                mk * (-6.0 / PI * binom)
            })
            .collect(),
    ))
}

/// Orthogonal projection onto harmonic fields on 𝔻*, truncated to n ≤ N+1.
pub fn project_p(mu: &BeltramiField, truncation: usize) -> Result<BeltramiField> {
    project_p_with(mu, truncation, &QuadRule::default_rule())
}

pub fn project_p_with(mu: &BeltramiField, truncation: usize, rule: &QuadRule) -> Result<BeltramiField> {
    if mu.domain == Domain::ExteriorDisk {
        if let FieldRepr::Harmonic(a) = &mu.repr {
            let mut a = a.clone();
            a.resize(truncation, czero());
            return Ok(BeltramiField::exterior(a));
        }
    }
    let m = exterior_moments(mu, truncation, rule)?;
    Ok(BeltramiField::exterior(m.iter().map(|v| -v / PI).collect()))
}

/// μ ↦ conj(μ(1/z̄)) z²/z̄², moving a field to the mirrored disk.
pub fn reflect(mu: &BeltramiField) -> Result<BeltramiField> {
    let target = match mu.domain {
        Domain::UnitDisk => Domain::ExteriorDisk,
        Domain::ExteriorDisk => Domain::UnitDisk,
        Domain::UpperHalfPlane => return Err(Error::DomainMismatch),
    };
    match &mu.repr {
        FieldRepr::Harmonic(a) => BeltramiField::harmonic(target, a.iter().map(|c| c.conj()).collect()),
        FieldRepr::Sampled(g) => {
            // both grids live on the same nodes ω: the exterior sample at 1/ω̄
            // and the disk sample at ω are related by the reflection rule
            let vals = (0..g.values.len())
                .map(|k| {
                    let w = g.rule.node(k);
                    g.values[k].conj() * (w * w) / (w.conj() * w.conj())
                })
                .collect();
            Ok(BeltramiField::sampled(GridFunction::new(g.rule.clone(), vals, target)?))
        }
        FieldRepr::Chart(_) => Err(Error::TruncationExceeded("chart fields are exterior only".into())),
    }
}

/// Tangent vector u(θ) d/dθ with u = Σ_{0<|n|≤N} c_n e^{inθ}.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierVectorField {
    /// c_{−N}..c_{−1}, c_1..c_N
    coeffs: Vec<C64>,
    pub real: bool,
}

impl FourierVectorField {
    /// From c_1..c_N; with `real` the negative modes are the conjugates.
    pub fn from_positive(c: &[C64], real: bool) -> Self {
        let n = c.len();
        let mut coeffs = vec![czero(); 2 * n];
        for (k, v) in c.iter().enumerate() {
            coeffs[n + k] = *v;
            if real {
                coeffs[n - 1 - k] = v.conj();
            }
        }
        Self { coeffs, real }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() / 2
    }

    /// c_n for 0 < |n| ≤ N, zero otherwise.
    pub fn c(&self, n: i64) -> C64 {
        let big = self.truncation() as i64;
        if n == 0 || n.abs() > big {
            return czero();
        }
        let idx = if n > 0 { big + n - 1 } else { big + n };
        self.coeffs[idx as usize]
    }

    pub fn set(&mut self, n: i64, v: C64) {
        let big = self.truncation() as i64;
        if n != 0 && n.abs() <= big {
            let idx = if n > 0 { big + n - 1 } else { big + n };
            self.coeffs[idx as usize] = v;
        }
    }

    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        (1..=self.truncation() as i64).all(|n| (self.c(-n) - self.c(n).conj()).norm() <= tol)
    }

    pub fn eval(&self, theta: f64) -> C64 {
        let big = self.truncation() as i64;
        (-big..=big).map(|n| self.c(n) * C64::from_polar(1.0, n as f64 * theta)).sum()
    }
}

/// u₊(z) = i Σ_{n≥1} c_n z^{n+1}.
pub fn u_to_holo(u: &FourierVectorField) -> HoloCoeffs {
    let big = u.truncation();
    let mut c = vec![czero(); big + 2];
    for n in 1..=big {
        c[n + 1] = C64::i() * u.c(n as i64);
    }
    HoloCoeffs::disk(c)
}

/// u₊‴(z) = i Σ_{n≥2} (n³−n) c_n z^{n−2}.
pub fn u_to_quadratic(u: &FourierVectorField) -> HoloCoeffs {
    let big = u.truncation();
    HoloCoeffs::disk((2..=big.max(1)).map(|n| C64::i() * weight(n) * u.c(n as i64)).collect())
}

/// Random harmonic field on 𝔻* supported on n = 2..=nmax with Gaussian-like
/// coefficients, scaled to the requested sup norm when `sup` is given.
pub fn random_harmonic(rng: &mut impl Rng, nmax: usize, sup: Option<f64>) -> BeltramiField {
    let a: Vec<C64> = (2..=nmax)
        .map(|n| {
            let s = 1.0 / (2.0 * PI * weight(n)).sqrt();
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * s
        })
        .collect();
    let f = BeltramiField::exterior(a);
    match sup {
        Some(s) => {
            let k = s / f.sup_norm();
            f.scaled(C64::new(k, 0.0))
        }
        None => f,
    }
}

/// Least-squares fit of a sampled exterior field by a chart polynomial
/// ν(ζ) ≈ Σ c_{pq} ζ^p ζ̄^q with p + q ≤ degree. Returns the series and the
/// maximum residual at the grid nodes.
pub fn fit_chart_polynomial(g: &GridFunction, degree: usize) -> Result<(PolarSeries, f64)> {
    if g.domain != Domain::ExteriorDisk {
        return Err(Error::DomainMismatch);
    }
    let mut monos = Vec::new();
    for p in 0..=degree {
        for q in 0..=(degree - p) {
            monos.push((p as u32, q as u32));
        }
    }
    let n = g.values.len();
    let mut a = DMatrix::<f64>::zeros(2 * n, 2 * monos.len());
    let mut b = DVector::<f64>::zeros(2 * n);
    for k in 0..n {
        // grid node ω carries μ(1/ω̄); in the chart ζ = 1/z this is ζ = ω̄
        let w = g.rule.node(k);
        let zeta = w.conj();
        let nu = g.values[k] * (w * w) / (w.conj() * w.conj());
        let sw = g.rule.weight(k).sqrt();
        for (j, (p, q)) in monos.iter().enumerate() {
            let m = zeta.powi(*p as i32) * zeta.conj().powi(*q as i32) * sw;
            a[(2 * k, 2 * j)] = m.re;
            a[(2 * k, 2 * j + 1)] = -m.im;
            a[(2 * k + 1, 2 * j)] = m.im;
            a[(2 * k + 1, 2 * j + 1)] = m.re;
        }
        b[2 * k] = nu.re * sw;
        b[2 * k + 1] = nu.im * sw;
    }
    let svd = a.svd(true, true);
    let x = svd.solve(&b, 1e-13).map_err(|e| Error::FitFailure(e.to_string()))?;
    let mut series = PolarSeries::zero();
    for (j, (p, q)) in monos.iter().enumerate() {
        series = {
            let mut s = series;
            s.add_assign(&PolarSeries::monomial(*p, *q, C64::new(x[2 * j], x[2 * j + 1])));
            s
        };
    }
    let mut resid: f64 = 0.0;
    for k in 0..n {
        let w = g.rule.node(k);
        let nu = g.values[k] * (w * w) / (w.conj() * w.conj());
        resid = resid.max((series.eval(w.conj()) - nu).norm());
    }
    Ok((series, resid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_mu_closed_form() {
        let m = basis_mu(2).unwrap();
        let v = m.eval(C64::new(2.0, 0.0)).unwrap();
        let want = -(3.0 / (4.0 * PI)).sqrt() * 9.0 / 16.0;
        assert!((v.re - want).abs() < 1e-15 && v.im.abs() < 1e-15);
        assert!((m.l2_norm_sq().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lambda_of_constant() {
        let phi = HoloCoeffs::disk(vec![C64::new(6.0, 0.0)]);
        let mu = lambda_map(&phi).unwrap();
        let z = C64::new(1.3, 0.4);
        let want = -3.0 * (1.0 - z.norm_sqr()).powi(2) * z.conj().powi(-4);
        assert!((mu.eval(z).unwrap() - want).norm() < 1e-14);
        assert!((mu.sup_norm() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn d0_beta_of_basis() {
        let d = d0_beta(&basis_mu(2).unwrap(), 4).unwrap();
        assert!((d.coeffs[0].re - (3.0 / PI).sqrt()).abs() < 1e-14);
        let two = 2.0 * d.l2_norm();
        assert!((two - basis_mu(2).unwrap().l2_norm_sq().unwrap().sqrt()).abs() < 1e-14);
    }

    #[test]
    fn reflection_point_value() {
        let r = reflect(&basis_mu(2).unwrap()).unwrap();
        let v = r.eval(C64::new(0.5, 0.0)).unwrap();
        let want = -3.0 * 0.5625 / (12.0 * PI).sqrt();
        assert!((v.re - want).abs() < 1e-15);
    }

    #[test]
    fn tangent_conversions() {
        let u = FourierVectorField::from_positive(&[C64::new(1.0, 0.0)], true);
        let h = u_to_holo(&u);
        assert_eq!(h.coeffs[2], C64::i());
        assert!(u_to_quadratic(&u).coeffs.iter().all(|c| c.norm() == 0.0));
        let u2 = FourierVectorField::from_positive(&[czero(), C64::new(1.0, 0.0)], false);
        assert_eq!(u_to_quadratic(&u2).coeffs[0], C64::new(0.0, 6.0));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let h = HoloCoeffs::disk(vec![C64::new(0.1, -1.0 / 3.0), C64::new(PI, 1e-300)]);
        assert_eq!(HoloCoeffs::from_json(&h.to_json()).unwrap(), h);
    }
}
