//! Weil-Petersson geometry at the origin: inner products, Riemann, Ricci and
//! sectional curvature, the B kernel, and the variational identities for ρ,
//! the metric and Q.
//!
//! Products μν̄ of harmonic fields are finite sums of radial modes, so every
//! pairing (a, G(b)) has an exact value (see [`modes`]). The double
//! quadrature versions are kept as independent checks.

pub mod modes;
mod vanishing;
mod variations;

pub use modes::{hermitian_pairing, pair_modes, pairing, resolvent_poly, BiPoly, ProductField};
pub use vanishing::{ahlfors_residual, uhp_field, vanishing_integrals, verify_vanishing_integrals, AhlforsData};
pub use variations::{
    density_first_variation, density_second_variation, metric_first_variation, metric_second_variation_fd, pulled_back_density,
    wp_metric_at, wp_metric_at_many, FdSecond,
};

use crate::error::{Error, Result};
use crate::geometry::{DiskPoint, Domain, MoebiusMap};
use crate::harness::{Provenance, Report};
use crate::quadrature::{apply_resolvent, integrate_double, integrate_exterior, GridFunction, Measure, QuadRule, RuleParams};
use crate::series::{basis_mu_in, weight, BeltramiField};
use crate::C64;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub value: C64,
    pub rule: RuleParams,
    pub truncation: usize,
}

/// R_{κλ̄μν̄} together with its arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannComponent {
    pub args: [Vec<C64>; 4],
    pub value: C64,
}

fn coeffs_of(mu: &BeltramiField) -> Result<Vec<C64>> {
    if mu.domain != Domain::ExteriorDisk {
        return Err(Error::DomainMismatch);
    }
    Ok(mu.harmonic_coeffs()?.to_vec())
}

/// ⟨μ,ν⟩ = ∬ μν̄ρ = 2π Σ (n³−n) a_n b̄_n.
pub fn wp_inner(mu: &BeltramiField, nu: &BeltramiField) -> Result<C64> {
    if mu.domain != nu.domain {
        return Err(Error::DomainMismatch);
    }
    let (a, b) = (mu.harmonic_coeffs()?, nu.harmonic_coeffs()?);
    Ok(a.iter().zip(b).enumerate().map(|(i, (x, y))| x * y.conj() * weight(i + 2)).sum::<C64>() * (2.0 * PI))
}

/// ⟨μ,ν⟩ by quadrature on 𝔻*.
pub fn wp_inner_quadrature(mu: &BeltramiField, nu: &BeltramiField, rule: &QuadRule) -> Result<C64> {
    if mu.domain != Domain::ExteriorDisk || nu.domain != Domain::ExteriorDisk {
        return Err(Error::DomainMismatch);
    }
    integrate_exterior(|z| mu.eval(z).unwrap_or_default() * nu.eval(z).unwrap_or_default().conj(), rule, Measure::Hyperbolic)
}

/// μν̄ as a mode sum.
pub fn product(mu: &BeltramiField, nu: &BeltramiField) -> Result<ProductField> {
    ProductField::product(mu, nu)
}

/// R_{κλ̄μν̄} = −(κλ̄, G(μ̄ν)) − (λ̄μ, G(κ̄ν)).
pub fn riemann(kappa: &BeltramiField, lambda: &BeltramiField, mu: &BeltramiField, nu: &BeltramiField) -> Result<RiemannComponent> {
    let args = [coeffs_of(kappa)?, coeffs_of(lambda)?, coeffs_of(mu)?, coeffs_of(nu)?];
    // (AB̄, G(C̄D)) = ∬ AB̄ · G(C D̄) ρ
    let first = pairing(&product(kappa, lambda)?, &product(mu, nu)?);
    let second = pairing(&product(mu, lambda)?, &product(kappa, nu)?);
    Ok(RiemannComponent { args, value: -first - second })
}

/// The same component with both pairings computed by double quadrature.
pub fn riemann_quadrature(
    kappa: &BeltramiField,
    lambda: &BeltramiField,
    mu: &BeltramiField,
    nu: &BeltramiField,
    rule: &QuadRule,
) -> Result<C64> {
    for f in [kappa, lambda, mu, nu] {
        coeffs_of(f)?;
    }
    let ev = |f: &BeltramiField, w: C64| f.eval_inverted(w).unwrap_or_default();
    let first = integrate_double(|z, w| ev(kappa, z) * ev(lambda, z).conj() * ev(mu, w) * ev(nu, w).conj(), rule)?;
    let second = integrate_double(|z, w| ev(mu, z) * ev(lambda, z).conj() * ev(kappa, w) * ev(nu, w).conj(), rule)?;
    Ok(-first - second)
}

/// (a, G(b)) for a = |μ|², b = |ν|² style products, by double quadrature.
pub fn pairing_quadrature(a: &ProductField, b: &ProductField, rule: &QuadRule) -> Result<C64> {
    integrate_double(|z, w| a.eval(z) * b.eval(w).conj(), rule)
}

/// The other integration order: G applied first, then one integral.
pub fn pairing_resolvent_first(a: &ProductField, b: &ProductField, rule: &QuadRule) -> Result<C64> {
    let coarse = QuadRule::new(24, 48)?;
    crate::quadrature::integrate_disk(
        |w| {
            let g = apply_resolvent(|v| b.eval(v), &DiskPoint::disk(w).expect("rule nodes are interior"), rule)
                .unwrap_or(C64::new(f64::NAN, 0.0));
            a.eval(w) * g.conj()
        },
        &coarse,
        Measure::Hyperbolic,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PolyFit {
    pub limit: f64,
    pub coeffs: Vec<f64>,
    /// residual standard error √(SSR/(n−p))
    pub residual: f64,
}

/// Diagonal Ricci partial sums with their extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RicciRecord {
    pub k: usize,
    pub n_max: usize,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// fit S_N = L + a/N
    pub fit_linear: PolyFit,
    /// fit S_N = L + a/N + b/N²
    pub fit_quadratic: PolyFit,
    pub extrapolated: f64,
    pub tail_estimate: f64,
}

fn fit_inverse_powers(ns: &[f64], ys: &[f64], degree: usize) -> Result<PolyFit> {
    let p = degree + 1;
    if ns.len() <= p {
        return Err(Error::FitFailure("not enough partial sums to extrapolate".into()));
    }
    let a = nalgebra::DMatrix::from_fn(ns.len(), p, |i, j| ns[i].powi(-(j as i32)));
    let y = nalgebra::DVector::from_column_slice(ys);
    let svd = a.clone().svd(true, true);
    let c = svd.solve(&y, 1e-14).map_err(|e| Error::FitFailure(e.to_string()))?;
    let r = &a * &c - &y;
    Ok(PolyFit {
        limit: c[0],
        coeffs: c.iter().copied().collect(),
        residual: (r.norm_squared() / (ns.len() - p) as f64).sqrt(),
    })
}

/// R_{k n̄ n l̄} for basis fields.
pub fn ricci_term(k: usize, l: usize, n: usize) -> Result<C64> {
    let m = k.max(l).max(n);
    let (mk, ml, mn) = (basis_mu_in(k, m)?, basis_mu_in(l, m)?, basis_mu_in(n, m)?);
    Ok(riemann(&mk, &mn, &mn, &ml)?.value)
}

/// Σ_{n=2}^{N} R_{k n̄ n k̄} with extrapolation in 1/N over the upper half of the range.
pub fn ricci_diagonal(k: usize, n_max: usize) -> Result<RicciRecord> {
    if k < 2 {
        return Err(Error::IndexOutOfRange(k as i64));
    }
    if n_max < k + 5 {
        return Err(Error::Config(format!("tail cutoff {n_max} must be at least k + 5")));
    }
    let mut terms = Vec::new();
    let mut partial_sums = Vec::new();
    let mut s = 0.0;
    for n in 2..=n_max {
        let v = ricci_term(k, k, n)?.re;
        s += v;
        terms.push(v);
        partial_sums.push(s);
    }
    let start = (n_max / 2).max(2);
    let ns: Vec<f64> = (start..=n_max).map(|n| n as f64).collect();
    let ys: Vec<f64> = partial_sums[start - 2..].to_vec();
    let fit_linear = fit_inverse_powers(&ns, &ys, 1)?;
    let fit_quadratic = fit_inverse_powers(&ns, &ys, 2)?;
    let best = if fit_quadratic.residual <= fit_linear.residual { &fit_quadratic } else { &fit_linear };
    let extrapolated = best.limit;
    Ok(RicciRecord {
        k,
        n_max,
        tail_estimate: (extrapolated - s).abs(),
        extrapolated,
        fit_linear,
        fit_quadratic,
        terms,
        partial_sums,
    })
}

/// Partial sums Σ_{n=2}^{N} R_{k n̄ n l̄}.
pub fn ricci_partial_sums(k: usize, l: usize, n_max: usize) -> Result<Vec<C64>> {
    let mut s = czero();
    (2..=n_max)
        .map(|n| {
            s += ricci_term(k, l, n)?;
            Ok(s)
        })
        .collect()
}

/// Sectional curvature of the real section spanned by μ and ν:
/// R = R_{μν̄νμ̄}+R_{νμ̄μν̄}−R_{μν̄μν̄}−R_{νμ̄νμ̄} over
/// g = 4g_{μμ̄}g_{νν̄} − 2|g_{μν̄}|² − 2 Re(g_{μν̄})².
pub fn sectional(mu: &BeltramiField, nu: &BeltramiField) -> Result<f64> {
    let (num, den) = sectional_parts(mu, nu)?;
    Ok(num / den)
}

/// Numerator and denominator of [`sectional`].
pub fn sectional_parts(mu: &BeltramiField, nu: &BeltramiField) -> Result<(f64, f64)> {
    let r = riemann(mu, nu, nu, mu)?.value + riemann(nu, mu, mu, nu)?.value
        - riemann(mu, nu, mu, nu)?.value
        - riemann(nu, mu, nu, mu)?.value;
    let gmn = wp_inner(mu, nu)?;
    let g = 4.0 * wp_inner(mu, mu)?.re * wp_inner(nu, nu)?.re - 2.0 * gmn.norm_sqr() - 2.0 * gmn.re * gmn.re;
    if g <= 1e-12 {
        return Err(Error::DegenerateSection(g));
    }
    Ok((r.re, g))
}

/// R_{μμ̄μμ̄}/‖μ‖⁴.
pub fn holomorphic_sectional(mu: &BeltramiField) -> Result<f64> {
    let g = wp_inner(mu, mu)?.re;
    if g <= 1e-12 {
        return Err(Error::DegenerateSection(g));
    }
    Ok(riemann(mu, mu, mu, mu)?.value.re / (g * g))
}

/// ρ⁻¹ L_μ L_μ̄ ρ = G(|μ|²)(z), z ∈ 𝔻*, by the resolvent quadrature.
pub fn second_variation_density(mu: &BeltramiField, z: &DiskPoint, rule: &QuadRule) -> Result<f64> {
    if z.domain() != Domain::ExteriorDisk || mu.domain != Domain::ExteriorDisk {
        return Err(Error::DomainMismatch);
    }
    Ok(apply_resolvent(|u| C64::new(mu.eval(u).unwrap_or_default().norm_sqr(), 0.0), z, rule)?.re)
}

/// G(|μ|²)(z) from the exact mode polynomials.
pub fn second_variation_density_exact(mu: &BeltramiField, z: &DiskPoint) -> Result<f64> {
    if z.domain() != Domain::ExteriorDisk {
        return Err(Error::DomainMismatch);
    }
    let w = z.inverted()?.value();
    Ok(product(mu, mu)?.resolvent_at(w).re)
}

/// ∂²g_{μν̄}(εκ)/∂ε∂ε̄ at 0 = (μκ̄, G(νκ̄)) + (μν̄, G(|κ|²)).
pub fn metric_second_variation(mu: &BeltramiField, nu: &BeltramiField, kappa: &BeltramiField) -> Result<C64> {
    let a = pairing(&product(mu, kappa)?, &product(kappa, nu)?);
    let b = pairing(&product(mu, nu)?, &product(kappa, kappa)?);
    Ok(a + b)
}

/// Q̇(μ)[ν] = −2 ∂_z̄ ρ⁻¹ ∂_z̄ G(μν̄). In the chart w = 1/z̄ with g = G(μν̄),
/// Q̇ = −(w²/(2w̄²)) ∂_w((1−|w|²)² ∂_w g) = −(w²/(2w̄²)) (1−|w|²) E, where
/// E = (1−|w|²) g_ww − 2w̄ g_w is returned here.
pub fn q_dot_reduced(mu: &BeltramiField, nu: &BeltramiField) -> Result<BiPoly> {
    let g = product(mu, nu)?.resolvent_poly();
    let gw = g.d_w();
    let mut wbar = BiPoly::default();
    wbar.add_term(0, 1, C64::new(-2.0, 0.0));
    Ok(BiPoly::one_minus_t().mul(&gw.d_w()).add(&wbar.mul(&gw)))
}

/// Samples of Q̇(μ)[ν] on the exterior grid of `rule` (values at 1/w̄).
pub fn q_dot(mu: &BeltramiField, nu: &BeltramiField, rule: Arc<QuadRule>) -> Result<GridFunction> {
    let e = q_dot_reduced(mu, nu)?;
    let g = GridFunction::sample(rule, Domain::ExteriorDisk, |z| {
        let w = 1.0 / z.conj();
        -(w * w) / (2.0 * w.conj() * w.conj()) * (1.0 - w.norm_sqr()) * e.eval(w)
    });
    if g.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFiniteValue(0));
    }
    Ok(g)
}

/// Both sides of ‖Q̇(μ)[ν]‖² = ‖μν̄‖² − (μν̄, G(μν̄)).
#[derive(Debug, Clone, PartialEq)]
pub struct QDotNorm {
    /// grid quadrature of |Q̇|²ρ
    pub lhs: f64,
    /// the same norm in closed form from the polynomial
    pub lhs_exact: f64,
    pub product_norm_sq: f64,
    pub pairing: f64,
    pub rhs: f64,
}

pub fn q_dot_norm_identity(mu: &BeltramiField, nu: &BeltramiField, rule: Arc<QuadRule>) -> Result<QDotNorm> {
    let e = q_dot_reduced(mu, nu)?;
    let q = q_dot(mu, nu, rule)?;
    let mut sq = q.clone();
    sq.values.iter_mut().for_each(|v| *v = C64::new(v.norm_sqr(), 0.0));
    let lhs = sq.integrate(Measure::Hyperbolic)?.re;
    // |Q̇|²ρ d²z = |E|² d²w
    let lhs_exact = e.disk_inner(&e).re;
    let x = product(mu, nu)?;
    let product_norm_sq = x.l2_norm_sq();
    let pairing = hermitian_pairing(&x, &x).re;
    Ok(QDotNorm { lhs, lhs_exact, product_norm_sq, pairing, rhs: product_norm_sq - pairing })
}

/// B(z,v) = ∬_𝔻 G(z,w)(1−|w|²)²/((1−wv̄)⁴(1−zw̄)⁴) d²w by the resolvent quadrature.
pub fn b_kernel(z: &DiskPoint, v: &DiskPoint, rule: &QuadRule) -> Result<C64> {
    if z.domain() != Domain::UnitDisk || v.domain() != Domain::UnitDisk {
        return Err(Error::DomainMismatch);
    }
    let (zc, vc) = (z.value(), v.value());
    // the density ρ = 4/(1−|w|²)² is divided out
    apply_resolvent(
        |w| {
            let t = 1.0 - w.norm_sqr();
            t.powi(4) / (4.0 * (1.0 - w * vc.conj()).powi(4) * (1.0 - zc * w.conj()).powi(4))
        },
        z,
        rule,
    )
}

/// 1/(9(1−zv̄)⁴)
pub fn b_kernel_closed(z: C64, v: C64) -> C64 {
    1.0 / (9.0 * (1.0 - z * v.conj()).powi(4))
}

/// B(0,v) = 1/9, the closed form at random pairs, and covariance under a rotation.
pub fn verify_b(rule: &QuadRule, rng: &mut impl Rng) -> Result<Vec<Report>> {
    let mut out = Vec::new();
    let origin = DiskPoint::disk(czero())?;
    for r in [0.2, 0.5, 0.8] {
        let v = DiskPoint::disk(C64::from_polar(r, 0.7))?;
        let b = b_kernel(&origin, &v, rule)?;
        out.push(Report::compare("bkernel", &format!("B(0,v) |v|={r}"), b.re, 1.0 / 9.0, 1e-6, Provenance::Paper));
    }
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = C64::from_polar(rng.random_range(0.0..0.6), rng.random_range(0.0..2.0 * PI));
        let v = C64::from_polar(rng.random_range(0.0..0.6), rng.random_range(0.0..2.0 * PI));
        let b = b_kernel(&DiskPoint::disk(z)?, &DiskPoint::disk(v)?, rule)?;
        let c = b_kernel_closed(z, v);
        worst = worst.max((b - c).norm() / c.norm());
    }
    out.push(Report::compare("bkernel", "closed form, 20 random pairs (max rel err)", worst, 0.0, 1e-5, Provenance::Derived).absolute());
    let rot = MoebiusMap::rotation(rng.random_range(0.0..2.0 * PI));
    let (z, v) = (C64::new(0.3, 0.1), C64::new(-0.2, 0.4));
    let lhs = b_kernel_closed(z, v);
    let (dz, dv) = (rot.derivative(z), rot.derivative(v));
    let rhs = b_kernel_closed(rot.apply_c(z), rot.apply_c(v)) * dz * dz * (dv * dv).conj();
    out.push(Report::compare("bkernel", "rotation covariance", (lhs - rhs).norm(), 0.0, 1e-14, Provenance::Trivial).absolute());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::basis_mu;

    #[test]
    fn inner_product_of_basis() {
        let m2 = basis_mu_in(2, 3).unwrap();
        let m3 = basis_mu(3).unwrap();
        assert!((wp_inner(&m2, &m2).unwrap().re - 1.0).abs() < 1e-15);
        assert!(wp_inner(&m2, &m3).unwrap().norm() < 1e-15);
        let q = wp_inner_quadrature(&m3, &m3, &QuadRule::default_rule()).unwrap();
        assert!((q.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sectional_denominator_for_orthonormal_pair() {
        let (m2, m3) = (basis_mu_in(2, 3).unwrap(), basis_mu(3).unwrap());
        let (num, den) = sectional_parts(&m2, &m3).unwrap();
        assert!((den - 4.0).abs() < 1e-14);
        assert!(num < 0.0);
        assert!(matches!(sectional(&m2, &m2.scaled(C64::new(2.0, 0.0))), Err(Error::DegenerateSection(_))));
    }

    #[test]
    fn off_diagonal_ricci_terms_vanish() {
        for n in 2..8 {
            assert_eq!(ricci_term(2, 3, n).unwrap(), czero());
        }
    }

    #[test]
    fn q_dot_vanishes_for_zero_field() {
        let z = BeltramiField::exterior(vec![czero(); 2]);
        let g = q_dot(&basis_mu(2).unwrap(), &z, Arc::new(QuadRule::new(8, 16).unwrap())).unwrap();
        assert!(g.values.iter().all(|v| *v == czero()));
    }
}
