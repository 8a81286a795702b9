//! The verification suites. Each returns its reports or an error that the
//! runner turns into a single error record.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{Provenance, Report};
use crate::curvature::{
    density_first_variation, density_second_variation, holomorphic_sectional, metric_first_variation, metric_second_variation,
    metric_second_variation_fd, q_dot_norm_identity, ricci_diagonal, ricci_partial_sums, riemann, riemann_quadrature, sectional,
    verify_b, verify_vanishing_integrals, wp_inner, wp_inner_quadrature,
};
use crate::error::Result;
use crate::forms::{kappa_form, kappa_form_nested, moment_identity, potential_check, theta_components, vk_fiber_components_with, FiberPoint};
use crate::geometry::{DiskPoint, Domain};
use crate::qc_solver::polar::PolarSeries;
use crate::qc_solver::{bers_embedding, bers_sup_norm, solve_beltrami, welding_decompose, Normalization, DECAY_SLACK};
use crate::quadrature::{apply_resolvent, QuadRule};
use crate::series::{basis_mu, basis_mu_in, d0_beta, d0_beta_with, lambda_map, random_harmonic, BeltramiField};
use crate::C64;

use super::SuiteConfig;

pub(crate) struct Ctx<'a> {
    pub cfg: &'a SuiteConfig,
    pub rule: Arc<QuadRule>,
}

pub(crate) type SuiteFn = fn(&Ctx, &mut ChaCha8Rng) -> Result<Vec<Report>>;

pub(crate) fn lookup(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "rk4" => rk4,
        "moments" => moments,
        "bkernel" => bkernel,
        "ricci" => ricci,
        "riemann-symmetry" => riemann_symmetry,
        "sectional-negativity" => sectional_negativity,
        "variations" => variations,
        "beltrami-exact" => beltrami_exact,
        "ahlfors-weill" => ahlfors_weill,
        "welding-area" => welding_area,
        "vk-fiber" => vk_fiber,
        "kappa1" => kappa1,
        "potential" => potential,
        "vanishing-integrals" => vanishing,
        "orthonormal" => orthonormal,
        "kraus-nehari" => kraus_nehari,
        "qdot-norm" => qdot_norm,
        _ => return None,
    })
}

/// Suite-specific parameters echoed into every report.
pub(crate) fn params(name: &str, cfg: &SuiteConfig) -> serde_json::Value {
    let rule = json!({"radialNodes": cfg.radial_nodes, "angularCount": cfg.angular_count});
    match name {
        "moments" => json!({"n": [2, 8]}),
        "ricci" => json!({"k": [2, 3], "nMax": 40}),
        "variations" | "potential" => json!({"rule": rule, "fdStep": cfg.fd_step}),
        "welding-area" => json!({"truncation": 2 * cfg.truncation, "fdStep": cfg.fd_step}),
        "riemann-symmetry" | "sectional-negativity" | "kappa1" | "ahlfors-weill" | "kraus-nehari" => {
            json!({"rule": rule, "truncation": cfg.truncation})
        }
        _ => json!({"rule": rule}),
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn rk4(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let mut worst = 0.0f64;
    for r in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for j in 0..8 {
            let z = DiskPoint::disk(C64::from_polar(r, 0.1 + j as f64 * PI / 4.0))?;
            let v = apply_resolvent(|_| c(1.0, 0.0), &z, &ctx.rule)?;
            worst = worst.max((v - 1.0).norm());
        }
    }
    Ok(vec![Report::compare("rk4", "max |G(rho) - 1| over 40 lattice points", worst, 0.0, 1e-6, Provenance::Paper).absolute()])
}

fn moments(_: &Ctx, _: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    (2..=8)
        .map(|n| {
            let (a, b) = moment_identity(n)?;
            Ok(Report::compare("moments", &format!("radial moment n={n}"), a, b, 1e-10, Provenance::Paper))
        })
        .collect()
}

fn bkernel(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    verify_b(&ctx.rule, rng)
}

fn ricci(_: &Ctx, _: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let want = -13.0 / (12.0 * PI);
    let mut out = Vec::new();
    for k in [2, 3] {
        let r = ricci_diagonal(k, 40)?;
        out.push(
            Report::compare("ricci", &format!("extrapolated Ricci k={k}"), r.extrapolated, want, 0.02, Provenance::Paper).with_message(format!(
                "partial sum {:.6}, 1/N fit {:.6}, 1/N^2 fit {:.6}",
                r.partial_sums.last().copied().unwrap_or(0.0),
                r.fit_linear.limit,
                r.fit_quadratic.limit
            )),
        );
    }
    let off = ricci_partial_sums(2, 3, 40)?;
    let last = off.last().copied().unwrap_or_default();
    out.push(Report::compare("ricci", "off-diagonal Ricci (2,3)", last.norm(), 0.0, 2e-3, Provenance::Paper).absolute());
    Ok(out)
}

fn random_fields(rng: &mut ChaCha8Rng, count: usize, nmax: usize) -> Vec<BeltramiField> {
    (0..count).map(|_| random_harmonic(rng, nmax, None)).collect()
}

fn riemann_symmetry(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let f = random_fields(rng, 4, 5);
    let (k, l, m, n) = (&f[0], &f[1], &f[2], &f[3]);
    let r = riemann(k, l, m, n)?.value;
    let scale = r.norm().max(1e-300);
    let swap_holo = riemann(m, l, k, n)?.value;
    let swap_anti = riemann(k, n, m, l)?.value;
    let conj = riemann(l, k, n, m)?.value.conj();
    let mut out = vec![
        Report::compare("riemann-symmetry", "R(k,l,m,n) = R(m,l,k,n)", (r - swap_holo).norm() / scale, 0.0, 1e-12, Provenance::Trivial)
            .absolute(),
        Report::compare("riemann-symmetry", "R(k,l,m,n) = R(k,n,m,l)", (r - swap_anti).norm() / scale, 0.0, 1e-12, Provenance::Trivial)
            .absolute(),
        Report::compare("riemann-symmetry", "R(k,l,m,n) = conj R(l,k,n,m)", (r - conj).norm() / scale, 0.0, 1e-12, Provenance::Trivial)
            .absolute(),
    ];
    let (m2, m3) = (basis_mu_in(2, 2)?, basis_mu(3)?);
    let exact = riemann(&m2, &m3, &m3, &m2)?.value;
    let quad = riemann_quadrature(&m2, &m3, &m3, &m2, &QuadRule::new(ctx.cfg.radial_nodes / 2, ctx.cfg.angular_count / 2)?)?;
    out.push(Report::compare("riemann-symmetry", "R(2,3,3,2) exact vs double quadrature", quad.re, exact.re, 1e-5, Provenance::Derived));
    Ok(out)
}

fn sectional_negativity(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let mut worst_h = f64::NEG_INFINITY;
    let mut worst_s = f64::NEG_INFINITY;
    for _ in 0..100 {
        let mu = random_harmonic(rng, 6, None);
        let nu = random_harmonic(rng, 6, None);
        worst_h = worst_h.max(holomorphic_sectional(&mu)?);
        worst_s = worst_s.max(sectional(&mu, &nu)?);
    }
    Ok(vec![
        Report::bound("sectional-negativity", "max holomorphic sectional over 100 sections", worst_h, 0.0, false, Provenance::Paper),
        Report::bound("sectional-negativity", "max sectional over 100 sections", worst_s, 0.0, false, Provenance::Paper),
    ])
}

fn variations(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let h = ctx.cfg.fd_step;
    let mu = basis_mu(2)?.add(&basis_mu(3)?.scaled(c(0.0, 0.5)))?;
    let zs: Vec<C64> = (0..20).map(|j| C64::from_polar(1.2 + 0.15 * (j % 5) as f64, 0.3 + j as f64 * PI / 10.0)).collect();
    let mut out = Vec::new();

    let (d1, d2) = density_first_variation(&mu, &zs[..5], h)?;
    let ratio = d1.iter().zip(&d2).map(|(a, b)| a.abs() / b.abs().max(1e-300)).fold(f64::INFINITY, f64::min);
    out.push(Report::bound("variations", "density first variation: min FD halving ratio", ratio, 3.5, true, Provenance::Derived));

    let (fd, want) = density_second_variation(&mu, &zs, h)?;
    let worst = fd.extrapolated.iter().zip(&want).map(|(a, b)| (a.re - b).abs() / b.abs()).fold(0.0, f64::max);
    out.push(Report::compare("variations", "density second variation: max rel err at 20 points", worst, 0.0, 0.01, Provenance::Paper).absolute());

    let (m2, m3, m5) = (basis_mu(2)?, basis_mu(3)?, basis_mu(5)?);
    let first = metric_first_variation(&m5, &m2, &m3, h, &ctx.rule)?.norm().max(metric_first_variation(&m2, &m2, &m3, h, &ctx.rule)?.norm());
    out.push(Report::compare("variations", "metric first variation |FD|", first, 0.0, 5e-3, Provenance::Paper).absolute());

    let pairs = [(&m2, &m2), (&m3, &m3), (&m2, &m3)];
    let fd = metric_second_variation_fd(&pairs, &m3, h, &ctx.rule)?;
    let mut worst = 0.0f64;
    for (i, (a, b)) in pairs.iter().enumerate() {
        let want = metric_second_variation(a, b, &m3)?;
        // entries that vanish by symmetry are judged on absolute size
        let e = if want.norm() < 1e-12 { fd.extrapolated[i].norm() } else { rel(fd.extrapolated[i], want) };
        worst = worst.max(e);
    }
    out.push(Report::compare("variations", "metric second variation: max rel err", worst, 0.0, 0.03, Provenance::Paper).absolute());
    Ok(out)
}

fn beltrami_exact(_: &Ctx, _: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let k = 0.2;
    let alpha = k / (1.0 - k);
    let q = solve_beltrami(&BeltramiField::radial(k), Normalization::ModelB, 1e-12)?;
    let mut worst = 0.0f64;
    for i in 1..=20 {
        let r = 1.0 + 2.0 * i as f64 / 20.0;
        for j in 0..16 {
            let z = C64::from_polar(r, j as f64 * PI / 8.0 + 0.05);
            worst = worst.max((q.model_b(z) - z * r.powf(2.0 * alpha)).norm());
        }
    }
    Ok(vec![
        Report::compare("beltrami-exact", "radial field k=0.2: sup error on 1<|z|<=3", worst, 0.0, 1e-4, Provenance::Derived).absolute(),
        Report::compare("beltrami-exact", "Beltrami residual", q.residual_norm, 0.0, 1e-8, Provenance::Derived).absolute(),
        Report::bound("beltrami-exact", "Neumann decay constant", q.chart.decay_constant, DECAY_SLACK, false, Provenance::Paper)
            .with_message(format!("{} terms", q.series_terms)),
    ])
}

fn ahlfors_weill(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        // ‖D₀β(μ)‖∞ = 2‖μ‖∞
        let phi = d0_beta(&random_harmonic(rng, 6, Some(0.25)), ctx.cfg.truncation)?;
        let beta = bers_embedding(&lambda_map(&phi)?, ctx.cfg.truncation, 1e-13)?;
        worst = worst.max(beta.sub(&phi).sup_norm());
    }
    Ok(vec![Report::compare("ahlfors-weill", "max |beta(Lambda phi) - phi| over 5 fields", worst, 0.0, 1e-3, Provenance::Paper).absolute()])
}

fn kraus_nehari(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let mut worst = 0.0f64;
    for i in 0..20 {
        // harmonic fields sit exactly at 2‖μ‖∞, so half the sample is non-harmonic
        let mu = if i % 2 == 0 { random_harmonic(rng, 6, Some(0.5)) } else { random_chart_field(rng, 3, 0.5) };
        worst = worst.max(bers_sup_norm(&solve_beltrami(&mu, Normalization::ModelB, 1e-12)?));
    }
    Ok(vec![Report::bound("kraus-nehari", "max Bers sup norm over 20 fields", worst, 6.0, false, Provenance::Paper)])
}

/// ν(ζ) = Σ_{p+q≤degree} c_pq ζ^p ζ̄^q in the inverted chart, scaled to sup norm `sup`.
fn random_chart_field(rng: &mut ChaCha8Rng, degree: u32, sup: f64) -> BeltramiField {
    let mut nu = PolarSeries::zero();
    for p in 0..=degree {
        for q in 0..=degree - p {
            nu.add_assign(&PolarSeries::monomial(p, q, c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
        }
    }
    let f = BeltramiField::chart(nu);
    let k = sup / f.sup_norm();
    f.scaled(c(k, 0.0))
}

fn welding_area(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let mu = basis_mu(2)?.scaled(c(0.1, 0.0));
    let w = welding_decompose(&solve_beltrami(&mu, Normalization::ModelB, 1e-13)?, 2 * ctx.cfg.truncation)?;
    let h = ctx.cfg.fd_step;
    let p = potential_check(&basis_mu(2)?.scaled(c(0.1, 0.0)).add(&basis_mu(3)?.scaled(c(0.1, 0.0)))?, h)?;
    Ok(vec![
        Report::compare("welding-area", "area identity residual", w.area_residual.abs(), 0.0, 1e-3, Provenance::Paper).absolute(),
        Report::compare("welding-area", "dK/dt at 0", p.k_first[0].abs(), 0.0, h * h, Provenance::Paper).absolute(),
        Report::compare("welding-area", "d capacity/dt at 0", p.capacity_first[0].abs(), 0.0, h * h, Provenance::Paper).absolute(),
    ])
}

fn vk_fiber(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let mu = basis_mu(2)?;
    let mut out = Vec::new();
    for z in [c(1.5, 0.0), C64::from_polar(2.0, PI / 4.0)] {
        let p = FiberPoint::new(z)?;
        let v = vk_fiber_components_with(&mu, &p, &ctx.rule)?;
        let t = z.norm_sqr();
        out.push(Report::compare("vk-fiber", &format!("horizontal quadrature vs series at {z}"), v.horizontal, v.horizontal_series, 1e-6, Provenance::Derived));
        out.push(Report::compare("vk-fiber", &format!("vertical at {z}"), v.vertical, 1.0 / ((1.0 - t) * (1.0 - t)), 1e-13, Provenance::Paper));
        out.push(Report::compare("vk-fiber", &format!("mixed at {z}"), v.mixed, 0.0, 0.0, Provenance::Paper).absolute());
        let th = theta_components(&mu, &p)?;
        out.push(Report::compare("vk-fiber", &format!("Theta horizontal = -2 VK at {z}"), th.horizontal, -2.0 * v.horizontal, 1e-12, Provenance::Paper));
        out.push(Report::bound("vk-fiber", &format!("Theta horizontal negative at {z}"), th.horizontal, 0.0, false, Provenance::Paper));
    }
    Ok(out)
}

fn kappa1(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let rule = &ctx.rule;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (mu, nu) = (random_harmonic(rng, 6, None), random_harmonic(rng, 6, None));
        let k = kappa_form(1, &[mu.clone()], &[nu.clone()], rule)?.value;
        worst = worst.max(rel(k, C64::i() / (2.0 * PI * PI) * wp_inner(&mu, &nu)?));
    }
    let m2 = basis_mu(2)?;
    let m3 = basis_mu(3)?;
    let k1 = kappa_form(1, &[m2.clone()], &[m2.clone()], rule)?.value;
    let k2_same = kappa_form(2, &[m3.clone(), m3.clone()], &[m2.clone(), m2.clone()], rule)?.value;
    let k2 = kappa_form(2, &[m2.clone(), m3.clone()], &[m2.clone(), m3.clone()], rule)?.value;
    let k2_swapped = kappa_form(2, &[m3.clone(), m2.clone()], &[m2.clone(), m3.clone()], rule)?.value;
    let outer = QuadRule::new(24, 48)?;
    let nested = kappa_form_nested(2, &[m2.clone(), m3.clone()], &[m2.clone(), m3.clone()], &outer, rule)?.value;
    Ok(vec![
        Report::compare("kappa1", "kappa_1 = (i/2pi^2)<mu,nu>: max rel err over 10 pairs", worst, 0.0, 1e-6, Provenance::Paper).absolute(),
        Report::compare("kappa1", "Im kappa_1(mu2, mu2bar)", k1.im, 1.0 / (2.0 * PI * PI), 1e-8, Provenance::Paper)
            .with_message(format!("Re part {:e}", k1.re)),
        Report::compare("kappa1", "kappa_2 with repeated arguments", k2_same.norm(), 0.0, 1e-14, Provenance::Trivial).absolute(),
        Report::compare("kappa1", "kappa_2 antisymmetry in mu", (k2 + k2_swapped).norm(), 0.0, 1e-14, Provenance::Trivial).absolute(),
        Report::compare("kappa1", "kappa_2(mu2,mu3) vs nested oracle", k2.re, nested.re, 1e-4, Provenance::Derived),
    ])
}

fn potential(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let h = ctx.cfg.fd_step;
    let z = potential_check(&BeltramiField::zero(Domain::ExteriorDisk), h)?;
    let zero = z.k_second.abs() + z.series.abs();
    let p = potential_check(&basis_mu(2)?.scaled(c(0.5, 0.0)), h)?;
    let q = potential_check(&basis_mu(2)?.scaled(c(0.1, 0.0)).add(&basis_mu(3)?.scaled(c(0.1, 0.0)))?, h)?;
    Ok(vec![
        Report::compare("potential", "mu = 0: both sides", zero, 0.0, 1e-14, Provenance::Trivial).absolute(),
        Report::compare("potential", "K'' vs 2 sum n|a_n'|^2 for 0.5 mu2", p.k_second, p.series, 0.05, Provenance::Derived),
        Report::compare("potential", "K'(0) for 0.1 mu2 + 0.1 mu3", q.k_first[0].abs(), 0.0, h * h, Provenance::Paper).absolute(),
    ])
}

fn vanishing(_: &Ctx, _: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let pts = [c(0.0, 1.0), c(0.5, 0.3), c(-1.2, 2.0), c(2.0, 0.5), c(0.1, 4.0)];
    let mut out = Vec::new();
    for n in [2, 3] {
        let mu = basis_mu(n)?;
        for z in pts {
            out.extend(verify_vanishing_integrals(&mu, &DiskPoint::uhp(z)?)?);
        }
    }
    Ok(out)
}

fn orthonormal(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    let mut worst = 0.0f64;
    for m in 2..=8 {
        for n in 2..=8 {
            let g = wp_inner_quadrature(&basis_mu(m)?, &basis_mu(n)?, &ctx.rule)?;
            worst = worst.max((g - if m == n { 1.0 } else { 0.0 }).norm());
        }
    }
    let mut iso = 0.0f64;
    for _ in 0..5 {
        let mu = random_harmonic(rng, 6, None);
        let sampled = BeltramiField::sampled(mu.sample(ctx.rule.clone())?);
        let lhs = sampled.l2_norm_sq()?.sqrt();
        let rhs = 2.0 * d0_beta_with(&sampled, ctx.cfg.truncation, &ctx.rule)?.l2_norm();
        iso = iso.max((lhs - rhs).abs());
    }
    Ok(vec![
        Report::compare("orthonormal", "max |<mu_m,mu_n> - delta| for m,n <= 8", worst, 0.0, 1e-8, Provenance::Paper).absolute(),
        Report::compare("orthonormal", "max | |mu| - 2|D0 beta(mu)| | over 5 fields", iso, 0.0, 1e-8, Provenance::Paper).absolute(),
    ])
}

fn qdot_norm(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Vec<Report>> {
    [(2, 2), (2, 3), (3, 5), (4, 2), (6, 6)]
        .into_iter()
        .map(|(a, b)| {
            let q = q_dot_norm_identity(&basis_mu(a)?, &basis_mu(b)?, ctx.rule.clone())?;
            Ok(Report::compare("qdot-norm", &format!("|Qdot|^2 identity ({a},{b})"), q.lhs, q.rhs, 1e-3, Provenance::Paper))
        })
        .collect()
}
