use proptest::prelude::*;

use utkit::curvature::{hermitian_pairing, holomorphic_sectional, riemann, sectional_parts, wp_inner, ProductField};
use utkit::forms::{kappa_form, permutations, pullback_by, vk_norm};
use utkit::geometry::{point_pair_invariant, resolvent_kernel, sigma_center, DiskPoint};
use utkit::harness::{exit_code, Provenance, Report};
use utkit::quadrature::QuadRule;
use utkit::series::{BeltramiField, FourierVectorField, HoloCoeffs};
use utkit::C64;

fn coeffs(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b)), n)
}

fn field() -> impl Strategy<Value = BeltramiField> {
    coeffs(4).prop_filter("nonzero", |a| a.iter().any(|c| c.norm() > 1e-3)).prop_map(BeltramiField::exterior)
}

fn disk_point(rmax: f64) -> impl Strategy<Value = C64> {
    (0.0..rmax, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wp_inner_is_hermitian_and_positive(mu in field(), nu in field()) {
        let a = wp_inner(&mu, &nu).unwrap();
        let b = wp_inner(&nu, &mu).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-14 * (1.0 + a.norm()));
        prop_assert!(wp_inner(&mu, &mu).unwrap().re > 0.0);
    }

    #[test]
    fn resolvent_is_positive_and_contractive(mu in field(), nu in field(), k in field()) {
        let x = ProductField::product(&mu, &nu).unwrap();
        let y = ProductField::product(&k, &nu).unwrap();
        let hx = hermitian_pairing(&x, &x);
        prop_assert!(hx.re >= 0.0 && hx.im.abs() <= 1e-14 * hx.re.max(1e-300));
        // 0 ≤ (h, Gh) ≤ ‖h‖² and |(x, Gy)| ≤ ‖x‖ ‖y‖
        prop_assert!(hx.re <= x.l2_norm_sq() * (1.0 + 1e-12));
        let xy = hermitian_pairing(&x, &y);
        prop_assert!(xy.norm() <= (x.l2_norm_sq() * y.l2_norm_sq()).sqrt() * (1.0 + 1e-12));
        prop_assert!(xy.norm() <= (hx.re * hermitian_pairing(&y, &y).re).sqrt() * (1.0 + 1e-10) + 1e-300);
    }

    #[test]
    fn riemann_symmetries(f in prop::collection::vec(field(), 4)) {
        let r = riemann(&f[0], &f[1], &f[2], &f[3]).unwrap().value;
        let tol = 1e-13 * (1.0 + r.norm());
        prop_assert!((r - riemann(&f[2], &f[1], &f[0], &f[3]).unwrap().value).norm() <= tol);
        prop_assert!((r - riemann(&f[0], &f[3], &f[2], &f[1]).unwrap().value).norm() <= tol);
        prop_assert!((r - riemann(&f[1], &f[0], &f[3], &f[2]).unwrap().value.conj()).norm() <= tol);
    }

    #[test]
    fn curvatures_are_negative(mu in field(), nu in field()) {
        prop_assert!(holomorphic_sectional(&mu).unwrap() < 0.0);
        if let Ok((num, den)) = sectional_parts(&mu, &nu) {
            prop_assert!(den > 0.0 && num < 0.0);
        }
    }

    #[test]
    fn vk_norm_scales_quadratically(c in coeffs(6), s in 0.1..3.0f64) {
        let v = FourierVectorField::from_positive(&c, true);
        let w = FourierVectorField::from_positive(&c.iter().map(|x| x * s).collect::<Vec<_>>(), true);
        prop_assert!(vk_norm(&v) >= 0.0);
        prop_assert!((vk_norm(&w) - s * s * vk_norm(&v)).abs() <= 1e-12 * (1.0 + vk_norm(&w)));
    }

    #[test]
    fn pullback_round_trip(a in coeffs(3), z in disk_point(0.4)) {
        let phi = HoloCoeffs::from_basis(&a);
        let m = sigma_center(&DiskPoint::disk(z).unwrap()).unwrap();
        let once = pullback_by(&phi, &m, 0.5).unwrap();
        let back = pullback_by(&HoloCoeffs::from_basis(&once), &m.inverse(), 0.5).unwrap();
        for (k, c) in a.iter().enumerate() {
            prop_assert!((back[k] - c).norm() < 1e-8, "{} vs {}", back[k], c);
        }
    }

    #[test]
    fn point_pair_invariant_is_moebius_invariant(z in disk_point(0.9), w in disk_point(0.9), c in disk_point(0.8)) {
        let m = sigma_center(&DiskPoint::disk(c).unwrap()).unwrap();
        let (zp, wp) = (DiskPoint::disk(z).unwrap(), DiskPoint::disk(w).unwrap());
        let u = point_pair_invariant(&zp, &wp).unwrap();
        let v = point_pair_invariant(&m.apply(&zp).unwrap(), &m.apply(&wp).unwrap()).unwrap();
        prop_assert!((u - v).abs() <= 1e-9 * (1.0 + u));
        if (z - w).norm() > 1e-6 {
            let g = resolvent_kernel(&zp, &wp).unwrap();
            prop_assert!(g > 0.0 && (g - resolvent_kernel(&wp, &zp).unwrap()).abs() <= 1e-14 * g);
        }
    }

    #[test]
    fn permutation_signs_multiply(n in 1usize..5) {
        let p = permutations(n);
        prop_assert_eq!(p.len(), (1..=n).product::<usize>());
        prop_assert_eq!(p.iter().filter(|(_, s)| *s > 0.0).count() * 2, if n == 1 { 2 } else { p.len() });
    }

    #[test]
    fn report_judgement(computed in -1.0..1.0f64, tol in 1e-6..1.0f64) {
        let r = Report::compare("s", "c", computed, 0.0, tol, Provenance::Trivial).absolute();
        prop_assert_eq!(r.passed(), computed.abs() <= tol);
        prop_assert_eq!(exit_code(std::slice::from_ref(&r)), if r.passed() { 0 } else { 1 });
        prop_assert_eq!(r.compute_digest(), r.clone().compute_digest());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn kappa_two_is_antisymmetric(f in prop::collection::vec(field(), 4)) {
        let rule = QuadRule::new(24, 48).unwrap();
        let a = kappa_form(2, &f[..2], &f[2..], &rule).unwrap().value;
        let b = kappa_form(2, &[f[1].clone(), f[0].clone()], &f[2..], &rule).unwrap().value;
        let c = kappa_form(2, &f[..2], &[f[3].clone(), f[2].clone()], &rule).unwrap().value;
        prop_assert!((a + b).norm() <= 1e-8 * (1.0 + a.norm()));
        prop_assert!((a + c).norm() <= 1e-8 * (1.0 + a.norm()));
    }
}
