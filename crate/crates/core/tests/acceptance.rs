//! Acceptance criteria. Each test prints the individual checks and one
//! summary line `criterion N [PASS|FAIL] ...`.

use std::io::Write;
use std::time::{Duration, Instant};

use utkit::harness::{run_suite, Report, SuiteConfig};

fn run(suites: &[&str]) -> (Vec<Report>, Duration) {
    let cfg = SuiteConfig { suites: suites.iter().map(|s| s.to_string()).collect(), ..Default::default() };
    let t = Instant::now();
    let r = run_suite(&cfg).expect("suite names are valid");
    (r, t.elapsed())
}

fn criterion(n: usize, title: &str, suites: &[&str], budget: Option<Duration>) {
    let (reports, elapsed) = run(suites);
    for r in &reports {
        println!("    {}", r.line());
    }
    let in_time = budget.map_or(true, |b| elapsed <= b);
    let ok = !reports.is_empty() && reports.iter().all(Report::passed) && in_time;
    let budget_note = budget.map(|b| format!(", budget {:.0} s", b.as_secs_f64())).unwrap_or_default();
    // written to the raw handle so the line survives output capture
    let _ = writeln!(
        std::io::stderr(),
        "criterion {n} [{}] {title} ({} checks, {:.2} s{budget_note})",
        if ok { "PASS" } else { "FAIL" },
        reports.len(),
        elapsed.as_secs_f64()
    );
    assert!(ok, "criterion {n} failed");
}

#[test]
fn c01_rk4_normalization() {
    criterion(1, "RK4 normalization at 40 lattice points", &["rk4"], Some(Duration::from_secs(10)));
}

#[test]
fn c02_moment_identity() {
    criterion(2, "radial moment identity n = 2..8", &["moments"], Some(Duration::from_secs(1)));
}

#[test]
fn c03_b_kernel() {
    criterion(3, "B kernel at the origin and closed form", &["bkernel"], None);
}

#[test]
fn c04_ricci_constant() {
    criterion(4, "Ricci constant -13/(12 pi) and off-diagonal zero", &["ricci"], Some(Duration::from_secs(600)));
}

#[test]
fn c05_kappa1() {
    criterion(5, "kappa_1 proportional to the WP form", &["kappa1"], None);
}

#[test]
fn c06_orthonormal_bers_isometry() {
    criterion(6, "orthonormal basis and Bers isometry", &["orthonormal"], None);
}

#[test]
fn c07_beltrami_exactness() {
    criterion(7, "Beltrami solver on the radial exact solution", &["beltrami-exact"], None);
}

#[test]
fn c08_ahlfors_weill() {
    criterion(8, "Ahlfors-Weill round trip", &["ahlfors-weill"], None);
}

#[test]
fn c09_kraus_nehari() {
    criterion(9, "Kraus-Nehari bound", &["kraus-nehari"], None);
}

#[test]
fn c10_variational_identities() {
    criterion(10, "variational identities of the density and the metric", &["variations"], None);
}

#[test]
fn c11_qdot_norm() {
    criterion(11, "norm identity for the first variation of Q", &["qdot-norm"], None);
}

#[test]
fn c12_negativity() {
    criterion(12, "negative sectional and holomorphic sectional curvature", &["sectional-negativity"], None);
}

#[test]
fn c13_vk_fiber() {
    criterion(13, "VK metric on the fiber", &["vk-fiber"], None);
}

#[test]
fn c14_welding_area() {
    criterion(14, "welding area identity and stationary potential", &["welding-area"], None);
}

#[test]
fn c15_vanishing_integrals() {
    criterion(15, "vanishing integrals", &["vanishing-integrals"], None);
}
