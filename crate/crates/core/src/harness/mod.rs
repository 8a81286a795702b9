//! Suite runner, configuration and reporting.

mod config;
mod report;
mod suites;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub use config::{SuiteConfig, SUITES};
pub use report::{emit_report, exit_code, Criterion, Format, Provenance, Report, Status};

use crate::error::{Error, Result};
use crate::quadrature::QuadRule;
use crate::series::{basis_mu, BeltramiField};
use crate::C64;

/// `re` or `re:im`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let bad = || Error::Config(format!("cannot parse complex number {s:?}"));
    let (re, im) = match s.split_once(':') {
        Some((a, b)) => (a, b),
        None => (s, "0"),
    };
    Ok(C64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?))
}

/// A harmonic exterior field: `mu3`, `0.5*mu2`, or coefficients `a2,a3,...`
/// each written as `re` or `re:im`.
pub fn parse_field(s: &str) -> Result<BeltramiField> {
    let s = s.trim();
    let (scale, rest) = match s.split_once('*') {
        Some((a, b)) => (parse_complex(a)?, b.trim()),
        None => (C64::new(1.0, 0.0), s),
    };
    if let Some(n) = rest.strip_prefix("mu") {
        let n: usize = n.parse().map_err(|_| Error::Config(format!("bad basis index in {s:?}")))?;
        return Ok(basis_mu(n).map_err(|_| Error::Config(format!("basis index {n} must be at least 2")))?.scaled(scale));
    }
    let a = rest.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
    Ok(BeltramiField::exterior(a).scaled(scale))
}

/// Seed of the per-suite generator: the configured seed mixed with the suite name,
/// so that suites do not shift each other's random streams.
pub fn suite_seed(seed: u64, suite: &str) -> u64 {
    let h = Sha256::digest(suite.as_bytes());
    let mut b = [0u8; 8];
    b.copy_from_slice(&h[..8]);
    seed ^ u64::from_le_bytes(b)
}

/// Runs the configured suites in the listed order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<Report>> {
    cfg.validate()?;
    let rule = std::sync::Arc::new(QuadRule::new(cfg.radial_nodes, cfg.angular_count)?);
    let ctx = suites::Ctx { cfg, rule };
    let mut out = Vec::new();
    for name in &cfg.suites {
        let f = suites::lookup(name).ok_or_else(|| Error::UnknownSuite(name.clone()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(suite_seed(cfg.seed, name));
        let start = Instant::now();
        let mut reports = f(&ctx, &mut rng).unwrap_or_else(|e| vec![Report::error(name, "suite", &e)]);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let params = suites::params(name, cfg);
        for r in &mut reports {
            if let Some(t) = cfg.tolerances.get(name) {
                if matches!(r.criterion, Criterion::Relative | Criterion::Absolute) {
                    *r = r.clone().with_tolerance(*t);
                }
            }
            r.seed = cfg.seed;
            r.params = params.clone();
            r.runtime_ms = ms;
            r.digest = r.compute_digest();
        }
        out.extend(reports);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn only(s: &[&str]) -> SuiteConfig {
        SuiteConfig { suites: s.iter().map(|x| x.to_string()).collect(), ..Default::default() }
    }

    #[test]
    fn field_syntax() {
        assert_eq!(parse_complex("1.5:-2").unwrap(), C64::new(1.5, -2.0));
        let f = parse_field("0.5*mu3").unwrap();
        assert_eq!(f.harmonic_coeffs().unwrap(), basis_mu(3).unwrap().scaled(C64::new(0.5, 0.0)).harmonic_coeffs().unwrap());
        assert_eq!(parse_field("0.1,0:1").unwrap().harmonic_coeffs().unwrap(), &[C64::new(0.1, 0.0), C64::new(0.0, 1.0)]);
        assert!(parse_field("mu1").is_err() && parse_field("x").is_err());
    }

    #[test]
    fn empty_and_unknown() {
        assert!(run_suite(&only(&[])).unwrap().is_empty());
        assert!(matches!(run_suite(&only(&["nosuchsuite"])), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn rk4_passes_and_is_deterministic() {
        let a = run_suite(&only(&["rk4", "moments"])).unwrap();
        assert_eq!(a.len(), 8);
        assert!(a[0].passed() && a[0].abs_err < 1e-6);
        let b = run_suite(&only(&["rk4", "moments"])).unwrap();
        let digests = |r: &[Report]| r.iter().map(|x| x.digest.clone()).collect::<Vec<_>>();
        assert_eq!(digests(&a), digests(&b));
    }

    #[test]
    fn tolerance_override() {
        let mut cfg = only(&["moments"]);
        cfg.tolerances.insert("moments".into(), 1e-30);
        let r = run_suite(&cfg).unwrap();
        assert!(r.iter().all(|x| x.tolerance == 1e-30));
    }
}
