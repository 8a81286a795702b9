use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::DEFAULT_TRUNCATION;

/// Suites in their canonical order.
pub const SUITES: [&str; 17] = [
    "rk4",
    "moments",
    "bkernel",
    "ricci",
    "riemann-symmetry",
    "sectional-negativity",
    "variations",
    "beltrami-exact",
    "ahlfors-weill",
    "welding-area",
    "vk-fiber",
    "kappa1",
    "potential",
    "vanishing-integrals",
    "orthonormal",
    "kraus-nehari",
    "qdot-norm",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub suites: Vec<String>,
    pub truncation: usize,
    pub radial_nodes: usize,
    pub angular_count: usize,
    pub fd_step: f64,
    /// replaces the tolerance of every thresholded check in the named suite
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            truncation: DEFAULT_TRUNCATION,
            radial_nodes: 64,
            angular_count: 128,
            fd_step: 1e-2,
            tolerances: BTreeMap::new(),
            seed: 0,
            output_path: None,
        }
    }
}

impl SuiteConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: SuiteConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        for s in self.suites.iter().chain(self.tolerances.keys()) {
            if !SUITES.contains(&s.as_str()) {
                return Err(Error::UnknownSuite(s.clone()));
            }
        }
        if self.truncation < 2 || self.radial_nodes == 0 || self.angular_count == 0 {
            return Err(Error::Config("truncation, radialNodes and angularCount must be positive".into()));
        }
        if !(self.fd_step > 0.0 && self.fd_step <= 0.05) {
            return Err(Error::Config(format!("fdStep {} outside (0, 0.05]", self.fd_step)));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::Config(format!("tolerance for {k} must be positive, got {v}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reject() {
        let c = SuiteConfig::from_json(r#"{"suites": ["rk4"], "seed": 7}"#).unwrap();
        assert_eq!(c.suites, vec!["rk4"]);
        assert_eq!(c.truncation, DEFAULT_TRUNCATION);
        assert!(matches!(SuiteConfig::from_json(r#"{"suites": ["nosuchsuite"]}"#), Err(Error::UnknownSuite(_))));
        assert!(matches!(SuiteConfig::from_json(r#"{"radialNodes": 0}"#), Err(Error::Config(_))));
        assert!(matches!(SuiteConfig::from_json(r#"{"bogus": 1}"#), Err(Error::Config(_))));
    }
}
