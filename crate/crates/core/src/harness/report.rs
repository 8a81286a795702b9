use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    /// a value or identity taken from the source theory
    Paper,
    /// follows immediately from the definitions
    Trivial,
    /// checked against an independent computation
    Derived,
}

/// How `computed` is judged against `expected` and `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// relErr ≤ tolerance
    Relative,
    /// absErr ≤ tolerance
    Absolute,
    /// computed < expected
    Below,
    /// computed > expected
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub check: String,
    pub status: Status,
    pub criterion: Criterion,
    pub computed: f64,
    pub expected: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub provenance: Provenance,
    pub seed: u64,
    pub params: serde_json::Value,
    pub message: String,
    pub digest: String,
    pub runtime_ms: f64,
}

fn finite_or_max(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX
    }
}

impl Report {
    /// Relative comparison; switch with [`Report::absolute`].
    pub fn compare(suite: &str, check: &str, computed: f64, expected: f64, tolerance: f64, provenance: Provenance) -> Self {
        let mut r = Report {
            schema: 1,
            suite: suite.into(),
            check: check.into(),
            status: Status::Fail,
            criterion: Criterion::Relative,
            computed,
            expected,
            abs_err: 0.0,
            rel_err: 0.0,
            tolerance,
            provenance,
            seed: 0,
            params: serde_json::Value::Null,
            message: String::new(),
            digest: String::new(),
            runtime_ms: 0.0,
        };
        r.rejudge();
        r
    }

    /// A strict bound: pass iff computed < bound (or > bound for `above`).
    pub fn bound(suite: &str, check: &str, computed: f64, bound: f64, above: bool, provenance: Provenance) -> Self {
        let mut r = Self::compare(suite, check, computed, bound, 0.0, provenance);
        r.criterion = if above { Criterion::Above } else { Criterion::Below };
        r.rejudge();
        r
    }

    pub fn error(suite: &str, check: &str, err: &Error) -> Self {
        let mut r = Self::compare(suite, check, 0.0, 0.0, 0.0, Provenance::Derived);
        r.status = Status::Error;
        r.message = err.to_string();
        r
    }

    pub fn absolute(mut self) -> Self {
        self.criterion = Criterion::Absolute;
        self.rejudge();
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self.rejudge();
        self
    }

    pub fn with_message(mut self, m: impl Into<String>) -> Self {
        self.message = m.into();
        self
    }

    fn rejudge(&mut self) {
        if self.status == Status::Error {
            return;
        }
        let abs = (self.computed - self.expected).abs();
        self.abs_err = finite_or_max(abs);
        self.rel_err = finite_or_max(if self.expected != 0.0 { abs / self.expected.abs() } else { abs });
        let ok = match self.criterion {
            Criterion::Relative => self.rel_err <= self.tolerance,
            Criterion::Absolute => self.abs_err <= self.tolerance,
            Criterion::Below => self.computed < self.expected,
            Criterion::Above => self.computed > self.expected,
        };
        self.computed = finite_or_max(self.computed);
        self.status = if ok { Status::Pass } else { Status::Fail };
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// SHA-256 of the serialized report with runtimeMs and digest blanked.
    pub fn compute_digest(&self) -> String {
        let mut r = self.clone();
        r.runtime_ms = 0.0;
        r.digest = String::new();
        let s = serde_json::to_string(&r).expect("reports always serialize");
        let h = Sha256::digest(s.as_bytes());
        h.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// One human-readable line.
    pub fn line(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        let judged = match self.criterion {
            Criterion::Relative => format!("rel err {:.3e} (tol {:.1e})", self.rel_err, self.tolerance),
            Criterion::Absolute => format!("abs err {:.3e} (tol {:.1e})", self.abs_err, self.tolerance),
            Criterion::Below => format!("{:.6e} < {:e}", self.computed, self.expected),
            Criterion::Above => format!("{:.6e} > {:e}", self.computed, self.expected),
        };
        let mut s = format!("[{status}] {} :: {} :: computed {:.10e} expected {:.10e}, {judged}", self.suite, self.check, self.computed, self.expected);
        if !self.message.is_empty() {
            s.push_str(&format!(" ({})", self.message));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CsvRow<'a> {
    schema: u32,
    suite: &'a str,
    check: &'a str,
    status: Status,
    criterion: Criterion,
    computed: f64,
    expected: f64,
    abs_err: f64,
    rel_err: f64,
    tolerance: f64,
    provenance: Provenance,
    seed: u64,
    params: String,
    message: &'a str,
    digest: &'a str,
    runtime_ms: f64,
}

/// JSON array or CSV with a header row, fields in declaration order.
pub fn emit_report(reports: &[Report], format: Format) -> Result<String> {
    match format {
        Format::Json => serde_json::to_string_pretty(reports).map_err(|e| Error::IoFailure(e.to_string())),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in reports {
                w.serialize(CsvRow {
                    schema: r.schema,
                    suite: &r.suite,
                    check: &r.check,
                    status: r.status,
                    criterion: r.criterion,
                    computed: r.computed,
                    expected: r.expected,
                    abs_err: r.abs_err,
                    rel_err: r.rel_err,
                    tolerance: r.tolerance,
                    provenance: r.provenance,
                    seed: r.seed,
                    params: r.params.to_string(),
                    message: &r.message,
                    digest: &r.digest,
                    runtime_ms: r.runtime_ms,
                })
                .map_err(|e| Error::IoFailure(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::IoFailure(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::IoFailure(e.to_string()))
        }
    }
}

/// 0 when every report passed, 1 otherwise.
pub fn exit_code(reports: &[Report]) -> i32 {
    if reports.iter().all(Report::passed) {
        0
    } else {
        1
    }
}
