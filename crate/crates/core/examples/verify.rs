//! Run a few verification suites and print the report lines.

use utkit::harness::{exit_code, run_suite, SuiteConfig};

fn main() -> utkit::Result<()> {
    let cfg = SuiteConfig { suites: vec!["rk4".into(), "moments".into(), "bkernel".into()], ..Default::default() };
    let reports = run_suite(&cfg)?;
    for r in &reports {
        println!("{}", r.line());
    }
    println!("exit code {}", exit_code(&reports));
    Ok(())
}
