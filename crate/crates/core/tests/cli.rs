use std::process::Command;

fn utkit(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_utkit")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn verify_exit_codes() {
    let (code, out) = utkit(&["verify", "--suite", "rk4"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"status\": \"pass\""));
    assert_eq!(utkit(&["verify", "--suite", "nosuchsuite"]).0, 2);
    assert_eq!(utkit(&["verify", "--nosuchflag"]).0, 2);
    assert_eq!(utkit(&["verify", "--config", "/nonexistent/config.json"]).0, 2);
}

#[test]
fn config_file_and_override() {
    let dir = std::env::temp_dir().join(format!("utkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    // a tolerance below the attainable error turns the moment checks into failures
    std::fs::write(&cfg, r#"{"suites": ["moments"], "tolerances": {"moments": 1e-300}}"#).unwrap();
    let out = dir.join("r.csv");
    let (code, _) = utkit(&["verify", "--config", cfg.to_str().unwrap(), "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("schema,suite,check,status"));
    let (code, _) = utkit(&["verify", "--config", cfg.to_str().unwrap(), "--suite", "rk4", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
}

#[test]
fn direct_subcommands() {
    let (code, out) = utkit(&["kernel-grid", "--kernel", "density", "--radial", "4", "--angular", "8"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("re,im,value_re,value_im"));
    assert_eq!(out.lines().count(), 33);
    let (code, out) = utkit(&["kappa", "--n", "1", "--args", "mu2", "mu2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let im = v["value"][1].as_f64().unwrap();
    assert!((im - 1.0 / (2.0 * std::f64::consts::PI.powi(2))).abs() < 1e-10);
    assert_eq!(utkit(&["kappa", "--n", "5", "--args", "mu2", "mu2", "mu2", "mu2", "mu2", "mu2", "mu2", "mu2", "mu2", "mu2"]).0, 1);
    let (code, out) = utkit(&["sectional", "mu2"]);
    assert_eq!(code, 0);
    assert!(out.contains("holomorphicSectional"));
    assert_eq!(utkit(&["solve-beltrami", "0.1*mu2", "--coeffs", "4"]).0, 0);
    assert_eq!(utkit(&["riemann", "mu2", "mu3", "mu3", "mu2"]).0, 0);
    assert_eq!(utkit(&["ricci", "--k", "2", "--n-max", "10"]).0, 0);
}
