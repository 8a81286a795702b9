use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use utkit::curvature::{
    b_kernel_closed, density_first_variation, density_second_variation, holomorphic_sectional, metric_second_variation,
    metric_second_variation_fd, ricci_diagonal, ricci_partial_sums, riemann, riemann_quadrature, sectional,
};
use utkit::forms::kappa_form;
use utkit::geometry::{disk_density, resolvent_kernel, DiskPoint};
use utkit::harness::{emit_report, exit_code, parse_complex, parse_field, run_suite, Format, SuiteConfig};
use utkit::qc_solver::{solve_beltrami, welding_decompose, Normalization};
use utkit::quadrature::{GridFunction, QuadRule};
use utkit::{Error, Result, C64};

#[derive(Parser)]
#[command(name = "utkit", version, about = "Weil-Petersson geometry of the universal Teichmüller space at the origin")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    A,
    B,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kernel {
    /// G(z, w) over w
    Resolvent,
    /// B(z, v) over v, closed form
    Bkernel,
    /// ρ(w)
    Density,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariationKind {
    Density,
    Metric,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites and emit a report
    Verify {
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        truncation: Option<usize>,
        #[arg(long)]
        radial_nodes: Option<usize>,
        #[arg(long)]
        angular_count: Option<usize>,
        #[arg(long)]
        fd_step: Option<f64>,
    },
    /// Ricci partial sums and their extrapolation
    Ricci {
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// second index for an off-diagonal entry
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
    },
    /// R(κ, λ̄, μ, ν̄) for harmonic fields such as `mu2` or `0.1,0:0.2`
    Riemann {
        kappa: String,
        lambda: String,
        mu: String,
        nu: String,
        /// also evaluate by double quadrature
        #[arg(long)]
        quadrature: bool,
    },
    /// Sectional curvature of span{μ, ν}, or holomorphic sectional curvature without ν
    Sectional {
        mu: String,
        nu: Option<String>,
    },
    /// Solve the Beltrami equation and print coefficients and diagnostics
    SolveBeltrami {
        mu: String,
        #[arg(long, value_enum, default_value = "b")]
        model: Model,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// evaluation points `re:im`
        #[arg(long = "at")]
        at: Vec<String>,
        #[arg(long, default_value_t = 16)]
        coeffs: usize,
    },
    /// κ_n(μ_1..μ_n, ν̄_1..ν̄_n); arguments list the μ's then the ν's
    Kappa {
        #[arg(long)]
        n: usize,
        #[arg(long, num_args = 1..)]
        args: Vec<String>,
    },
    /// CSV samples of a kernel on a polar grid of the disk
    KernelGrid {
        #[arg(long, value_enum, default_value = "resolvent")]
        kernel: Kernel,
        #[arg(long, default_value = "0")]
        z: String,
        #[arg(long, default_value_t = 16)]
        radial: usize,
        #[arg(long, default_value_t = 32)]
        angular: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-difference variations against their closed forms
    Variations {
        #[arg(long, value_enum, default_value = "density")]
        kind: VariationKind,
        #[arg(long, default_value = "mu2")]
        mu: String,
        #[arg(long, default_value = "mu3")]
        kappa: String,
        #[arg(long, default_value_t = 1e-2)]
        h: f64,
        /// sample points `re:im` in the exterior disk
        #[arg(long = "at")]
        at: Vec<String>,
    },
}

fn cplx(z: C64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn print_json(v: &serde_json::Value) {
    // a closed pipe downstream is not an error worth a panic
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn verify(
    suites: Vec<String>,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    format: OutFormat,
    seed: Option<u64>,
    truncation: Option<usize>,
    radial_nodes: Option<usize>,
    angular_count: Option<usize>,
    fd_step: Option<f64>,
) -> Result<i32> {
    let mut cfg = match &config {
        Some(p) => SuiteConfig::from_file(p)?,
        None => SuiteConfig::default(),
    };
    if !suites.is_empty() {
        cfg.suites = suites;
    }
    cfg.seed = seed.unwrap_or(cfg.seed);
    cfg.truncation = truncation.unwrap_or(cfg.truncation);
    cfg.radial_nodes = radial_nodes.unwrap_or(cfg.radial_nodes);
    cfg.angular_count = angular_count.unwrap_or(cfg.angular_count);
    cfg.fd_step = fd_step.unwrap_or(cfg.fd_step);
    if out.is_some() {
        cfg.output_path = out;
    }
    cfg.validate()?;
    let reports = run_suite(&cfg)?;
    for r in &reports {
        eprintln!("{}", r.line());
    }
    let fmt = match format {
        OutFormat::Json => Format::Json,
        OutFormat::Csv => Format::Csv,
    };
    write_out(&cfg.output_path, &emit_report(&reports, fmt)?)?;
    Ok(exit_code(&reports))
}

fn points(at: &[String], default: &[C64]) -> Result<Vec<C64>> {
    if at.is_empty() {
        return Ok(default.to_vec());
    }
    at.iter().map(|s| parse_complex(s)).collect()
}

fn run(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Verify { suites, config, out, format, seed, truncation, radial_nodes, angular_count, fd_step } => {
            return verify(suites, config, out, format, seed, truncation, radial_nodes, angular_count, fd_step);
        }
        Cmd::Ricci { k, l, n_max } => match l {
            Some(l) if l != k => {
                let s = ricci_partial_sums(k, l, n_max)?;
                print_json(&json!({"k": k, "l": l, "nMax": n_max, "partialSums": s.iter().map(|z| cplx(*z)).collect::<Vec<_>>()}));
            }
            _ => print_json(&serde_json::to_value(ricci_diagonal(k, n_max)?).expect("record serializes")),
        },
        Cmd::Riemann { kappa, lambda, mu, nu, quadrature } => {
            let f = [parse_field(&kappa)?, parse_field(&lambda)?, parse_field(&mu)?, parse_field(&nu)?];
            let r = riemann(&f[0], &f[1], &f[2], &f[3])?;
            let mut v = json!({"value": cplx(r.value)});
            if quadrature {
                v["quadrature"] = cplx(riemann_quadrature(&f[0], &f[1], &f[2], &f[3], &QuadRule::new(32, 64)?)?);
            }
            print_json(&v);
        }
        Cmd::Sectional { mu, nu } => {
            let mu = parse_field(&mu)?;
            let v = match nu {
                Some(nu) => json!({"sectional": sectional(&mu, &parse_field(&nu)?)?}),
                None => json!({"holomorphicSectional": holomorphic_sectional(&mu)?}),
            };
            print_json(&v);
        }
        Cmd::SolveBeltrami { mu, model, tol, at, coeffs } => {
            let norm = match model {
                Model::A => Normalization::ModelA,
                Model::B => Normalization::ModelB,
            };
            let qc = solve_beltrami(&parse_field(&mu)?, norm, tol)?;
            let pts = points(&at, &[C64::new(0.5, 0.0), C64::new(2.0, 1.0)])?;
            let values = pts.iter().map(|z| Ok(json!({"z": cplx(*z), "w": cplx(qc.eval(*z)?)}))).collect::<Result<Vec<_>>>()?;
            let w = welding_decompose(&qc, coeffs)?;
            print_json(&json!({
                "seriesTerms": qc.series_terms,
                "termNorms": qc.chart.term_norms,
                "decayConstant": qc.chart.decay_constant,
                "residual": qc.residual_norm,
                "normalizationError": qc.normalization_error()?,
                "values": values,
                "interiorCoeffs": w.f_coeffs.iter().map(|z| cplx(*z)).collect::<Vec<_>>(),
                "capacity": w.capacity,
                "potentialK": w.potential_k,
                "areaResidual": w.area_residual,
            }));
        }
        Cmd::Kappa { n, args } => {
            if args.len() != 2 * n {
                return Err(Error::Config(format!("kappa --n {n} needs {} fields, got {}", 2 * n, args.len())));
            }
            let f = args.iter().map(|s| parse_field(s)).collect::<Result<Vec<_>>>()?;
            let v = kappa_form(n, &f[..n], &f[n..], &QuadRule::default_rule())?;
            print_json(&json!({"n": n, "value": cplx(v.value)}));
        }
        Cmd::KernelGrid { kernel, z, radial, angular, out } => {
            let z = parse_complex(&z)?;
            let rule = Arc::new(QuadRule::new(radial, angular)?);
            let zp = DiskPoint::disk(z)?;
            let g = GridFunction::sample(rule, utkit::geometry::Domain::UnitDisk, |w| match kernel {
                Kernel::Resolvent => DiskPoint::disk(w)
                    .and_then(|wp| resolvent_kernel(&zp, &wp))
                    .map(|v| C64::new(v, 0.0))
                    .unwrap_or(C64::new(f64::NAN, 0.0)),
                Kernel::Bkernel => b_kernel_closed(z, w),
                Kernel::Density => C64::new(disk_density(w), 0.0),
            });
            let mut buf = Vec::new();
            g.write_csv(&mut buf)?;
            write_out(&out, &String::from_utf8_lossy(&buf))?;
        }
        Cmd::Variations { kind, mu, kappa, h, at } => {
            let mu = parse_field(&mu)?;
            match kind {
                VariationKind::Density => {
                    let zs = points(&at, &[C64::new(1.5, 0.0), C64::new(0.0, 2.0), C64::new(-1.3, -0.4)])?;
                    let (d1, d2) = density_first_variation(&mu, &zs, h)?;
                    let (fd, want) = density_second_variation(&mu, &zs, h)?;
                    let rows: Vec<_> = (0..zs.len())
                        .map(|i| {
                            json!({"z": cplx(zs[i]), "first": [d1[i], d2[i]], "second": fd.extrapolated[i].re, "expected": want[i]})
                        })
                        .collect();
                    print_json(&json!({"h": h, "points": rows}));
                }
                VariationKind::Metric => {
                    let kappa = parse_field(&kappa)?;
                    let fd = metric_second_variation_fd(&[(&mu, &mu)], &kappa, h, &QuadRule::default_rule())?;
                    let want = metric_second_variation(&mu, &mu, &kappa)?;
                    print_json(&json!({"h": h, "fd": cplx(fd.extrapolated[0]), "coarse": cplx(fd.coarse[0]), "expected": cplx(want)}));
                }
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::UnknownSuite(_) | Error::IoFailure(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
