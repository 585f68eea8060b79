//! `roughform`: integrate rough forms over rectangles and domains from JSON specs.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use config::{load_domain, load_spec, prepare_out, BadInput, Levels, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "roughform", version, about = "Integration of f dg1 ^ ... ^ dgd for Hölder functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Integrand file with keys f, g and optionally rect.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,

    /// Domain file.
    #[arg(long, global = true)]
    domain: Option<PathBuf>,

    /// Directory for JSON and CSV outputs; the report is always printed.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Level window j_min:j_max.
    #[arg(long, global = true, default_value = "2:8")]
    levels: Levels,

    #[arg(long, global = true, default_value_t = 4)]
    basis_order: u32,

    /// Sewing tolerance, or coefficient tolerance for wavelet sweeps.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Finest sewing level, or truncation level J of the pairing.
    #[arg(long, global = true)]
    max_level: Option<u32>,

    /// Exponent for besov-check.
    #[arg(long, global = true)]
    beta: Option<f64>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Run every kernel on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Sewing integral over the integrand file's rectangle.
    IntegrateRect,
    /// Box counts and dimension of a domain's boundary.
    Boxdim,
    /// Summability test of 2^{-beta j} N_j for a domain's boundary.
    BesovCheck,
    /// Wavelet coefficients of f dg up to j_max.
    Coeffs,
    /// Duality integral over a domain, truncated at --max-level.
    IntegrateDomain,
    /// Value and Cauchy gap per level, with the fitted gap slope.
    ConvergenceStudy,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::IntegrateRect => "integrate-rect",
            Command::Boxdim => "boxdim",
            Command::BesovCheck => "besov-check",
            Command::Coeffs => "coeffs",
            Command::IntegrateDomain => "integrate-domain",
            Command::ConvergenceStudy => "convergence-study",
        }
    }
}

fn resolve(cli: &Cli) -> anyhow::Result<RunConfig> {
    let (spec_path, spec) = match &cli.spec {
        Some(p) => {
            let (p, s) = load_spec(p)?;
            (Some(p), Some(s))
        }
        None => (None, None),
    };
    let (domain_path, domain) = match &cli.domain {
        Some(p) => {
            let (p, s) = load_domain(p)?;
            (Some(p), Some(s))
        }
        None => (None, None),
    };
    let out = cli.out.as_deref().map(prepare_out).transpose()?;
    let (tol, max_level) = match cli.command {
        Command::IntegrateDomain => (1e-3, 5),
        Command::Coeffs => (1e-3, cli.levels.max),
        _ => (1e-6, 10),
    };
    Ok(RunConfig {
        command: cli.command.name().into(),
        spec_path,
        spec,
        domain_path,
        domain,
        out,
        levels: cli.levels,
        basis_order: cli.basis_order,
        tol: cli.tol.unwrap_or(tol),
        max_level: cli.max_level.unwrap_or(max_level),
        beta: cli.beta,
        threads: cli.threads,
        sequential: cli.sequential,
    })
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| BadInput(format!("--threads: {e}")))?;
    }
    let cfg = resolve(cli)?;
    log::info!("running {}", cfg.command);
    match cli.command {
        Command::IntegrateRect => commands::integrate_rect(&cfg),
        Command::Boxdim => commands::boxdim(&cfg),
        Command::BesovCheck => commands::besov_check(&cfg),
        Command::Coeffs => commands::coeffs(&cfg),
        Command::IntegrateDomain => commands::integrate_domain(&cfg),
        Command::ConvergenceStudy => commands::convergence_study(&cfg),
    }
}

/// 2 bad input, 3 numerical failure, 4 budget exceeded.
fn exit_code(e: &anyhow::Error) -> u8 {
    use roughform::Error as E;
    if e.downcast_ref::<BadInput>().is_some() {
        return 2;
    }
    match e.downcast_ref::<E>() {
        Some(E::NoConvergence { .. } | E::NotPopulated(_)) => 3,
        Some(E::BudgetExceeded { .. }) => 4,
        Some(_) => 2,
        None => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
