use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use farey_core::cli::{self, Command, Format, RunConfig};
use farey_core::spacing::BoxRegion;
use farey_core::Error;

/// Farey fraction correlations: empirical statistics and limiting formulas.
#[derive(Debug, Parser)]
#[command(name = "farey-corr", version)]
struct Args {
    /// What to compute.
    #[arg(value_enum)]
    command: Command,

    /// Farey order Q (for expsum-check: the largest order swept).
    #[arg(long = "Q", default_value_t = 1000)]
    q: u32,

    /// Correlation level ν.
    #[arg(long, default_value_t = 2)]
    nu: usize,

    /// Upper end of the λ range (default 3, or 10⁴ for asymptotic).
    #[arg(long)]
    lambda_max: Option<f64>,

    #[arg(long, default_value_t = 12)]
    bins: usize,

    /// Box as comma-separated lo:hi per axis, e.g. 0.4:1,0.4:1.
    #[arg(long = "box", allow_hyphen_values = true)]
    region: Option<String>,

    /// Absolute error tolerance of the area evaluation.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,

    /// Monte-Carlo samples per term for a nu-level cross-check (0 disables).
    #[arg(long, default_value_t = 0)]
    mc_samples: u64,

    #[arg(long, default_value_t = cli::DEFAULT_SEED)]
    seed: u64,

    #[arg(long, default_value_t = 1)]
    workers: usize,

    /// Largest |r| swept by expsum-check.
    #[arg(long, default_value_t = 50)]
    r_max: i64,

    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<String>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn config_from(args: Args) -> Result<RunConfig, Error> {
    let sieve_max = match std::env::var(cli::SIEVE_MAX_ENV) {
        Ok(v) => v.parse().map_err(|_| {
            Error::InvalidInput(format!(
                "{} must be an integer, got `{v}`",
                cli::SIEVE_MAX_ENV
            ))
        })?,
        Err(_) => farey_core::numtheory::DEFAULT_MAX_LIMIT,
    };
    let config = RunConfig {
        command: args.command,
        q: args.q,
        nu: args.nu,
        lambda_max: args
            .lambda_max
            .unwrap_or_else(|| cli::default_lambda_max(args.command)),
        bins: args.bins,
        region: args.region.as_deref().map(BoxRegion::parse).transpose()?,
        tol: args.tol,
        mc_samples: args.mc_samples,
        seed: args.seed,
        workers: args.workers,
        r_max: args.r_max,
        output_path: args.out,
        format: args.format,
        sieve_max,
    };
    config.validate()?;
    Ok(config)
}

fn run(args: Args) -> Result<(), Error> {
    let config = config_from(args)?;
    let start = Instant::now();
    let artifact = cli::execute(&config)?;
    match &config.output_path {
        Some(path) => std::fs::write(path, artifact.body.as_bytes())?,
        None => std::io::stdout().write_all(artifact.body.as_bytes())?,
    }
    if let Some(report) = &artifact.report {
        eprintln!(
            "Q = {}, N = {}: max |dev| = {:.3e}, max rel dev = {:.3e}",
            report.q,
            report.n,
            report.max_abs_deviation(),
            report.max_rel_deviation()
        );
    }
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn fail(kind: &str, message: String, code: i32) -> ExitCode {
    let body = serde_json::json!({
        "error": { "kind": kind, "message": message, "exit_code": code }
    });
    eprintln!("{body}");
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return fail("invalid_input", e.to_string(), 2);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), e.to_string(), e.exit_code()),
    }
}
