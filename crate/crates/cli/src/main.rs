mod commands;
mod config;
mod error;
mod input;
mod output;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, RunConfig, CONFIG_ENV};
use error::CliError;

/// Exact experiments with low-degree polynomials over F2.
#[derive(Debug, Parser)]
#[command(name = "f2lab", version, about)]
struct Cli {
    /// Configuration file of `key = value` lines; defaults to $F2LAB_CONFIG.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output format; overrides `output_format`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Base seed; overrides `seed`.
    #[arg(long = "base-seed", global = true)]
    base_seed: Option<u64>,

    /// Worker threads; overrides `worker_count`.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct PolyArg {
    /// Polynomial expression, e.g. "x1*x2 + x3 + 1".
    #[arg(long)]
    poly: String,
    /// Number of variables (defaults to the largest index used).
    #[arg(long)]
    m: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a polynomial at a point or over the whole cube.
    Eval {
        #[command(flatten)]
        p: PolyArg,
        /// Input bitstring; character j is x_{j+1}.
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        x: Option<String>,
        /// Emit the full truth table.
        #[arg(long)]
        all: bool,
    },
    /// Pr[P = 1], the signed bias and the distance to a target probability.
    Bias {
        #[command(flatten)]
        p: PolyArg,
        #[arg(long, default_value = "1/3")]
        rho: String,
    },
    /// Walsh-Fourier coefficients of (-1)^P.
    Spectrum {
        #[command(flatten)]
        p: PolyArg,
    },
    /// Canonical Dickson form of a quadratic.
    Dickson {
        #[command(flatten)]
        p: PolyArg,
    },
    /// Ranks of single polynomials and of a factor.
    Rank {
        /// Polynomial file, one expression per line.
        #[arg(long, conflicts_with = "poly", required_unless_present = "poly")]
        polys: Option<PathBuf>,
        #[arg(long)]
        poly: Option<String>,
        #[arg(long)]
        m: Option<u32>,
        /// Also test the factor for r-regularity.
        #[arg(long)]
        r: Option<u64>,
    },
    /// Refine a factor until it is f(dim)-regular.
    Regularize {
        #[arg(long)]
        factor: PathBuf,
        /// Growth function: id, mul:c, add:c, affine:a,b, linear:c=..., ckl2:delta=p/q.
        #[arg(long, default_value = "id")]
        f: String,
        /// Degree bound of the factor (defaults to the largest member degree).
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
    },
    /// Regularize quadratics plus linear forms against rank_1.
    Rank21 {
        #[arg(long)]
        qs: PathBuf,
        #[arg(long)]
        ls: Option<PathBuf>,
        /// Truth table of Γ over (Qs, Ls) as a bitstring of length 2^(r+s).
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value_t = 2)]
        c: u64,
        #[arg(long)]
        m: Option<u32>,
    },
    /// Search a family of subspaces for a sunflower.
    Sunflower {
        /// JSON array of {m, basis} subspaces.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        size: usize,
    },
    /// Exact TV distance from Ber(rho)^n.
    Tv {
        #[arg(long)]
        polys: PathBuf,
        #[arg(long, default_value = "1/3")]
        rho: String,
        #[arg(long)]
        m: Option<u32>,
    },
    /// Exact joint distribution of a polynomial tuple.
    Joint {
        #[arg(long)]
        polys: PathBuf,
        #[arg(long)]
        m: Option<u32>,
    },
    /// Audits: chebyshev, vazirani, density.
    Audit {
        #[command(subcommand)]
        kind: AuditKind,
    },
    /// Exhaustive minimum-gap scan over all degree-d polynomials in m variables.
    Scan {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        vars: u32,
        #[arg(long, default_value = "1/3")]
        rho: String,
        /// Force the truth-table path even for d <= 2.
        #[arg(long)]
        tables: bool,
    },
    /// Dyadic-proximity gap certificate for Γ(Q_1..Q_r).
    Certify {
        #[arg(long)]
        qs: PathBuf,
        /// Truth table of Γ as a bitstring of length 2^r.
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value_t = 1)]
        t: u64,
        /// Degree for the general gap bound.
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
    },
    /// Random-walk search for polynomials with Pr[P = 1] close to a target.
    Search {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        vars: u32,
        #[arg(long, default_value = "1/3")]
        target: String,
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        /// Walk seed (defaults to the configured seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Constant temperature.
        #[arg(long, conflicts_with_all = ["greedy", "schedule"])]
        temp: Option<f64>,
        /// Only accept moves that do not increase the gap.
        #[arg(long, conflicts_with = "schedule")]
        greedy: bool,
        /// greedy | constant:T | anneal:START,END
        #[arg(long)]
        schedule: Option<String>,
        /// Independent walks on consecutive seeds.
        #[arg(long, default_value_t = 1)]
        runs: u64,
        #[arg(long, default_value_t = 5)]
        top: usize,
        /// Omit the per-step trace.
        #[arg(long)]
        no_trace: bool,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: verify::Suite,
        /// Random instances per randomized check.
        #[arg(long, default_value_t = 200)]
        instances: usize,
    },
    /// The recursion ψ_{d,f} or ψ*_{d,f}.
    Psi {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "id")]
        f: String,
        /// Comma-separated state vector of length d.
        #[arg(long, conflicts_with = "star", required_unless_present = "star")]
        vec: Option<String>,
        /// Evaluate ψ*(k) instead.
        #[arg(long)]
        star: Option<u64>,
        /// Step budget (defaults to the configured psi_budget).
        #[arg(long)]
        budget: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
enum AuditKind {
    /// Pairwise covariances and the Chebyshev tail of a family.
    Chebyshev {
        #[arg(long)]
        polys: PathBuf,
        /// One line per polynomial, petal members separated by `;`.
        #[arg(long)]
        petals: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value = "1")]
        eta: String,
    },
    /// Distance from uniform against the Fourier bound.
    Vazirani {
        #[arg(long)]
        polys: PathBuf,
    },
    /// Density of the common zero set of a factor.
    Density {
        #[arg(long)]
        factor: PathBuf,
        #[arg(long)]
        eta: Option<String>,
    },
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli.config.clone().or_else(|| {
        std::env::var_os(CONFIG_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    });
    let mut cfg = match path {
        Some(p) => RunConfig::load(&p)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.output_format = f;
    }
    if let Some(s) = cli.base_seed {
        cfg.seed = s;
    }
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        cfg.worker_count = Some(w);
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve_config(&cli)?;
    cfg.install()?;
    let (report, failures) = commands::dispatch(cli.command, &cfg)?;
    let text = report.render(cfg.output_format)?;
    let mut out = std::io::stdout().lock();
    // A closed pipe is not worth an error report.
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
    if failures > 0 {
        return Err(CliError::ChecksFailed(failures));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::ChecksFailed(_)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
