use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ffm_core::commands::{self, OutputFormat, RunConfig};
use ffm_core::Error;

#[derive(Parser)]
#[command(
    name = "ffm",
    version,
    about = "Central values and moments of quadratic L-functions over F_q[T]"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute L-polynomials and central values for every prime of each degree.
    Scan(Common),
    /// Moment sums, S1, S2 and the Hölder comparison over the (n, k) grid.
    Moments(Common),
    /// Run every invariant check and emit a JSON pass/fail report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Perturb one L-coefficient per degree to exercise the failure path.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Divisor sums Σ d_k(m²)/|m| by degree, with growth-slope fits.
    DivisorSums(Common),
    /// Prime character sums Σ_P χ_P(f) for non-square f.
    Charsum(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Field size: a prime q ≡ 1 (mod 4).
    #[arg(long, default_value_t = 5)]
    q: u64,
    /// Degrees n of the conductors (odd, at least 3 for L-value commands).
    #[arg(long, value_delimiter = ',', default_value = "3,5")]
    degrees: Vec<usize>,
    /// Moment orders.
    #[arg(long = "k", value_delimiter = ',', default_value = "2,4")]
    ks: Vec<u32>,
    /// Use this degree cutoff for A(P) instead of floor(4g/(15k)).
    #[arg(long)]
    x_override: Option<usize>,
    /// Highest degree of the divisor-sum power series (at most 64).
    #[arg(long, default_value_t = 40)]
    max_series_degree: usize,
    /// Highest degree cross-checked by brute-force enumeration.
    #[arg(long, default_value_t = 8)]
    brute_max_degree: usize,
    /// Tolerance on the distance of L-zeros from |u| = q^{-1/2}.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long)]
    jobs: Option<usize>,
    /// L-value cache directory (defaults to <out-dir>/cache).
    #[arg(long, env = "FFM_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Largest deg f for character sums.
    #[arg(long, default_value_t = 3)]
    charsum_max_degree: usize,
    /// Irreducibility test: trial-division or rabin.
    #[arg(long, default_value = "trial-division")]
    irreducibility: String,
    /// Residue-symbol backend: square-table, euler or reciprocity.
    #[arg(long, default_value = "square-table")]
    symbols: String,
    /// Divisor-sum method: series or brute.
    #[arg(long, default_value = "series")]
    divisor_method: String,
}

impl Common {
    fn into_config(self, inject_fault: bool) -> RunConfig {
        let defaults = RunConfig::default();
        RunConfig {
            q: self.q,
            degrees: self.degrees,
            ks: self.ks,
            x_override: self.x_override,
            max_series_degree: self.max_series_degree,
            brute_max_degree: self.brute_max_degree,
            tol: self.tol,
            jobs: self.jobs.unwrap_or(defaults.jobs),
            cache_dir: self.cache_dir,
            out_dir: self.out_dir,
            format: match self.format {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            },
            charsum_max_degree: self.charsum_max_degree,
            irreducibility: self.irreducibility,
            symbols: self.symbols,
            divisor_method: self.divisor_method,
            inject_fault,
        }
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Scan(common) => {
            for s in commands::cmd_scan(&common.into_config(false))? {
                println!(
                    "n={} conductors={} cache_hits={} recomputed={} repaired={} -> {}",
                    s.n,
                    s.conductors,
                    s.cache_hits,
                    s.recomputed,
                    s.repaired,
                    s.output.display()
                );
            }
            Ok(true)
        }
        Command::Moments(common) => {
            let s = commands::cmd_moments(&common.into_config(false))?;
            println!(
                "rows={} holder_failures={} -> {}",
                s.rows,
                s.holder_failures,
                s.output.display()
            );
            eprintln!("moments computed in {:.2}s", s.seconds);
            Ok(s.holder_failures == 0)
        }
        Command::Verify {
            common,
            inject_fault,
        } => {
            let report = commands::cmd_verify(&common.into_config(inject_fault))?;
            println!("{}", commands::verify_json(&report)?);
            for c in report.failed_checks() {
                eprintln!(
                    "FAILED {}: {} of {} instances; first: {}",
                    c.result.name,
                    c.result.failed,
                    c.result.instances,
                    c.result.failures.first().map_or("", String::as_str)
                );
            }
            eprintln!("report written to {}", report.output.display());
            Ok(report.passed)
        }
        Command::DivisorSums(common) => {
            let s = commands::cmd_divisor_sums(&common.into_config(false))?;
            for fit in &s.fits {
                println!(
                    "k={} slope={:.6} target={} window=[{}, {}] relative_error={:+.4}",
                    fit.k, fit.slope, fit.target, fit.z_lo, fit.z_hi, fit.relative_error
                );
            }
            println!("brute_mismatches={}", s.brute_mismatches);
            for p in &s.outputs {
                println!("-> {}", p.display());
            }
            Ok(s.brute_mismatches == 0)
        }
        Command::Charsum(common) => {
            let s = commands::cmd_charsum(&common.into_config(false))?;
            let (f, n) = s.argmax.unwrap_or_default();
            println!(
                "rows={} max_ratio={} at f={f} n={n} -> {}",
                s.rows,
                commands::fmt_float(s.max_ratio),
                s.output.display()
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
