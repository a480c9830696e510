//! The `formcount` binary: JSON-described systems of integral forms in,
//! machine-readable counting/density/exponential-sum reports out.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use formcount::counting::Strategy;
use formcount::doc::parse_system;
use formcount::harness::{run_command, ExpsumMode, GlobalFlags, Verb};
use formcount::report::{render_csv, render_json};
use formcount::CliError;

#[derive(Parser)]
#[command(
    name = "formcount",
    version,
    about = "Counting experiments for systems of integral forms"
)]
struct Cli {
    /// Path to the JSON system document, or '-' for stdin.
    #[arg(long, global = true, default_value = "-")]
    input: PathBuf,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Random seed; overrides the document seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Point budget; overrides every document budget.
    #[arg(long, global = true)]
    budget: Option<f64>,
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    verb: VerbCli,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Full,
    SolveLast,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Full => Strategy::Full,
            StrategyArg::SolveLast => Strategy::SolveLast,
        }
    }
}

#[derive(Args, Clone)]
struct DensityArgs {
    /// Euler product over primes up to this bound.
    #[arg(long, default_value_t = 20)]
    p_max: u64,
    /// Residue counts at levels p^k for k up to this bound.
    #[arg(long, default_value_t = 2)]
    k_max: u32,
    /// Monte Carlo samples for the real density.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
}

#[derive(Subcommand)]
enum VerbCli {
    /// Exact admissibility invariants and threshold verdicts.
    Check,
    /// Brute-force N(P) over the dilated box.
    Count {
        /// Dilation parameter P.
        #[arg(long)]
        p: f64,
        /// Enumeration strategy; defaults to solve-last when applicable.
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
    },
    /// Local densities: Euler product of sigma_p and Monte Carlo sigma_infinity.
    Densities {
        #[command(flatten)]
        density: DensityArgs,
    },
    /// Circle-method main-term prediction at one P.
    Predict {
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        density: DensityArgs,
    },
    /// N(P) against the prediction over a P schedule.
    Compare {
        /// Comma-separated P values.
        #[arg(long, value_delimiter = ',', default_value = "20,40,60")]
        schedule: Vec<f64>,
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
        #[command(flatten)]
        density: DensityArgs,
    },
    /// Exponential sums: S(alpha), S(a,q), the truncated singular
    /// series/integral and major-arc membership.
    Expsum {
        /// Frequencies for S(alpha) (comma-separated, one per form).
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
        /// Dilation parameter P for S(alpha) or arc membership.
        #[arg(long)]
        p: Option<f64>,
        /// Denominator q for S(a,q) or arc membership.
        #[arg(long)]
        q: Option<u64>,
        /// Numerators a (comma-separated, one per form).
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<u64>>,
        /// Truncation H for the singular series.
        #[arg(long)]
        series_h: Option<u64>,
        /// Truncation H for the singular integral.
        #[arg(long)]
        integral_h: Option<f64>,
        /// Check major-arc membership of --alpha around --a/--q at --p.
        #[arg(long)]
        arc: bool,
        /// Major-arc exponent varpi (default 1/(2R+4)).
        #[arg(long)]
        varpi: Option<f64>,
    },
    /// Multilinear polar forms of the system.
    Polar {
        /// Restrict to one degree.
        #[arg(long)]
        degree: Option<u32>,
    },
}

fn expsum_mode(
    alpha: Option<Vec<f64>>,
    p: Option<f64>,
    q: Option<u64>,
    a: Option<Vec<u64>>,
    series_h: Option<u64>,
    integral_h: Option<f64>,
    arc: bool,
    varpi: Option<f64>,
) -> Result<ExpsumMode, CliError> {
    let usage = |msg: &str| CliError::Usage(msg.to_string());
    if arc {
        return Ok(ExpsumMode::Arc {
            alpha: alpha.ok_or_else(|| usage("--arc needs --alpha"))?,
            q: q.ok_or_else(|| usage("--arc needs --q"))?,
            a: a.ok_or_else(|| usage("--arc needs --a"))?,
            p: p.ok_or_else(|| usage("--arc needs --p"))?,
            varpi,
        });
    }
    if let Some(h) = series_h {
        return Ok(ExpsumMode::Series { h });
    }
    if let Some(h) = integral_h {
        return Ok(ExpsumMode::Integral { h });
    }
    if let (Some(q), Some(a)) = (q, a.clone()) {
        return Ok(ExpsumMode::Complete { q, a });
    }
    if let (Some(alpha), Some(p)) = (alpha, p) {
        return Ok(ExpsumMode::SAlpha { alpha, p });
    }
    Err(usage(
        "expsum needs one mode: --alpha with --p, --q with --a, --series-h, --integral-h, or --arc",
    ))
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let verb = match cli.verb {
        VerbCli::Check => Verb::Check,
        VerbCli::Count { p, strategy } => Verb::Count { p, strategy: strategy.map(Into::into) },
        VerbCli::Densities { density } => Verb::Densities {
            p_max: density.p_max,
            k_max: density.k_max,
            samples: density.samples,
        },
        VerbCli::Predict { p, density } => Verb::Predict {
            p,
            p_max: density.p_max,
            k_max: density.k_max,
            samples: density.samples,
        },
        VerbCli::Compare { schedule, strategy, density } => Verb::Compare {
            schedule,
            p_max: density.p_max,
            k_max: density.k_max,
            samples: density.samples,
            strategy: strategy.map(Into::into),
        },
        VerbCli::Expsum { alpha, p, q, a, series_h, integral_h, arc, varpi } => {
            Verb::Expsum(expsum_mode(alpha, p, q, a, series_h, integral_h, arc, varpi)?)
        }
        VerbCli::Polar { degree } => Verb::Polar { degree },
    };
    let text = read_input(&cli.input)?;
    let doc = parse_system(&text)?;
    let flags = GlobalFlags {
        threads: cli.threads,
        seed: cli.seed,
        budget: cli.budget,
        json: cli.json,
    };
    let report = run_command(&verb, &doc, &flags)?;
    for (label, seconds) in &report.timings {
        eprintln!("# {label}: {seconds:.3}s");
    }
    if flags.json {
        print!("{}", render_json(&report));
    } else {
        print!("{}", render_csv(&report));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
