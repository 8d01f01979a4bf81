use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;
use symideal_cli::commands::{self, Options, DEFAULT_DEPTH};
use symideal_cli::suites::{self, SuiteConfig};
use symideal_cli::sweep::{self, SweepConfig};
use symideal_cli::output;
use symideal_core::rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Exact rearrangement, partition and averaging computations.
#[derive(Debug, Parser)]
#[command(name = "symideal", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// JSON input file; `-` reads stdin
    #[arg(long, global = true, env = "SYMIDEAL_INPUT")]
    input: Option<PathBuf>,
    /// materialization depth (default 32; witness sweeps use it as witness depth)
    #[arg(long, global = true, env = "SYMIDEAL_DEPTH")]
    depth: Option<usize>,
    #[arg(long, global = true, env = "SYMIDEAL_SEED", default_value_t = 0)]
    seed: u64,
    /// trial count for sweeps, or an override for every suite
    #[arg(long, global = true, env = "SYMIDEAL_TRIALS")]
    trials: Option<usize>,
    /// output format (json by default; csv for sweeps)
    #[arg(long, global = true, env = "SYMIDEAL_FORMAT", value_enum)]
    format: Option<Format>,
    /// significant digits in decimal renderings
    #[arg(long, global = true, env = "SYMIDEAL_PRECISION", default_value_t = 12)]
    precision: usize,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Decreasing rearrangement and f** at its breakpoints
    Rearrange,
    /// Conditional expectation onto a partition
    Avg,
    /// Complement profile and its pullback
    AvgPerp,
    /// Weak and strong regularity constants and q-counts
    Regularity,
    /// B-regularity certificate
    Breg,
    /// Membership in N_f and the Marcinkiewicz norm
    Member,
    /// Verifying ratio and stochastic vector of a partition
    VerifyPartition,
    /// Finer verifying refinement of a partition
    FinerVerifying,
    /// min_delta of a partition, or the witness for `epsilon`
    Golden,
    /// psi-ratio of (f, B), or the witness for `epsilon`
    PsiRatio,
    /// Function synthesized from a q-sequence
    SynthesizeQ,
    /// Verifying, nonuniversal or nonaveraging witnesses
    Witness,
    /// Rearrangement dominating y on the cells of a partition
    Dominate,
    /// Divergence demo: exact S2 and bracketed S1 for K and c
    DemoAbramovich,
    /// Run a verification suite (`all` runs every suite)
    Suite {
        name: String,
        /// constant for the four-thirds suite, e.g. 1.32
        #[arg(long, env = "SYMIDEAL_BOUND")]
        bound: Option<String>,
    },
    /// One CSV row per trial for a metric
    Sweep { metric: String },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Rearrange => "rearrange",
            Cmd::Avg => "avg",
            Cmd::AvgPerp => "avg-perp",
            Cmd::Regularity => "regularity",
            Cmd::Breg => "breg",
            Cmd::Member => "member",
            Cmd::VerifyPartition => "verify-partition",
            Cmd::FinerVerifying => "finer-verifying",
            Cmd::Golden => "golden",
            Cmd::PsiRatio => "psi-ratio",
            Cmd::SynthesizeQ => "synthesize-q",
            Cmd::Witness => "witness",
            Cmd::Dominate => "dominate",
            Cmd::DemoAbramovich => "demo-abramovich",
            Cmd::Suite { .. } => "suite",
            Cmd::Sweep { .. } => "sweep",
        }
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<Value, String> {
    let text = match path {
        None => return Ok(Value::Object(Default::default())),
        Some(p) if p.as_os_str() == "-" => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
            s
        }
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?,
    };
    serde_json::from_str(&text).map_err(|e| format!("input is not JSON: {e}"))
}

fn render(v: &Value, format: Format, precision: usize) -> String {
    match format {
        Format::Json => output::to_json(v) + "\n",
        Format::Csv => output::to_csv(v, precision),
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let format = cli.format;
    let precision = cli.precision;
    match &cli.cmd {
        Cmd::Suite { name, bound } => {
            let mut cfg = SuiteConfig::new(cli.seed);
            cfg.trials = cli.trials;
            cfg.precision = precision;
            if let Some(b) = bound {
                cfg.four_thirds_bound = rational::parse(b).map_err(|e| e.to_string())?;
            }
            let report = suites::run(name, &cfg)?;
            let text = match format.unwrap_or(Format::Json) {
                Format::Json => report.to_json() + "\n",
                Format::Csv => {
                    let v = serde_json::to_value(&report).map_err(|e| e.to_string())?;
                    output::to_csv(&v, precision)
                }
            };
            print!("{text}");
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Sweep { metric } => {
            let cfg = SweepConfig {
                seed: cli.seed,
                trials: cli.trials.unwrap_or(100),
                depth: cli.depth.unwrap_or(DEFAULT_DEPTH),
                precision,
            };
            let rows = sweep::run(metric, &cfg).map_err(|e| e.to_string())?;
            match format.unwrap_or(Format::Csv) {
                Format::Csv => print!("{}", sweep::to_csv(&rows)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&rows).map_err(|e| e.to_string())?),
            }
            let all_pass = rows.iter().all(|r| r.verdict == "PASS");
            Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        cmd => {
            let input = read_input(&cli.input)?;
            let opts = Options { depth: cli.depth.unwrap_or(DEFAULT_DEPTH) };
            let out = commands::run(cmd.name(), &input, &opts).map_err(|e| e.to_string())?;
            print!("{}", render(&out, format.unwrap_or(Format::Json), precision));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
