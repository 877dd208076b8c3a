//! `higgs-sp4`: command-line front end for the `sp4_higgs` library.
//!
//! Every command writes one line of JSON to stdout. Exit codes are 0 on
//! success, 1 when the library rejects the input on mathematical grounds,
//! and 2 for usage or parse failures.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use sp4_higgs::exec::{self, Mode};
use sp4_higgs::higgs::{self, CurveCtx, HiggsDatum};
use sp4_higgs::moduli::{self, ScanMode};
use sp4_higgs::verify::{self, Scope};
use sp4_higgs::F2Vec;

const THREADS_ENV: &str = "HIGGS_SP4_THREADS";

#[derive(Parser)]
#[command(name = "higgs-sp4", version, about = "Exact classification of maximal Sp(4,R)-Higgs bundles")]
struct Cli {
    /// Print run metadata (timing, worker count) to stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Lie,
    Matalg,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity suites and report each check.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        scope: ScopeArg,
    },
    /// Shorthand for `verify --scope lie`.
    VerifyLie,
    /// Component label and reduction verdict of a maximal datum.
    Classify {
        #[command(flatten)]
        input: DatumArgs,
    },
    /// Stability verdict and the clause that decided it.
    Stability {
        #[command(flatten)]
        input: DatumArgs,
    },
    /// Component counts.
    Count {
        #[arg(long)]
        genus: i64,
        /// Count maximal Sp(2n,R) components instead.
        #[arg(long)]
        sp2n: Option<i64>,
    },
    /// Image of the F2 Stiefel–Whitney map.
    F2Scan {
        #[arg(long)]
        genus: usize,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = moduli::DEFAULT_SEED)]
        seed: u64,
        /// Run on the current thread only.
        #[arg(long)]
        sequential: bool,
    },
    /// Fibre dimensions of the component with `w1 = 0` and given `c`.
    Fiber {
        #[arg(long)]
        genus: i64,
        #[arg(long)]
        c: i64,
    },
    /// Canonical representative of a diagonal or irreducible-image datum.
    NormalForm {
        #[command(flatten)]
        input: DatumArgs,
    },
}

#[derive(clap::Args)]
struct DatumArgs {
    /// JSON file holding one datum.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    genus: i64,
    /// Torsion label of the base square root of K, as a bitstring of length 2g.
    #[arg(long)]
    spin_base: Option<String>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Domain(#[from] sp4_higgs::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(sp4_higgs::Error::Parse(_) | sp4_higgs::Error::BadBitstring(_)) => 2,
            CliError::Domain(_) => 1,
            CliError::Io(_) | CliError::Parse(_) => 2,
        }
    }

    fn clause(&self) -> &'static str {
        match self {
            CliError::Io(_) => "input.read",
            CliError::Parse(_) => "input.parse",
            CliError::Domain(e) => e.clause(),
        }
    }
}

/// Outcome of a command: the JSON payload and whether it counts as success.
struct Outcome {
    payload: String,
    ok: bool,
}

impl Outcome {
    fn ok<T: Serialize>(v: &T) -> Result<Outcome, CliError> {
        Ok(Outcome {
            payload: serde_json::to_string(v).map_err(|e| CliError::Parse(e.to_string()))?,
            ok: true,
        })
    }
}

fn read_datum(path: &Path) -> Result<HiggsDatum, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn context(args: &DatumArgs) -> Result<CurveCtx, CliError> {
    Ok(match &args.spin_base {
        Some(bits) => CurveCtx::with_spin_base(args.genus, F2Vec::parse(bits)?)?,
        None => CurveCtx::new(args.genus)?,
    })
}

fn run_verify(scope: ScopeArg) -> Result<Outcome, CliError> {
    let scope = match scope {
        ScopeArg::Lie => Scope::Lie,
        ScopeArg::Matalg => Scope::Matalg,
        ScopeArg::All => Scope::All,
    };
    #[cfg(feature = "corrupt-htilde")]
    let report = verify::run_with_frame(scope, &verify::corrupted_frame());
    #[cfg(not(feature = "corrupt-htilde"))]
    let report = verify::run(scope);
    let ok = report.pass;
    Ok(Outcome {
        payload: serde_json::to_string(&report).map_err(|e| CliError::Parse(e.to_string()))?,
        ok,
    })
}

/// Error object written to stdout.
#[derive(Serialize)]
struct ErrorBody {
    error: String,
    clause: &'static str,
}

#[derive(Serialize)]
struct Classification {
    #[serde(flatten)]
    label: moduli::ComponentLabel,
    #[serde(flatten)]
    verdict: moduli::ReductionVerdict,
}

#[derive(Serialize)]
struct Sp2nCount {
    total: u128,
    n: i64,
    sp4_total: u128,
}

fn dispatch(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Verify { scope } => run_verify(scope),
        Command::VerifyLie => run_verify(ScopeArg::Lie),
        Command::Classify { input } => {
            let ctx = context(&input)?;
            let datum = read_datum(&input.input)?;
            let label = moduli::classify(&ctx, &datum)?;
            let verdict = moduli::reduction_verdict(&label);
            Outcome::ok(&Classification { label, verdict })
        }
        Command::Stability { input } => {
            let ctx = context(&input)?;
            let datum = read_datum(&input.input)?;
            Outcome::ok(&higgs::stability(&ctx, &datum)?)
        }
        Command::Count { genus, sp2n } => {
            let ctx = CurveCtx::new(genus)?;
            let counts = moduli::count_components(&ctx)?;
            match sp2n {
                Some(n) => Outcome::ok(&Sp2nCount {
                    total: moduli::count_components_sp2n(&ctx, n)?,
                    n,
                    sp4_total: counts.total,
                }),
                None => Outcome::ok(&counts),
            }
        }
        Command::F2Scan {
            genus,
            exhaustive,
            samples,
            seed,
            sequential,
        } => {
            let mode = match (exhaustive, samples) {
                (true, _) => ScanMode::Exhaustive,
                (false, Some(samples)) => ScanMode::Sampled { samples, seed },
                (false, None) => ScanMode::Default,
            };
            let exec_mode = if sequential { Mode::Sequential } else { Mode::Auto };
            let report = moduli::f2_image_scan(genus, mode, exec_mode)?;
            let ok = report.matches_expected;
            Ok(Outcome {
                payload: serde_json::to_string(&report).map_err(|e| CliError::Parse(e.to_string()))?,
                ok,
            })
        }
        Command::Fiber { genus, c } => {
            let ctx = CurveCtx::new(genus)?;
            Outcome::ok(&moduli::fiber_geometry(&ctx, c)?)
        }
        Command::NormalForm { input } => {
            let ctx = context(&input)?;
            let datum = read_datum(&input.input)?;
            match datum {
                HiggsDatum::IrrImage { .. } => Outcome::ok(&higgs::irr_normal_form(&ctx, &datum)?),
                _ => Outcome::ok(&higgs::iso_normal_form(&ctx, &datum)?),
            }
        }
    }
}

fn configure_threads(verbose: bool) {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(n) => {
            let applied = exec::configure_threads(n);
            if verbose {
                eprintln!("{THREADS_ENV}={n} (applied: {applied})");
            }
        }
        Err(_) => eprintln!("ignoring {THREADS_ENV}={raw:?}: not a positive integer"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads(cli.verbose);
    let started = Instant::now();
    let result = dispatch(cli.command);
    if cli.verbose {
        eprintln!(
            "elapsed_ms={} parallel={}",
            started.elapsed().as_millis(),
            cfg!(feature = "parallel")
        );
    }
    match result {
        Ok(outcome) => {
            println!("{}", outcome.payload);
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let body = ErrorBody {
                error: e.to_string(),
                clause: e.clause(),
            };
            println!("{}", serde_json::to_string(&body).expect("plain strings serialise"));
            ExitCode::from(e.exit_code())
        }
    }
}
