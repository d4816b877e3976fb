//! Command-line front end.
//!
//! Exit codes form the documented contract: 0 success, 1 config error,
//! 2 uncertified-and-unstabilized result (including cap-limited runs),
//! 3 verification-suite failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spinor_core::config::{OrderConfig, ScenarioConfig};
use spinor_core::error::CoreError;
use spinor_core::residual::{irreducible_profile, ProfileReport};
use spinor_core::spinor::{local_defined, SpinorOptions};
use spinor_core::verify::{run_all, run_case, CaseOutcome};

#[derive(Parser)]
#[command(
    name = "spinor",
    version,
    about = "Spinor images of local orders in matrix algebras, residual invariants, and abstract class-field scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the local spinor image report for an order config.
    Image {
        /// Path to an order config (TOML).
        config: PathBuf,
        /// Deepest enumeration window (1-3).
        #[arg(long, default_value_t = 3)]
        depth: u32,
        /// Enumeration cap on ambient vector counts (>= 256).
        #[arg(long, default_value_t = 4096)]
        cap: u64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the residual algebra's irreducible profile (dims, t, uniform).
    Residual {
        /// Path to an order config (TOML).
        config: PathBuf,
        /// Scalar-extension degree for the residual algebra.
        #[arg(long = "ext-degree", default_value_t = 1)]
        ext_degree: u32,
        /// PRNG seed for the module chopper.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an abstract class-field scenario.
    Scenario {
        /// Path to a scenario config (TOML).
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run the bundled verification suite (all cases or one).
    #[command(name = "verify-paper")]
    VerifyPaper {
        /// Single case to run; omit for the full suite.
        #[arg(long)]
        case: Option<String>,
        /// Base seed; each case derives its own.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON summary here in addition to the console table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CoreError::Resource { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn read_config(path: &PathBuf) -> Result<String, CoreError> {
    std::fs::read_to_string(path)
        .map_err(|e| CoreError::Config(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), CoreError> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CoreError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn validate_limits(depth: u32, cap: u64) -> Result<(), CoreError> {
    if !(1..=3).contains(&depth) {
        return Err(CoreError::Config(format!(
            "key `depth`: must be 1, 2, or 3, found {depth}"
        )));
    }
    if cap < 256 {
        return Err(CoreError::Config(format!(
            "key `cap`: must be at least 256, found {cap}"
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, CoreError> {
    match cli.command {
        Command::Image {
            config,
            depth,
            cap,
            out,
        } => {
            validate_limits(depth, cap)?;
            let text = read_config(&config)?;
            let order = OrderConfig::parse(&text)?.build()?;
            let report = local_defined(
                &order,
                &SpinorOptions {
                    max_depth: depth,
                    cap,
                },
            )?;
            let body = serde_json::to_string_pretty(&report.to_report())
                .expect("report serialization is infallible");
            emit(&out, &body)?;
            if !(report.image.certified || report.image.stabilized) {
                eprintln!(
                    "warning: image neither certified nor stabilized at depth {} under cap {cap}",
                    report.image.depth
                );
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Residual {
            config,
            ext_degree,
            seed,
            out,
        } => {
            let text = read_config(&config)?;
            let order = OrderConfig::parse(&text)?.build()?;
            let profile = irreducible_profile(&order, ext_degree, seed)?;
            let report = ProfileReport {
                n: order.n() as u64,
                p: order.ring().p(),
                ext_degree,
                dims: profile.dims,
                t: profile.t,
                uniform: profile.uniform,
            };
            let body =
                serde_json::to_string_pretty(&report).expect("report serialization is infallible");
            emit(&out, &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scenario { config, out } => {
            let text = read_config(&config)?;
            let verdict = ScenarioConfig::parse(&text)?.to_scenario()?.evaluate()?;
            let body =
                serde_json::to_string_pretty(&verdict).expect("report serialization is infallible");
            emit(&out, &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyPaper { case, seed, out } => {
            let outcomes: Vec<CaseOutcome> = match case {
                Some(name) => vec![run_case(&name, seed)?],
                None => run_all(seed)?,
            };
            let mut passed = 0usize;
            for outcome in &outcomes {
                println!(
                    "[{}] {}",
                    if outcome.passed { "PASS" } else { "FAIL" },
                    outcome.name
                );
                for line in &outcome.details {
                    println!("    {line}");
                }
                if outcome.passed {
                    passed += 1;
                }
            }
            println!("{passed}/{} cases passed", outcomes.len());
            if let Some(path) = &out {
                let body = serde_json::to_string_pretty(&outcomes)
                    .expect("summary serialization is infallible");
                std::fs::write(path, body).map_err(|e| {
                    CoreError::Config(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            if passed == outcomes.len() {
                Ok(ExitCode::SUCCESS)
            } else {
                let failed: Vec<&str> = outcomes
                    .iter()
                    .filter(|o| !o.passed)
                    .map(|o| o.name.as_str())
                    .collect();
                eprintln!("failed cases: {}", failed.join(", "));
                Ok(ExitCode::from(3))
            }
        }
    }
}
