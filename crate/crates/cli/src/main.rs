//! `eprsynth`: batch front end for the epr-grover simulator.

mod config;
mod run;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use epr_grover::nmr::{DelayMode, RotationConvention};

use config::RunConfig;
use run::RunContext;

#[derive(Parser)]
#[command(
    name = "eprsynth",
    version,
    about = "Bell-state synthesis by generalized amplitude amplification on a two-spin NMR model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Seed for random unitaries
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Free-evolution propagator
    #[arg(long, global = true, value_enum)]
    delay_mode: Option<ModeArg>,

    /// Max-norm tolerance for verification checks
    #[arg(long, global = true, value_name = "X")]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the fixture suite and print a JSON report
    Verify {
        /// Rotation sign convention (`negative` is a negative control)
        #[arg(long, value_enum, default_value = "positive")]
        convention: ConventionArg,
    },
    /// Synthesize one job and write its artifacts
    Synth,
    /// Fidelity and phase against the target over a range of iteration counts
    Sweep {
        #[arg(long)]
        from: Option<usize>,
        #[arg(long)]
        to: Option<usize>,
    },
    /// List the tabulated two-spin unitaries
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Coupled,
    Full,
}

impl From<ModeArg> for DelayMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Coupled => DelayMode::Coupled,
            ModeArg::Full => DelayMode::Full,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Positive,
    Negative,
}

impl From<ConventionArg> for RotationConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Positive => RotationConvention::Positive,
            ConventionArg::Negative => RotationConvention::Negative,
        }
    }
}

/// Exit status of a run that did not fail on input.
enum Outcome {
    Success,
    VerificationFailed,
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    match &cli.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn out_dir(cli: &Cli, cfg: &RunConfig) -> Option<PathBuf> {
    cli.out.clone().or_else(|| cfg.outputs.clone())
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = load_config(cli)?;
    let ctx = RunContext::from_config(&cfg, cli.delay_mode.map(Into::into), cli.seed)?;
    match &cli.command {
        Command::Verify { convention } => {
            let tolerance = cli
                .tolerance
                .or(cfg.tolerance)
                .unwrap_or(epr_grover::DEFAULT_TOL);
            if !(tolerance >= 0.0 && tolerance.is_finite()) {
                bail!("tolerance must be a finite non-negative number");
            }
            let report = verify::run(&verify::Settings {
                system: ctx.system,
                mode: ctx.mode,
                convention: (*convention).into(),
                tolerance,
            })?;
            let text = run::to_pretty(&serde_json::to_value(&report)?);
            if let Some(dir) = out_dir(cli, &cfg) {
                std::fs::create_dir_all(&dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
                std::fs::write(dir.join("verify.json"), &text)?;
            }
            print!("{text}");
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("FAILED {} (max error {:e})", c.check_name, c.max_error);
            }
            Ok(if report.all_pass {
                Outcome::Success
            } else {
                Outcome::VerificationFailed
            })
        }
        Command::Synth => {
            let dir = out_dir(cli, &cfg).unwrap_or_else(|| PathBuf::from("out"));
            let report = run::synth(&cfg, &ctx, &dir)?;
            print!("{}", run::to_pretty(&report));
            Ok(Outcome::Success)
        }
        Command::Sweep { from, to } => {
            let range = cfg.sweep;
            let from = from.or(range.map(|r| r.from)).unwrap_or(0);
            let to = to.or(range.map(|r| r.to)).unwrap_or(9);
            let csv = run::sweep_csv(&cfg, &ctx, from, to)?;
            match out_dir(cli, &cfg) {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)
                        .with_context(|| format!("creating {}", dir.display()))?;
                    std::fs::write(dir.join("sweep.csv"), &csv)?;
                }
                None => print!("{csv}"),
            }
            Ok(Outcome::Success)
        }
        Command::Presets => {
            let text = run::to_pretty(&run::presets_json()?);
            if let Some(dir) = out_dir(cli, &cfg) {
                std::fs::create_dir_all(&dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
                std::fs::write(dir.join("presets.json"), &text)?;
            }
            print!("{text}");
            Ok(Outcome::Success)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
