use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use neumann_core::ensembles::{trial_seed, EnsembleSpec};
use neumann_core::hard_edge::{LimitLaw, DEFAULT_QUADRATURE};
use neumann_core::harness::{emit_report, run_experiment, run_suite, ExperimentConfig, Suite};
use neumann_core::Result;

#[derive(Parser)]
#[command(
    name = "neumann",
    version,
    about = "Halting-time experiments for the Neumann series iteration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Uniform,
    Jue,
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    Exp,
    Bessel,
}

#[derive(Subcommand)]
enum Command {
    /// Draw spectra and write them as CSV (trial_index, trial_seed, eig_index, eigenvalue).
    Sample {
        #[arg(long, value_enum)]
        ensemble: EnsembleArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment from a JSON config and write the report files.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate a limit law as CSV (t, cdf, pdf).
    LimitCdf {
        #[arg(long, value_enum)]
        law: LawArg,
        #[arg(long, default_value_t = 0.5)]
        rate: f64,
        #[arg(long, default_value_t = 2.0)]
        order: f64,
        #[arg(long, default_value_t = DEFAULT_QUADRATURE)]
        quad: usize,
        #[arg(long)]
        tmax: f64,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a self-check suite; prints a JSON report and exits 1 on failure.
    Verify {
        #[arg(long, value_parser = |s: &str| s.parse::<Suite>().map_err(|e| e.to_string()))]
        suite: Suite,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn sample(
    ensemble: EnsembleArg,
    n: usize,
    n1: Option<usize>,
    n2: Option<usize>,
    trials: u64,
    seed: u64,
    out: PathBuf,
) -> Result<()> {
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(["trial_index", "trial_seed", "eig_index", "eigenvalue"])?;
    for t in 0..trials {
        let s = trial_seed(seed, t);
        let spec = match ensemble {
            EnsembleArg::Uniform => EnsembleSpec::eigenvalues_only(n, s),
            EnsembleArg::Jue => EnsembleSpec::jue(n, n1.unwrap_or(n + 2), n2.unwrap_or(n + 2), s),
        };
        for (i, lam) in spec.sample()?.eigenvalues.iter().enumerate() {
            w.write_record([t.to_string(), s.to_string(), i.to_string(), lam.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Sample {
            ensemble,
            n,
            n1,
            n2,
            trials,
            seed,
            out,
        } => sample(ensemble, n, n1, n2, trials, seed, out)?,
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let table = run_experiment(&cfg)?;
            let paths = emit_report(&table, &out)?;
            eprintln!("wrote {}", paths.summary.display());
        }
        Command::LimitCdf {
            law,
            rate,
            order,
            quad,
            tmax,
            step,
            out,
        } => {
            let law = match law {
                LawArg::Exp => LimitLaw::Exponential { rate },
                LawArg::Bessel => LimitLaw::BesselHardEdge {
                    order,
                    quadrature: quad,
                },
            };
            law.tabulate(tmax, step)?.write_csv_file(&out)?;
        }
        Command::Verify { suite, out } => {
            let report = run_suite(suite)?;
            let text = serde_json::to_string_pretty(&report)?;
            if let Some(path) = out {
                std::fs::write(path, format!("{text}\n"))?;
            }
            writeln!(std::io::stdout(), "{text}")?;
            return Ok(report.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
