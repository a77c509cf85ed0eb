use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use swarmloc::harness::{self, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(
    name = "swarmloc",
    version,
    about = "Optimal UAV measurement geometry for RSS localization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a plan for the configured scenario and write it as CSV
    Plan(Common),
    /// Evaluate a plan file: det F, sqrt(tr CRLB) and feasibility
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        plan: PathBuf,
    },
    /// Brute-force det F over the (beta2, beta3) grid for three hovering UAVs
    Grid(Common),
    /// det F and sqrt(tr CRLB) versus horizontal distance
    Sweep(Common),
    /// Estimation error of each configuration versus prior error
    Montecarlo(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    resolution_deg: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut config = ExperimentConfig::load(&self.config)?;
        let e = &mut config.experiment;
        if let Some(seed) = self.seed {
            e.seed = seed;
        }
        if let Some(trials) = self.trials {
            e.trials = trials;
        }
        if let Some(res) = self.resolution_deg {
            e.resolution_deg = res;
        }
        Ok(config)
    }

    fn output(&self) -> Result<Box<dyn Write>, HarnessError> {
        let Format::Csv = self.format;
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn read_plan(
    path: &Path,
    config: &ExperimentConfig,
) -> Result<swarmloc::model::MeasurementPlan, HarnessError> {
    let file = File::open(path).map_err(|e| HarnessError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    harness::read_plan_csv(file, config.prior()?)
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Plan(c) => {
            let report = harness::run_plan(&c.load()?)?;
            harness::write_plan_csv(report.auto.plan(), c.output()?)?;
            eprint!("{}", report.summary());
        }
        Command::Eval { common, plan } => {
            let config = common.load()?;
            let plan = read_plan(&plan, &config)?;
            let report = harness::run_eval(&config, &plan)?;
            let mut out = common.output()?;
            out.write_all(report.summary().as_bytes())?;
            out.flush()?;
            if !report.feasibility.is_feasible() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Grid(c) => {
            let result = harness::run_grid(&c.load()?)?;
            harness::write_grid_csv(&result, c.output()?)?;
            eprintln!("max det F = {:e} at {:?}", result.max, result.argmax);
        }
        Command::Sweep(c) => {
            let result = harness::run_sweep(&c.load()?)?;
            harness::write_sweep_csv(&result, c.output()?)?;
            eprintln!(
                "argmax det F: r = {} m, argmin sqrt(tr CRLB): r = {:?} m",
                result.argmax_det, result.argmin_sqrt_crlb
            );
        }
        Command::Montecarlo(c) => {
            let rows = harness::run_montecarlo(&c.load()?)?;
            harness::write_montecarlo_csv(&rows, c.output()?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
