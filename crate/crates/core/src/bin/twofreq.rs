//! Command-line front end: parse flags, load the config, dispatch to the
//! runner, print the document to stdout and notes to stderr.
//!
//! Exit codes: 0 success, 2 validation or usage error, 3 runtime I/O
//! failure. Failures print a machine-readable `{"errors": [...]}` document
//! to stderr.

use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;

use twofreq::config::{load_config, EmitKind, RunSettings};
use twofreq::model::Scenario;
use twofreq::runner::{
    cmd_analytic, cmd_diagnose, cmd_retune, cmd_simulate, cmd_sweep, CommandOutput, SweepAxis,
};
use twofreq::{report, Error, Result};

#[derive(Parser)]
#[command(
    name = "twofreq",
    version,
    about = "Phase-measurement SNR calculator and simulator for a \
             two-frequency interferometer with a squeezed dark port"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario config file (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Directory for artifact files (summary.json, CSVs)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides the config)
    #[arg(long)]
    seed: Option<u64>,
    /// Number of noise realizations (overrides the config)
    #[arg(long)]
    realizations: Option<usize>,
    /// Extra artifacts to write: spectrum,trace
    #[arg(long, value_delimiter = ',')]
    emit: Vec<String>,
    /// Worker threads for the realization fan-out (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form SNR report, no simulation
    Analytic {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Monte-Carlo SNR estimate next to the closed forms
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Estimate the signal power from the combined spectrum, with the
        /// noise floor taken from neighboring bins and subtracted
        #[arg(long)]
        combined: bool,
    },
    /// Single-frequency carrier line scan with beat-partner hazard flags
    Diagnose {
        #[command(flatten)]
        common: CommonArgs,
        /// Detection threshold over the local floor (default from config)
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Rank candidate carrier offsets for the configured measurement
    Retune {
        #[command(flatten)]
        common: CommonArgs,
        /// Candidate offsets in cycles, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        candidates: Vec<f64>,
    },
    /// Closed-form SNR across one parameter axis
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// One of: v_flat, theta_w1, photon_flux, duration, mismatch
        #[arg(long)]
        axis: String,
        /// Axis values, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Monte-Carlo estimate each sweep point as well
        #[arg(long)]
        mc: bool,
    },
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Analytic { common } => common,
            Command::Simulate { common, .. } => common,
            Command::Diagnose { common, .. } => common,
            Command::Retune { common, .. } => common,
            Command::Sweep { common, .. } => common,
        }
    }
}

fn load(common: &CommonArgs) -> Result<(Scenario, RunSettings)> {
    let (scenario, mut run) = load_config(&common.config)?;
    if let Some(seed) = common.seed {
        run.seed = seed;
    }
    if let Some(m) = common.realizations {
        run.realizations = m;
    }
    if run.realizations == 0 {
        return Err(Error::InvalidInput(
            "realizations must be at least 1".to_string(),
        ));
    }
    if !common.emit.is_empty() {
        run.emit = common
            .emit
            .iter()
            .map(|s| EmitKind::parse(s))
            .collect::<Result<Vec<_>>>()?;
    }
    if let Some(out) = &common.out {
        run.out_dir = Some(out.clone());
    }
    Ok((scenario, run))
}

fn dispatch(command: &Command) -> Result<CommandOutput> {
    let (scenario, mut run) = load(command.common())?;
    match command {
        Command::Analytic { .. } => cmd_analytic(&scenario, &run),
        Command::Simulate { combined, .. } => cmd_simulate(&scenario, &run, *combined),
        Command::Diagnose { threshold, .. } => {
            if let Some(t) = threshold {
                if !(*t > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "detection threshold must be positive, got {t}"
                    )));
                }
                run.detect_threshold = *t;
            }
            cmd_diagnose(&scenario, &run)
        }
        Command::Retune { candidates, .. } => {
            let rads: Vec<f64> = candidates
                .iter()
                .map(|c| std::f64::consts::TAU * c)
                .collect();
            cmd_retune(&scenario, &run, &rads)
        }
        Command::Sweep {
            axis, values, mc, ..
        } => {
            let axis = SweepAxis::parse(axis)?;
            cmd_sweep(&scenario, &run, axis, values, *mc)
        }
    }
}

fn run_cli(cli: &Cli) -> Result<CommandOutput> {
    match cli.command.common().workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidInput(format!("cannot build worker pool: {e}")))?;
            pool.install(|| dispatch(&cli.command))
        }
        None => dispatch(&cli.command),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run_cli(&cli) {
        Ok(output) => {
            let mut err = std::io::stderr().lock();
            for note in &output.notes {
                let _ = writeln!(err, "note: {note}");
            }
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(output.stdout.as_bytes());
            let _ = out.flush();
            0
        }
        Err(e) => {
            let mut err = std::io::stderr().lock();
            let _ = err.write_all(report::error_json(&e).as_bytes());
            let _ = err.flush();
            e.exit_code()
        }
    };
    std::process::exit(code);
}
