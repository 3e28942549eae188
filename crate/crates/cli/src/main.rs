//! `vesflex` command-line front end.
//!
//! Exit codes: 0 on success, 1 when the problem is well posed but has no
//! solution (empty flexibility set, load cap exceeded), 2 on input errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "vesflex",
    version,
    about = "Demand flexibility of HVAC loads as virtual energy storage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// TOML config; the bundled reference preset when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for CSV outputs.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate the temperature under a power profile (baseline by default).
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Power CSV `t_hours,p_kW`.
        #[arg(long)]
        power: Option<PathBuf>,
        /// Disturbance CSV `t_hours,theta_a_C,q_d_kW`.
        #[arg(long)]
        disturbance: Option<PathBuf>,
    },
    /// Quasi-steady power envelope.
    Envelope {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        disturbance: Option<PathBuf>,
        /// Random trajectories inside the envelope to check for membership.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Largest feasible sinusoid amplitude per frequency.
    Freq {
        #[command(flatten)]
        common: Common,
        /// Frequencies in cycles per hour, comma separated.
        #[arg(long, value_delimiter = ',')]
        omega_cycles: Option<Vec<f64>>,
    },
    /// Project a reference onto the flexibility set.
    Plan {
        #[command(flatten)]
        common: Common,
        /// Reference CSV `t_hours,r_ba_kW`.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        disturbance: Option<PathBuf>,
        /// two, one or inf.
        #[arg(long)]
        norm: Option<String>,
        /// Receding-horizon window length in steps.
        #[arg(long)]
        horizon_steps: Option<usize>,
    },
    /// Cooling and dehumidification demand at an air-handling unit.
    Humidity {
        #[command(flatten)]
        common: Common,
    },
    /// Check a deferrable-load profile against the temperature constraints.
    Deferrable {
        #[command(flatten)]
        common: Common,
        /// battery, bucket or bakery.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Schedule a load ensemble to track a reference exactly.
    Ensemble {
        #[command(flatten)]
        common: Common,
        /// Reference CSV `slot,deviation_units`.
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        #[arg(long)]
        max_loads: Option<usize>,
    },
    /// Battery-equivalent power and energy capacities.
    Capacity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        disturbance: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    use commands::*;
    match cli.command {
        Command::Simulate {
            common,
            power,
            disturbance,
        } => simulate(&common, power, disturbance),
        Command::Envelope {
            common,
            disturbance,
            samples,
        } => envelope(&common, disturbance, samples),
        Command::Freq {
            common,
            omega_cycles,
        } => freq(&common, omega_cycles),
        Command::Plan {
            common,
            reference,
            disturbance,
            norm,
            horizon_steps,
        } => plan(&common, reference, disturbance, norm, horizon_steps),
        Command::Humidity { common } => humidity(&common),
        Command::Deferrable { common, kind } => deferrable(&common, kind),
        Command::Ensemble {
            common,
            reference,
            max_loads,
        } => ensemble(&common, reference, max_loads),
        Command::Capacity {
            common,
            disturbance,
        } => capacity(&common, disturbance),
    }
}

/// Problems that are well posed but have no solution.
fn is_domain_failure(err: &anyhow::Error) -> bool {
    use vesflex::Error as E;
    err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<E>(),
            Some(
                E::Infeasible(_)
                    | E::EmptyEnvelope { .. }
                    | E::LoadCapExceeded { .. }
                    | E::Solver(_)
            )
        )
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_domain_failure(&err) {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
