use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use duopoly_core::cli::{run_command, Command, SweepPreset};
use duopoly_core::config::load_config;

#[derive(Parser)]
#[command(
    name = "duopoly",
    version,
    about = "Cournot duopoly with tax evasion and delayed reaction"
)]
struct Cli {
    /// JSON model configuration
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form equilibrium, feasibility and profits (JSON)
    Equilibrium,
    /// Jacobian, characteristic polynomial and Routh-Hurwitz test without delay (JSON)
    Stability,
    /// Crossing frequency, critical delay and delay-stability class (JSON)
    Hopf,
    /// Integrate the (delayed) dynamics and write the trajectory (CSV)
    Simulate {
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Equilibrium declarations and profits over a penalty-scale grid (CSV)
    Sweep {
        #[arg(long, default_value = "s")]
        param: String,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        /// Number of grid points, both ends included
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Section2,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Equilibrium => Command::Equilibrium,
        Cmd::Stability => Command::Stability,
        Cmd::Hopf => Command::Hopf,
        Cmd::Simulate {
            tau,
            step,
            t_end,
            output,
        } => Command::Simulate {
            tau,
            step,
            t_end,
            output,
        },
        Cmd::Sweep {
            param,
            from,
            to,
            steps,
            preset,
            output,
        } => Command::Sweep {
            param,
            from,
            to,
            steps,
            preset: preset.map(|Preset::Section2| SweepPreset::Section2),
            output,
        },
    };

    let result = cli
        .config
        .as_deref()
        .map(load_config)
        .transpose()
        .and_then(|config| {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            run_command(&command, config.as_ref(), &mut out)?;
            out.flush()?;
            Ok(())
        });

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
