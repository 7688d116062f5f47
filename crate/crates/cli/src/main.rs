//! dlindblad: simulate the damped harmonic oscillator with f- and
//! q-deformed dissipation on a truncated number basis.

mod commands;
mod fmt;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dlindblad_core::config::OutputFormat;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "dlindblad",
    version,
    about = "Damped harmonic oscillator with deformed dissipation",
    after_help = "Set DLINDBLAD_LOG=debug for verbose logging."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a configuration against the coefficient constraints
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Integrate the master equation and write the trajectory
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output path (defaults to the config's output block, else stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Run one trajectory per value, e.g. --sweep lambda=0.1,0.2
        #[arg(long)]
        sweep: Option<String>,
        /// Reserved; simulations are deterministic
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Integrate the closed two-moment system
    Moments {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Emit the leading-order moment curves for the real-q, phase and
    /// undeformed cases on a lambda*t grid
    Fig1 {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Initial <N>
        #[arg(long, default_value_t = 3.0)]
        n0: f64,
        /// Initial <N^2>
        #[arg(long = "n2-0", default_value_t = 9.0)]
        n2_0: f64,
        /// tau^2 magnitude (the phase curve uses its negative)
        #[arg(long = "tau-sq", default_value_t = 0.2)]
        tau_sq: f64,
        /// End of the lambda*t grid
        #[arg(long = "t-max", default_value_t = 3.0)]
        t_max: f64,
        #[arg(long, default_value_t = 301)]
        points: usize,
    },
    /// Compute the steady-state populations and diagnostics
    Steady {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in oracle cross-checks on a configuration
    Crosscheck {
        #[arg(long)]
        config: PathBuf,
        /// Seed for the sampled states
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(
        env_logger::Env::new()
            .filter("DLINDBLAD_LOG")
            .default_filter_or("warn"),
    )
    .format_timestamp(None)
    .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path with success
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    let result = match &cli.command {
        Command::Validate { config } => commands::cmd_validate(config),
        Command::Simulate {
            config,
            out,
            format,
            sweep,
            seed: _,
        } => commands::cmd_simulate(
            config,
            out.as_deref(),
            format.map(Into::into),
            sweep.as_deref(),
        ),
        Command::Moments {
            config,
            out,
            format,
        } => commands::cmd_moments(config, out.as_deref(), format.map(Into::into)),
        Command::Fig1 {
            out,
            n0,
            n2_0,
            tau_sq,
            t_max,
            points,
        } => commands::cmd_fig1(out.as_deref(), *n0, *n2_0, *tau_sq, *t_max, *points),
        Command::Steady { config, out } => commands::cmd_steady(config, out.as_deref()),
        Command::Crosscheck { config, seed } => commands::cmd_crosscheck(config, *seed),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
