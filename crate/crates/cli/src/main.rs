use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use leakscale::telemetry::{Kelvin, OperationMode};
use leakscale_cli::commands::{
    cmd_diagnose, cmd_fit, cmd_simulate, cmd_ttest, DiagnoseArgs, FitArgs, SimulateArgs, TtestArgs,
};
use leakscale_cli::config::{parse_exponent_flag, FileConfig, SimSettings, TemperatureUnit};
use leakscale_cli::error::CliError;

/// Scaling-law soft sensor for refrigerant leaks: simulate fault tests, fit
/// the temperature-mass exponent, compare configurations, diagnose telemetry.
#[derive(Parser)]
#[command(name = "leakscale", version)]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a controlled leak; write telemetry.csv and ground_truth.csv.
    Simulate(SimulateCmd),
    /// Fit the scaling exponent per operation mode; write fits.csv.
    Fit(FitCmd),
    /// Test whether two telemetry files share the same exponent per mode.
    Ttest(TtestCmd),
    /// Estimate the leak degree day by day; write leak_trace.csv.
    Diagnose(DiagnoseCmd),
}

#[derive(Args)]
struct SimulateCmd {
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    /// Integrate the rate equations instead of using the closed form.
    #[arg(long)]
    numeric: bool,

    /// Noise seed, overriding the config file.
    #[arg(long)]
    seed: Option<u64>,

    /// Temperature unit of the telemetry file.
    #[arg(long, value_parser = unit_value)]
    unit: Option<TemperatureUnit>,
}

#[derive(Args)]
struct FitCmd {
    /// Telemetry CSV to fit.
    telemetry: PathBuf,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    /// Fit daily aggregates instead of raw records.
    #[arg(long)]
    daily: bool,

    /// Reference mass in kg; defaults to the mode's first mass.
    #[arg(long, value_name = "KG")]
    m0: Option<f64>,

    /// Reference temperature in kelvin; single-mode files only.
    #[arg(long, value_name = "K")]
    t0: Option<f64>,

    /// Force the regression through the origin.
    #[arg(long)]
    no_intercept: bool,

    /// Temperature unit of the telemetry file.
    #[arg(long, value_parser = unit_value)]
    unit: Option<TemperatureUnit>,
}

#[derive(Args)]
struct TtestCmd {
    /// First telemetry CSV.
    telemetry_a: PathBuf,

    /// Second telemetry CSV.
    telemetry_b: PathBuf,

    /// Fit daily aggregates instead of raw records.
    #[arg(long)]
    daily: bool,

    /// Significance level for the rejection verdict.
    #[arg(long)]
    alpha: Option<f64>,

    /// Reference mass in kg for the first file.
    #[arg(long, value_name = "KG")]
    m0_a: Option<f64>,

    /// Reference temperature in kelvin for the first file.
    #[arg(long, value_name = "K")]
    t0_a: Option<f64>,

    /// Reference mass in kg for the second file.
    #[arg(long, value_name = "KG")]
    m0_b: Option<f64>,

    /// Reference temperature in kelvin for the second file.
    #[arg(long, value_name = "K")]
    t0_b: Option<f64>,

    /// Temperature unit of both telemetry files.
    #[arg(long, value_parser = unit_value)]
    unit: Option<TemperatureUnit>,
}

#[derive(Args)]
struct DiagnoseCmd {
    /// Telemetry CSV to diagnose.
    telemetry: PathBuf,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    /// Scaling exponent for a mode, e.g. heating=-0.0874. Repeatable.
    #[arg(long = "exponent", value_name = "MODE=C", value_parser = exponent_value)]
    exponents: Vec<(OperationMode, f64)>,

    /// Baseline and smoothing window length in days.
    #[arg(long, value_name = "DAYS")]
    window_days: Option<usize>,

    /// Alarm threshold on the leak degree.
    #[arg(long)]
    threshold: Option<f64>,

    /// Leak degree already present when the telemetry starts.
    #[arg(long, value_name = "Y0")]
    initial_leak: Option<f64>,

    /// Temperature unit of the telemetry file.
    #[arg(long, value_parser = unit_value)]
    unit: Option<TemperatureUnit>,
}

fn unit_value(s: &str) -> Result<TemperatureUnit, String> {
    s.parse()
}

fn exponent_value(s: &str) -> Result<(OperationMode, f64), String> {
    parse_exponent_flag(s)
}

fn main() -> ExitCode {
    // Exit codes are part of the interface: 0 no detection, 2 detection,
    // 1 any error. clap's default error exit of 2 would collide with the
    // detection signal, so argument errors are mapped by hand.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let uses_stderr = err.use_stderr();
            let _ = err.print();
            return if uses_stderr {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::from(2),
        Ok(false) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

/// Dispatches one subcommand; `Ok(true)` means an alarm fired.
fn run(cli: Cli) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let file_unit = file.temperature_unit.unwrap_or_default();

    match cli.command {
        Command::Simulate(cmd) => {
            let report = cmd_simulate(&SimulateArgs {
                settings: SimSettings::resolve(&file.sim, cmd.seed)?,
                numeric: cmd.numeric,
                unit: cmd.unit.unwrap_or(file_unit),
                out_dir: cmd.out,
            })?;
            println!("{report}");
            Ok(false)
        }
        Command::Fit(cmd) => {
            let report = cmd_fit(&FitArgs {
                telemetry: cmd.telemetry,
                unit: cmd.unit.unwrap_or(file_unit),
                with_intercept: !cmd.no_intercept && file.with_intercept.unwrap_or(true),
                daily: cmd.daily,
                mass0: cmd.m0,
                temp0: cmd.t0.map(Kelvin::new).transpose()?,
                out_dir: cmd.out,
            })?;
            println!("{report}");
            Ok(false)
        }
        Command::Ttest(cmd) => {
            let report = cmd_ttest(&TtestArgs {
                telemetry_a: cmd.telemetry_a,
                telemetry_b: cmd.telemetry_b,
                unit: cmd.unit.unwrap_or(file_unit),
                alpha: cmd.alpha.or(file.significance_level).unwrap_or(0.05),
                daily: cmd.daily,
                mass0_a: cmd.m0_a,
                temp0_a: cmd.t0_a.map(Kelvin::new).transpose()?,
                mass0_b: cmd.m0_b,
                temp0_b: cmd.t0_b.map(Kelvin::new).transpose()?,
            })?;
            println!("{report}");
            Ok(report.any_rejected())
        }
        Command::Diagnose(cmd) => {
            let mut exponents = file.mode_exponents()?;
            for (mode, c) in cmd.exponents {
                exponents.insert(mode, c);
            }
            let outcome = cmd_diagnose(&DiagnoseArgs {
                telemetry: cmd.telemetry,
                unit: cmd.unit.unwrap_or(file_unit),
                exponents,
                window_days: cmd.window_days.or(file.window_days).unwrap_or(7),
                threshold: cmd.threshold.or(file.threshold).unwrap_or(0.5),
                initial_leak: cmd.initial_leak.or(file.initial_leak).unwrap_or(0.0),
                out_dir: cmd.out,
            })?;
            println!("{}", outcome.report);
            Ok(outcome.report.detected.is_some())
        }
    }
}
