//! Command-line front end: scenario configuration, running each solution
//! route, cross-validation, and CSV emission.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rodwave::cli::{
    cmd_invert, cmd_point_mass, cmd_series, cmd_simulate, cmd_validate, parse_config,
    PointMassArgs, PointMassKind, RunSettings,
};
use rodwave::error::Error;
use rodwave::model::{BoundaryKind, Scenario};

#[derive(Parser)]
#[command(
    name = "rodwave",
    about = "Cross-validating solvers for pulse propagation in an elastic rod with massive ends",
    version
)]
struct Cli {
    /// Path to a key = value configuration file (defaults apply when absent).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's output_dir).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Boundary-coefficient convention (overrides the config).
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Deterministic operation. Always enabled; the flag is accepted for
    /// script compatibility.
    #[arg(long, global = true)]
    seedless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Paper,
    Physical,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-difference run: displacement and tension fields as CSV.
    Simulate,
    /// Numerical transform inversion of the image over the output grid.
    Invert,
    /// Closed-form series evaluation (requires boundary_mode = paper).
    Series,
    /// Run every acceptance criterion and write the validation report.
    Validate,
    /// Impulse response of a struck point mass as t,x CSV.
    PointMass(PointMassCli),
}

#[derive(Args)]
struct PointMassCli {
    /// free: struck particle; oscillator: underdamped impulse response.
    #[arg(long, value_enum, default_value = "free")]
    kind: PointMassKindArg,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 0.0)]
    damping: f64,
    #[arg(long, default_value_t = 1.0)]
    stiffness: f64,
    #[arg(long, default_value_t = 1.0)]
    magnitude_p: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    t_max: f64,
    #[arg(long, default_value_t = 201)]
    samples: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum PointMassKindArg {
    Free,
    Oscillator,
}

/// Exit statuses: 0 success, 1 gating-criterion failure, 2 configuration
/// error, 3 numerical failure.
fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Config { .. }
        | Error::InvalidParameter { .. }
        | Error::UnsupportedRegime { .. }
        | Error::UnsupportedBoundaryMode { .. }
        | Error::Io(_)
        | Error::IncompleteReport { .. } => 2,
        _ => 3,
    }
}

fn load_scenario(cli: &Cli) -> Result<(Scenario, RunSettings), Error> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read config {}: {e}", path.display())))?,
        None => String::new(),
    };
    let (mut scenario, mut settings) = parse_config(&text)?;
    if let Some(mode) = cli.mode {
        let kind = match mode {
            ModeArg::Paper => BoundaryKind::Paper,
            ModeArg::Physical => BoundaryKind::Physical,
        };
        scenario = Scenario::new(
            scenario.rod,
            scenario.impulse,
            kind,
            format!("config-{}", kind.as_str()),
        );
    }
    if let Some(dir) = &cli.output {
        settings.output_dir = dir.clone();
    }
    Ok((scenario, settings))
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let (scenario, settings) = load_scenario(cli)?;
    if let Some(warning) = scenario.rod.regime_warning() {
        eprintln!("warning: {warning}");
    }
    match &cli.command {
        Command::Simulate => {
            for path in cmd_simulate(&scenario, &settings)? {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Invert => {
            for path in cmd_invert(&scenario, &settings)? {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Series => {
            for path in cmd_series(&scenario, &settings)? {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Validate => {
            let (report, paths) = cmd_validate(&scenario, &settings)?;
            for path in &paths {
                println!("wrote {}", path.display());
            }
            for c in &report.criteria {
                println!(
                    "criterion {:>2}: {:4} {} (observed {:.3e}, threshold {:.3e})",
                    c.id,
                    c.status.as_str(),
                    c.name,
                    c.observed,
                    c.threshold
                );
            }
            if report.gating_passed() {
                Ok(0)
            } else {
                eprintln!("failed criteria: {:?}", report.failed_criteria());
                Ok(1)
            }
        }
        Command::PointMass(args) => {
            let kind = match args.kind {
                PointMassKindArg::Free => PointMassKind::Free,
                PointMassKindArg::Oscillator => PointMassKind::Oscillator,
            };
            let pm = PointMassArgs {
                kind,
                mass_m: args.mass,
                damping_b: args.damping,
                stiffness_k: args.stiffness,
                magnitude_p: args.magnitude_p,
                alpha: args.alpha,
                t_max: args.t_max,
                samples: args.samples,
            };
            for path in cmd_point_mass(&pm, &settings.output_dir)? {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
