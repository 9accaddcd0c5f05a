use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use trihelix_cli::config::{
    load_config, load_config_text, CompareConfig, CoordsConfig, DhConfig, FractalConfig,
    RotateDemoConfig, ThConfig, WaveConfig,
};
use trihelix_cli::error::CliError;
use trihelix_cli::runner;

/// Deterministic batch simulations of Triple Helix innovation dynamics:
/// rotation algebra, coordinate transforms, innovation waves, Abelian and
/// Yang-Mills communication fields, and fractal vertex trees.
#[derive(Parser)]
#[command(name = "trihelix", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override a config value by dotted path, e.g.
    /// --set evolution.steps=500 (repeatable, applied in order).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Shorthand for --set output.dir=DIR.
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
}

#[derive(Args)]
struct RotateDemoArgs {
    /// Optional run configuration (TOML); without it the table is written
    /// under out/rotate-demo.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Shorthand for --set output.dir=DIR.
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the three-component linear innovation wave.
    SimulateWave(RunArgs),
    /// Evolve the Abelian (Double Helix) communication field.
    SimulateDh(RunArgs),
    /// Evolve the non-Abelian (Triple Helix) communication field.
    SimulateTh(RunArgs),
    /// Emit the rotation-order-dependence table.
    RotateDemo(RotateDemoArgs),
    /// Actor contributions, normalization, and regime classification.
    Coords(RunArgs),
    /// Grow and export a communication-field vertex tree.
    Fractal(RunArgs),
    /// Run-and-compare harnesses: superposition and Abelian-limit residuals.
    Compare(RunArgs),
}

fn overrides(set: &[String], out: &Option<String>) -> Vec<String> {
    let mut all = set.to_vec();
    if let Some(dir) = out {
        all.push(format!("output.dir=\"{dir}\""));
    }
    all
}

fn dispatch(cli: Cli) -> Result<PathBuf, CliError> {
    match cli.command {
        Command::SimulateWave(args) => {
            let (cfg, resolved) =
                load_config::<WaveConfig>(&args.config, &overrides(&args.set, &args.out))?;
            runner::run_wave(&cfg, &resolved)
        }
        Command::SimulateDh(args) => {
            let (cfg, resolved) =
                load_config::<DhConfig>(&args.config, &overrides(&args.set, &args.out))?;
            runner::run_dh(&cfg, &resolved)
        }
        Command::SimulateTh(args) => {
            let (cfg, resolved) =
                load_config::<ThConfig>(&args.config, &overrides(&args.set, &args.out))?;
            runner::run_th(&cfg, &resolved)
        }
        Command::RotateDemo(args) => {
            let ov = overrides(&args.set, &args.out);
            let (cfg, resolved) = match &args.config {
                Some(path) => load_config::<RotateDemoConfig>(path, &ov)?,
                None => load_config_text::<RotateDemoConfig>(
                    "[output]\ndir = \"out/rotate-demo\"\n",
                    &ov,
                )?,
            };
            runner::run_rotate_demo(&cfg, &resolved)
        }
        Command::Coords(args) => {
            let (cfg, resolved) =
                load_config::<CoordsConfig>(&args.config, &overrides(&args.set, &args.out))?;
            runner::run_coords(&cfg, &resolved)
        }
        Command::Fractal(args) => {
            let (cfg, resolved) =
                load_config::<FractalConfig>(&args.config, &overrides(&args.set, &args.out))?;
            runner::run_fractal(&cfg, &resolved)
        }
        Command::Compare(args) => {
            let (cfg, resolved) =
                load_config::<CompareConfig>(&args.config, &overrides(&args.set, &args.out))?;
            runner::run_compare(&cfg, &resolved)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(dir) => {
            println!("run complete: outputs in {}", dir.display());
        }
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            std::process::exit(e.exit_code());
        }
    }
}
