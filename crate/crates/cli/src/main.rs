use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use litsim::output::Manifest;
use litsim::run::{apply_overrides, run_scenario, write_report, Overrides, RunError};
use litsim::scenario::{parse_scenario, RunSpec, Scenario};

/// Runs open-system scenarios under interchangeable monitoring strategies.
///
/// Exit codes: 0 success, 1 i/o error, 2 configuration error, 3 numerical
/// failure.
#[derive(Parser)]
#[command(name = "litsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (JSON). Optional for fig1.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the scenario's `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for trajectory ensembles.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Time step (upper bound) for the integration grid.
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the master equation.
    Evolve,
    /// Energy flux of the monitored strategy and its correction.
    Flux,
    /// Ergotropy table over |alpha|, or along the evolution.
    Ergotropy,
    /// Quantum-jump ensemble compared against the master equation.
    Trajectories,
    /// Grid search over the qubit transformation family.
    Optimize,
    /// Relaxation of a thermal qubit seen through four strategies.
    Fig1,
    /// Check that two strategies generate the same dynamics.
    LitCheck,
    /// Re-run the scenario recorded in a manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Flux => "flux",
            Command::Ergotropy => "ergotropy",
            Command::Trajectories => "trajectories",
            Command::Optimize => "optimize",
            Command::Fig1 => "fig1",
            Command::LitCheck => "lit-check",
            Command::Replay { .. } => "replay",
        }
    }
}

const DEFAULT_OUT: &str = "litsim-out";

fn read(path: &Path) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))
}

fn load(cli: &Cli) -> Result<Scenario, RunError> {
    let scenario = match (&cli.command, &cli.config) {
        (Command::Replay { manifest }, _) => {
            let text = read(manifest)?;
            let de = &mut serde_json::Deserializer::from_str(&text);
            let m: Manifest = serde_path_to_error::deserialize(de)
                .map_err(|e| RunError::Config(format!("{}: {}: {}", manifest.display(), e.path(), e.inner())))?;
            let scenario = parse_scenario(&serde_json::to_string(&m.scenario).expect("serializable"))?;
            if scenario.run.command() != m.command {
                return Err(RunError::Config(format!(
                    "manifest command `{}` does not match its scenario `{}`",
                    m.command,
                    scenario.run.command()
                )));
            }
            scenario
        }
        (_, Some(path)) => {
            parse_scenario(&read(path)?).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?
        }
        (Command::Fig1, None) => parse_scenario(r#"{"run": {"kind": "fig1"}}"#)?,
        (c, None) => return Err(RunError::Config(format!("`{}` needs --config", c.name()))),
    };
    if !matches!(cli.command, Command::Replay { .. }) && scenario.run.command() != cli.command.name() {
        return Err(RunError::Config(format!(
            "the scenario describes a `{}` run but `{}` was requested",
            scenario.run.command(),
            cli.command.name()
        )));
    }
    Ok(scenario)
}

fn execute(cli: &Cli) -> Result<(), RunError> {
    let mut scenario = load(cli)?;
    apply_overrides(
        &mut scenario,
        Overrides {
            seed: cli.seed,
            dt: cli.dt,
        },
    )?;
    let dir = cli
        .out
        .clone()
        .or_else(|| scenario.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let report = run_scenario(&scenario)?;
    let manifest = write_report(&dir, &scenario, &report)?;
    if !cli.quiet {
        println!(
            "{}: wrote {} to {}",
            manifest.command,
            manifest.outputs.join(", "),
            dir.display()
        );
        for (k, v) in &manifest.summary {
            println!("  {k}: {v}");
        }
        if let RunSpec::LitCheck { .. } = scenario.run {
            let invariant = manifest
                .summary
                .get("invariant")
                .and_then(|v| v.as_bool())
                .unwrap_or(false);
            println!("{}", if invariant { "invariant" } else { "NOT invariant" });
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
