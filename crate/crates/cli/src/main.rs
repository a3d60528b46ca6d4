//! `optomech`: run a JSON config or reproduce a figure preset.
//!
//! Exit codes: 0 ok, 2 validation, 3 non-convergence, 4 instability,
//! 5 numerical singularity, 1 I/O. Failures print one JSON line on stderr.

mod commands;
mod config;
mod error;
mod output;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::{Command, RunReport};
use config::RunConfig;
use error::CliError;
use presets::Preset;

#[derive(Debug, Parser)]
#[command(name = "optomech", version, about = "Three-mode optomechanical circulator simulator")]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// steady-state | stability | sweep | circulator | design-drives | compare-rwa | preset
    #[arg(long)]
    command: Option<String>,
    /// fig2 | fig3 | fig4 | fig5 | fig7
    #[arg(long)]
    preset: Option<String>,
    /// Also write a gnuplot script next to the CSVs.
    #[arg(long)]
    emit_plot_script: bool,
    /// Worker threads for frequency sweeps.
    #[arg(long)]
    jobs: Option<usize>,
}

fn execute(args: Args) -> Result<RunReport, CliError> {
    if let Some(n) = args.jobs {
        if n == 0 {
            return Err(CliError::Validation("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    }

    let wants_preset = args.preset.is_some() || args.command.as_deref() == Some("preset");
    if wants_preset {
        if args.config.is_some() {
            return Err(CliError::Validation("--preset and --config are exclusive".into()));
        }
        let name = args
            .preset
            .ok_or_else(|| CliError::Validation("preset command needs --preset <name>".into()))?;
        let preset: Preset = name.parse()?;
        return presets::run_preset(preset, &config::default_output_dir(), args.emit_plot_script);
    }

    let path = args
        .config
        .ok_or_else(|| CliError::Validation("nothing to do: pass --config or --preset".into()))?;
    let cfg = RunConfig::load(&path)?;
    let command: Command = args
        .command
        .or_else(|| cfg.command.clone())
        .ok_or_else(|| CliError::Validation("no command given and none in config".into()))?
        .parse()?;
    let out = cfg.resolve_output_dir(path.parent());
    presets::run_in(&cfg, command, &out, args.emit_plot_script)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let result = execute(Args::parse()).and_then(|report| match report.deferred {
        Some(e) => Err(e),
        None => Ok(()),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::from(e.exit_code())
        }
    }
}
