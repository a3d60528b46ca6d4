//! Figure presets. Each writes a `config.json` next to its CSVs so the run
//! can be repeated from the file alone.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::commands::{self, Command, RunReport};
use crate::config::{Angle, GridSpec, Mode, RunConfig};
use crate::error::CliError;
use crate::output;

pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig7,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Fig2, Preset::Fig3, Preset::Fig4, Preset::Fig5, Preset::Fig7];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig7 => "fig7",
        }
    }
}

impl FromStr for Preset {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CliError::Validation(format!("unknown preset `{s}`")))
    }
}

fn angles(texts: &[&str]) -> Vec<Angle> {
    texts.iter().map(|t| Angle::parse(t).expect("literal angle")).collect()
}

/// Δ′ = ω_m = 10, J = |G_a| = |G_b| = 1/2, all dampings 1.
fn base(command: Command, theta: &[&str]) -> RunConfig {
    let params: BTreeMap<String, Angle> = [
        ("delta_a_eff", 10.0),
        ("delta_b_eff", 10.0),
        ("omega_m", 10.0),
        ("J", 0.5),
        ("G_a", 0.5),
        ("G_b", 0.5),
        ("gamma_a", 1.0),
        ("gamma_b", 1.0),
        ("gamma_m", 1.0),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), Angle::from_radians(v)))
    .collect();
    RunConfig {
        mode: Mode::Effective,
        params,
        grid: GridSpec {
            min: 8.0,
            max: 12.0,
            count: 801,
        },
        theta: angles(theta),
        output_dir: Some(PathBuf::from(".")),
        command: Some(command.name().into()),
    }
}

fn with(mut config: RunConfig, overrides: &[(&str, f64)]) -> RunConfig {
    for (k, v) in overrides {
        config.params.insert(k.to_string(), Angle::from_radians(*v));
    }
    config
}

/// `(subdirectory, config)` pairs making up a preset.
pub fn configs(preset: Preset) -> Vec<(String, RunConfig)> {
    match preset {
        Preset::Fig2 => vec![(
            String::new(),
            base(
                Command::Sweep,
                &["0", "pi/4", "pi/2", "3pi/4", "pi", "5pi/4", "3pi/2", "7pi/4"],
            ),
        )],
        Preset::Fig3 => [0.05, 0.25, 0.5, 1.0]
            .into_iter()
            .map(|g| {
                let c = with(base(Command::Sweep, &["pi/2"]), &[("G_a", g), ("G_b", g)]);
                (format!("G_a_{g}"), c)
            })
            .collect(),
        Preset::Fig4 => [0.01, 0.2, 1.0, 2.0]
            .into_iter()
            .map(|g| {
                let c = with(base(Command::Sweep, &["pi/2"]), &[("gamma_m", g)]);
                (format!("gamma_m_{g}"), c)
            })
            .collect(),
        Preset::Fig5 => vec![(String::new(), base(Command::Circulator, &["pi/2", "3pi/2"]))],
        Preset::Fig7 => vec![(String::new(), base(Command::Sweep, &["pi/2", "3pi/2"]))],
    }
}

/// Runs a config's own command in `dir`, optionally adding a plot script.
pub fn run_in(config: &RunConfig, command: Command, dir: &Path, plot: bool) -> Result<RunReport, CliError> {
    let report = commands::run(config, command, dir)?;
    if plot && !report.written.is_empty() {
        let path = dir.join("plot.gp");
        output::write_file(&path, &output::plot_script(dir, &report.written))?;
        println!("wrote {}", path.display());
    }
    Ok(report)
}

/// Writes every config of `preset` under `root/<name>/` and runs it.
pub fn run_preset(preset: Preset, root: &Path, plot: bool) -> Result<RunReport, CliError> {
    let mut all = RunReport::default();
    for (sub, config) in configs(preset) {
        let dir = root.join(preset.name()).join(sub);
        let path = dir.join(CONFIG_FILE);
        output::write_file(&path, &config.to_json())?;
        println!("wrote {}", path.display());
        let command: Command = config.command.as_deref().expect("preset command").parse()?;
        let report = run_in(&config, command, &dir, plot)?;
        all.written.extend(report.written);
        if let Some(e) = report.deferred {
            all.defer(e);
        }
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_configs_validate_and_round_trip() {
        for preset in Preset::ALL {
            for (_, config) in configs(preset) {
                let again = RunConfig::from_json(&config.to_json()).unwrap();
                assert_eq!(again, config);
            }
        }
        assert_eq!(configs(Preset::Fig2)[0].1.theta.len(), 8);
        assert_eq!(configs(Preset::Fig3).len(), 4);
        assert_eq!(configs(Preset::Fig4)[0].0, "gamma_m_0.01");
    }
}
