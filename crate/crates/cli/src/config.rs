//! Run configuration: one JSON document per run.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use optomech::{EffectiveParams, SystemParams};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::CliError;

pub const OUTPUT_DIR_ENV: &str = "OPTOMECH_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Raw drives, solved through the steady state.
    Physical,
    /// Δ′, |G| and θ given directly.
    Effective,
}

/// An angle given either as radians or as a string `k·π/n`
/// (`"pi/2"`, `"3pi/4"`, `"-pi"`, `"2*pi/3"`).
#[derive(Debug, Clone, PartialEq)]
pub struct Angle {
    pub radians: f64,
    text: Option<String>,
}

impl Angle {
    pub fn from_radians(radians: f64) -> Self {
        Self { radians, text: None }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let lower = compact.to_ascii_lowercase();
        let radians = match lower.find("pi") {
            None => lower.parse::<f64>().map_err(|_| format!("cannot parse angle `{s}`"))?,
            Some(at) => {
                let head = lower[..at].trim_end_matches('*');
                let tail = &lower[at + 2..];
                let k = match head {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    h => h.parse::<f64>().map_err(|_| format!("bad multiplier in angle `{s}`"))?,
                };
                let n = match tail {
                    "" => 1.0,
                    t => t
                        .strip_prefix('/')
                        .and_then(|d| d.parse::<f64>().ok())
                        .filter(|d| *d != 0.0)
                        .ok_or_else(|| format!("bad divisor in angle `{s}`"))?,
                };
                k * PI / n
            }
        };
        if !radians.is_finite() {
            return Err(format!("angle `{s}` is not finite"));
        }
        Ok(Self {
            radians,
            text: Some(compact),
        })
    }

    /// File-name friendly label.
    pub fn label(&self) -> String {
        match &self.text {
            Some(t) => t.replace('/', "_").replace('*', ""),
            None => format!("{}", self.radians),
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.text {
            Some(t) => s.serialize_str(t),
            None => s.serialize_f64(self.radians),
        }
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct AngleVisitor;
        impl Visitor<'_> for AngleVisitor {
            type Value = Angle;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number of radians or a string like \"3pi/4\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle::from_radians(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle::from_radians(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                Ok(Angle::from_radians(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                Angle::parse(v).map_err(E::custom)
            }
        }
        d.deserialize_any(AngleVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Flat map of rate-unit numbers; angles may be written as `k·π/n` strings.
    pub params: BTreeMap<String, Angle>,
    pub grid: GridSpec,
    #[serde(default)]
    pub theta: Vec<Angle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Command run when `--command` is not given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
}

const EFFECTIVE_KEYS: [&str; 9] = [
    "delta_a_eff",
    "delta_b_eff",
    "omega_m",
    "J",
    "G_a",
    "G_b",
    "gamma_a",
    "gamma_b",
    "gamma_m",
];

const PHYSICAL_KEYS: [&str; 13] = [
    "delta_a", "delta_b", "omega_m", "J", "g_a", "g_b", "gamma_a", "gamma_b", "gamma_m", "eps_a", "eps_b", "phi_a",
    "phi_b",
];

const PHYSICAL_OPTIONAL: [&str; 1] = ["target_G"];

/// One linear model to analyse, tagged by the phase it was built for.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub label: String,
    pub eff: EffectiveParams,
    pub params: SystemParams,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises") + "\n"
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let (required, optional): (&[&str], &[&str]) = match self.mode {
            Mode::Effective => (&EFFECTIVE_KEYS, &[]),
            Mode::Physical => (&PHYSICAL_KEYS, &PHYSICAL_OPTIONAL),
        };
        for key in self.params.keys() {
            if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
                return Err(CliError::Validation(format!(
                    "parameter `{key}` does not belong to {:?} mode",
                    self.mode
                )));
            }
        }
        for key in required {
            if !self.params.contains_key(*key) {
                return Err(CliError::Validation(format!("missing parameter `{key}`")));
            }
        }
        if self.grid.count == 0 {
            return Err(CliError::Validation("grid count must be at least 1".into()));
        }
        optomech::uniform_grid(self.grid.min, self.grid.max, self.grid.count)?;
        match self.mode {
            Mode::Physical => self.system_params()?.validate()?,
            Mode::Effective => {
                for spec in self.effective_models_for(&[Angle::from_radians(0.0)]) {
                    spec.params.validate()?;
                }
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> f64 {
        self.params[key].radians
    }

    pub fn grid(&self) -> Vec<f64> {
        optomech::uniform_grid(self.grid.min, self.grid.max, self.grid.count).expect("validated grid")
    }

    /// Physical-mode parameters.
    pub fn system_params(&self) -> Result<SystemParams, CliError> {
        if self.mode != Mode::Physical {
            return Err(CliError::Validation("command needs physical mode".into()));
        }
        Ok(SystemParams {
            delta_a: self.get("delta_a"),
            delta_b: self.get("delta_b"),
            omega_m: self.get("omega_m"),
            j: self.get("J"),
            g_a: self.get("g_a"),
            g_b: self.get("g_b"),
            gamma_a: self.get("gamma_a"),
            gamma_b: self.get("gamma_b"),
            gamma_m: self.get("gamma_m"),
            eps_a: self.get("eps_a"),
            eps_b: self.get("eps_b"),
            phi_a: self.get("phi_a"),
            phi_b: self.get("phi_b"),
        })
    }

    pub fn target_coupling(&self) -> Option<f64> {
        self.params.get("target_G").map(|a| a.radians)
    }

    /// Effective-mode models, one per angle: `G_a = |G_a|`, `G_b = |G_b| e^{iθ}`.
    pub fn effective_models_for(&self, thetas: &[Angle]) -> Vec<ModelSpec> {
        let params = SystemParams {
            delta_a: self.get("delta_a_eff"),
            delta_b: self.get("delta_b_eff"),
            omega_m: self.get("omega_m"),
            j: self.get("J"),
            gamma_a: self.get("gamma_a"),
            gamma_b: self.get("gamma_b"),
            gamma_m: self.get("gamma_m"),
            ..SystemParams::default()
        };
        thetas
            .iter()
            .map(|theta| ModelSpec {
                label: theta.label(),
                eff: EffectiveParams::with_phase(
                    self.get("delta_a_eff"),
                    self.get("delta_b_eff"),
                    self.get("G_a"),
                    self.get("G_b"),
                    theta.radians,
                ),
                params,
            })
            .collect()
    }

    pub fn effective_models(&self) -> Result<Vec<ModelSpec>, CliError> {
        if self.theta.is_empty() {
            return Err(CliError::Validation("effective mode needs at least one theta".into()));
        }
        Ok(self.effective_models_for(&self.theta))
    }

    /// Relative output directories resolve against `base` (the config's directory).
    pub fn resolve_output_dir(&self, base: Option<&Path>) -> PathBuf {
        let dir = self.output_dir.clone().unwrap_or_else(default_output_dir);
        let dir: PathBuf = dir
            .components()
            .filter(|c| !matches!(c, std::path::Component::CurDir))
            .collect();
        match base {
            Some(b) if dir.is_relative() => b.join(dir),
            _ if dir.as_os_str().is_empty() => PathBuf::from("."),
            _ => dir,
        }
    }
}

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn parses_pi_fractions() {
        let cases = [
            ("pi/2", FRAC_PI_2),
            ("3pi/4", 0.75 * PI),
            ("3*pi/4", 0.75 * PI),
            ("-pi/2", -FRAC_PI_2),
            ("pi", PI),
            ("2pi", 2.0 * PI),
            ("0", 0.0),
            ("1.25", 1.25),
            (" 7 pi / 4 ", 1.75 * PI),
        ];
        for (text, want) in cases {
            let got = Angle::parse(text).unwrap().radians;
            assert!((got - want).abs() < 1e-15, "{text}: {got}");
        }
        for bad in ["pi/0", "xpi", "pi/", "half", "pi2"] {
            assert!(Angle::parse(bad).is_err(), "{bad}");
        }
        assert_eq!(Angle::parse("3pi/2").unwrap().label(), "3pi_2");
    }

    fn effective_json(extra: &str) -> String {
        format!(
            r#"{{"mode":"effective","params":{{"delta_a_eff":10,"delta_b_eff":10,"omega_m":10,"J":0.5,
            "G_a":0.5,"G_b":0.5,"gamma_a":1,"gamma_b":1,"gamma_m":1{extra}}},
            "grid":{{"min":8,"max":12,"count":5}},"theta":["pi/2", 0.25]}}"#
        )
    }

    #[test]
    fn loads_effective_config() {
        let config = RunConfig::from_json(&effective_json("")).unwrap();
        let models = config.effective_models().unwrap();
        assert_eq!(models.len(), 2);
        assert_eq!(models[0].label, "pi_2");
        assert!((models[0].eff.theta - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(config.grid(), vec![8.0, 9.0, 10.0, 11.0, 12.0]);
        let again = RunConfig::from_json(&config.to_json()).unwrap();
        assert_eq!(again, config);
    }

    #[test]
    fn rejects_mismatched_parameter_block() {
        let err = RunConfig::from_json(&effective_json(r#","eps_a":3"#)).unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
        let missing = effective_json("").replace(r#""J":0.5,"#, "");
        assert!(RunConfig::from_json(&missing).is_err());
    }

    #[test]
    fn rejects_empty_grid() {
        let text = effective_json("").replace(r#""count":5"#, r#""count":0"#);
        assert!(matches!(RunConfig::from_json(&text), Err(CliError::Validation(_))));
    }

    #[test]
    fn rejects_nonpositive_damping() {
        let text = effective_json("").replace(r#""gamma_b":1"#, r#""gamma_b":0"#);
        assert!(matches!(RunConfig::from_json(&text), Err(CliError::Validation(_))));
    }
}
