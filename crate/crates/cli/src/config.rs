//! JSON run configuration and command-line overrides.

use std::path::{Path, PathBuf};

use boltzmann_core::kepler::{cartesian_from_elements, OrbitalElements};
use boltzmann_core::perturbed::IntegratorConfig;
use boltzmann_core::reference::{exact_reference, gamma_reference};
use boltzmann_core::{CartesianState, Params};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[value(name = "exact-g0")]
    #[serde(rename = "exact-g0")]
    ExactG0,
    Perturbed,
    Gamma,
    Section,
    Region,
    Verify,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::ExactG0 => "exact-g0",
            Mode::Perturbed => "perturbed",
            Mode::Gamma => "gamma",
            Mode::Section => "section",
            Mode::Region => "region",
            Mode::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceOrbit {
    /// `A = -1/2`, used for conservation and oracle checks.
    Exact,
    /// `A = -1/6` with `hα < R < L²`, used for `γ`.
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Initial {
    Cartesian {
        x: f64,
        y: f64,
        px: f64,
        py: f64,
    },
    Elements {
        twice_energy: f64,
        angular_momentum: f64,
        theta0: f64,
        #[serde(default)]
        true_anomaly: f64,
    },
    Reference(ReferenceOrbit),
}

impl Initial {
    pub fn state(&self, p: &Params) -> CliResult<CartesianState> {
        match *self {
            Initial::Cartesian { x, y, px, py } => Ok(CartesianState::new(x, y, px, py)),
            Initial::Elements {
                twice_energy,
                angular_momentum,
                theta0,
                true_anomaly,
            } => {
                let el = OrbitalElements::new(twice_energy, angular_momentum, theta0, p.alpha)
                    .map_err(|e| CliError::Config(format!("initial.elements: {e}")))?;
                cartesian_from_elements(&el, true_anomaly, p)
                    .map_err(|e| CliError::Config(format!("initial.elements: {e}")))
            }
            Initial::Reference(ReferenceOrbit::Exact) => Ok(exact_reference().1),
            Initial::Reference(ReferenceOrbit::Gamma) => Ok(gamma_reference().1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ensemble {
    pub count: usize,
    pub seed: Option<u64>,
    pub twice_energy: f64,
}

/// Optional overrides; `None` keeps the default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_step: Option<f64>,
    pub event_tol: Option<f64>,
    pub conservation: Option<f64>,
    pub identity: Option<f64>,
    pub lemma: Option<f64>,
    pub oracle_position: Option<f64>,
    pub oracle_arc: Option<f64>,
    pub energy_arc: Option<f64>,
    pub drift_min: Option<f64>,
    pub gamma_spread: Option<f64>,
    pub anisochrony_factor: Option<f64>,
    pub kepler_residual: Option<f64>,
}

/// Tolerances with defaults filled in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveTolerances {
    pub integrator: IntegratorConfig,
    pub conservation: f64,
    pub identity: f64,
    pub lemma: f64,
    pub oracle_position: f64,
    pub oracle_arc: f64,
    pub energy_arc: f64,
    pub drift_min: f64,
    pub gamma_spread: f64,
    pub anisochrony_factor: f64,
    pub kepler_residual: f64,
}

impl Tolerances {
    pub fn effective(&self) -> EffectiveTolerances {
        let d = IntegratorConfig::default();
        EffectiveTolerances {
            integrator: IntegratorConfig {
                rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
                abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
                max_step: self.max_step.unwrap_or(d.max_step),
                event_tol: self.event_tol.unwrap_or(d.event_tol),
                ..d
            },
            conservation: self.conservation.unwrap_or(1e-9),
            identity: self.identity.unwrap_or(1e-10),
            lemma: self.lemma.unwrap_or(1e-10),
            oracle_position: self.oracle_position.unwrap_or(1e-6),
            oracle_arc: self.oracle_arc.unwrap_or(1e-8),
            energy_arc: self.energy_arc.unwrap_or(1e-10),
            drift_min: self.drift_min.unwrap_or(1e-4),
            gamma_spread: self.gamma_spread.unwrap_or(5e-6),
            anisochrony_factor: self.anisochrony_factor.unwrap_or(10.0),
            kepler_residual: self.kepler_residual.unwrap_or(1e-13),
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub initial: Option<Initial>,
    #[serde(default)]
    pub n_collisions: usize,
    pub mode: Mode,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub ensemble: Option<Ensemble>,
    /// Values of `g` for a section sweep; overrides `params.g` in section mode.
    #[serde(default)]
    pub g_sweep: Option<Vec<f64>>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// Built-in reference configuration for a mode.
    pub fn builtin(mode: Mode) -> Self {
        let base = Self {
            params: Params::default(),
            initial: None,
            n_collisions: 0,
            mode,
            tolerances: Tolerances::default(),
            ensemble: None,
            g_sweep: None,
            output_dir: default_output_dir(),
        };
        match mode {
            Mode::ExactG0 | Mode::Perturbed => Self {
                initial: Some(Initial::Reference(ReferenceOrbit::Exact)),
                n_collisions: 100,
                ..base
            },
            Mode::Gamma => Self {
                initial: Some(Initial::Reference(ReferenceOrbit::Gamma)),
                n_collisions: 1000,
                ..base
            },
            Mode::Section => Self {
                n_collisions: 200,
                ensemble: Some(Ensemble {
                    count: 8,
                    seed: Some(1),
                    twice_energy: -0.5,
                }),
                ..base
            },
            Mode::Region => Self {
                initial: Some(Initial::Reference(ReferenceOrbit::Exact)),
                ..base
            },
            Mode::Verify => base,
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("{path}: {}", e.into_inner()))
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.params
            .validate()
            .map_err(|e| CliError::Config(format!("params: {e}")))?;
        let needs_initial = matches!(
            self.mode,
            Mode::ExactG0 | Mode::Perturbed | Mode::Gamma | Mode::Region
        );
        if needs_initial && self.initial.is_none() {
            return Err(CliError::Config(format!(
                "initial: required in mode {}",
                self.mode.name()
            )));
        }
        if matches!(self.mode, Mode::ExactG0 | Mode::Gamma) && self.params.g != 0.0 {
            return Err(CliError::Config(format!(
                "params.g: mode {} requires g = 0, got {}",
                self.mode.name(),
                self.params.g
            )));
        }
        if self.mode == Mode::Section && self.ensemble.is_none() {
            return Err(CliError::Config(
                "ensemble: required in mode section".into(),
            ));
        }
        if let Some(ens) = &self.ensemble {
            if ens.seed.is_none() {
                return Err(CliError::Config(
                    "ensemble.seed: a seed is required for reproducible ensembles".into(),
                ));
            }
            if !(ens.twice_energy < 0.0) {
                return Err(CliError::Config(format!(
                    "ensemble.twice_energy: must be negative, got {}",
                    ens.twice_energy
                )));
            }
        }
        if let Some(sweep) = &self.g_sweep {
            if let Some((i, g)) = sweep
                .iter()
                .enumerate()
                .find(|(_, g)| !(g.is_finite() && **g >= 0.0))
            {
                return Err(CliError::Config(format!(
                    "g_sweep[{i}]: must be finite and non-negative, got {g}"
                )));
            }
        }
        self.tolerances
            .effective()
            .integrator
            .validate()
            .map_err(|e| CliError::Config(format!("tolerances: {e}")))?;
        Ok(())
    }

    pub fn initial_state(&self) -> CliResult<CartesianState> {
        let init = self.initial.ok_or_else(|| {
            CliError::Config(format!("initial: required in mode {}", self.mode.name()))
        })?;
        init.state(&self.params)
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub n: Option<usize>,
    pub g: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> CliResult<()> {
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
        if let Some(n) = self.n {
            cfg.n_collisions = n;
        }
        if let Some(g) = self.g {
            cfg.params.g = g;
        }
        if let Some(seed) = self.seed {
            match cfg.ensemble.as_mut() {
                Some(ens) => ens.seed = Some(seed),
                None => {
                    return Err(CliError::Config(
                        "--seed: the configuration has no ensemble".into(),
                    ))
                }
            }
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config_with_defaults() {
        let cfg = RunConfig::from_json(
            r#"{"mode": "exact-g0", "initial": {"reference": "exact"}, "n_collisions": 5}"#,
        )
        .unwrap();
        assert_eq!(cfg.params, Params::default());
        assert_eq!(cfg.n_collisions, 5);
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
        cfg.validate().unwrap();
        assert_eq!(cfg.tolerances.effective().conservation, 1e-9);
    }

    #[test]
    fn errors_carry_field_paths() {
        let err =
            RunConfig::from_json(r#"{"mode": "gamma", "params": {"alpha": "one"}}"#).unwrap_err();
        assert!(err.to_string().contains("params.alpha"), "{err}");
        let err = RunConfig::from_json(r#"{"mode": "gamma", "n_collisions": -3}"#).unwrap_err();
        assert!(err.to_string().contains("n_collisions"), "{err}");
        let err = RunConfig::from_json(r#"{"mode": "flying"}"#).unwrap_err();
        assert!(err.to_string().contains("mode"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn mode_requirements_are_checked() {
        let mut cfg = RunConfig::builtin(Mode::Section);
        cfg.ensemble.as_mut().unwrap().seed = None;
        assert!(cfg
            .validate()
            .unwrap_err()
            .to_string()
            .contains("ensemble.seed"));
        let mut cfg = RunConfig::builtin(Mode::Gamma);
        cfg.params.g = 0.1;
        assert!(cfg.validate().unwrap_err().to_string().contains("params.g"));
        let mut cfg = RunConfig::builtin(Mode::ExactG0);
        cfg.initial = None;
        assert!(cfg.validate().is_err());
        for mode in [
            Mode::ExactG0,
            Mode::Perturbed,
            Mode::Gamma,
            Mode::Section,
            Mode::Region,
            Mode::Verify,
        ] {
            RunConfig::builtin(mode).validate().unwrap();
        }
    }

    #[test]
    fn overrides_take_precedence() {
        let mut cfg = RunConfig::builtin(Mode::Section);
        let ov = Overrides {
            n: Some(7),
            g: Some(0.01),
            seed: Some(99),
            out: Some("x".into()),
            mode: None,
        };
        ov.apply(&mut cfg).unwrap();
        assert_eq!(
            (cfg.n_collisions, cfg.params.g, cfg.ensemble.unwrap().seed),
            (7, 0.01, Some(99))
        );
        let mut plain = RunConfig::builtin(Mode::ExactG0);
        assert!(Overrides {
            seed: Some(1),
            ..Default::default()
        }
        .apply(&mut plain)
        .is_err());
    }

    #[test]
    fn elements_initial_condition() {
        let cfg = RunConfig::from_json(
            r#"{"mode": "exact-g0", "initial": {"elements": {"twice_energy": -0.5, "angular_momentum": 0.6, "theta0": 1.0}}}"#,
        )
        .unwrap();
        let s = cfg.initial_state().unwrap();
        assert!((s.twice_energy(&cfg.params) + 0.5).abs() < 1e-14);
        assert!((s.angular_momentum() - 0.6).abs() < 1e-14);
    }
}
