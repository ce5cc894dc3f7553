//! Experiment configuration: one JSON document, overridable field-by-field
//! from the command line.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use geophase_core::holonomy::LoopSpec;
use geophase_core::lambda::LambdaParams;
use serde::{Deserialize, Serialize};

use crate::output::CliError;

/// Which connection the holonomy method transports with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionKind {
    /// Doublet-projected frame connection (the default).
    #[default]
    Frame,
    /// The printed large-detuning closed forms (swapped column order).
    LargeDetuning,
    /// Diagonal Abelian surrogate; a null test for order dependence.
    Abelian,
}

/// Initial state: the dark state at the loop start, or explicit amplitudes
/// `[[re, im]; 3]` in the atomic basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, rename_all = "snake_case")]
pub enum InitialState {
    Named(NamedState),
    Amplitudes([[f64; 2]; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedState {
    Dark,
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Named(NamedState::Dark)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Full description of a composed-path experiment. Identical configs produce
/// byte-identical outputs; the seed only feeds randomized verification
/// commands, never the scan pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: LambdaParams,
    pub loop1: LoopSpec,
    pub loop2: LoopSpec,
    /// Traversal time per loop, units of 1/Ω.
    pub duration: f64,
    /// Propagator step bound, units of 1/Ω.
    pub dt: f64,
    /// Segment count for Wilson-loop discretization.
    pub wilson_steps: usize,
    pub initial_state: InitialState,
    pub connection: ConnectionKind,
    pub seed: u64,
    /// Worker threads for scans; 0 uses the rayon default.
    pub workers: usize,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            params: LambdaParams { delta: 1000.0, omega: 1.0, decay: None },
            loop1: default_loop(0.0),
            loop2: default_loop(FRAC_PI_2),
            duration: 50.0,
            dt: 1e-4,
            wilson_steps: 10_000,
            initial_state: InitialState::default(),
            connection: ConnectionKind::default(),
            seed: 42,
            workers: 0,
            output: None,
            format: OutputFormat::default(),
        }
    }
}

/// The canonical loop family: sin²-envelope in θ closing at the dark-state
/// pole, phase-shifted sinusoid in φ; the experiment pair differs by a π/2
/// phase offset.
pub fn default_loop(phase_offset: f64) -> LoopSpec {
    LoopSpec::Lissajous {
        alpha: 0.8,
        beta: 0.5,
        theta_amp: FRAC_PI_2,
        phi_amp: PI,
        phase_offset,
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::IoFailure { path: path.to_path_buf(), source })?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        LambdaParams::new(self.params.delta, self.params.omega).map_err(CliError::Core)?;
        if let Some(decay) = self.params.decay {
            if decay < 0.0 || !decay.is_finite() {
                return Err(CliError::Config("decay must be nonnegative and finite".into()));
            }
        }
        self.loop1.validate().map_err(CliError::Core)?;
        self.loop2.validate().map_err(CliError::Core)?;
        if self.duration <= 0.0 || !self.duration.is_finite() {
            return Err(CliError::Config("duration must be positive and finite".into()));
        }
        if self.dt <= 0.0 || !self.dt.is_finite() {
            return Err(CliError::Config("dt must be positive and finite".into()));
        }
        if self.wilson_steps < 8 {
            return Err(CliError::Config("wilson_steps must be at least 8".into()));
        }
        Ok(())
    }

    /// Replace α and β in both loop templates (scans sweep these).
    pub fn with_alpha_beta(&self, alpha: f64, beta: f64) -> Result<Self, CliError> {
        let mut out = self.clone();
        out.loop1 = override_alpha_beta(&self.loop1, alpha, beta)?;
        out.loop2 = override_alpha_beta(&self.loop2, alpha, beta)?;
        Ok(out)
    }
}

fn override_alpha_beta(spec: &LoopSpec, alpha: f64, beta: f64) -> Result<LoopSpec, CliError> {
    match spec {
        LoopSpec::Lissajous { theta_amp, phi_amp, phase_offset, .. } => Ok(LoopSpec::Lissajous {
            alpha,
            beta,
            theta_amp: *theta_amp,
            phi_amp: *phi_amp,
            phase_offset: *phase_offset,
        }),
        _ => Err(CliError::Config(
            "alpha/beta sweeps need lissajous loop templates".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_and_round_trips() {
        let config = ExperimentConfig::default();
        config.validate().unwrap();
        let text = serde_json::to_string_pretty(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"no_such_field": 1}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(text).is_err());
    }

    #[test]
    fn partial_configs_inherit_defaults() {
        let text = r#"{"duration": 25.0, "params": {"delta": 500.0, "omega": 1.0}}"#;
        let config: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(config.duration, 25.0);
        assert_eq!(config.params.delta, 500.0);
        assert_eq!(config.wilson_steps, 10_000);
    }

    #[test]
    fn alpha_beta_override_applies_to_both_loops() {
        let config = ExperimentConfig::default().with_alpha_beta(0.3, 0.7).unwrap();
        for spec in [&config.loop1, &config.loop2] {
            match spec {
                LoopSpec::Lissajous { alpha, beta, .. } => {
                    assert_eq!(*alpha, 0.3);
                    assert_eq!(*beta, 0.7);
                }
                other => panic!("unexpected spec {other:?}"),
            }
        }
    }

    #[test]
    fn alpha_beta_override_rejects_circles() {
        let config = ExperimentConfig {
            loop1: LoopSpec::Circle { theta0: 0.5 },
            ..ExperimentConfig::default()
        };
        assert!(config.with_alpha_beta(0.5, 0.5).is_err());
    }
}
