//! Structured run configurations.
//!
//! A [`RunConfig`] fully determines one simulation: equation coefficients,
//! periodic domain, time stepping, solver selection, initial condition, and
//! output policy.  Configs are serialized as TOML; [`RunConfig::validate`]
//! reports violations with the offending field path so the CLI can exit
//! with a configuration error.

use crate::equation::EquationParams;
use crate::error::{Result, SolverError};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Which time stepper integrates the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Spline-Galerkin space, two-stage Gauss IRK in time.
    Hybrid,
    /// Fourier collocation with integrating-factor RK4.
    Spectral,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquationSection {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl EquationSection {
    pub fn params(&self) -> EquationParams {
        EquationParams::new(self.alpha, self.beta, self.gamma, self.delta)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSection {
    /// Half-length L of the periodic interval [-L, L].
    pub half_length: f64,
    /// Number of grid intervals N (must be even).
    pub intervals: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeSection {
    /// Time step k.
    pub step: f64,
    /// Final time T; T/k must be an integer.
    pub final_time: f64,
}

impl TimeSection {
    /// Number of steps M = T/k.
    pub fn steps(&self) -> usize {
        (self.final_time / self.step).round() as usize
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSection {
    pub scheme: Scheme,
    /// Stage-iteration stopping tolerance override (hybrid only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Stage-iteration sweep cap override (hybrid only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
}

/// How the asymmetric perturbation factor is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationMode {
    /// u -> r u.
    Multiplicative,
    /// u -> (r (tanh x + 1) + 1) u.
    Asymmetric,
}

/// Initial-condition specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialCondition {
    /// Zero initial data.
    Zero,
    /// Exact KdV solitary wave (gamma = 0) at the given speed, one copy per
    /// offset.
    KdvSoliton {
        speed: f64,
        #[serde(default = "zero_offsets")]
        offsets: Vec<f64>,
    },
    /// Exact periodic travelling waves of the nonlocal equation without the
    /// third-derivative term; one wave per (speed, offset) pair.
    BoWave {
        speeds: Vec<f64>,
        #[serde(default = "zero_offsets")]
        offsets: Vec<f64>,
    },
    /// Superposition of stored profiles, each translated to its offset and
    /// optionally rescaled.
    Profile {
        paths: Vec<PathBuf>,
        #[serde(default)]
        offsets: Vec<f64>,
        #[serde(default = "unit_scales")]
        scales: Vec<f64>,
    },
    /// Gaussian hump A exp(-(x/lambda)^2).
    Gaussian { amplitude: f64, width: f64 },
    /// A stored profile under a stability perturbation.
    Perturbed {
        path: PathBuf,
        mode: PerturbationMode,
        factor: f64,
    },
    /// Arbitrary expression in `x`.
    Expression { formula: String },
}

fn zero_offsets() -> Vec<f64> {
    vec![0.0]
}

fn unit_scales() -> Vec<f64> {
    Vec::new()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputSection {
    /// Artifact directory; created if missing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    /// Emit a snapshot every `snapshot_stride` steps (0 = endpoints only).
    #[serde(default)]
    pub snapshot_stride: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: None,
            snapshot_stride: 0,
        }
    }
}

/// Built-in forcing terms for convergence studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingKind {
    /// Source term that makes u = e^t sin(pi x) an exact solution on
    /// [-1, 1] for the configured coefficients.
    Manufactured,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub equation: EquationSection,
    pub domain: DomainSection,
    pub time: TimeSection,
    pub solver: SolverSection,
    pub initial: InitialCondition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forcing: Option<ForcingKind>,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    /// Parse a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| SolverError::Config(format!("config parse error: {e}")))
    }

    /// Read and parse a config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SolverError::Io(std::io::Error::new(e.kind(), format!("reading {}: {e}", path.display()))))?;
        let cfg = Self::from_toml(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Serialize back to TOML (used by the run manifest).
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization cannot fail")
    }

    /// Check structural invariants, reporting the offending field path.
    pub fn validate(&self) -> Result<()> {
        let err = |field: &str, msg: String| {
            Err(SolverError::Config(format!("{field}: {msg}")))
        };
        if !(self.domain.half_length > 0.0) {
            return err("domain.half_length", "must be positive".into());
        }
        if self.domain.intervals == 0 || self.domain.intervals % 2 != 0 {
            return err(
                "domain.intervals",
                format!("must be a positive even number, got {}", self.domain.intervals),
            );
        }
        if !(self.time.step > 0.0) {
            return err("time.step", "must be positive".into());
        }
        if !(self.time.final_time > 0.0) {
            return err("time.final_time", "must be positive".into());
        }
        let ratio = self.time.final_time / self.time.step;
        if (ratio - ratio.round()).abs() > 1e-8 * ratio.max(1.0) {
            return err(
                "time.final_time",
                format!("must be an integer multiple of time.step (T/k = {ratio})"),
            );
        }
        match &self.initial {
            InitialCondition::Profile {
                paths,
                offsets,
                scales,
            } => {
                if paths.is_empty() {
                    return err("initial.paths", "at least one profile required".into());
                }
                if !offsets.is_empty() && offsets.len() != paths.len() {
                    return err(
                        "initial.offsets",
                        "must match the number of profile paths".into(),
                    );
                }
                if !scales.is_empty() && scales.len() != paths.len() {
                    return err(
                        "initial.scales",
                        "must match the number of profile paths".into(),
                    );
                }
                for p in paths {
                    if !p.exists() {
                        return err("initial.paths", format!("{} does not exist", p.display()));
                    }
                }
            }
            InitialCondition::Perturbed { path, .. } => {
                if !path.exists() {
                    return err("initial.path", format!("{} does not exist", path.display()));
                }
            }
            InitialCondition::Expression { formula } => {
                let expr: meval::Expr = formula
                    .parse()
                    .map_err(|e| SolverError::Config(format!("initial.formula: {e}")))?;
                let _ = expr
                    .bind("x")
                    .map_err(|e| SolverError::Config(format!("initial.formula: {e}")))?;
            }
            InitialCondition::KdvSoliton { offsets, .. } => {
                if offsets.is_empty() {
                    return err("initial.offsets", "must not be empty".into());
                }
            }
            InitialCondition::BoWave { speeds, offsets } => {
                if speeds.is_empty() {
                    return err("initial.speeds", "must not be empty".into());
                }
                if offsets.len() != speeds.len() {
                    return err("initial.offsets", "must pair one offset per speed".into());
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_toml() -> String {
        r#"
forcing = "manufactured"

[equation]
alpha = 0.0
beta = 1.0
gamma = -1.0
delta = -0.5

[domain]
half_length = 1.0
intervals = 64

[time]
step = 0.001
final_time = 1.0

[solver]
scheme = "hybrid"

[initial]
kind = "expression"
formula = "sin(pi * x)"
"#
        .to_string()
    }

    #[test]
    fn parses_and_validates() {
        let cfg = RunConfig::from_toml(&base_toml()).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.time.steps(), 1000);
        assert_eq!(cfg.solver.scheme, Scheme::Hybrid);
        assert!(matches!(cfg.forcing, Some(ForcingKind::Manufactured)));
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig::from_toml(&base_toml()).unwrap();
        let again = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(again.domain.intervals, 64);
        assert_eq!(again.time.step, 0.001);
    }

    #[test]
    fn rejects_odd_intervals() {
        let text = base_toml().replace("intervals = 64", "intervals = 63");
        let cfg = RunConfig::from_toml(&text).unwrap();
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("domain.intervals"), "{msg}");
    }

    #[test]
    fn rejects_non_integral_step_count() {
        let text = base_toml().replace("step = 0.001", "step = 0.0007");
        let cfg = RunConfig::from_toml(&text).unwrap();
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("time.final_time"), "{msg}");
    }

    #[test]
    fn rejects_missing_profile() {
        let text = base_toml().replace(
            "kind = \"expression\"\nformula = \"sin(pi * x)\"",
            "kind = \"profile\"\npaths = [\"/nonexistent/wave.profile\"]",
        );
        let cfg = RunConfig::from_toml(&text).unwrap();
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("does not exist"), "{msg}");
    }

    #[test]
    fn rejects_bad_expression() {
        let text = base_toml().replace("sin(pi * x)", "sin(pi * x");
        let cfg = RunConfig::from_toml(&text).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn perturbation_modes_parse() {
        let text = r#"
kind = "perturbed"
path = "/tmp/x"
mode = "asymmetric"
factor = 0.05
"#;
        let ic: InitialCondition = toml::from_str(text).unwrap();
        match ic {
            InitialCondition::Perturbed { mode, factor, .. } => {
                assert_eq!(mode, PerturbationMode::Asymmetric);
                assert_eq!(factor, 0.05);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
