use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use vqnhite_core::hybrid::{HybridConfig, InitTarget};
use vqnhite_core::{EvolutionConfig, ExpectationMode, Layout, Method};

use crate::error::{BenchError, Result};

/// Where the longitudinal fields come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    Explicit { values: Vec<f64> },
    Uniform { seed: u64 },
}

impl FromStr for FieldSpec {
    type Err = BenchError;

    /// `0.1,-0.4,…` gives explicit values, `42` or `seed=42` a seeded draw.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let seed = s.strip_prefix("seed=").unwrap_or(s);
        if let Ok(seed) = seed.parse::<u64>() {
            return Ok(FieldSpec::Uniform { seed });
        }
        let values = s
            .split(',')
            .filter(|v| !v.trim().is_empty())
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| {
                BenchError::Config(format!(
                    "cannot parse fields {s:?}: expected a seed or comma-separated values"
                ))
            })?;
        Ok(FieldSpec::Explicit { values })
    }
}

/// Whether each sample redraws the fields or shares one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FieldMode {
    #[default]
    Fixed,
    PerSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Vite,
    Vqnhite,
    #[default]
    Both,
}

impl MethodChoice {
    pub fn methods(self) -> &'static [Method] {
        match self {
            MethodChoice::Vite => &[Method::Vite],
            MethodChoice::Vqnhite => &[Method::Vqnhite],
            MethodChoice::Both => &[Method::Vite, Method::Vqnhite],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeChoice {
    #[default]
    Exact,
    Hadamard,
}

impl fmt::Display for ModeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeChoice::Exact => "exact",
            ModeChoice::Hadamard => "hadamard",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n_qubits: usize,
    pub coupling: f64,
    pub fields: FieldSpec,
    pub field_mode: FieldMode,
    pub layout: Layout,
    pub depth: usize,
    pub dbeta: f64,
    pub beta_max: f64,
    pub samples: usize,
    /// Master seed; per-sample network and shot seeds derive from it.
    pub seed: u64,
    pub method: MethodChoice,
    pub init_iters: usize,
    pub learning_rate: f64,
    pub ridge: f64,
    pub mode: ModeChoice,
    pub shots: u64,
    pub init_target: InitTarget,
    /// Output directory; not persisted, so metadata does not depend on where a run was written.
    #[serde(skip, default = "default_out")]
    pub out: PathBuf,
    pub workers: usize,
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

impl Default for RunConfig {
    fn default() -> Self {
        let ev = EvolutionConfig::default();
        let hy = HybridConfig::default();
        Self {
            n_qubits: 6,
            coupling: -1.0,
            fields: FieldSpec::Uniform { seed: 0 },
            field_mode: FieldMode::Fixed,
            layout: Layout::NearestNeighbor,
            depth: 2,
            dbeta: ev.dbeta,
            beta_max: ev.beta_max,
            samples: 20,
            seed: 0,
            method: MethodChoice::Both,
            init_iters: hy.init_iters,
            learning_rate: hy.learning_rate,
            ridge: ev.ridge,
            mode: ModeChoice::Exact,
            shots: 0,
            init_target: InitTarget::Exact,
            out: default_out(),
            workers: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        if self.n_qubits == 0 || self.n_qubits > vqnhite_core::pauli::DENSE_LIMIT {
            return bad(format!(
                "n-qubits must be in 1..={}, got {}",
                vqnhite_core::pauli::DENSE_LIMIT,
                self.n_qubits
            ));
        }
        if let FieldSpec::Explicit { values } = &self.fields {
            if values.len() != self.n_qubits {
                return bad(format!(
                    "{} field values given for {} qubits",
                    values.len(),
                    self.n_qubits
                ));
            }
            if self.field_mode == FieldMode::PerSample {
                return bad("per-sample field mode needs seeded fields".into());
            }
        }
        if !self.coupling.is_finite() {
            return bad("coupling must be finite".into());
        }
        let field_seed = match self.fields {
            FieldSpec::Uniform { seed } => seed,
            FieldSpec::Explicit { .. } => 0,
        };
        if self.seed > i64::MAX as u64 || field_seed > i64::MAX as u64 {
            return bad(format!("seeds must be at most {}", i64::MAX));
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return bad(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        self.evolution(0).validate()?;
        Ok(())
    }

    pub fn expectation_mode(&self) -> ExpectationMode {
        match self.mode {
            ModeChoice::Exact => ExpectationMode::Exact,
            ModeChoice::Hadamard => ExpectationMode::Hadamard { shots: self.shots },
        }
    }

    pub fn evolution(&self, shot_seed: u64) -> EvolutionConfig {
        EvolutionConfig {
            dbeta: self.dbeta,
            beta_max: self.beta_max,
            ridge: self.ridge,
            mode: self.expectation_mode(),
            shot_seed,
            record_params: false,
        }
    }

    pub fn hybrid(&self, shot_seed: u64) -> HybridConfig {
        HybridConfig {
            evolution: self.evolution(shot_seed),
            init_iters: self.init_iters,
            learning_rate: self.learning_rate,
            init_target: self.init_target,
            widths: None,
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }
}
