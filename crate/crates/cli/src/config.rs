//! Run configuration: a JSON file plus command-line overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

fn default_samples() -> u64 {
    10_000
}

/// Default finite-difference step sizes; safely inside the simplex for
/// leave-one-out directions at any N >= 2.
pub const DEFAULT_FD_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum NormPairName {
    #[serde(rename = "tv-tv")]
    TvTv,
    #[serde(rename = "tv-linf")]
    TvLinf,
    #[serde(rename = "w2-tv")]
    W2Tv,
    #[serde(rename = "w2-linf")]
    W2Linf,
}

impl NormPairName {
    pub fn as_str(self) -> &'static str {
        match self {
            NormPairName::TvTv => "tv-tv",
            NormPairName::TvLinf => "tv-linf",
            NormPairName::W2Tv => "w2-tv",
            NormPairName::W2Linf => "w2-linf",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "tv-tv" => Ok(NormPairName::TvTv),
            "tv-linf" => Ok(NormPairName::TvLinf),
            "w2-tv" => Ok(NormPairName::W2Tv),
            "w2-linf" => Ok(NormPairName::W2Linf),
            other => Err(CliError::Validation(format!(
                "unknown norm pair `{other}` (expected tv-tv, tv-linf, w2-tv, or w2-linf)"
            ))),
        }
    }

    /// Sobolev-input pairs need the metric graph.
    pub fn needs_graph(self) -> bool {
        matches!(self, NormPairName::W2Tv | NormPairName::W2Linf)
    }
}

/// Which leave-one-out removals to audit.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum LooIndices {
    Keyword(String),
    List(Vec<usize>),
}

impl Default for LooIndices {
    fn default() -> Self {
        LooIndices::Keyword("all".into())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub risk_path: PathBuf,
    pub data_path: PathBuf,
    #[serde(default)]
    pub graph_path: Option<PathBuf>,
    pub beta: f64,
    pub norm_pair: NormPairName,
    #[serde(default)]
    pub loo_indices: LooIndices,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub fd_steps: Option<Vec<f64>>,
}

impl AuditConfig {
    /// Reads a config file; relative input paths are resolved against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::InputFormat(format!("{}: {e}", path.display())))?;
        let mut config: AuditConfig = serde_json::from_str(&text).map_err(|e| {
            CliError::InputFormat(format!("{}:{}: {e}", path.display(), e.line()))
        })?;
        if let Some(dir) = path.parent() {
            config.risk_path = resolve(dir, &config.risk_path);
            config.data_path = resolve(dir, &config.data_path);
            config.graph_path = config.graph_path.map(|p| resolve(dir, &p));
            config.output_path = config.output_path.map(|p| resolve(dir, &p));
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(CliError::Validation(format!(
                "beta must be positive and finite, got {}",
                self.beta
            )));
        }
        if self.samples == 0 {
            return Err(CliError::Validation("samples must be at least 1".into()));
        }
        if self.norm_pair.needs_graph() && self.graph_path.is_none() {
            return Err(CliError::Validation(format!(
                "norm pair {} requires graph_path",
                self.norm_pair.as_str()
            )));
        }
        if let LooIndices::Keyword(word) = &self.loo_indices {
            if word != "all" {
                return Err(CliError::Validation(format!(
                    "loo_indices must be \"all\" or a list of indices, got \"{word}\""
                )));
            }
        }
        if let Some(steps) = &self.fd_steps {
            if steps.is_empty() {
                return Err(CliError::Validation("fd_steps must not be empty".into()));
            }
            for &h in steps {
                if !(h.is_finite() && h > 0.0) {
                    return Err(CliError::Validation(format!(
                        "fd_steps entries must be positive and finite, got {h}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn fd_steps(&self) -> Vec<f64> {
        self.fd_steps
            .clone()
            .unwrap_or_else(|| DEFAULT_FD_STEPS.to_vec())
    }
}

fn resolve(dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}
