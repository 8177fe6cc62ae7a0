//! TOML configuration for sampler runs.
//!
//! ```toml
//! [sampler]
//! sweeps = 200000          # total sweeps per chain, burn-in included
//! seed = 7
//! chains = 4
//! burn_in_fraction = 0.2
//! target_acceptance = 0.35
//! initial_step = 1.0       # optional
//! thin = 1                 # keep every thin-th measurement sweep
//!
//! [ensemble]
//! kind = "elliptic"        # ginibre | elliptic | induced | contour | sinh
//! beta = 2.0
//! n = 32
//! tau = 0.5                # elliptic
//! alpha = 1.0              # induced
//! map = "ellipse:a1=2,a2=1" # contour
//! c = 1.0                  # sinh
//! l = 6.283185307179586    # sinh
//! ```
//!
//! Every key is optional; command-line flags override the file.

use std::path::Path;

use serde::Deserialize;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub sweeps: Option<u64>,
    pub seed: Option<u64>,
    pub chains: Option<usize>,
    pub burn_in_fraction: Option<f64>,
    pub target_acceptance: Option<f64>,
    pub initial_step: Option<f64>,
    pub thin: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub kind: Option<String>,
    pub beta: Option<f64>,
    pub n: Option<usize>,
    pub tau: Option<f64>,
    pub alpha: Option<f64>,
    pub map: Option<String>,
    pub c: Option<f64>,
    pub l: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub sampler: SamplerSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
}

impl Config {
    pub fn from_str(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::arg(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }
}
