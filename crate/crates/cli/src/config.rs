//! Optional TOML configuration, from `--config` or `TEXSTEGO_CONFIG`.
//!
//! ```toml
//! wavelet = "haar"
//!
//! [als]
//! components = 2
//! tolerance = 1e-8
//! max_iterations = 500
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use texstego::{AlsOptions, WaveletFamily};

pub const CONFIG_ENV: &str = "TEXSTEGO_CONFIG";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub wavelet: WaveletFamily,
    pub als: AlsOptions,
}

#[derive(Debug)]
pub enum ConfigError {
    Read(PathBuf, std::io::Error),
    Parse(PathBuf, toml::de::Error),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Read(p, e) => write!(f, "cannot read config {}: {e}", p.display()),
            ConfigError::Parse(p, e) => write!(f, "invalid config {}: {e}", p.display()),
        }
    }
}

impl std::error::Error for ConfigError {}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError::Read(path.to_owned(), e))?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse(path.to_owned(), e))
    }

    /// Explicit path first, then the environment, then defaults.
    pub fn resolve(explicit: Option<&Path>, env: Option<PathBuf>) -> Result<Self, ConfigError> {
        match explicit.map(Path::to_owned).or(env) {
            Some(p) => Self::load(&p),
            None => Ok(Self::default()),
        }
    }
}
