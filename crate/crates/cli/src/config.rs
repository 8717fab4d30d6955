//! Pipeline configuration file. Every key is optional; a key present in the
//! file wins over the matching command-line flag, which wins over the
//! built-in default.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::UsageError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub source: Option<String>,
    pub converter: Option<String>,
    pub parser_endpoint: Option<String>,
    pub cap: Option<usize>,
    pub uncapped: Option<bool>,
    pub num_false: Option<usize>,
    pub seed: Option<u64>,
    pub min_frequency: Option<usize>,
    pub scorer: Option<String>,
    pub endpoint: Option<String>,
    pub threshold: Option<f64>,
    pub top_k: Option<usize>,
    pub lexical_prefilter: Option<bool>,
    pub setting: Option<String>,
    #[serde(rename = "macro")]
    pub macro_mode: Option<String>,
    pub format: Option<String>,
    pub base_iri: Option<String>,
    pub jobs: Option<usize>,
    pub replay: Option<PathBuf>,
    pub record: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())).into())
    }
}

/// File value, else flag value, else default.
pub fn pick<T>(file: Option<T>, flag: Option<T>, default: T) -> T {
    file.or(flag).unwrap_or(default)
}

/// Like [`pick`] for boolean switches, where an absent flag reads as `false`.
pub fn pick_flag(file: Option<bool>, flag: bool) -> bool {
    file.unwrap_or(flag)
}

pub fn parse_value<T>(what: &str, raw: &str) -> Result<T, UsageError>
where
    T: std::str::FromStr<Err = String>,
{
    raw.parse().map_err(|e| UsageError(format!("--{what}: {e}")))
}
