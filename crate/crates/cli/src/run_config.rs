//! `--config` files: a map plus the settings of one run.

use std::path::{Path, PathBuf};

use henon_lab::config::MapSpec;
use henon_lab::potential::DEFAULT_BUDGET;
use henon_lab::selftest::DEFAULT_SEED;
use henon_lab::short_c2::SliceSpec;
use henon_lab::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub map: MapSpec,
    #[serde(default)]
    pub slice: Option<SliceSpec>,
    #[serde(default = "default_budget")]
    pub budget: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Decimal digits for big-float work; the library default when absent.
    #[serde(default)]
    pub precision_digits: Option<u32>,
    #[serde(default)]
    pub truncation: Option<u32>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_budget() -> u32 {
    DEFAULT_BUDGET
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidMap(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let cfg: RunConfig = serde_json::from_str(r#"{"map":{"d":2,"p":[0],"a":3}}"#).unwrap();
        assert_eq!(cfg.budget, DEFAULT_BUDGET);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert!(cfg.slice.is_none());
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"map":{"d":2,"p":[0],"a":3},"budjet":5}"#).is_err());
    }
}
