//! Run configuration shared by the command-line tools.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Seed, tolerance overrides, output path and format. Every field is optional
/// in the JSON form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub output: Option<String>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.resolved_tolerances()?;
        Ok(cfg)
    }

    /// Defaults with the overrides applied; unknown names are rejected.
    pub fn resolved_tolerances(&self) -> Result<Tolerances> {
        Tolerances::default().with_overrides(&self.tolerances)
    }
}
