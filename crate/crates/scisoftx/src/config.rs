//! Project configuration shared by the CLI and the service.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use scisoftx_core::{LinkerParams, Profile};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::repo::{parse_profiles, RepoError};

pub const PORT_ENV: &str = "SCISOFTX_PORT";
pub const DEFAULT_PORT: u16 = 8470;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config {path}: {source}")]
    Syntax {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Profiles(#[from] RepoError),
}

/// Linker parameters that a project may override; unset fields keep their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkerOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context_window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_min_lines: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_monospace_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_token_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stoplist: Option<Vec<String>>,
}

impl LinkerOverrides {
    pub fn apply(&self, mut params: LinkerParams) -> LinkerParams {
        if let Some(v) = self.context_window {
            params.context_window = v;
        }
        if let Some(v) = self.block_min_lines {
            params.block_min_lines = v;
        }
        if let Some(v) = self.block_monospace_ratio {
            params.block_monospace_ratio = v;
        }
        if let Some(v) = self.min_token_len {
            params.min_token_len = v;
        }
        if let Some(v) = &self.stoplist {
            params.stoplist = v.clone();
        }
        params
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    #[serde(default)]
    pub pdf_path: Option<PathBuf>,
    #[serde(default)]
    pub repo_path: Option<PathBuf>,
    /// Language profiles; empty means all.
    #[serde(default)]
    pub profiles: Vec<String>,
    #[serde(default)]
    pub links_path: Option<PathBuf>,
    #[serde(default)]
    pub linker: LinkerOverrides,
}

impl ProjectConfig {
    /// Loads a config file. Relative paths inside it are taken relative to the file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let bytes = fs::read(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut config: ProjectConfig = serde_json::from_slice(&bytes).map_err(|source| ConfigError::Syntax {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.pdf_path, &mut config.repo_path, &mut config.links_path]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn profile_set(&self) -> Result<BTreeSet<Profile>, RepoError> {
        if self.profiles.is_empty() {
            Ok(Profile::ALL.into_iter().collect())
        } else {
            parse_profiles(&self.profiles)
        }
    }

    pub fn linker_params(&self) -> LinkerParams {
        self.linker.apply(LinkerParams::default())
    }
}
