//! Walking a source tree into a [`CodeIndex`].

use std::collections::BTreeSet;
use std::path::Path;

use scisoftx_core::{CodeIndex, IndexBuilder, Profile};
use thiserror::Error;
use walkdir::WalkDir;

#[derive(Debug, Error)]
pub enum RepoError {
    #[error("{0} is not a directory")]
    NotADirectory(String),
    #[error("no language profiles selected")]
    NoProfilesSelected,
    #[error("unknown language profile {0:?} (known: java, python)")]
    UnknownProfile(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Parses profile names such as `["java", "python"]`.
pub fn parse_profiles<S: AsRef<str>>(names: &[S]) -> Result<BTreeSet<Profile>, RepoError> {
    names
        .iter()
        .map(|n| Profile::from_name(n.as_ref()).ok_or_else(|| RepoError::UnknownProfile(n.as_ref().to_string())))
        .collect()
}

fn is_hidden(name: &std::ffi::OsStr) -> bool {
    name.to_str().is_some_and(|s| s.starts_with('.') && s.len() > 1)
}

/// Indexes every file under `root_dir` claimed by one of `profiles`.
/// Hidden files and directories are skipped. The root package is named after
/// the directory.
pub fn build_index(root_dir: &Path, profiles: &BTreeSet<Profile>) -> Result<CodeIndex, RepoError> {
    if profiles.is_empty() {
        return Err(RepoError::NoProfilesSelected);
    }
    if !root_dir.is_dir() {
        return Err(RepoError::NotADirectory(root_dir.display().to_string()));
    }
    let root_name = root_dir
        .canonicalize()
        .ok()
        .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "root".into());
    let mut builder = IndexBuilder::new(root_dir.display().to_string(), root_name);
    let walker = WalkDir::new(root_dir)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !is_hidden(e.file_name()));
    for entry in walker {
        let entry = entry.map_err(|e| RepoError::Io {
            path: e.path().map(|p| p.display().to_string()).unwrap_or_default(),
            source: e.into(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(root_dir).unwrap_or(entry.path());
        let rel: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
        let rel = rel.join("/");
        let Some(&profile) = profiles.iter().find(|p| p.claims(&rel)) else {
            continue;
        };
        let bytes = std::fs::read(entry.path()).map_err(|source| RepoError::Io {
            path: entry.path().display().to_string(),
            source,
        })?;
        builder.add_file(rel, bytes, profile);
    }
    Ok(builder.finish())
}
