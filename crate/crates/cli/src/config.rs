//! Grid configuration files.
//!
//! A config is a flat TOML table whose keys mirror the factor grid:
//!
//! ```toml
//! dpis = ["dpis/"]          # .dpi files or directories of them
//! measures = ["ent", "spl"]
//! dists = ["eq", "mod", "str"]
//! prob_choices = 3
//! strategies = ["plausible", "random", "implausible"]
//! ld = [6, 10, 14]
//! runs = 20
//! seed = 42
//! max_queries = 200
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dpis: Option<Vec<PathBuf>>,
    pub measures: Option<Vec<String>>,
    pub dists: Option<Vec<String>>,
    pub prob_choices: Option<usize>,
    pub strategies: Option<Vec<String>>,
    pub ld: Option<Vec<usize>>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub max_queries: Option<usize>,
    pub timings: Option<bool>,
}

impl GridConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: GridConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(dpis) = &mut cfg.dpis {
            for p in dpis.iter_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }
}

/// Expands directories into their `.dpi` files (sorted by name).
pub fn collect_dpi_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "dpi"))
                .collect();
            files.sort();
            if files.is_empty() {
                bail!("no .dpi files in {}", p.display());
            }
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_table_and_resolves_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.toml");
        fs::write(&path, "dpis = [\"d\"]\nmeasures = [\"ent\"]\nld = [6]\nruns = 3\nseed = 9\n").unwrap();
        let cfg = GridConfig::load(&path).unwrap();
        assert_eq!(cfg.dpis.unwrap(), vec![dir.path().join("d")]);
        assert_eq!(cfg.runs, Some(3));
        assert_eq!(cfg.prob_choices, None);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.toml");
        fs::write(&path, "rounds = 3\n").unwrap();
        let err = GridConfig::load(&path).unwrap_err();
        assert!(format!("{err:#}").contains("rounds"), "{err:#}");
    }
}
