//! Provenance stamping and guarded file writes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const TOOL: &str = "bfm";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    /// `None` for commands that draw no random numbers.
    pub seed: Option<u64>,
    pub config_hash: String,
}

impl Provenance {
    /// Hashes the canonical JSON of `config`, which must hold every input
    /// that affects the result.
    pub fn new(seed: Option<u64>, config: &impl Serialize) -> Self {
        let canonical = serde_json::to_vec(config).expect("run configs serialize");
        Self {
            tool: TOOL,
            version: VERSION,
            seed,
            config_hash: hex::encode(Sha256::digest(&canonical)),
        }
    }

    /// Comment line for CSV outputs.
    pub fn csv_comment(&self) -> String {
        format!(
            "# {} {} seed={} config_hash={}\n",
            self.tool,
            self.version,
            self.seed.map_or_else(|| "none".to_string(), |s| s.to_string()),
            self.config_hash
        )
    }
}

/// Paths that a command is about to create; checked up front so a refusal
/// leaves nothing half-written.
pub struct Outputs {
    force: bool,
}

impl Outputs {
    pub fn new(force: bool) -> Self {
        Self { force }
    }

    pub fn check(&self, paths: &[&Path]) -> Result<(), CliError> {
        if self.force {
            return Ok(());
        }
        for p in paths {
            if p.exists() {
                return Err(CliError::Io(format!(
                    "{} already exists (pass --force to overwrite)",
                    p.display()
                )));
            }
        }
        Ok(())
    }

    pub fn write(&self, path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
        self.check(&[path])?;
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        fs::write(path, contents).map_err(|e| CliError::io(path, e))
    }

    pub fn write_json(&self, path: &Path, value: &impl Serialize) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Validation(format!("cannot serialize output: {e}")))?;
        text.push('\n');
        self.write(path, text)
    }
}

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// `out.json` → `out.<suffix>`, keeping the directory.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_config() {
        let a = Provenance::new(Some(1), &("x", 1));
        let b = Provenance::new(Some(1), &("x", 2));
        assert_eq!(a.config_hash.len(), 64);
        assert_ne!(a.config_hash, b.config_hash);
        assert_eq!(a.config_hash, Provenance::new(None, &("x", 1)).config_hash);
    }

    #[test]
    fn sibling_names() {
        assert_eq!(sibling(Path::new("a/b.json"), "manifest.json"), PathBuf::from("a/b.json.manifest.json"));
    }

    #[test]
    fn refuses_existing_without_force() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        Outputs::new(false).write(&p, "one").unwrap();
        assert!(matches!(Outputs::new(false).write(&p, "two"), Err(CliError::Io(_))));
        Outputs::new(true).write(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
    }
}
