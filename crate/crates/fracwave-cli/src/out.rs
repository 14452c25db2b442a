//! Output-directory plumbing: deterministic file writing, content hashing,
//! and the JSON manifest that accompanies every run.

use crate::config::Config;
use fracwave::{Error, Result};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct OutputDir {
    dir: PathBuf,
    outputs: Vec<(String, String, usize)>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Config(format!("cannot create output dir '{}': {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), outputs: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    /// Write a file and record its content hash for the manifest.
    pub fn write(&mut self, name: &str, content: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), content)?;
        self.outputs.push((name.to_string(), sha256_hex(content.as_bytes()), content.len()));
        Ok(())
    }

    /// Finalize the manifest: resolved config, its digest, per-file hashes,
    /// warnings. No wall-clock data lives here, so reruns are byte-identical.
    pub fn write_manifest(
        &mut self,
        command: &str,
        config: &Config,
        seed: u64,
        warnings: &[String],
        extra: Map<String, Value>,
    ) -> Result<()> {
        let mut cfg_map = Map::new();
        for (k, v) in config.entries() {
            cfg_map.insert(k.clone(), Value::String(v.clone()));
        }
        let mut files = Map::new();
        for (name, hash, bytes) in &self.outputs {
            files.insert(
                name.clone(),
                json!({ "sha256": hash, "bytes": bytes }),
            );
        }
        let manifest = json!({
            "command": command,
            "config": cfg_map,
            "config_sha256": sha256_hex(config.canonical().as_bytes()),
            "seed": seed,
            "outputs": files,
            "warnings": warnings,
            "extra": extra,
        });
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
        std::fs::write(self.dir.join("manifest.json"), text)?;
        Ok(())
    }
}

/// 17-significant-digit float for CSV cells.
pub fn g17(x: f64) -> String {
    fracwave::experiments::report::fmt_g17(x)
}
