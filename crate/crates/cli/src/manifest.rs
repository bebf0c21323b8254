//! Run manifest: everything that determines the bytes of an output file.
//!
//! The hash covers the command, the config file content, explicit parameter
//! overrides, the seed and the tool version. Worker count and wall clock are
//! deliberately outside the hash: runs that differ only in those must
//! produce byte-identical outputs.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub config_digest: Option<String>,
    /// Sorted key=value pairs of explicit parameter overrides.
    pub overrides: Vec<String>,
    pub seed: u64,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            config_path: None,
            config_digest: None,
            overrides: Vec::new(),
            seed: 0,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn with_config(mut self, path: &Path) -> std::io::Result<Self> {
        let bytes = std::fs::read(path)?;
        self.config_path = Some(path.display().to_string());
        self.config_digest = Some(hex_digest(&bytes));
        Ok(self)
    }

    pub fn with_override(mut self, key: &str, value: String) -> Self {
        self.overrides.push(format!("{key}={value}"));
        self.overrides.sort();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Hash of the reproducibility-relevant fields.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(&self.command);
        h.update([0]);
        if let Some(d) = &self.config_digest {
            h.update(d);
        }
        h.update([0]);
        for o in &self.overrides {
            h.update(o);
            h.update([0]);
        }
        h.update(self.seed.to_le_bytes());
        h.update(&self.version);
        let out = h.finalize();
        out.iter().take(16).map(|b| format!("{b:02x}")).collect()
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::json!({
            "hash": self.hash(),
            "command": self.command,
            "config_path": self.config_path,
            "config_digest": self.config_digest,
            "overrides": self.overrides,
            "seed": self.seed,
            "version": self.version,
        })
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_nothing_it_should_cover() {
        let a = RunManifest::new("report").with_seed(1);
        let b = RunManifest::new("report").with_seed(2);
        assert_ne!(a.hash(), b.hash());
        let c = RunManifest::new("report")
            .with_seed(1)
            .with_override("X", "500".into());
        assert_ne!(a.hash(), c.hash());
        // override order does not matter
        let d = RunManifest::new("x")
            .with_override("b", "2".into())
            .with_override("a", "1".into());
        let e = RunManifest::new("x")
            .with_override("a", "1".into())
            .with_override("b", "2".into());
        assert_eq!(d.hash(), e.hash());
    }
}
