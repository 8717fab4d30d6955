//! Run manifests written beside every output directory.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_sha256: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    /// Input file name to SHA-256 digest.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub records: usize,
    pub failures: usize,
}

impl RunManifest {
    pub fn new(command: &'static str, config: &impl Serialize, seed: Option<u64>) -> anyhow::Result<Self> {
        let config = serde_json::to_value(config)?;
        let canonical = serde_json::to_vec(&config)?;
        Ok(RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config_sha256: hex::encode(Sha256::digest(&canonical)),
            config,
            seed,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            records: 0,
            failures: 0,
        })
    }

    pub fn input(&mut self, path: &Path) -> anyhow::Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.insert(display_name(path), hex::encode(Sha256::digest(&bytes)));
        Ok(())
    }

    /// Digest of a whole input directory: names and contents of its files.
    pub fn input_dir(&mut self, dir: &Path, files: &[std::path::PathBuf]) -> anyhow::Result<()> {
        for f in files {
            let rel = f.strip_prefix(dir).unwrap_or(f);
            let bytes = std::fs::read(f).with_context(|| format!("reading {}", f.display()))?;
            self.inputs
                .insert(rel.to_string_lossy().into_owned(), hex::encode(Sha256::digest(&bytes)));
        }
        Ok(())
    }

    /// Write `manifest.json` into an output directory.
    pub fn write_in(&self, dir: &Path) -> anyhow::Result<()> {
        self.write_to(&dir.join(MANIFEST_FILE))
    }

    /// Write beside a single output file as `<file>.manifest.json`.
    pub fn write_beside(&self, output: &Path) -> anyhow::Result<()> {
        self.write_to(&sibling(output, "manifest.json"))
    }

    fn write_to(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// `<dir>/<file name>.<suffix>`.
pub fn sibling(output: &Path, suffix: &str) -> std::path::PathBuf {
    let name = output.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    output.with_file_name(format!("{name}.{suffix}"))
}
