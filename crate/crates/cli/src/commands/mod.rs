pub mod corpus;
pub mod evaluate;
pub mod export;
pub mod ingest;
pub mod predict;
pub mod stats;

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use tdm_core::records::write_jsonl;
use tdm_core::replay::ReplayMode;

use crate::UsageError;

/// One line of `failures.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Failure {
    pub paper_id: String,
    pub stage: &'static str,
    pub error: String,
}

pub fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write_failures(path: &Path, failures: &mut [Failure]) -> anyhow::Result<()> {
    failures.sort();
    for f in failures.iter() {
        log::warn!("{} [{}]: {}", f.paper_id, f.stage, f.error);
    }
    write_jsonl(path, failures)?;
    Ok(())
}

pub fn replay_mode(replay: Option<PathBuf>, record: Option<PathBuf>) -> Result<Option<ReplayMode>, UsageError> {
    match (replay, record) {
        (Some(_), Some(_)) => Err(UsageError("--replay and --record are mutually exclusive".into())),
        (Some(p), None) => Ok(Some(ReplayMode::Replay(p))),
        (None, Some(p)) => Ok(Some(ReplayMode::Record(p))),
        (None, None) => Ok(None),
    }
}

/// Parent directory of an output file, created if missing.
pub fn parent_dir(file: &Path) -> anyhow::Result<PathBuf> {
    let dir = file
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    ensure_dir(&dir)?;
    Ok(dir)
}
