//! Recorded request/response pairs for remote services.
//!
//! A fixture directory holds one `<request-hash>.body` file per exchange.
//! In `Record` mode live responses are written there; in `Replay` mode the
//! network is never touched.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayMode {
    Record(PathBuf),
    Replay(PathBuf),
}

/// Hash that identifies a request: the endpoint path plus the request body.
pub fn request_key(path: &str, body: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(path.as_bytes());
    hasher.update(b"\n");
    hasher.update(body);
    hex::encode(hasher.finalize())
}

pub(crate) fn body_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.body"))
}

pub(crate) fn load(dir: &Path, key: &str) -> Option<String> {
    std::fs::read_to_string(body_path(dir, key)).ok()
}

pub(crate) fn store(dir: &Path, key: &str, body: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(body_path(dir, key), body)
}
