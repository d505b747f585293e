//! On-disk result cache: one JSON file per command and canonical parameter
//! set, named by the SHA-256 of that key. Files are written to a temporary
//! name in the same directory and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const CACHE_ENV: &str = "BREF_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".bref-cache";

/// Bumped whenever cached payloads change meaning.
const SCHEMA: &str = "v1";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

/// `--cache-dir`, then `$BREF_CACHE_DIR`, then `.bref-cache`.
pub fn resolve_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(CACHE_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(DEFAULT_CACHE_DIR),
    }
}

/// `command|k1=v1|k2=v2...` with keys sorted.
pub fn canonical_key(command: &str, params: &[(&str, String)]) -> String {
    let mut sorted: Vec<&(&str, String)> = params.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(b.0));
    let mut key = format!("{SCHEMA}|{command}");
    for (k, v) in sorted {
        key.push('|');
        key.push_str(k);
        key.push('=');
        key.push_str(v);
    }
    key
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        let digest = Sha256::digest(key.as_bytes());
        self.dir.join(format!("{}.json", hex::encode(digest)))
    }

    /// Cached value for `key`; unreadable or mismatched files count as misses.
    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let text = fs::read_to_string(self.path_for(key)).ok()?;
        let entry: serde_json::Value = serde_json::from_str(&text).ok()?;
        if entry.get("key")?.as_str()? != key {
            return None;
        }
        serde_json::from_value(entry.get("value")?.clone()).ok()
    }

    pub fn put<T: Serialize>(&self, key: &str, value: &T) -> CliResult<()> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let entry = serde_json::json!({ "key": key, "value": value });
        let body = serde_json::to_vec_pretty(&entry).expect("serializable cache entry");
        let target = self.path_for(key);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        tmp.write_all(&body).map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.persist(&target).map_err(|e| CliError::io(&target, e.error))?;
        Ok(())
    }
}
