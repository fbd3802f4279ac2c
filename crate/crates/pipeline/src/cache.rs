//! Content-addressed store of raw API responses.
//!
//! Each entry is two files named by the SHA-256 of the canonical request:
//! `<hash>.body` holds the response bytes as received and `<hash>.meta.json`
//! records the request and fetch time. Entries are never overwritten.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheMeta {
    pub key: String,
    pub fetched_at: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub key: String,
    pub fetched_at: DateTime<Utc>,
    pub payload: Vec<u8>,
}

/// Canonical form of a GET request: base URL plus parameters sorted by name.
pub fn canonical_request(base_url: &str, params: &[(String, String)]) -> String {
    let mut sorted: Vec<&(String, String)> = params.iter().collect();
    sorted.sort();
    let query: Vec<String> = sorted.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{base_url}?{}", query.join("&"))
}

pub fn cache_key_hash(key: &str) -> String {
    hex::encode(Sha256::digest(key.as_bytes()))
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn paths(&self, key: &str) -> (PathBuf, PathBuf) {
        let h = cache_key_hash(key);
        (self.dir.join(format!("{h}.body")), self.dir.join(format!("{h}.meta.json")))
    }

    /// Returns the stored entry, or `None` when absent or unreadable.
    pub fn get(&self, key: &str) -> Option<CacheEntry> {
        let (body, meta) = self.paths(key);
        let meta: CacheMeta = serde_json::from_slice(&fs::read(meta).ok()?).ok()?;
        if meta.key != key {
            log::warn!("cache entry for {key} records a different key; ignoring it");
            return None;
        }
        let payload = fs::read(body).ok()?;
        let fetched_at = DateTime::parse_from_rfc3339(&meta.fetched_at).ok()?.with_timezone(&Utc);
        Some(CacheEntry {
            key: meta.key,
            fetched_at,
            payload,
        })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    /// Stores `payload` under `key` unless an entry already exists.
    pub fn put(&self, key: &str, payload: &[u8], fetched_at: DateTime<Utc>) -> std::io::Result<()> {
        if self.contains(key) {
            return Ok(());
        }
        fs::create_dir_all(&self.dir)?;
        let (body, meta) = self.paths(key);
        let record = CacheMeta {
            key: key.to_string(),
            fetched_at: fetched_at.to_rfc3339_opts(SecondsFormat::Secs, true),
        };
        write_atomic(&body, payload)?;
        write_atomic(&meta, &serde_json::to_vec_pretty(&record).expect("plain struct"))
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}
