//! Content-addressed cache of computed tables. Each entry is one JSON file
//!
//!   {"schema":"cache/1","version":...,"key":{...},"sha256":...,"payload":...}
//!
//! named by a hash of the key. Writes are atomic (temp file then rename);
//! hits are checksum-verified, and `verify-cache` recomputes a deterministic
//! ten percent of the entries from their keys and demands byte-identical
//! payloads.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn cache_dir(cli_flag: Option<&str>) -> Option<PathBuf> {
    if let Some(dir) = cli_flag {
        return Some(PathBuf::from(dir));
    }
    std::env::var_os("FINQ_CACHE_DIR").map(PathBuf::from)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn key_hash(key: &Value) -> String {
    let canonical = serde_json::to_vec(key).expect("serializable key");
    hex(&Sha256::digest(&canonical))[..16].to_string()
}

pub fn payload_hash(payload: &Value) -> String {
    let canonical = serde_json::to_vec(payload).expect("serializable payload");
    hex(&Sha256::digest(&canonical))
}

fn entry_path(dir: &Path, key: &Value) -> PathBuf {
    dir.join(format!("{}.json", key_hash(key)))
}

/// A checksum-verified cache hit, or None.
pub fn lookup(dir: &Path, key: &Value) -> Result<Option<Value>, String> {
    let path = entry_path(dir, key);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(|e| format!("cache read: {e}"))?;
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| format!("cache entry is not JSON: {e}"))?;
    if doc["key"] != *key {
        // hash collision or foreign file; treat as a miss
        return Ok(None);
    }
    let payload = doc["payload"].clone();
    let declared = doc["sha256"].as_str().unwrap_or_default();
    if payload_hash(&payload) != declared {
        return Err(format!("cache checksum mismatch in {}", path.display()));
    }
    Ok(Some(payload))
}

pub fn store(dir: &Path, key: &Value, payload: &Value) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("cache dir: {e}"))?;
    let doc = serde_json::json!({
        "schema": "cache/1",
        "version": ARTIFACT_VERSION,
        "key": key,
        "sha256": payload_hash(payload),
        "payload": payload,
    });
    let path = entry_path(dir, key);
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec(&doc).expect("serializable"))
        .map_err(|e| format!("cache write: {e}"))?;
    fs::rename(&tmp, &path).map_err(|e| format!("cache rename: {e}"))?;
    Ok(())
}

/// All entries (key, payload, path), checksum-verified.
pub fn entries(dir: &Path) -> Result<Vec<(Value, Value, PathBuf)>, String> {
    let mut out = Vec::new();
    let rd = match fs::read_dir(dir) {
        Ok(rd) => rd,
        Err(_) => return Ok(out),
    };
    let mut paths: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map_or(false, |x| x == "json"))
        .collect();
    paths.sort();
    for path in paths {
        let text = fs::read_to_string(&path).map_err(|e| format!("cache read: {e}"))?;
        let doc: Value = serde_json::from_str(&text)
            .map_err(|e| format!("cache entry {} is not JSON: {e}", path.display()))?;
        let payload = doc["payload"].clone();
        let declared = doc["sha256"].as_str().unwrap_or_default();
        if payload_hash(&payload) != declared {
            return Err(format!("cache checksum mismatch in {}", path.display()));
        }
        out.push((doc["key"].clone(), payload, path));
    }
    Ok(out)
}

/// Deterministic pseudo-random selection of roughly `percent` of the
/// entries, by key hash.
pub fn select_fraction<'a, T>(items: &'a [T], percent: u64, key_of: impl Fn(&T) -> String) -> Vec<&'a T> {
    let mut out = Vec::new();
    for item in items {
        let h = key_of(item);
        let v = u64::from_str_radix(&h[..8], 16).unwrap_or(0);
        if v % 100 < percent {
            out.push(item);
        }
    }
    // never select nothing when entries exist
    if out.is_empty() && !items.is_empty() {
        out.push(&items[0]);
    }
    out
}
