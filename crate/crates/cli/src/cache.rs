//! Content-addressed basis cache.

use prolate_core::io::{load_basis, save_basis, CachedBasis};
use prolate_core::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const CACHE_ENV: &str = "PROLATE_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".prolate-cache";
pub const FORMAT_VERSION: u32 = 1;

/// Identity of a cached basis. Real parameters are quantized to `1e-12`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CacheKey {
    pub version: u32,
    pub kind: String,
    pub params: Vec<(String, i128)>,
    pub c: i128,
    pub truncation: Option<usize>,
    pub resolution: Option<usize>,
}

pub fn quantize(v: f64) -> i128 {
    (v * 1e12).round() as i128
}

impl CacheKey {
    pub fn new(kind: &str, c: f64) -> Self {
        Self {
            version: FORMAT_VERSION,
            kind: kind.into(),
            params: Vec::new(),
            c: quantize(c),
            truncation: None,
            resolution: None,
        }
    }

    pub fn param(mut self, name: &str, v: f64) -> Self {
        self.params.push((name.into(), quantize(v)));
        self
    }

    pub fn truncation(mut self, j: usize) -> Self {
        self.truncation = Some(j);
        self
    }

    pub fn resolution(mut self, r: usize) -> Self {
        self.resolution = Some(r);
        self
    }

    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("key serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn file_name(&self) -> String {
        format!("{}-{}.gpswf", self.kind, &self.digest()[..16])
    }
}

/// `explicit`, else `$PROLATE_CACHE_DIR`, else `.prolate-cache`.
pub fn cache_dir(explicit: Option<&Path>) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR)),
    }
}

pub enum Outcome {
    Loaded,
    Computed,
    /// The cached file failed verification and was rebuilt.
    Replaced(String),
}

/// Loads the basis for `key` from `dir`, computing and storing it on a miss
/// or a failed checksum.
pub fn load_or_compute(
    dir: &Path,
    key: &CacheKey,
    compute: impl FnOnce() -> Result<CachedBasis>,
) -> Result<(PathBuf, CachedBasis, Outcome)> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(key.file_name());
    let mut outcome = Outcome::Computed;
    if path.exists() {
        match load_basis(&path) {
            Ok(b) => return Ok((path, b, Outcome::Loaded)),
            Err(e @ (Error::Format(_) | Error::Json(_))) => {
                outcome = Outcome::Replaced(e.to_string())
            }
            Err(e) => return Err(e),
        }
    }
    let basis = compute()?;
    // Write then rename so a crash never leaves a half-written file behind.
    let tmp = path.with_extension("gpswf.tmp");
    save_basis(&tmp, &basis)?;
    std::fs::rename(&tmp, &path)?;
    Ok((path, basis, outcome))
}
