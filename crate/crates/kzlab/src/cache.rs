//! Small disk cache for expensive operator computations, keyed by the exact
//! parameters that determine the result. Hits return the stored bytes
//! unchanged, so repeated runs are bit-identical.

use crate::{C64, KzError, Result};
use std::path::{Path, PathBuf};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "KZLAB_CACHE";

#[derive(Debug, Clone, PartialEq)]
pub struct CacheKey {
    pub operation: String,
    pub t: C64,
    pub d: usize,
    pub indices: Vec<usize>,
}

impl CacheKey {
    /// Deterministic file name; float parameters enter through their exact
    /// bit patterns so distinct keys never collide.
    pub fn file_name(&self) -> String {
        let idx = self
            .indices
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join("x");
        format!(
            "{}-{:016x}-{:016x}-{}-{}.json",
            self.operation,
            self.t.re.to_bits(),
            self.t.im.to_bits(),
            self.d,
            idx
        )
    }
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// Cache rooted at `KZLAB_CACHE` if set, else a per-user directory under
    /// the system temp dir.
    pub fn from_env() -> Result<Self> {
        let dir = match std::env::var_os(CACHE_ENV) {
            Some(d) => PathBuf::from(d),
            None => std::env::temp_dir().join("kzlab-cache"),
        };
        Self::at(&dir)
    }

    pub fn at(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .map_err(|e| KzError::Cache(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn get(&self, key: &CacheKey) -> Option<Vec<u8>> {
        std::fs::read(self.dir.join(key.file_name())).ok()
    }

    pub fn put(&self, key: &CacheKey, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(key.file_name());
        // write-then-rename keeps concurrent readers from seeing torn files
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, bytes)
            .map_err(|e| KzError::Cache(format!("cannot write {}: {e}", tmp.display())))?;
        std::fs::rename(&tmp, &path)
            .map_err(|e| KzError::Cache(format!("cannot publish {}: {e}", path.display())))?;
        Ok(())
    }

    /// Fetch the cached value or compute, store, and return it.
    pub fn get_or_insert_with<F>(&self, key: &CacheKey, f: F) -> Result<Vec<u8>>
    where
        F: FnOnce() -> Result<Vec<u8>>,
    {
        if let Some(hit) = self.get(key) {
            return Ok(hit);
        }
        let bytes = f()?;
        self.put(key, &bytes)?;
        Ok(bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(op: &str) -> CacheKey {
        CacheKey {
            operation: op.into(),
            t: C64::new(0.7, -0.3),
            d: 4,
            indices: vec![1, 3],
        }
    }

    #[test]
    fn hits_are_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path()).unwrap();
        let k = key("casimir");
        assert!(cache.get(&k).is_none());
        let payload = br#"{"matrix": [[1.0, -0.5]]}"#;
        cache.put(&k, payload).unwrap();
        assert_eq!(cache.get(&k).as_deref(), Some(payload.as_slice()));
        let mut calls = 0;
        let got = cache
            .get_or_insert_with(&k, || {
                calls += 1;
                Ok(b"should not run".to_vec())
            })
            .unwrap();
        assert_eq!(calls, 0);
        assert_eq!(got, payload);
    }

    #[test]
    fn distinct_keys_do_not_collide() {
        let k1 = key("casimir");
        let mut k2 = key("casimir");
        k2.t = C64::new(0.7, -0.30000000000000004);
        assert_ne!(k1.file_name(), k2.file_name());
        let mut k3 = key("casimir");
        k3.indices = vec![13];
        assert_ne!(k1.file_name(), k3.file_name());
    }
}
