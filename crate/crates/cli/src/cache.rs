//! Content-addressed result cache: one JSON document per file, named by the
//! SHA-256 of the tool version, the canonical input and the truncation order.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

pub fn cache_key(input: &serde_json::Value, truncation: usize) -> String {
    let mut h = Sha256::new();
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    h.update(b"\n");
    h.update(input.to_string().as_bytes());
    h.update(b"\n");
    h.update(truncation.to_string().as_bytes());
    hex::encode(h.finalize())
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::io(format!("creating cache dir {}", dir.display()), e))?;
        Ok(Cache {
            dir: dir.to_path_buf(),
        })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A missing or unreadable entry is a miss, never an error.
    pub fn load<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store<T: Serialize>(&self, key: &str, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string(value).expect("serializable");
        let tmp = self.dir.join(format!("{key}.{}.tmp", std::process::id()));
        fs::write(&tmp, text).map_err(|e| CliError::io(format!("writing {}", tmp.display()), e))?;
        fs::rename(&tmp, self.path(key)).map_err(|e| CliError::io("publishing cache entry", e))
    }

    /// Returns the cached value for `key`, computing and storing it on a miss.
    pub fn get_or_compute<T, F>(cache: Option<&Cache>, key: &str, compute: F) -> Result<T, CliError>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T, CliError>,
    {
        if let Some(hit) = cache.and_then(|c| c.load(key)) {
            return Ok(hit);
        }
        let value = compute()?;
        if let Some(c) = cache {
            c.store(key, &value)?;
        }
        Ok(value)
    }
}
