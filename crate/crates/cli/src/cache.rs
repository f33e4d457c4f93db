use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::report::SCHEMA_VERSION;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize, Deserialize)]
struct CacheEntry<T> {
    key: String,
    tool_version: String,
    schema_version: u32,
    payload: T,
}

/// Content-addressed store of stage outputs, one JSON file per key.
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: PathBuf) -> std::io::Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    /// Key over the canonical spec, seed, tolerances and stage name.
    pub fn key(spec_text: &str, seed: u64, tolerances: &str, stage: &str) -> String {
        let mut h = Sha256::new();
        for part in [spec_text, &seed.to_string(), tolerances, stage, TOOL_VERSION, &SCHEMA_VERSION.to_string()] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let bytes = fs::read(self.path(key)).ok()?;
        let entry: CacheEntry<T> = serde_json::from_slice(&bytes).ok()?;
        (entry.key == key && entry.tool_version == TOOL_VERSION && entry.schema_version == SCHEMA_VERSION)
            .then_some(entry.payload)
    }

    /// Write to a temporary file in the same directory, then rename.
    pub fn put<T: Serialize>(&self, key: &str, payload: &T) -> std::io::Result<()> {
        let entry = CacheEntry {
            key: key.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            schema_version: SCHEMA_VERSION,
            payload,
        };
        let bytes = serde_json::to_vec(&entry).map_err(std::io::Error::other)?;
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&bytes)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.path(key))
    }
}
