//! On-disk record/replay store: one JSON file per (prompt, temperature,
//! iteration).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub key: String,
    pub prompt_sha256: String,
    pub temperature: f64,
    pub iteration: usize,
    pub model: String,
    pub raw_text: String,
}

pub fn prompt_hash(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

/// Temperatures are keyed at millesimal precision so that `1.2` typed on a
/// command line and `0.2 * 6` computed in a sweep address the same file.
pub fn fixture_key(prompt: &str, temperature: f64, iteration: usize) -> String {
    let mut h = Sha256::new();
    h.update(prompt.as_bytes());
    h.update([0]);
    h.update(format!("{:.3}", temperature).as_bytes());
    h.update([0]);
    h.update(iteration.to_string().as_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Clone)]
pub struct FixtureCache {
    dir: PathBuf,
}

impl FixtureCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_of(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> io::Result<Option<Fixture>> {
        match fs::read_to_string(self.path_of(key)) {
            Ok(text) => serde_json::from_str(&text)
                .map(Some)
                .map_err(io::Error::other),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Write-to-temp then rename, so readers never see a partial file.
    pub fn store(&self, fixture: &Fixture) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        let mut text = serde_json::to_string_pretty(fixture).map_err(io::Error::other)?;
        text.push('\n');
        tmp.write_all(text.as_bytes())?;
        tmp.persist(self.path_of(&fixture.key))
            .map_err(|e| e.error)?;
        Ok(())
    }
}
