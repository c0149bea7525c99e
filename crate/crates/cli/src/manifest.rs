//! Run manifest and the output directory it describes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: Status,
    pub seconds: f64,
    pub params: Value,
    /// Stage results worth keeping but not part of a module export.
    pub info: Value,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub config_sha256: String,
    pub seed: u64,
    pub threads: Option<usize>,
    pub wall_time_seconds: f64,
    pub status: Status,
    pub error: Option<String>,
    pub stages: Vec<StageRecord>,
    pub files: Vec<FileRecord>,
    pub config: Value,
}

/// Owns the output directory for one run and records what goes into it.
pub struct OutputDir {
    root: PathBuf,
    pub files: Vec<FileRecord>,
}

impl OutputDir {
    /// Creates the directory and proves it writable before any computation.
    pub fn prepare(root: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(root)?;
        let probe = root.join(".dwlab-write-probe");
        fs::File::create(&probe)?.write_all(b"probe")?;
        fs::remove_file(&probe)?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, content: &str) -> std::io::Result<()> {
        fs::write(self.root.join(name), content)?;
        self.files.retain(|f| f.name != name);
        self.files.push(FileRecord {
            name: name.to_string(),
            sha256: sha256_hex(content.as_bytes()),
            bytes: content.len() as u64,
        });
        Ok(())
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }
}

pub struct Stopwatch(Instant);

impl Stopwatch {
    pub fn start() -> Self {
        Self(Instant::now())
    }

    pub fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn files_are_listed_once() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::prepare(dir.path()).unwrap();
        out.write("a.csv", "x\n").unwrap();
        out.write("a.csv", "y\n").unwrap();
        assert_eq!(out.files.len(), 1);
        assert_eq!(out.files[0].sha256, sha256_hex(b"y\n"));
    }
}
