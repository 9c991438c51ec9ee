//! Atomic artifact writing and the run manifest.
//!
//! Every scenario emits its files through [`ArtifactSink`]: contents are
//! staged to `<name>.tmp` and renamed into place, and the manifest records
//! every file with a sha256 content checksum. Nothing time- or
//! machine-dependent enters the outputs, so re-running a scenario
//! bit-reproduces the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use fdelab_core::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub experiment: String,
    pub files: Vec<ManifestEntry>,
}

pub struct ArtifactSink {
    dir: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl ArtifactSink {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(ArtifactSink {
            dir: dir.to_path_buf(),
            entries: Vec::new(),
        })
    }

    fn write_atomic(&self, name: &str, bytes: &[u8]) -> Result<()> {
        let target = self.dir.join(name);
        let tmp = self.dir.join(format!("{name}.tmp"));
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, &target)?;
        Ok(())
    }

    /// Stage one artifact and record it in the manifest.
    pub fn emit(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        self.write_atomic(name, bytes)?;
        let digest = Sha256::digest(bytes);
        self.entries.push(ManifestEntry {
            path: name.to_string(),
            bytes: bytes.len(),
            sha256: format!("{digest:x}"),
        });
        Ok(())
    }

    pub fn emit_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| fdelab_core::error::Error::Parse(format!("serialize {name}: {e}")))?;
        text.push('\n');
        self.emit(name, text.as_bytes())
    }

    /// Write `manifest.json` (itself not listed) and finish.
    pub fn finish(mut self, name: &str, experiment: &str) -> Result<Manifest> {
        self.entries.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest {
            name: name.to_string(),
            experiment: experiment.to_string(),
            files: self.entries.clone(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| fdelab_core::error::Error::Parse(format!("serialize manifest: {e}")))?;
        text.push('\n');
        self.write_atomic("manifest.json", text.as_bytes())?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_files_with_checksums() {
        let dir = std::env::temp_dir().join(format!("fdelab-manifest-{}", std::process::id()));
        let mut sink = ArtifactSink::create(&dir).unwrap();
        sink.emit("b.csv", b"x,y\n1,2\n").unwrap();
        sink.emit("a.json", b"{}\n").unwrap();
        let manifest = sink.finish("test", "classify").unwrap();
        assert_eq!(manifest.files.len(), 2);
        // Sorted by path.
        assert_eq!(manifest.files[0].path, "a.json");
        assert_eq!(manifest.files[1].bytes, 8);
        assert!(dir.join("manifest.json").exists());
        fs::remove_dir_all(&dir).unwrap();
    }
}
