use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::PipelineConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Run record written next to the artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: PipelineConfig,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the output directory.
    pub artifacts: Vec<FileDigest>,
    pub stages: Vec<String>,
    pub complete: bool,
    pub failed_stage: Option<String>,
    pub error: Option<String>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl Manifest {
    pub fn new(config: PipelineConfig) -> Self {
        Manifest {
            tool: "oovcat".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            seeds: BTreeMap::new(),
            inputs: Vec::new(),
            artifacts: Vec::new(),
            stages: Vec::new(),
            complete: false,
            failed_stage: None,
            error: None,
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let sha256 = sha256_file(path)?;
        self.inputs.push(FileDigest {
            path: path.to_path_buf(),
            sha256,
        });
        Ok(())
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
    }

    /// Inputs whose current content no longer matches the recorded digest.
    pub fn changed_inputs(&self) -> Vec<PathBuf> {
        self.inputs
            .iter()
            .filter(|f| sha256_file(&f.path).map_or(true, |d| d != f.sha256))
            .map(|f| f.path.clone())
            .collect()
    }

    /// Artifacts that are missing from `other` or differ in content.
    pub fn artifact_mismatches(&self, other: &Manifest) -> Vec<PathBuf> {
        let theirs: BTreeMap<&PathBuf, &String> = other.artifacts.iter().map(|f| (&f.path, &f.sha256)).collect();
        let mut out: Vec<PathBuf> = self
            .artifacts
            .iter()
            .filter(|f| theirs.get(&f.path) != Some(&&f.sha256))
            .map(|f| f.path.clone())
            .collect();
        let ours: std::collections::BTreeSet<&PathBuf> = self.artifacts.iter().map(|f| &f.path).collect();
        out.extend(other.artifacts.iter().filter(|f| !ours.contains(&f.path)).map(|f| f.path.clone()));
        out
    }
}
