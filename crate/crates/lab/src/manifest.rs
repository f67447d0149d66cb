use crate::error::LabResult;
use crate::output;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub code_version: String,
    pub seeds: Vec<u64>,
    pub started: String,
    pub finished: String,
    pub wall_time_s: f64,
    pub exit_code: i32,
    pub artifacts: Vec<Artifact>,
}

pub fn sha256_file(path: &Path) -> LabResult<(String, u64)> {
    let bytes = std::fs::read(path)?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64))
}

/// Collects artifacts written during a run.
#[derive(Debug)]
pub struct Recorder {
    pub dir: PathBuf,
    pub config_hash: String,
    files: Vec<PathBuf>,
    started: chrono::DateTime<chrono::Utc>,
}

impl Recorder {
    pub fn new(dir: PathBuf, config_hash: String) -> LabResult<Self> {
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir, config_hash, files: Vec::new(), started: chrono::Utc::now() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv(&mut self, name: &str, table: &output::Table) -> LabResult<()> {
        let p = self.path(name);
        output::write_csv(&p, table, &self.config_hash)?;
        self.files.push(p);
        Ok(())
    }

    /// JSON report; the config hash is embedded at the top level.
    pub fn json(&mut self, name: &str, value: serde_json::Value) -> LabResult<()> {
        let mut v = value;
        if let serde_json::Value::Object(m) = &mut v {
            m.insert("config_hash".into(), self.config_hash.clone().into());
        }
        let p = self.path(name);
        output::write_json(&p, &v)?;
        self.files.push(p);
        Ok(())
    }

    pub fn finish(self, command: &str, seeds: Vec<u64>, exit_code: i32) -> LabResult<RunManifest> {
        let finished = chrono::Utc::now();
        let mut artifacts = Vec::new();
        for f in &self.files {
            let (sha256, bytes) = sha256_file(f)?;
            artifacts.push(Artifact { file: f.file_name().unwrap().to_string_lossy().into_owned(), sha256, bytes });
        }
        let m = RunManifest {
            command: command.into(),
            config_hash: self.config_hash.clone(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            seeds,
            started: self.started.to_rfc3339(),
            finished: finished.to_rfc3339(),
            wall_time_s: (finished - self.started).num_milliseconds() as f64 / 1000.0,
            exit_code,
            artifacts,
        };
        output::write_json(&self.dir.join("manifest.json"), &m)?;
        Ok(m)
    }
}
