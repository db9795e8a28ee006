//! Staged output files, committed atomically, and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One data file held in memory until the run finishes.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
    /// Data rows, excluding comments and the header.
    pub rows: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FileEntry {
    pub name: String,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub experiment: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub code_version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub files: Vec<FileEntry>,
}

pub(crate) fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Collects the files of one run, stamping each with the config hash and
/// master seed.
#[derive(Debug)]
pub struct Outputs {
    config_hash: String,
    master_seed: u64,
    files: Vec<OutputFile>,
}

impl Outputs {
    pub fn new(config_hash: &str, master_seed: u64) -> Self {
        Outputs {
            config_hash: config_hash.to_string(),
            master_seed,
            files: Vec::new(),
        }
    }

    /// CSV with a leading `# config_hash=… master_seed=…` comment line.
    pub fn csv(&mut self, name: &str, header: &str, rows: Vec<String>) {
        let mut contents = format!("# config_hash={} master_seed={}\n{header}\n", self.config_hash, self.master_seed);
        for r in &rows {
            contents.push_str(r);
            contents.push('\n');
        }
        self.files.push(OutputFile {
            name: name.to_string(),
            contents,
            rows: rows.len(),
        });
    }

    /// JSON object `{config_hash, master_seed, data}`; `rows` is the number
    /// of top-level records in `data`.
    pub fn json(&mut self, name: &str, data: Value) {
        let rows = match &data {
            Value::Array(a) => a.len(),
            _ => 1,
        };
        let doc = json!({
            "config_hash": self.config_hash,
            "master_seed": self.master_seed,
            "data": data,
        });
        let mut contents = serde_json::to_string_pretty(&doc).expect("json serializes");
        contents.push('\n');
        self.files.push(OutputFile {
            name: name.to_string(),
            contents,
            rows,
        });
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    pub fn get(&self, name: &str) -> Option<&OutputFile> {
        self.files.iter().find(|f| f.name == name)
    }

    /// Writes every file, then `manifest.json`. Each file goes to a
    /// temporary name first; if any write or rename fails, everything this
    /// call created is removed and the error returned.
    pub fn commit(&self, dir: &Path, experiment: &str, started_unix: u64) -> Result<RunManifest> {
        fs::create_dir_all(dir)?;
        let manifest = RunManifest {
            experiment: experiment.to_string(),
            config_hash: self.config_hash.clone(),
            master_seed: self.master_seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix,
            finished_unix: unix_now(),
            files: self
                .files
                .iter()
                .map(|f| FileEntry {
                    name: f.name.clone(),
                    rows: f.rows,
                    sha256: hex::encode(Sha256::digest(f.contents.as_bytes())),
                })
                .collect(),
        };
        let mut manifest_text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        manifest_text.push('\n');
        let all: Vec<(&str, &str)> = self
            .files
            .iter()
            .map(|f| (f.name.as_str(), f.contents.as_str()))
            .chain(std::iter::once(("manifest.json", manifest_text.as_str())))
            .collect();

        let mut staged: Vec<PathBuf> = Vec::new();
        let mut placed: Vec<PathBuf> = Vec::new();
        let result = (|| -> Result<()> {
            for (name, contents) in &all {
                if name.contains(['/', '\\']) || name.is_empty() {
                    return Err(Error::invalid(format!("bad output file name `{name}`")));
                }
                let tmp = dir.join(format!(".{name}.partial"));
                staged.push(tmp.clone());
                fs::write(&tmp, contents)?;
            }
            for ((name, _), tmp) in all.iter().zip(&staged) {
                let dest = dir.join(name);
                fs::rename(tmp, &dest)?;
                placed.push(dest);
            }
            Ok(())
        })();
        if let Err(e) = result {
            for p in staged.iter().chain(&placed) {
                let _ = fs::remove_file(p);
            }
            return Err(e);
        }
        Ok(manifest)
    }
}

/// Reads the `config_hash` stamp of an output file, CSV or JSON.
pub fn embedded_hash(contents: &str) -> Option<String> {
    if let Some(line) = contents.lines().next().filter(|l| l.starts_with('#')) {
        return line
            .split_whitespace()
            .find_map(|t| t.strip_prefix("config_hash="))
            .map(str::to_string);
    }
    let v: Value = serde_json::from_str(contents).ok()?;
    v.get("config_hash")?.as_str().map(str::to_string)
}
