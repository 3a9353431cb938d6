//! Run manifests: enough to re-run a command and check its outputs byte for
//! byte.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cli::Command;
use crate::error::{CliError, CliResult};
use crate::io::{file_sha256, read_json, write_json};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> CliResult<Self> {
        Ok(FileDigest { path: path.to_path_buf(), sha256: file_sha256(path)? })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    /// Parsed invocation with absolute paths; replay runs exactly this.
    pub invocation: Command,
    /// Fully resolved configuration where it is not already spelled out by
    /// the invocation (the Monte Carlo config read from a file).
    pub config: Option<serde_json::Value>,
    pub argv: Vec<String>,
    pub seeds: Vec<u64>,
    pub version: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub workers: Option<usize>,
    pub exit_code: u8,
    pub elapsed_seconds: f64,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_json(path, self)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let m: RunManifest = read_json(path)?;
        if m.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(CliError::input(format!("unsupported manifest schema version {}", m.schema_version)));
        }
        Ok(m)
    }
}

/// Manifest location for a single-file output.
pub fn manifest_beside(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Manifest location for a directory of outputs.
pub fn manifest_in(dir: &Path) -> PathBuf {
    dir.join("manifest.json")
}
