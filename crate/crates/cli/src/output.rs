use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::run::SuiteOutput;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub files: Vec<ManifestEntry>,
    /// The only field that differs between reruns.
    pub created_unix: u64,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes every report plus `manifest.json` into `dir`. Nothing is written
/// (and the directory is not created) when there are no reports.
pub fn emit_outputs(out: &SuiteOutput, dir: &Path) -> Result<Option<Manifest>, CliError> {
    if out.reports.is_empty() {
        return Ok(None);
    }
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut files = Vec::with_capacity(out.reports.len());
    for r in &out.reports {
        let path: PathBuf = dir.join(&r.name);
        fs::write(&path, &r.body).map_err(io(&path))?;
        files.push(ManifestEntry {
            name: r.name.clone(),
            bytes: r.body.len(),
            sha256: hex::encode(Sha256::digest(r.body.as_bytes())),
        });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_sha256: out.config_hash.clone(),
        seed: out.seed,
        files,
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    let path = dir.join(MANIFEST_NAME);
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(&path, body).map_err(io(&path))?;
    Ok(Some(manifest))
}
