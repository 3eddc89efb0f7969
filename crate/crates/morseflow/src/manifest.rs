//! Run manifests: what ran, with which seeds and tolerances, and digests of
//! every file it wrote.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::formats::write_json;

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub model: Option<String>,
    pub seeds: BTreeMap<String, u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub outputs: Vec<OutputDigest>,
    pub exit_code: i32,
    pub wall_time_s: f64,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    /// Digests `outputs`, recorded relative to the manifest's directory when
    /// possible, then writes the manifest to `path`.
    pub fn write(mut self, path: &Path, outputs: &[PathBuf]) -> Result<()> {
        let base = path.parent().unwrap_or(Path::new(""));
        self.outputs = outputs
            .iter()
            .map(|p| {
                Ok(OutputDigest {
                    path: p
                        .strip_prefix(base)
                        .unwrap_or(p)
                        .to_string_lossy()
                        .into_owned(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<Result<_>>()?;
        write_json(path, &self)
    }
}

/// Where the manifest for a run goes: `manifest.json` inside an output
/// directory, or `<file>.manifest.json` next to a single output file.
pub fn manifest_path(primary: &Path, is_dir: bool) -> PathBuf {
    if is_dir {
        primary.join("manifest.json")
    } else {
        let mut name = primary.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        primary.with_file_name(name)
    }
}
