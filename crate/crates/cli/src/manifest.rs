use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
struct Artifact {
    file: String,
    sha256: String,
    bytes: usize,
}

/// Collects artifacts written into one output directory.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Outputs { dir: dir.to_path_buf(), artifacts: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        fs::write(self.dir.join(name), bytes)?;
        self.artifacts.push(Artifact { file: name.to_owned(), sha256: sha256_hex(bytes), bytes: bytes.len() });
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut text = serde_json::to_vec_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
        text.push(b'\n');
        self.write(name, &text)
    }

    /// Writes `manifest.json` and returns its own hash.
    pub fn finish(self, command: &str, config_bytes: &[u8]) -> Result<String, CliError> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            command: &'a str,
            tool_version: &'a str,
            config_sha256: String,
            artifacts: &'a [Artifact],
        }
        let m = Manifest {
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            config_sha256: sha256_hex(config_bytes),
            artifacts: &self.artifacts,
        };
        let mut text = serde_json::to_vec_pretty(&m).map_err(|e| CliError::Runtime(e.to_string()))?;
        text.push(b'\n');
        fs::write(self.dir.join("manifest.json"), &text)?;
        Ok(sha256_hex(&text))
    }
}
