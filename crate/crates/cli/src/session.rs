// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Output directory handling, input digests and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::RunArgs;
use crate::{CliError, Result, RunConfig};

pub const MANIFEST: &str = "run_manifest.json";

/// Seed of an independent sub-stream of a run (SplitMix64 finaliser).
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    let mut z = root ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn ensure_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| {
        CliError::Input(format!("output directory {} is not writable: {e}", out.display()))
    })
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

/// Adds or replaces the entry of `command` in the output directory's
/// manifest. Keys are sorted, so equal runs give equal files.
pub(crate) fn record_manifest(out: &Path, command: &str, entry: Value) -> Result<()> {
    let path = out.join(MANIFEST);
    let mut manifest: BTreeMap<String, Value> = std::fs::read(&path)
        .ok()
        .and_then(|bytes| serde_json::from_slice(&bytes).ok())
        .unwrap_or_default();
    manifest.insert(command.to_string(), entry);
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Internal(format!("cannot encode manifest: {e}")))?;
    text.push('\n');
    write_file(&path, text.as_bytes())
}

pub(crate) struct Session {
    pub command: &'static str,
    pub cfg: RunConfig,
    digests: BTreeMap<String, String>,
}

impl Session {
    pub fn open(command: &'static str, args: &RunArgs) -> Result<Self> {
        let cfg = RunConfig::resolve(args)?;
        ensure_dir(&cfg.out)?;
        Ok(Self { command, cfg, digests: BTreeMap::new() })
    }

    pub fn finish(mut self, stage: impl FnOnce(&mut Session) -> Result<()>) -> Result<()> {
        stage(&mut self)?;
        let entry = json!({ "config": self.cfg, "inputs": self.digests });
        record_manifest(&self.cfg.out, self.command, entry)
    }

    pub fn warn(&self, msg: impl std::fmt::Display) {
        eprintln!("warning: [{}] {msg}", self.command);
    }

    fn read(&mut self, path: &Path) -> std::io::Result<Vec<u8>> {
        let bytes = std::fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        let hex = digest.iter().map(|b| format!("{b:02x}")).collect::<String>();
        self.digests.insert(path.display().to_string(), hex);
        Ok(bytes)
    }

    /// Reads a user-supplied input file; `flag` names the option for the
    /// error when it was not given.
    pub fn read_input(&mut self, flag: &str, path: Option<PathBuf>) -> Result<(PathBuf, Vec<u8>)> {
        let path = path.ok_or_else(|| CliError::Input(format!("--{flag} is required")))?;
        let bytes = self
            .read(&path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Ok((path, bytes))
    }

    pub fn artifact_path(&self, name: &str) -> PathBuf {
        self.cfg.out.join(name)
    }

    /// Reads an output of an earlier stage.
    pub fn read_artifact(&mut self, stage: &'static str, name: &str) -> Result<Vec<u8>> {
        let path = self.artifact_path(name);
        if !path.is_file() {
            return Err(CliError::MissingStage { stage, path });
        }
        self.read(&path)
            .map_err(|e| CliError::Internal(format!("cannot read {}: {e}", path.display())))
    }

    pub fn write_artifact(&self, name: &str, bytes: &[u8]) -> Result<()> {
        write_file(&self.artifact_path(name), bytes)
    }
}
