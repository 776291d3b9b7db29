//! Run manifests: enough configuration to reproduce every output file
//! byte-for-byte (no timestamps, deterministic key order).

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use glod_core::cache::fnv1a;

use crate::CliResult;

#[derive(Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    /// FNV-1a hash per input file consumed by the run.
    pub input_hashes: BTreeMap<String, String>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str) -> Manifest {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: BTreeMap::new(),
            seeds: Vec::new(),
            input_hashes: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }

    /// Records the FNV-1a hash of every regular file in `dir` whose name
    /// starts with `prefix`.
    pub fn hash_inputs(&mut self, dir: &Path, prefix: &str) -> CliResult<()> {
        let mut entries: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| {
                p.is_file()
                    && p.file_name()
                        .map(|n| n.to_string_lossy().starts_with(prefix))
                        .unwrap_or(false)
            })
            .collect();
        entries.sort();
        for path in entries {
            let bytes = std::fs::read(&path)?;
            self.input_hashes.insert(
                path.file_name().unwrap().to_string_lossy().into_owned(),
                format!("{:016x}", fnv1a(&bytes)),
            );
        }
        Ok(())
    }

    pub fn write(&self, out_dir: &Path) -> CliResult<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        glod_core::io::write_atomic(&out_dir.join("manifest.json"), json.as_bytes())?;
        Ok(())
    }
}
