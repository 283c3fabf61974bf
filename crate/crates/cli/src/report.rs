//! Run reports and the determinism hash over emitted files.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// The configuration as resolved, defaults filled in.
    pub config: serde_json::Value,
    pub results: serde_json::Value,
    pub files: Vec<FileDigest>,
    pub wall_time_seconds: f64,
    /// SHA-256 over the names and contents of `files`, in name order.
    pub determinism_hash: String,
}

/// Files produced by one experiment, written only after it succeeds.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn csv(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        write(&mut buf).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
        self.add(name, buf);
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut buf = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
        buf.push(b'\n');
        self.add(name, buf);
        Ok(())
    }
}

pub fn determinism_hash(files: &[(String, Vec<u8>)]) -> String {
    let mut idx: Vec<usize> = (0..files.len()).collect();
    idx.sort_by(|&a, &b| files[a].0.cmp(&files[b].0));
    let mut h = Sha256::new();
    for i in idx {
        let (name, bytes) = &files[i];
        h.update(name.as_bytes());
        h.update([0u8]);
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `results.json`, the data files and `report.json` into `dir`.
pub fn finish(
    dir: &Path,
    subcommand: &str,
    config: serde_json::Value,
    results: serde_json::Value,
    mut outputs: Outputs,
    started: Instant,
) -> Result<RunReport, CliError> {
    outputs.json("results.json", &results)?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::with_capacity(outputs.files.len());
    outputs.files.sort_by(|a, b| a.0.cmp(&b.0));
    for (name, bytes) in &outputs.files {
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        files.push(FileDigest { path: name.clone(), bytes: bytes.len() as u64, sha256: hex(&Sha256::digest(bytes)) });
    }
    let report = RunReport {
        tool: "flaglab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: subcommand.into(),
        config,
        results,
        files,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        determinism_hash: determinism_hash(&outputs.files),
    };
    let path = dir.join("report.json");
    let mut buf = serde_json::to_vec_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    buf.push(b'\n');
    std::fs::write(&path, buf).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_insertion_order() {
        let a = vec![("x".to_string(), vec![1, 2]), ("y".to_string(), vec![3])];
        let b = vec![a[1].clone(), a[0].clone()];
        assert_eq!(determinism_hash(&a), determinism_hash(&b));
        let c = vec![("x".to_string(), vec![1]), ("y".to_string(), vec![2, 3])];
        assert_ne!(determinism_hash(&a), determinism_hash(&c));
    }
}
