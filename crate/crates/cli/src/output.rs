//! Result files and their manifests. Both are written to a temporary file
//! in the target directory and renamed into place.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use tempfile::NamedTempFile;

use crate::config::Conflict;
use crate::CliError;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// `results/curve.csv` → `results/curve.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.manifest.json"))
}

/// Serializes rows under a header.
pub fn csv_bytes<R: Serialize>(header: &[&str], rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Io(format!("csv: {e}"));
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.serialize(row).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: &'static str,
    pub timestamp_unix: u64,
    pub config: BTreeMap<String, Value>,
    /// Keys given both as a flag and in the config file.
    pub conflicts: BTreeMap<String, Conflict>,
    pub config_file: Option<PathBuf>,
    pub output: PathBuf,
    /// `[min, max]` of the σ used to scale matrices, per ensemble.
    pub sigma_used: BTreeMap<String, [f64; 2]>,
    pub total_trials: u64,
    pub wall_time_seconds: f64,
}

impl Manifest {
    pub fn new(command: &str, output: &Path) -> Self {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .unwrap_or(Duration::ZERO)
                .as_secs(),
            config: BTreeMap::new(),
            conflicts: BTreeMap::new(),
            config_file: None,
            output: output.to_path_buf(),
            sigma_used: BTreeMap::new(),
            total_trials: 0,
            wall_time_seconds: 0.0,
        }
    }

    pub fn add_sigma(&mut self, ensemble: &str, range: Option<(f64, f64)>) {
        let Some((lo, hi)) = range else { return };
        let entry = self.sigma_used.entry(ensemble.to_string()).or_insert([lo, hi]);
        entry[0] = entry[0].min(lo);
        entry[1] = entry[1].max(hi);
    }

    pub fn write(&self, out: &Path) -> Result<PathBuf, CliError> {
        let path = manifest_path(out);
        let mut text = serde_json::to_vec_pretty(self).map_err(|e| CliError::Io(format!("manifest: {e}")))?;
        text.push(b'\n');
        write_atomic(&path, &text)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_sits_beside_output() {
        assert_eq!(
            manifest_path(Path::new("results/curve.csv")),
            PathBuf::from("results/curve.manifest.json")
        );
        assert_eq!(manifest_path(Path::new("out")), PathBuf::from("out.manifest.json"));
    }

    #[test]
    fn csv_has_header_then_rows() {
        let bytes = csv_bytes(&["lag", "value"], &[(0usize, 1.0f64), (1, 0.5)]).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "lag,value\n0,1.0\n1,0.5\n");
    }

    #[test]
    fn sigma_ranges_merge() {
        let mut m = Manifest::new("x", Path::new("x.csv"));
        m.add_sigma("a", Some((1.0, 2.0)));
        m.add_sigma("a", Some((0.5, 1.5)));
        m.add_sigma("a", None);
        assert_eq!(m.sigma_used["a"], [0.5, 2.0]);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
