//! CSV and run-manifest writers.
//!
//! Numeric CSV fields are formatted at 12 significant digits so that
//! identical config + seed reproduce byte-identical files. Every CSV is
//! accompanied by a TOML manifest recording the parameters, grids, seeds,
//! integrator settings, and wall-clock time of the run that produced it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::RunMetadata;

/// 12-significant-digit numeric formatting (deterministic across platforms).
pub fn fmt_g(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    format!("{x:.11e}")
}

pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut file = fs::File::create(path)?;
    writeln!(file, "{}", header.join(","))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        writeln!(file, "{}", row.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub outputs: Vec<String>,
    pub metadata: RunMetadata,
}

impl Manifest {
    pub fn new(command: &str, metadata: RunMetadata) -> Self {
        Self {
            command: command.to_string(),
            threads: None,
            outputs: Vec::new(),
            metadata,
        }
    }

    pub fn with_output(mut self, path: &Path) -> Self {
        self.outputs.push(path.display().to_string());
        self
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.manifest.toml", self.command));
        let text = toml::to_string_pretty(self)
            .map_err(|e| Error::config(format!("manifest serialization: {e}")))?;
        fs::write(&path, text)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_g_is_stable() {
        assert_eq!(fmt_g(1.1), "1.10000000000e0");
        assert_eq!(fmt_g(0.0), "0.00000000000e0");
        assert_eq!(fmt_g(-3.1778780957831833), "-3.17787809578e0");
        assert_eq!(fmt_g(f64::INFINITY), "inf");
    }
}
