//! Deterministic run outputs: CSV data files with 17-significant-digit
//! floats (exact f64 round trip), an optional `# key = value` metadata block,
//! and a TOML manifest carrying the resolved config, tool version, residual
//! diagnostics, and the run's only timestamp.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::OutputConfig;
use crate::error::CliError;

/// Environment variable that re-roots relative output directories.
pub const OUT_ROOT_ENV: &str = "TRIHELIX_OUT_ROOT";

/// Formats with 17 significant digits so parsing the text recovers the
/// exact f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Resolves the output directory (honoring [`OUT_ROOT_ENV`] for relative
/// paths) and creates it.
pub fn prepare_output_dir(output: &OutputConfig) -> Result<PathBuf, CliError> {
    let configured = PathBuf::from(&output.dir);
    let dir = if configured.is_relative() {
        match std::env::var_os(OUT_ROOT_ENV) {
            Some(root) => PathBuf::from(root).join(configured),
            None => configured,
        }
    } else {
        configured
    };
    if dir.exists() && !dir.is_dir() {
        return Err(CliError::io(format!(
            "output path {} exists and is not a directory",
            dir.display()
        )));
    }
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

/// A CSV writer with fixed float formatting and an optional metadata block
/// of `# key = value` lines ahead of the header row.
pub struct CsvFile {
    out: fs::File,
    path: PathBuf,
}

impl CsvFile {
    pub fn create(path: &Path) -> Result<Self, CliError> {
        let out = fs::File::create(path)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
        Ok(CsvFile {
            out,
            path: path.to_owned(),
        })
    }

    fn io_err(&self, e: std::io::Error) -> CliError {
        CliError::io(format!("write to {} failed: {e}", self.path.display()))
    }

    pub fn metadata(&mut self, key: &str, value: impl std::fmt::Display) -> Result<(), CliError> {
        writeln!(self.out, "# {key} = {value}").map_err(|e| self.io_err(e))
    }

    pub fn header(&mut self, columns: &[&str]) -> Result<(), CliError> {
        writeln!(self.out, "{}", columns.join(",")).map_err(|e| self.io_err(e))
    }

    pub fn row(&mut self, values: &[f64]) -> Result<(), CliError> {
        let line = values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",");
        writeln!(self.out, "{line}").map_err(|e| self.io_err(e))
    }

    /// Row with a leading non-numeric cell (labels, modes).
    pub fn labeled_row(&mut self, label: &str, values: &[f64]) -> Result<(), CliError> {
        let mut cells = vec![label.to_owned()];
        cells.extend(values.iter().map(|&v| fmt_f64(v)));
        writeln!(self.out, "{}", cells.join(",")).map_err(|e| self.io_err(e))
    }
}

/// Writes `manifest.toml`: tool identity, the resolved configuration, and
/// run diagnostics. The timestamp lives here and only here, so data files
/// stay byte-identical across reruns.
pub fn write_manifest(
    dir: &Path,
    resolved_config: &toml::Value,
    diagnostics: &[(String, String)],
) -> Result<(), CliError> {
    let mut doc = toml::value::Table::new();

    let mut tool = toml::value::Table::new();
    tool.insert("name".into(), toml::Value::String("trihelix".into()));
    tool.insert(
        "version".into(),
        toml::Value::String(env!("CARGO_PKG_VERSION").into()),
    );
    let unix_time = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    tool.insert("created_unix".into(), toml::Value::Integer(unix_time as i64));
    doc.insert("tool".into(), toml::Value::Table(tool));

    doc.insert("config".into(), resolved_config.clone());

    let mut diag = toml::value::Table::new();
    for (key, value) in diagnostics {
        diag.insert(key.clone(), toml::Value::String(value.clone()));
    }
    doc.insert("diagnostics".into(), toml::Value::Table(diag));

    let text = toml::to_string_pretty(&toml::Value::Table(doc))
        .map_err(|e| CliError::io(format!("manifest serialization failed: {e}")))?;
    fs::write(dir.join("manifest.toml"), text)
        .map_err(|e| CliError::io(format!("cannot write manifest: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for v in [
            0.1,
            -1.0 / 3.0,
            std::f64::consts::PI,
            1.2345678901234567e-30,
            6.02214076e23,
        ] {
            let parsed: f64 = fmt_f64(v).parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits(), "value {v}");
        }
    }
}
