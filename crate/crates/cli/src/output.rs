//! Run artifacts: CSV tables, the manifest and the prose run log.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Floats carry 17 significant digits.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

/// Leading columns followed by `x_1, ..., x_n`.
pub fn header(leading: &[&str], dim: usize) -> Vec<String> {
    leading
        .iter()
        .map(|s| s.to_string())
        .chain((1..=dim).map(|i| format!("x_{i}")))
        .collect()
}

pub fn push_coords(row: &mut Vec<String>, x: &[f64]) {
    row.extend(x.iter().map(|&v| float(v)));
}

pub fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes a CSV table; fields are quoted only when needed.
pub fn write_csv<I>(path: &Path, header: &[String], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let csv_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::io(path, std::io::Error::other(format!("{other:?}"))),
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Prose for humans: mirrored to the `log` stream and to `run.log`.
pub struct RunLog {
    path: PathBuf,
    file: BufWriter<File>,
}

impl RunLog {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join("run.log");
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        Ok(RunLog {
            path,
            file: BufWriter::new(file),
        })
    }

    pub fn info(&mut self, line: &str) -> Result<(), CliError> {
        log::info!("{line}");
        self.write(line)
    }

    pub fn warn(&mut self, line: &str) -> Result<(), CliError> {
        log::warn!("{line}");
        self.write(&format!("WARNING: {line}"))
    }

    fn write(&mut self, line: &str) -> Result<(), CliError> {
        writeln!(self.file, "{line}")
            .and_then(|_| self.file.flush())
            .map_err(|e| CliError::io(&self.path, e))
    }
}
