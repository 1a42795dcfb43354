//! Helpers shared by the command-line tests and the acceptance suite.
#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn gvi() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gvi"));
    cmd.env_remove("GVI_OUT_DIR").env("RUST_LOG", "info");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    gvi().args(args).output().expect("spawn gvi")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Numeric CSV table; empty cells read as NaN.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn read(path: &Path) -> Table {
        let mut reader = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let header = reader.headers().unwrap().iter().map(str::to_string).collect();
        let rows = reader
            .records()
            .map(|r| {
                r.unwrap()
                    .iter()
                    .map(|c| if c.is_empty() { f64::NAN } else { c.parse().unwrap() })
                    .collect()
            })
            .collect();
        Table { header, rows }
    }

    pub fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name} in {:?}", self.header))
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        let c = self.col(name);
        self.rows.iter().map(|r| r[c]).collect()
    }

    /// Coordinates `x_1..x_n` of row `i`.
    pub fn coords(&self, i: usize) -> Vec<f64> {
        let first = self.col("x_1");
        self.rows[i][first..].to_vec()
    }
}

/// Closed-form trajectory of the truncated l2 problem under the power-law
/// flow: rotation damped by `e^(-∫α)` on the first two coordinates, `e^(-∫α)`
/// decay up to `m`, and `e^(-((j+1)/j)∫μ)` beyond.
pub fn example1_closed_form(m: usize, p: f64, q: f64, x0: &[f64], t: f64) -> Vec<f64> {
    let int_alpha = ((1.0 + t).powf(1.0 - p) - 1.0) / (1.0 - p);
    let int_mu = ((1.0 + t).powf(1.0 + q) - 1.0) / (1.0 + q);
    let decay = (-int_alpha).exp();
    let (s, c) = t.sin_cos();
    (1..=x0.len())
        .map(|j| match j {
            1 => decay * (x0[0] * c + x0[1] * s),
            2 => decay * (-x0[0] * s + x0[1] * c),
            k if k <= m => decay * x0[k - 1],
            k => x0[k - 1] * (-(k as f64 + 1.0) / k as f64 * int_mu).exp(),
        })
        .collect()
}

/// Largest coordinate deviation of a `trajectory.csv` from the closed form.
pub fn closed_form_deviation(table: &Table, m: usize, p: f64, q: f64, x0: &[f64]) -> f64 {
    let t = table.column("t");
    (0..table.rows.len())
        .flat_map(|i| {
            let exact = example1_closed_form(m, p, q, x0, t[i]);
            table.coords(i).into_iter().zip(exact).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

/// Byte contents of every CSV file directly inside `dir`, sorted by name.
pub fn csv_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}
