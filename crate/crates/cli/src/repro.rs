//! `repro`: named presets that regenerate the benchmark figures' data.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{KeyValues, RunConfig, VERSION};
use crate::error::CliError;
use crate::output::{self, float, RunLog};
use crate::run::{self, RunOutcome, SUMMARY_COLUMNS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
}

impl FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            _ => Err(CliError::Config(format!("unknown preset `{s}` (expected fig1, fig2 or fig3)"))),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        })
    }
}

/// One curve of a preset: its label and the keys of its run.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub keys: KeyValues,
}

fn keys(pairs: &[(&str, &str)]) -> KeyValues {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

impl Figure {
    pub fn curves(self) -> Vec<Curve> {
        match self {
            Figure::Fig1 => vec![Curve {
                label: "example2_continuous".into(),
                keys: keys(&[
                    ("problem", "example2"),
                    ("solver", "continuous"),
                    ("p", "0.2"),
                    ("q", "0.4"),
                    ("t_end", "200"),
                    ("x0", "random:1:1"),
                    ("target", "1e-3"),
                ]),
            }],
            Figure::Fig2 => [("0.2", "0.4", "0.5"), ("0.1", "0.3", "0.6"), ("0.25", "0.5", "0.7"), ("0.3", "0.4", "0.6")]
                .iter()
                .map(|(p, q, r)| Curve {
                    label: format!("p{p}_q{q}_r{r}"),
                    keys: keys(&[
                        ("problem", "example2"),
                        ("solver", "discrete"),
                        ("p", p),
                        ("q", q),
                        ("r", r),
                        ("max_iter", "1000000"),
                        ("target", "1e-6"),
                        ("x0", "random:1:1"),
                    ]),
                })
                .collect(),
            Figure::Fig3 => [5, 10, 20]
                .iter()
                .map(|n| {
                    let problem = format!("example3:n={n}");
                    Curve {
                        label: format!("example3_n{n}"),
                        keys: keys(&[
                            ("problem", &problem),
                            ("solver", "continuous"),
                            ("p", "0.2"),
                            ("q", "0.4"),
                            ("t_end", "100"),
                            ("x0", "random:1:1"),
                        ]),
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReproOutcome {
    pub figure: Figure,
    pub runs: Vec<(String, RunOutcome)>,
    pub dir: PathBuf,
}

impl ReproOutcome {
    pub fn all_converged(&self) -> bool {
        self.runs.iter().all(|(_, r)| r.summary.converged)
    }
}

/// Runs every curve of `figure` under `out/<figure>/<curve>/` and writes
/// the figure-level `summary.csv` and `plot_data.csv`.
pub fn run_figure(figure: Figure, out: &Path) -> Result<ReproOutcome, CliError> {
    let dir = out.join(figure.to_string());
    let configs = figure
        .curves()
        .into_iter()
        .map(|c| {
            let mut flags = c.keys;
            flags.insert("out".into(), dir.join(&c.label).display().to_string());
            RunConfig::resolve(&KeyValues::new(), &flags).map(|cfg| (c.label, cfg))
        })
        .collect::<Result<Vec<_>, _>>()?;
    output::create_dir(&dir)?;
    let mut log = RunLog::create(&dir)?;
    log.info(&format!("repro {figure}: {} runs (version {VERSION})", configs.len()))?;

    // Collected in preset order whatever the completion order.
    let runs = configs
        .par_iter()
        .map(|(label, cfg)| run::execute(cfg).map(|r| (label.clone(), r)))
        .collect::<Result<Vec<_>, _>>()?;

    let axis = match figure {
        Figure::Fig2 => "k",
        _ => "t",
    };
    let mut header = vec!["curve".to_string()];
    header.extend(SUMMARY_COLUMNS.map(String::from));
    output::write_csv(
        &dir.join("summary.csv"),
        &header,
        runs.iter().map(|(label, r)| {
            let mut row = vec![label.clone()];
            row.extend(r.summary.row());
            row
        }),
    )?;
    // Log-scale plots cannot show exact zeros, so only positive errors are kept.
    output::write_csv(
        &dir.join("plot_data.csv"),
        &["curve", axis, "err"].map(String::from),
        runs.iter().flat_map(|(label, r)| {
            r.curve.iter().filter_map(move |(x, e)| match e {
                Some(e) if *e > 0.0 => Some(vec![label.clone(), float(*x), float(*e)]),
                _ => None,
            })
        }),
    )?;
    for (label, r) in &runs {
        log.info(&format!("{label}: {} ({})", r.summary.status, r.dir.display()))?;
    }
    Ok(ReproOutcome {
        figure,
        runs,
        dir,
    })
}
