//! Flat `key = value` configuration shared by config files and manifests.
//!
//! Resolution order is flags, then config-file keys, then defaults. The
//! resolved configuration is what a manifest stores, so feeding a manifest
//! back through `--config` reproduces the run.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

/// Environment variable overriding the default output directory.
pub const OUT_DIR_ENV: &str = "GVI_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "gvi-out";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type KeyValues = BTreeMap<String, String>;

/// Parses `key = value` lines; `#` starts a comment line.
pub fn parse_key_values(text: &str, origin: &str) -> Result<KeyValues, CliError> {
    let mut out = KeyValues::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("{origin}:{}: expected `key = value`, got `{line}`", lineno + 1))
        })?;
        let key = k.trim().to_string();
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("{origin}:{}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(out)
}

pub fn read_key_values(path: &Path) -> Result<KeyValues, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_key_values(&text, &path.display().to_string())
}

pub fn render_key_values(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

fn parse_value<V: FromStr>(key: &str, value: &str) -> Result<V, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value
        .split(',')
        .map(|t| parse_value::<f64>(key, t.trim()))
        .collect()
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Continuous,
    ContinuousStrong,
    Discrete,
    Path,
}

impl Solver {
    pub fn as_str(&self) -> &'static str {
        match self {
            Solver::Continuous => "continuous",
            Solver::ContinuousStrong => "continuous_strong",
            Solver::Discrete => "discrete",
            Solver::Path => "path",
        }
    }
}

impl FromStr for Solver {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "continuous" => Ok(Solver::Continuous),
            "continuous_strong" => Ok(Solver::ContinuousStrong),
            "discrete" => Ok(Solver::Discrete),
            "path" => Ok(Solver::Path),
            other => Err(CliError::Config(format!(
                "unknown solver `{other}` (expected continuous, continuous_strong, discrete or path)"
            ))),
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Initial point: `zeros`, `ones`, `random:SEED:NORM` or an explicit list.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialPoint {
    Zeros,
    Ones,
    /// Seeded uniform direction scaled to `norm`.
    Random { seed: u64, norm: f64 },
    Explicit(Vec<f64>),
}

impl FromStr for InitialPoint {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zeros" => return Ok(InitialPoint::Zeros),
            "ones" => return Ok(InitialPoint::Ones),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("random:") {
            let (seed, norm) = rest
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("x0 `{s}`: expected random:SEED:NORM")))?;
            let norm: f64 = parse_value("x0", norm)?;
            if !(norm >= 0.0) || !norm.is_finite() {
                return Err(CliError::Config(format!("x0 `{s}`: norm must be nonnegative")));
            }
            return Ok(InitialPoint::Random {
                seed: parse_value("x0", seed)?,
                norm,
            });
        }
        Ok(InitialPoint::Explicit(parse_list("x0", s)?))
    }
}

impl fmt::Display for InitialPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialPoint::Zeros => f.write_str("zeros"),
            InitialPoint::Ones => f.write_str("ones"),
            InitialPoint::Random { seed, norm } => write!(f, "random:{seed}:{norm}"),
            InitialPoint::Explicit(v) => f.write_str(&join(v)),
        }
    }
}

/// Fully resolved settings of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub solver: Solver,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    /// Constant `μ` of the strongly monotone flow.
    pub mu: Option<f64>,
    pub x0: InitialPoint,
    pub t_end: f64,
    pub max_iter: u64,
    /// Continuous: final error (or residual) flagged converged.
    /// Discrete: residual at which iteration stops.
    pub target: f64,
    pub rtol: f64,
    pub atol: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub output_dt: f64,
    /// `None` keeps the geometric log thinning.
    pub log_every: Option<u64>,
    /// Feasible-set descriptor replacing the catalog set.
    pub set: Option<String>,
    pub alphas: Vec<f64>,
    pub path_tol: f64,
    pub path_max_iter: u64,
    pub force: bool,
    pub out: PathBuf,
}

const RUN_KEYS: &[&str] = &[
    "command", "version", "problem", "solver", "p", "q", "r", "mu", "x0", "t_end", "max_iter", "target", "rtol",
    "atol", "min_step", "max_step", "output_dt", "log_every", "set", "alphas", "path_tol", "path_max_iter",
    "force", "out",
];

fn check_keys(kv: &KeyValues, allowed: &[&str], command: &str) -> Result<(), CliError> {
    if let Some(k) = kv.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(CliError::Config(format!("unknown config key `{k}`")));
    }
    match kv.get("command") {
        Some(c) if c != command => Err(CliError::Config(format!(
            "configuration is for `{c}`, not `{command}`"
        ))),
        _ => Ok(()),
    }
}

fn default_out() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

impl RunConfig {
    /// Resolves `flags` over `file` over defaults.
    pub fn resolve(file: &KeyValues, flags: &KeyValues) -> Result<Self, CliError> {
        let mut kv = file.clone();
        kv.extend(flags.iter().map(|(k, v)| (k.clone(), v.clone())));
        check_keys(&kv, RUN_KEYS, "solve")?;
        if let Some(v) = kv.get("version") {
            if v != VERSION {
                log::warn!("configuration was written by version {v}, running {VERSION}");
            }
        }
        let get = |k: &str| kv.get(k).map(String::as_str);
        let num = |k: &str, default: f64| get(k).map_or(Ok(default), |v| parse_value::<f64>(k, v));
        let int = |k: &str, default: u64| get(k).map_or(Ok(default), |v| parse_value::<u64>(k, v));

        let problem = get("problem")
            .ok_or_else(|| CliError::Config("missing `problem`".into()))?
            .to_string();
        let solver: Solver = get("solver").unwrap_or("continuous").parse()?;
        let default_target = match solver {
            Solver::Discrete => 1e-6,
            _ => 1e-3,
        };
        let log_every = match get("log_every") {
            None | Some("geometric") => None,
            Some(v) => match parse_value::<u64>("log_every", v)? {
                0 => return Err(CliError::Config("log_every must be positive".into())),
                n => Some(n),
            },
        };
        let alphas = match get("alphas") {
            Some(v) if !v.is_empty() => parse_list("alphas", v)?,
            _ => vec![1.0, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001],
        };
        let force = match get("force") {
            None => false,
            Some(v) => parse_value::<bool>("force", v)?,
        };
        let config = RunConfig {
            problem,
            solver,
            p: num("p", 0.2)?,
            q: num("q", 0.4)?,
            r: num("r", 0.5)?,
            mu: get("mu").map(|v| parse_value("mu", v)).transpose()?,
            x0: get("x0").unwrap_or("zeros").parse()?,
            t_end: num("t_end", 100.0)?,
            max_iter: int("max_iter", 1_000_000)?,
            target: num("target", default_target)?,
            rtol: num("rtol", 1e-8)?,
            atol: num("atol", 1e-10)?,
            min_step: num("min_step", 1e-12)?,
            max_step: num("max_step", 0.1)?,
            output_dt: num("output_dt", 0.1)?,
            log_every,
            set: get("set").filter(|s| !s.is_empty()).map(str::to_string),
            alphas,
            path_tol: num("path_tol", 1e-10)?,
            path_max_iter: int("path_max_iter", 5_000_000)?,
            force,
            out: get("out").map_or_else(default_out, PathBuf::from),
        };
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<(), CliError> {
        let positive = [
            ("t_end", self.t_end),
            ("rtol", self.rtol),
            ("min_step", self.min_step),
            ("max_step", self.max_step),
            ("output_dt", self.output_dt),
            ("path_tol", self.path_tol),
        ];
        if let Some((k, v)) = positive.iter().find(|(_, v)| !(*v > 0.0) || !v.is_finite()) {
            return Err(CliError::Config(format!("`{k}` must be positive, got {v}")));
        }
        if !(self.target >= 0.0) || !(self.atol >= 0.0) {
            return Err(CliError::Config("`target` and `atol` must be nonnegative".into()));
        }
        if self.max_iter == 0 || self.path_max_iter == 0 {
            return Err(CliError::Config("iteration limits must be positive".into()));
        }
        if self.solver == Solver::Path && self.alphas.iter().any(|a| !(*a > 0.0)) {
            return Err(CliError::Config("`alphas` must all be positive".into()));
        }
        Ok(())
    }

    /// Manifest text: every resolved key plus the toolkit version.
    pub fn manifest(&self) -> String {
        let mut pairs: Vec<(&str, String)> = vec![
            ("command", "solve".into()),
            ("version", VERSION.into()),
            ("problem", self.problem.clone()),
            ("solver", self.solver.to_string()),
            ("p", self.p.to_string()),
            ("q", self.q.to_string()),
            ("r", self.r.to_string()),
        ];
        if let Some(mu) = self.mu {
            pairs.push(("mu", mu.to_string()));
        }
        pairs.extend([
            ("x0", self.x0.to_string()),
            ("t_end", self.t_end.to_string()),
            ("max_iter", self.max_iter.to_string()),
            ("target", self.target.to_string()),
            ("rtol", self.rtol.to_string()),
            ("atol", self.atol.to_string()),
            ("min_step", self.min_step.to_string()),
            ("max_step", self.max_step.to_string()),
            ("output_dt", self.output_dt.to_string()),
            (
                "log_every",
                self.log_every.map_or_else(|| "geometric".to_string(), |n| n.to_string()),
            ),
        ]);
        if let Some(set) = &self.set {
            pairs.push(("set", set.clone()));
        }
        pairs.extend([
            ("alphas", join(&self.alphas)),
            ("path_tol", self.path_tol.to_string()),
            ("path_max_iter", self.path_max_iter.to_string()),
            ("force", self.force.to_string()),
            ("out", self.out.display().to_string()),
        ]);
        render_key_values(&pairs)
    }
}

/// Settings of a `check` run.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub problem: String,
    pub samples: usize,
    pub seed: u64,
    pub radius: f64,
    pub out: PathBuf,
}

const CHECK_KEYS: &[&str] = &["command", "version", "problem", "samples", "seed", "radius", "out"];

impl CheckConfig {
    pub fn resolve(file: &KeyValues, flags: &KeyValues) -> Result<Self, CliError> {
        let mut kv = file.clone();
        kv.extend(flags.iter().map(|(k, v)| (k.clone(), v.clone())));
        check_keys(&kv, CHECK_KEYS, "check")?;
        let get = |k: &str| kv.get(k).map(String::as_str);
        let config = CheckConfig {
            problem: get("problem")
                .ok_or_else(|| CliError::Config("missing problem id".into()))?
                .to_string(),
            samples: get("samples").map_or(Ok(10_000), |v| parse_value("samples", v))?,
            seed: get("seed").map_or(Ok(gvi_core::rng::DEFAULT_SEED), |v| parse_value("seed", v))?,
            radius: get("radius").map_or(Ok(2.0), |v| parse_value("radius", v))?,
            out: get("out").map_or_else(default_out, PathBuf::from),
        };
        if config.samples == 0 || !(config.radius > 0.0) || !config.radius.is_finite() {
            return Err(CliError::Config("`samples` and `radius` must be positive".into()));
        }
        Ok(config)
    }

    pub fn manifest(&self) -> String {
        render_key_values(&[
            ("command", "check".into()),
            ("version", VERSION.into()),
            ("problem", self.problem.clone()),
            ("samples", self.samples.to_string()),
            ("seed", self.seed.to_string()),
            ("radius", self.radius.to_string()),
            ("out", self.out.display().to_string()),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(pairs: &[(&str, &str)]) -> KeyValues {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn parses_comments_and_rejects_garbage() {
        let parsed = parse_key_values("# run\nproblem = example2\n\n solver=discrete \n", "t").unwrap();
        assert_eq!(parsed, kv(&[("problem", "example2"), ("solver", "discrete")]));
        assert!(parse_key_values("problem example2", "t").is_err());
        assert!(parse_key_values("p = 1\np = 2", "t").is_err());
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let file = kv(&[("problem", "example2"), ("p", "0.3"), ("q", "0.5")]);
        let flags = kv(&[("p", "0.1")]);
        let c = RunConfig::resolve(&file, &flags).unwrap();
        assert_eq!((c.p, c.q, c.r), (0.1, 0.5, 0.5));
        assert_eq!(c.solver, Solver::Continuous);
        assert_eq!(c.target, 1e-3);
    }

    #[test]
    fn manifest_round_trips() {
        let flags = kv(&[
            ("problem", "example3:n=5"),
            ("solver", "discrete"),
            ("x0", "random:7:0.3"),
            ("log_every", "10"),
            ("set", "box:lower=-1,-1,-1,-1,-1;upper=1,1,1,1,1"),
            ("out", "/tmp/x"),
        ]);
        let c = RunConfig::resolve(&KeyValues::new(), &flags).unwrap();
        let again = RunConfig::resolve(&parse_key_values(&c.manifest(), "m").unwrap(), &KeyValues::new()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let base = kv(&[("problem", "example2")]);
        assert!(RunConfig::resolve(&base, &kv(&[("bogus", "1")])).is_err());
        assert!(RunConfig::resolve(&base, &kv(&[("solver", "implicit")])).is_err());
        assert!(RunConfig::resolve(&base, &kv(&[("t_end", "-1")])).is_err());
        assert!(RunConfig::resolve(&base, &kv(&[("x0", "random:1")])).is_err());
        assert!(RunConfig::resolve(&KeyValues::new(), &KeyValues::new()).is_err());
        assert!(RunConfig::resolve(&base, &kv(&[("command", "check")])).is_err());
    }

    #[test]
    fn initial_point_forms() {
        for text in ["zeros", "ones", "random:7:1", "1,-2.5,3"] {
            let x: InitialPoint = text.parse().unwrap();
            assert_eq!(x.to_string(), text);
        }
    }
}
