//! Experiment configs, sweep execution and report emission for the
//! `smoothlab` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use smoothlab::grid::check_n;
use smoothlab::lab::{self, CheckReport};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Anything wrong with the config or its parameters; exit status 2.
    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("cannot write `{path}`: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config { field: field.into(), reason: reason.into() }
    }

    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckCall {
    pub id: String,
    pub params: Map<String, Value>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub checks: Vec<CheckCall>,
    /// Grid size for one-dimensional checks that do not set their own.
    pub n: Option<usize>,
    /// Seed for checks that do not set their own.
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub formats: Vec<Format>,
}

pub const DEFAULT_OUT: &str = "smoothlab-out";

fn field_u64(v: &Value, field: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| CliError::config(field, format!("expected a nonnegative integer, got {v}")))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses and validates a JSON config.
    pub fn parse(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| CliError::config("config", e.to_string()))?;
        let obj = root.as_object().ok_or_else(|| CliError::config("config", "expected a JSON object"))?;
        for key in obj.keys() {
            if !["checks", "N", "seed", "out", "formats"].contains(&key.as_str()) {
                return Err(CliError::config(key.clone(), "unknown config field (checks, N, seed, out, formats)"));
            }
        }

        let list = obj
            .get("checks")
            .ok_or_else(|| CliError::config("checks", "missing"))?
            .as_array()
            .ok_or_else(|| CliError::config("checks", "expected an array"))?;
        if list.is_empty() {
            return Err(CliError::config("checks", "no checks configured"));
        }
        let mut checks = Vec::with_capacity(list.len());
        for (i, c) in list.iter().enumerate() {
            let at = |k: &str| format!("checks[{i}].{k}");
            let c = c.as_object().ok_or_else(|| CliError::config(format!("checks[{i}]"), "expected an object"))?;
            if let Some(k) = c.keys().find(|k| *k != "id" && *k != "params") {
                return Err(CliError::config(at(k), "unknown field (id, params)"));
            }
            let id = c.get("id").and_then(Value::as_str).ok_or_else(|| CliError::config(at("id"), "missing or not a string"))?;
            if lab::lookup(id).is_none() {
                return Err(CliError::config(at("id"), format!("unknown check id `{id}`; see --list")));
            }
            let params = match c.get("params") {
                None | Some(Value::Null) => Map::new(),
                Some(Value::Object(m)) => m.clone(),
                Some(_) => return Err(CliError::config(at("params"), "expected an object")),
            };
            checks.push(CheckCall { id: id.to_string(), params });
        }

        let n = match obj.get("N") {
            None | Some(Value::Null) => None,
            Some(v) => {
                let n = field_u64(v, "N")? as usize;
                check_n(n).map_err(|e| CliError::config("N", e.to_string()))?;
                Some(n)
            }
        };
        let seed = match obj.get("seed") {
            None | Some(Value::Null) => None,
            Some(v) => Some(field_u64(v, "seed")?),
        };
        let out = match obj.get("out") {
            None | Some(Value::Null) => PathBuf::from(DEFAULT_OUT),
            Some(Value::String(s)) if !s.is_empty() => PathBuf::from(s),
            Some(_) => return Err(CliError::config("out", "expected a nonempty path string")),
        };
        let formats = match obj.get("formats") {
            None | Some(Value::Null) => vec![Format::Json, Format::Csv],
            Some(Value::Array(xs)) if !xs.is_empty() => {
                let mut v = Vec::new();
                for (i, x) in xs.iter().enumerate() {
                    let f = match x.as_str() {
                        Some("json") => Format::Json,
                        Some("csv") => Format::Csv,
                        _ => return Err(CliError::config(format!("formats[{i}]"), format!("expected \"json\" or \"csv\", got {x}"))),
                    };
                    if !v.contains(&f) {
                        v.push(f);
                    }
                }
                v
            }
            Some(_) => return Err(CliError::config("formats", "expected a nonempty array")),
        };
        Ok(ExperimentConfig { checks, n, seed, out, formats })
    }

    /// Parameters handed to check `i`: its own, plus the global seed and
    /// (for one-dimensional checks without an explicit function) the global
    /// grid size.
    pub fn effective_params(&self, i: usize) -> Value {
        let mut p = self.checks[i].params.clone();
        if let Some(seed) = self.seed {
            p.entry("seed").or_insert(seed.into());
        }
        if let Some(n) = self.n {
            let two_d = p.get("d").and_then(Value::as_u64) == Some(2);
            let explicit_f = matches!(p.get("f"), Some(Value::Object(_)));
            if !two_d && !explicit_f {
                p.entry("N").or_insert(n.into());
            }
        }
        Value::Object(p)
    }
}

/// One executed check.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub index: usize,
    pub report: CheckReport,
}

/// Runs every check, up to `jobs` at a time (`None`: the default pool).
/// Reports come back in config order.
pub fn execute(config: &ExperimentConfig, jobs: Option<usize>) -> Result<Vec<Outcome>> {
    let run = |i: usize| -> Result<Outcome> {
        let id = &config.checks[i].id;
        let report = lab::run_check(id, &config.effective_params(i)).map_err(|e| match e {
            smoothlab::Error::BadParam { field, reason } => CliError::config(format!("checks[{i}].params.{field}"), reason),
            smoothlab::Error::MissingParam(field) => CliError::config(format!("checks[{i}].params.{field}"), "missing"),
            smoothlab::Error::UnknownCheck(id) => CliError::config(format!("checks[{i}].id"), format!("unknown check id `{id}`")),
            other => CliError::config(format!("checks[{i}]"), other.to_string()),
        })?;
        Ok(Outcome { index: i, report })
    };
    dispatch(config.checks.len(), jobs, run).into_iter().collect()
}

#[cfg(feature = "parallel")]
fn dispatch<T: Send>(n: usize, jobs: Option<usize>, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    let work = || (0..n).into_par_iter().map(&f).collect();
    match jobs {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        },
        None => work(),
    }
}

#[cfg(not(feature = "parallel"))]
fn dispatch<T: Send>(n: usize, _jobs: Option<usize>, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).map(f).collect()
}

/// `id,verdict,constant,runtime_ms`, one row per check.
pub fn summary_csv(outcomes: &[Outcome]) -> String {
    let mut out = String::from("id,verdict,constant,runtime_ms\n");
    for o in outcomes {
        let r = &o.report;
        let verdict = if r.passed() { "pass" } else { "fail" };
        let constant = r.constant.map(|c| c.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", r.id, verdict, constant, r.runtime_ms);
    }
    out
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    fs::write(&path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Writes `<idx>_<id>.json`, `<idx>_<id>.csv` and `summary.csv` into `dir`.
/// Returns the written paths.
pub fn emit(dir: &Path, formats: &[Format], outcomes: &[Outcome]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::config("out", format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for o in outcomes {
        let stem = format!("{:02}_{}", o.index, o.report.id);
        if formats.contains(&Format::Json) {
            let text = serde_json::to_string_pretty(&o.report).expect("reports serialize");
            written.push(write(dir.join(format!("{stem}.json")), &(text + "\n"))?);
        }
        if formats.contains(&Format::Csv) {
            written.push(write(dir.join(format!("{stem}.csv")), &o.report.csv())?);
        }
    }
    written.push(write(dir.join("summary.csv"), &summary_csv(outcomes))?);
    Ok(written)
}

/// Registry listing, one `id  anchor` line per check.
pub fn listing() -> String {
    let mut out = String::new();
    for (id, anchor) in lab::list() {
        let _ = writeln!(out, "{id:<16} {anchor}");
    }
    out
}
