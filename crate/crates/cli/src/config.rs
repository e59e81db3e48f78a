//! Run configuration: an optional JSON file merged with command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wickrot::analysis::s_grid;
use wickrot::clifford::Signature;
use wickrot::models::ModelDescriptor;
use wickrot::verifier::Tolerances;

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Verify,
    Zeta,
    Heat,
    Index,
    Clifford,
    All,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Verify => "verify",
            Task::Zeta => "zeta",
            Task::Heat => "heat",
            Task::Index => "index",
            Task::Clifford => "clifford",
            Task::All => "all",
        }
    }
}

/// Contents of a `--config` file. Paths are relative to the file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Option<Task>,
    /// model descriptor files or directories of them
    #[serde(default)]
    pub models: Vec<PathBuf>,
    /// inline descriptor
    pub model: Option<ModelDescriptor>,
    pub levels: Option<Vec<usize>>,
    /// `start:stop:step`
    pub s_grid: Option<String>,
    pub t_list: Option<Vec<f64>>,
    pub winding: Option<Vec<i64>>,
    /// `"t,s"`
    pub signatures: Option<Vec<String>>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in cfg.models.iter_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(out) = cfg.out.as_mut() {
            if out.is_relative() {
                *out = base.join(&*out);
            }
        }
        Ok(cfg)
    }
}

/// A descriptor and the name it is reported under.
#[derive(Debug, Clone)]
pub struct NamedModel {
    pub name: String,
    pub descriptor: ModelDescriptor,
}

/// Everything a run needs, validated. Serialized into the report, so it
/// holds no paths or thread counts.
#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub task: Task,
    /// `None`: each descriptor's own default levels
    pub levels: Option<Vec<usize>>,
    pub s_grid: Vec<f64>,
    pub index_s_grid: Vec<f64>,
    pub t_list: Vec<f64>,
    pub windings: Vec<i64>,
    pub signatures: Vec<Signature>,
    pub clifford_samples: usize,
    pub tolerances: Tolerances,
}

pub const DEFAULT_T_LIST: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
pub const DEFAULT_WINDINGS: [i64; 5] = [-2, -1, 0, 1, 2];
/// Residue tables approach `s = 1/2` from above.
pub const INDEX_S_GRID: (f64, f64, f64) = (0.55, 2.0, 0.05);
/// Largest `n = t + s` in the default Clifford sweep.
pub const CLIFFORD_MAX_N: usize = 6;
pub const CLIFFORD_SAMPLES: usize = 1000;

pub fn parse_s_grid(text: &str) -> Result<Vec<f64>, UsageError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || UsageError(format!("--s-grid expects start:stop:step, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    s_grid(v[0], v[1], v[2]).map_err(|e| UsageError(format!("--s-grid: {e}")))
}

pub fn parse_signature(text: &str) -> Result<Signature, UsageError> {
    let bad = || UsageError(format!("--signature expects t,s with t+s >= 1, got {text:?}"));
    let (t, s) = text.split_once(',').ok_or_else(bad)?;
    let t: usize = t.trim().parse().map_err(|_| bad())?;
    let s: usize = s.trim().parse().map_err(|_| bad())?;
    Signature::new(t, s).map_err(|_| bad())
}

pub fn parse_tolerance(text: &str) -> Result<(String, f64), UsageError> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| UsageError(format!("--tol expects KEY=VAL, got {text:?}")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| UsageError(format!("--tol {k}: {v:?} is not a number")))?;
    Ok((k.trim().to_string(), v))
}

fn read_descriptor(path: &Path) -> Result<NamedModel, UsageError> {
    let text = fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read model {}: {e}", path.display())))?;
    let descriptor: ModelDescriptor = serde_json::from_str(&text)
        .map_err(|e| UsageError(format!("invalid model {}: {e}", path.display())))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
    named(descriptor, stem).map_err(|e| UsageError(format!("invalid model {}: {}", path.display(), e.0)))
}

pub fn named(descriptor: ModelDescriptor, fallback: &str) -> Result<NamedModel, UsageError> {
    descriptor.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(NamedModel {
        name: descriptor.name.clone().unwrap_or_else(|| fallback.to_string()),
        descriptor,
    })
}

/// Files are read as-is; directories contribute their `*.json` files in
/// name order.
pub fn load_models(paths: &[PathBuf], mut out: Vec<NamedModel>) -> Result<Vec<NamedModel>, UsageError> {
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| UsageError(format!("cannot list {}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(UsageError(format!("no *.json models in {}", p.display())));
            }
            for f in files {
                out.push(read_descriptor(&f)?);
            }
        } else {
            out.push(read_descriptor(p)?);
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for m in &out {
        if !seen.insert(m.name.clone()) {
            return Err(UsageError(format!("duplicate model name {:?}", m.name)));
        }
    }
    Ok(out)
}

pub fn default_signatures() -> Vec<Signature> {
    let mut out = Vec::new();
    for n in 1..=CLIFFORD_MAX_N {
        for t in 0..=n {
            out.push(Signature::new(t, n - t).expect("n >= 1"));
        }
    }
    out
}

pub fn default_threads() -> usize {
    if let Ok(v) = std::env::var("WICKROT_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                return n;
            }
        }
    }
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn check_levels(levels: &[usize]) -> Result<(), UsageError> {
    if levels.is_empty() || levels.windows(2).any(|w| w[1] <= w[0]) || levels[0] == 0 {
        return Err(UsageError("--levels must be positive and strictly increasing".into()));
    }
    Ok(())
}
