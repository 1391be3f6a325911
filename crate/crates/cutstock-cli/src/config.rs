//! Run configuration file: one TOML document holding the instance reference
//! and the training, cross-entropy, basis, and evaluation sections, all
//! optional with defaults matching the shipped dataset's experiment setup.
//! Dotted-path `--override` values are applied to the raw document before
//! typed parsing. Format reference: docs/run_config.md.

use cutstock::basis::{BasisKind, BasisSpec};
use cutstock::cem::CemConfig;
use cutstock::harness::EvalConfig;
use cutstock::instance::{default_paper_instance, load_instance, ProblemInstance};
use cutstock::trainer::TrainConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::CliError;

pub const DEFAULT_GAMMA_SWEEP: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 0.95];

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfigFile {
    /// `builtin:paper` or a path to an instance TOML file.
    pub instance: String,
    /// Root directory for run outputs. Precedence: this field, then the
    /// CUTSTOCK_OUTPUT_ROOT environment variable, then `runs`.
    pub output_root: Option<String>,
    /// Worker threads (0 = machine parallelism).
    pub threads: usize,
    pub train: TrainSection,
    pub cem: CemConfig,
    pub basis: BasisSection,
    pub eval: EvalSection,
}

impl Default for RunConfigFile {
    fn default() -> Self {
        Self {
            instance: "builtin:paper".into(),
            output_root: None,
            threads: 0,
            train: TrainSection::default(),
            cem: CemConfig::default(),
            basis: BasisSection::default(),
            eval: EvalSection::default(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub gamma: f64,
    pub l1: u32,
    pub l2: u64,
    pub seed: u64,
    pub theta0_stddev: f64,
    pub ridge: f64,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            gamma: 0.8,
            l1: 30,
            l2: 50_000,
            seed: 1234,
            theta0_stddev: 1.0,
            ridge: 0.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasisSection {
    pub kind: BasisKind,
    /// Explicit term vectors; omitted means the family's default set.
    pub terms: Option<Vec<Vec<u32>>>,
    pub normalize_polynomial: bool,
}

impl Default for BasisSection {
    fn default() -> Self {
        Self {
            kind: BasisKind::Fourier,
            terms: None,
            normalize_polynomial: false,
        }
    }
}

impl BasisSection {
    pub fn resolve(&self, inst: &ProblemInstance) -> Result<BasisSpec, CliError> {
        let m = inst.num_items();
        let s_max = inst.bounds.s_max;
        let mut spec = match &self.terms {
            Some(terms) => BasisSpec::new(self.kind, terms.clone(), s_max)
                .map_err(|e| CliError::Config(e.to_string()))?,
            None => match self.kind {
                BasisKind::Polynomial => BasisSpec::polynomial_default(m, s_max),
                BasisKind::Fourier => BasisSpec::fourier_default(m, s_max),
            },
        };
        spec.normalize_polynomial = self.normalize_polynomial;
        Ok(spec)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub replications: u32,
    pub horizon: u32,
    pub seed: u64,
    pub bootstrap_resamples: u32,
    pub confidence: f64,
    /// Defaults to the training gamma when omitted.
    pub discount: Option<f64>,
    pub record_traces: bool,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self {
            replications: 10,
            horizon: 200,
            seed: 5678,
            bootstrap_resamples: 1000,
            confidence: 0.95,
            discount: None,
            record_traces: false,
        }
    }
}

/// A config file resolved against its instance.
#[derive(Debug)]
pub struct Resolved {
    pub file: RunConfigFile,
    /// Verbatim text of the loaded config file (echoed into run outputs).
    pub source_text: String,
    pub instance: ProblemInstance,
    pub train: TrainConfig,
    pub eval: EvalConfig,
    pub output_root: PathBuf,
    pub threads: usize,
}

/// Loads the config file, applies `--override` values, and resolves the
/// instance and derived configs.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<Resolved, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("config not found: {}: {e}", path.display())))?;
    resolve_config(&text, overrides)
}

/// Like [`load_config`] but for in-memory text (also used when no config
/// file is given and defaults apply).
pub fn resolve_config(text: &str, overrides: &[String]) -> Result<Resolved, CliError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Config(format!("config parse error: {e}")))?;
    let mut doc = toml::Value::Table(table);
    for ov in overrides {
        apply_override(&mut doc, ov)?;
    }
    let file: RunConfigFile = doc
        .try_into()
        .map_err(|e| CliError::Config(format!("config error: {e}")))?;

    let instance = if file.instance == "builtin:paper" {
        default_paper_instance()
    } else {
        load_instance(&file.instance)
            .map_err(|e| CliError::Config(format!("instance {}: {e}", file.instance)))?
    };
    let basis = file.basis.resolve(&instance)?;
    let train = TrainConfig {
        gamma: file.train.gamma,
        l1: file.train.l1,
        l2: file.train.l2,
        cem: file.cem,
        basis,
        seed: file.train.seed,
        theta0_stddev: file.train.theta0_stddev,
        ridge: file.train.ridge,
    };
    train
        .validate(&instance)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let eval = EvalConfig {
        replications: file.eval.replications,
        horizon: file.eval.horizon,
        seed: file.eval.seed,
        bootstrap_resamples: file.eval.bootstrap_resamples,
        confidence: file.eval.confidence,
        discount: file.eval.discount.unwrap_or(file.train.gamma),
        record_traces: file.eval.record_traces,
    };
    eval.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let output_root = file
        .output_root
        .clone()
        .or_else(|| std::env::var("CUTSTOCK_OUTPUT_ROOT").ok())
        .unwrap_or_else(|| "runs".into());
    Ok(Resolved {
        threads: file.threads,
        source_text: text.to_string(),
        instance,
        train,
        eval,
        output_root: PathBuf::from(output_root),
        file,
    })
}

/// Applies one `path.to.key=value` override to the raw document. Values are
/// parsed as bool, integer, or float before falling back to strings.
fn apply_override(doc: &mut toml::Value, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override {spec:?} is not of the form key=value")))?;
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(CliError::Usage(format!("override path {path:?} is malformed")));
    }
    let mut node = doc;
    for seg in &segments[..segments.len() - 1] {
        node = node
            .as_table_mut()
            .ok_or_else(|| CliError::Usage(format!("override path {path:?} crosses a non-table")))?
            .entry(seg.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| CliError::Usage(format!("override path {path:?} crosses a non-table")))?;
    let value = parse_override_value(raw);
    table.insert(segments[segments.len() - 1].to_string(), value);
    Ok(())
}

fn parse_override_value(raw: &str) -> toml::Value {
    if let Ok(b) = raw.parse::<bool>() {
        return toml::Value::Boolean(b);
    }
    if let Ok(i) = raw.parse::<i64>() {
        return toml::Value::Integer(i);
    }
    if let Ok(f) = raw.parse::<f64>() {
        return toml::Value::Float(f);
    }
    toml::Value::String(raw.to_string())
}
