//! Approximate policy iteration: alternate simulation of the current greedy
//! policy with least-squares policy evaluation, keeping every iterate.
//!
//! Successive policies are not expected to improve monotonically (they
//! oscillate), so no early stopping is applied and all parameter vectors are
//! returned for post-hoc re-evaluation. The master seed splits into disjoint
//! streams per (iteration, transition), so extending a run never perturbs
//! earlier iterations.

use crate::basis::{BasisSpec, PolicyParams};
use crate::cem::CemConfig;
use crate::instance::ProblemInstance;
use crate::lstd::{evaluate_policy, SolvePath};
use crate::rng::{streams, RngStream};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::{Duration, Instant};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Discount factor in (0, 1).
    pub gamma: f64,
    /// Policy iterations.
    pub l1: u32,
    /// Transitions simulated per iteration.
    pub l2: u64,
    pub cem: CemConfig,
    pub basis: BasisSpec,
    pub seed: u64,
    /// Standard deviation of the Gaussian initial parameter draw.
    pub theta0_stddev: f64,
    /// Ridge term added to the evaluation system's diagonal (0 disables it).
    #[serde(default)]
    pub ridge: f64,
}

impl TrainConfig {
    pub fn validate(&self, inst: &ProblemInstance) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Config("gamma must lie strictly between 0 and 1".into()));
        }
        if self.l1 == 0 {
            return Err(Error::Config("l1 must be at least 1".into()));
        }
        if self.l2 == 0 {
            return Err(Error::Config("l2 must be at least 1".into()));
        }
        if !(self.theta0_stddev.is_finite() && self.theta0_stddev >= 0.0) {
            return Err(Error::Config("theta0_stddev must be a non-negative number".into()));
        }
        if !(self.ridge.is_finite() && self.ridge >= 0.0) {
            return Err(Error::Config("ridge must be a non-negative number".into()));
        }
        self.cem.validate()?;
        if self.basis.num_items() != inst.num_items() {
            return Err(Error::Config(format!(
                "basis is built for {} items but the instance has {}",
                self.basis.num_items(),
                inst.num_items()
            )));
        }
        Ok(())
    }
}

/// Deterministic per-iteration diagnostics stored in the artifact. Wall time
/// is tracked separately ([`TrainRun::wall_times`]) and belongs in run logs,
/// not artifacts, so identical seeds produce identical files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IterationDiag {
    pub iteration: u32,
    pub solver_path: SolvePath,
    /// Condition estimate of the evaluation system (absent when singular).
    pub condition: Option<f64>,
    pub theta_norm: f64,
    pub mean_sampled_cost: f64,
}

/// The output of a training run: one parameter vector per policy iteration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainRun {
    pub config: TrainConfig,
    pub thetas: Vec<PolicyParams>,
    pub diagnostics: Vec<IterationDiag>,
    #[serde(skip)]
    pub wall_times: Vec<Duration>,
}

/// A run that failed part-way; the completed iterations are preserved so
/// they can be persisted and inspected.
#[derive(Debug, thiserror::Error)]
#[error("training aborted at iteration {iteration}: {reason}")]
pub struct TrainAborted {
    pub iteration: u32,
    pub reason: String,
    pub partial: TrainRun,
}

/// Runs `cfg.l1` policy iterations and returns every parameter vector.
///
/// The initial parameters are drawn i.i.d. Gaussian with mean 0 and standard
/// deviation `theta0_stddev` from the seeded stream; each iteration then
/// evaluates the greedy policy of the previous parameters. The pair
/// `(instance, config)` fully determines the result.
#[allow(clippy::result_large_err)] // the error intentionally carries the partial run
pub fn train(inst: &ProblemInstance, cfg: &TrainConfig) -> std::result::Result<TrainRun, TrainAborted> {
    let abort = |iteration: u32, reason: String, partial: TrainRun| TrainAborted {
        iteration,
        reason,
        partial,
    };
    let mut run = TrainRun {
        config: cfg.clone(),
        thetas: Vec::with_capacity(cfg.l1 as usize),
        diagnostics: Vec::with_capacity(cfg.l1 as usize),
        wall_times: Vec::with_capacity(cfg.l1 as usize),
    };
    if let Err(e) = cfg.validate(inst) {
        return Err(abort(0, e.to_string(), run));
    }

    let master = RngStream::new(cfg.seed);
    let k = cfg.basis.num_features();
    let mut theta_rng = master.substream(streams::THETA0);
    let mut current = PolicyParams(
        (0..k)
            .map(|_| theta_rng.gaussian() * cfg.theta0_stddev)
            .collect(),
    );

    for i in 0..cfg.l1 {
        let started = Instant::now();
        match evaluate_policy(
            inst,
            &cfg.basis,
            &current,
            cfg.gamma,
            cfg.l2,
            &cfg.cem,
            cfg.ridge,
            &master,
            i,
        ) {
            Ok((theta, stats)) => {
                run.diagnostics.push(IterationDiag {
                    iteration: i,
                    solver_path: stats.solve.path,
                    condition: stats.solve.condition,
                    theta_norm: theta.norm(),
                    mean_sampled_cost: stats.mean_sampled_cost,
                });
                run.wall_times.push(started.elapsed());
                run.thetas.push(theta.clone());
                current = theta;
            }
            Err(e) => return Err(abort(i, e.to_string(), run)),
        }
    }
    Ok(run)
}

// ---------------------------------------------------------------------------
// Artifact persistence (schema documented in docs/run_config.md)
// ---------------------------------------------------------------------------

const ARTIFACT_SCHEMA: &str = "cutstock-train-run/1";

#[derive(Serialize, Deserialize)]
struct ArtifactFile {
    schema: String,
    config: TrainConfig,
    thetas: Vec<PolicyParams>,
    diagnostics: Vec<IterationDiag>,
}

impl ArtifactFile {
    fn into_run(self) -> TrainRun {
        TrainRun {
            config: self.config,
            thetas: self.thetas,
            diagnostics: self.diagnostics,
            wall_times: Vec::new(),
        }
    }
}

/// Serializes a run to the JSON artifact format. Output depends only on the
/// run contents, so identical runs produce byte-identical artifacts.
pub fn run_to_json(run: &TrainRun) -> Result<String> {
    let file = ArtifactFile {
        schema: ARTIFACT_SCHEMA.to_string(),
        config: run.config.clone(),
        thetas: run.thetas.clone(),
        diagnostics: run.diagnostics.clone(),
    };
    let mut text =
        serde_json::to_string_pretty(&file).map_err(|e| Error::Artifact(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn save_run(run: &TrainRun, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, run_to_json(run)?)?;
    Ok(())
}

pub fn load_run(path: impl AsRef<Path>) -> Result<TrainRun> {
    let run = load_run_partial(path)?;
    if run.thetas.len() != run.config.l1 as usize {
        return Err(Error::Artifact(format!(
            "artifact holds {} parameter vectors but the config says l1 = {}",
            run.thetas.len(),
            run.config.l1
        )));
    }
    Ok(run)
}

/// Loads an artifact without checking completeness (for inspecting partial
/// runs persisted after an abort).
pub fn load_run_partial(path: impl AsRef<Path>) -> Result<TrainRun> {
    let text = std::fs::read_to_string(&path)?;
    let file: ArtifactFile =
        serde_json::from_str(&text).map_err(|e| Error::Artifact(e.to_string()))?;
    if file.schema != ARTIFACT_SCHEMA {
        return Err(Error::Artifact(format!(
            "unsupported artifact schema {:?} (expected {ARTIFACT_SCHEMA:?})",
            file.schema
        )));
    }
    Ok(file.into_run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisKind;
    use crate::instance::default_paper_instance;

    fn tiny_config(inst: &ProblemInstance) -> TrainConfig {
        TrainConfig {
            gamma: 0.8,
            l1: 2,
            l2: 10,
            cem: CemConfig {
                n1: 2,
                n2: 10,
                ..CemConfig::default()
            },
            basis: BasisSpec::polynomial_default(inst.num_items(), inst.bounds.s_max),
            seed: 4242,
            theta0_stddev: 1.0,
            ridge: 0.0,
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let inst = default_paper_instance();
        let cfg = tiny_config(&inst);
        let a = train(&inst, &cfg).unwrap();
        let b = train(&inst, &cfg).unwrap();
        assert_eq!(a.thetas, b.thetas);
        assert_eq!(run_to_json(&a).unwrap(), run_to_json(&b).unwrap());
    }

    #[test]
    fn extending_l1_preserves_earlier_iterations() {
        let inst = default_paper_instance();
        let mut cfg = tiny_config(&inst);
        let short = train(&inst, &cfg).unwrap();
        cfg.l1 = 3;
        let long = train(&inst, &cfg).unwrap();
        assert_eq!(short.thetas[..], long.thetas[..2]);
    }

    #[test]
    fn returns_l1_parameter_vectors() {
        let inst = default_paper_instance();
        let cfg = tiny_config(&inst);
        let run = train(&inst, &cfg).unwrap();
        assert_eq!(run.thetas.len(), 2);
        assert_eq!(run.diagnostics.len(), 2);
        assert_eq!(run.wall_times.len(), 2);
        for theta in &run.thetas {
            assert_eq!(theta.len(), cfg.basis.num_features());
        }
    }

    #[test]
    fn artifact_roundtrip() {
        let inst = default_paper_instance();
        let cfg = tiny_config(&inst);
        let run = train(&inst, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        save_run(&run, &path).unwrap();
        let back = load_run(&path).unwrap();
        assert_eq!(back.thetas, run.thetas);
        assert_eq!(back.config, run.config);
        // Re-serialization is byte-stable.
        assert_eq!(run_to_json(&back).unwrap(), run_to_json(&run).unwrap());
    }

    #[test]
    fn bad_config_aborts_with_empty_partial() {
        let inst = default_paper_instance();
        let mut cfg = tiny_config(&inst);
        cfg.gamma = 1.0;
        let err = train(&inst, &cfg).unwrap_err();
        assert_eq!(err.iteration, 0);
        assert!(err.partial.thetas.is_empty());
        assert!(err.to_string().contains("gamma"));
    }

    #[test]
    fn sampling_failure_aborts_with_partial_results() {
        // A rejection cap of 1 on the paper instance trips quickly: most
        // proposals at a random state are infeasible on the first attempt.
        let inst = default_paper_instance();
        let mut cfg = tiny_config(&inst);
        cfg.l2 = 200;
        cfg.cem.rejection_cap = 1;
        let err = train(&inst, &cfg).unwrap_err();
        assert!(err.reason.contains("rejection"), "{}", err.reason);
        assert!(err.partial.thetas.len() < 2);
    }

    #[test]
    fn mismatched_basis_rejected() {
        let inst = default_paper_instance();
        let mut cfg = tiny_config(&inst);
        cfg.basis = BasisSpec::new(BasisKind::Polynomial, vec![vec![0, 0]], 70).unwrap();
        let err = train(&inst, &cfg).unwrap_err();
        assert!(err.reason.contains("items"), "{}", err.reason);
    }
}
