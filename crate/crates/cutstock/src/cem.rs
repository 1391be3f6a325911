//! Cross-entropy search for greedy actions.
//!
//! The greedy decision `argmin_x φ(s, x) · θ` over the feasible set is a
//! nonconvex integer program; solving it exactly per simulation step is out
//! of the question. The search instead keeps a multinomial distribution over
//! patterns, repeatedly samples feasible candidates, scores them, and refits
//! the distribution to the elite fraction, tracking the best candidate seen
//! across all rounds.

use crate::basis::{q_value, FeatureMap, PolicyParams};
use crate::dynamics::{sample_feasible_decision, Decision, State, DEFAULT_REJECTION_CAP};
use crate::instance::ProblemInstance;
use crate::rng::RngStream;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Cross-entropy search parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CemConfig {
    /// Number of distribution-update rounds.
    pub n1: u32,
    /// Candidates sampled per round.
    pub n2: u32,
    /// Elite fraction in (0, 1).
    pub rho: f64,
    /// Cap on rejection-sampling attempts per candidate.
    pub rejection_cap: u32,
    /// Probability smoothing `p <- (1 - alpha) p' + alpha p`; 0 disables it.
    pub smoothing: f64,
}

impl Default for CemConfig {
    fn default() -> Self {
        Self {
            n1: 10,
            n2: 100,
            rho: 0.1,
            rejection_cap: DEFAULT_REJECTION_CAP,
            smoothing: 0.0,
        }
    }
}

impl CemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 {
            return Err(Error::Config("cem.n1 must be at least 1".into()));
        }
        if self.n2 == 0 {
            return Err(Error::Config("cem.n2 must be at least 1".into()));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Config("cem.rho must lie strictly between 0 and 1".into()));
        }
        if self.rejection_cap == 0 {
            return Err(Error::Config("cem.rejection_cap must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.smoothing) {
            return Err(Error::Config("cem.smoothing must lie in [0, 1)".into()));
        }
        Ok(())
    }

    fn elite_count(&self) -> usize {
        ((self.rho * self.n2 as f64).ceil() as usize).max(1)
    }
}

/// Search state exposed for diagnostics: the sampling distribution and the
/// best candidate found so far.
#[derive(Clone, Debug)]
pub struct CemState {
    pub probs: Vec<f64>,
    pub best_x: Decision,
    pub best_q: f64,
}

/// Per-round best scores, for inspecting convergence.
#[derive(Clone, Debug, Default)]
pub struct CemTrace {
    pub best_q_per_round: Vec<f64>,
}

/// Refits the multinomial to the elite sample: each pattern's probability is
/// its share of all objects cut across the elites. When every elite is the
/// zero decision the estimator is undefined and the previous distribution is
/// kept.
pub fn update_probs(elites: &[&Decision], prev: &[f64]) -> Vec<f64> {
    assert!(!elites.is_empty(), "elite set must be nonempty");
    let n = prev.len();
    let mut sums = vec![0.0f64; n];
    for x in elites {
        assert_eq!(x.0.len(), n, "elite decision dimension mismatch");
        for (s, &v) in sums.iter_mut().zip(&x.0) {
            *s += v as f64;
        }
    }
    let total: f64 = sums.iter().sum();
    if total == 0.0 {
        return prev.to_vec();
    }
    sums.iter().map(|&s| s / total).collect()
}

/// Finds a heuristic greedy decision for state `s` under parameters `params`.
///
/// The returned decision is always feasible; its score never beats the true
/// feasible minimum (it is one of the scored candidates). Ties are resolved
/// first-encountered under the seeded sampling order, so calls are
/// reproducible given the stream.
pub fn greedy_action<F: FeatureMap + ?Sized>(
    inst: &ProblemInstance,
    features: &F,
    params: &PolicyParams,
    s: &State,
    cfg: &CemConfig,
    rng: &mut RngStream,
) -> Result<Decision> {
    let (state, _) = search(inst, features, params, s, cfg, rng)?;
    Ok(state.best_x)
}

/// Like [`greedy_action`] but returns the final search state and trace.
pub fn search<F: FeatureMap + ?Sized>(
    inst: &ProblemInstance,
    features: &F,
    params: &PolicyParams,
    s: &State,
    cfg: &CemConfig,
    rng: &mut RngStream,
) -> Result<(CemState, CemTrace)> {
    debug_assert!(cfg.validate().is_ok());
    let n = inst.num_patterns();
    let mut probs = vec![1.0 / n as f64; n];
    let mut best: Option<(Decision, f64)> = None;
    let elite_count = cfg.elite_count().min(cfg.n2 as usize);
    let mut trace = CemTrace::default();

    let mut candidates: Vec<(Decision, f64)> = Vec::with_capacity(cfg.n2 as usize);
    for _round in 0..cfg.n1 {
        candidates.clear();
        for _ in 0..cfg.n2 {
            let x = sample_feasible_decision(inst, s, &probs, cfg.rejection_cap, rng)?;
            let q = q_value(&features.eval(inst, s, &x), params);
            if best.as_ref().is_none_or(|(_, bq)| q < *bq) {
                best = Some((x.clone(), q));
            }
            candidates.push((x, q));
        }
        let mut scores: Vec<f64> = candidates.iter().map(|(_, q)| *q).collect();
        scores.sort_by(f64::total_cmp);
        let delta = scores[elite_count - 1];
        let elites: Vec<&Decision> = candidates
            .iter()
            .filter(|(_, q)| *q <= delta)
            .map(|(x, _)| x)
            .collect();
        let fitted = update_probs(&elites, &probs);
        probs = if cfg.smoothing > 0.0 {
            fitted
                .iter()
                .zip(&probs)
                .map(|(&f, &p)| (1.0 - cfg.smoothing) * f + cfg.smoothing * p)
                .collect()
        } else {
            fitted
        };
        trace
            .best_q_per_round
            .push(best.as_ref().map(|(_, q)| *q).expect("n2 >= 1"));
    }

    let (best_x, best_q) = best.expect("n1, n2 >= 1 guarantee a candidate");
    Ok((
        CemState {
            probs,
            best_x,
            best_q,
        },
        trace,
    ))
}
