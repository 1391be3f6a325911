//! Least-squares policy evaluation from sampled transitions.
//!
//! Each absorbed transition contributes a rank-1 update
//! `A += φ (φ - γ φ')ᵀ` and `b += φ c`; the evaluated parameter vector solves
//! `A θ = b`. Running sums are kept instead of sample averages since the 1/N
//! factor cancels in the solve. A singular or ill-conditioned system falls
//! back to the minimum-norm least-squares solution via SVD, and the taken
//! path is reported so runs can log it.

use crate::basis::{FeatureMap, FeatureVector, PolicyParams};
use crate::cem::{self, CemConfig};
use crate::dynamics::{
    cost, sample_feasible_decision, sample_uniform_state, transition, sample_demand,
};
use crate::instance::ProblemInstance;
use crate::rng::{streams, RngStream};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One sampled transition, already featurized: φ at the visited pair, φ at
/// the successor pair under the evaluated policy, and the realized cost.
#[derive(Clone, Debug)]
pub struct TransitionSample {
    pub phi_sx: FeatureVector,
    pub phi_next: FeatureVector,
    pub cost: f64,
}

/// Relative singular-value cutoff below which the solver treats the system
/// as rank deficient and switches to the pseudo-inverse path.
pub const RANK_REL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolvePath {
    Direct,
    PseudoInverse,
}

/// Diagnostics from one solve.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SolveInfo {
    pub path: SolvePath,
    /// Ratio of largest to smallest singular value; `None` when singular.
    pub condition: Option<f64>,
    /// Relative residual `||Aθ - b|| / ||b||` (0 when `b` is zero).
    pub residual: f64,
}

/// Accumulates the sampled linear system.
#[derive(Clone, Debug)]
pub struct LstdAccumulator {
    a_hat: DMatrix<f64>,
    b_hat: DVector<f64>,
    count: u64,
    gamma: f64,
}

impl LstdAccumulator {
    /// `gamma` may be zero (the solve degenerates to a regression of
    /// immediate cost on features) but must be below 1.
    pub fn new(num_features: usize, gamma: f64) -> Self {
        assert!(num_features >= 1);
        assert!((0.0..1.0).contains(&gamma), "gamma must lie in [0, 1)");
        Self {
            a_hat: DMatrix::zeros(num_features, num_features),
            b_hat: DVector::zeros(num_features),
            count: 0,
            gamma,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn num_features(&self) -> usize {
        self.b_hat.len()
    }

    /// Adds one transition's rank-1 update.
    pub fn absorb(&mut self, t: &TransitionSample) {
        let k = self.num_features();
        assert_eq!(t.phi_sx.len(), k, "phi_sx length mismatch");
        assert_eq!(t.phi_next.len(), k, "phi_next length mismatch");
        for r in 0..k {
            let pr = t.phi_sx.0[r];
            if pr == 0.0 {
                continue;
            }
            for c in 0..k {
                self.a_hat[(r, c)] += pr * (t.phi_sx.0[c] - self.gamma * t.phi_next.0[c]);
            }
            self.b_hat[r] += pr * t.cost;
        }
        self.count += 1;
    }

    /// Merges another accumulator (exact: both sides are plain sums).
    pub fn merge(&mut self, other: &LstdAccumulator) {
        assert_eq!(self.num_features(), other.num_features());
        assert_eq!(self.gamma.to_bits(), other.gamma.to_bits());
        self.a_hat += &other.a_hat;
        self.b_hat += &other.b_hat;
        self.count += other.count;
    }

    /// Solves `A θ = b`, falling back to the minimum-norm least-squares
    /// solution when the system is rank deficient.
    pub fn solve(&self) -> Result<(PolicyParams, SolveInfo)> {
        self.solve_ridge(0.0)
    }

    /// Like [`solve`](Self::solve) with `ridge` added to the diagonal first.
    pub fn solve_ridge(&self, ridge: f64) -> Result<(PolicyParams, SolveInfo)> {
        if self.count == 0 {
            return Err(Error::EmptySample);
        }
        let mut a = self.a_hat.clone();
        if ridge != 0.0 {
            for i in 0..a.nrows() {
                a[(i, i)] += ridge;
            }
        }
        let svd = a.clone().svd(true, true);
        let sv = &svd.singular_values;
        let sigma_max = sv.iter().cloned().fold(0.0_f64, f64::max);
        let sigma_min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        let tol = RANK_REL_TOL * sigma_max;
        let rank_deficient = sigma_max == 0.0 || sigma_min <= tol;
        let theta = svd
            .solve(&self.b_hat, tol)
            .map_err(|e| Error::Solve(e.to_string()))?;
        let b_norm = self.b_hat.norm();
        let residual = if b_norm == 0.0 {
            0.0
        } else {
            (&a * &theta - &self.b_hat).norm() / b_norm
        };
        let info = SolveInfo {
            path: if rank_deficient {
                SolvePath::PseudoInverse
            } else {
                SolvePath::Direct
            },
            condition: (sigma_min > 0.0).then(|| sigma_max / sigma_min),
            residual,
        };
        Ok((PolicyParams(theta.iter().cloned().collect()), info))
    }
}

/// Per-iteration statistics reported by [`evaluate_policy`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolicyEvalStats {
    pub solve: SolveInfo,
    pub mean_sampled_cost: f64,
}

/// Evaluates the greedy policy induced by `params_prev`.
///
/// Simulates `l2` independent transitions — uniform initial inventory,
/// uniform-probability feasible decision, sampled demand — computes the
/// successor's greedy decision by cross-entropy search under `params_prev`,
/// absorbs everything, and solves the accumulated system.
///
/// Transition `t` of iteration `iteration` draws from the stream
/// `streams::train_transition(iteration, t)` of `master`, so results do not
/// depend on thread count and adding iterations or transitions never
/// perturbs earlier ones.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_policy<F: FeatureMap + ?Sized>(
    inst: &ProblemInstance,
    features: &F,
    params_prev: &PolicyParams,
    gamma: f64,
    l2: u64,
    cem_cfg: &CemConfig,
    ridge: f64,
    master: &RngStream,
    iteration: u32,
) -> Result<(PolicyParams, PolicyEvalStats)> {
    assert!(l2 >= 1);
    let uniform = vec![1.0 / inst.num_patterns() as f64; inst.num_patterns()];
    let samples: Vec<(TransitionSample, f64)> = (0..l2)
        .into_par_iter()
        .map(|t| {
            let mut rng = master.substream(streams::train_transition(iteration, t));
            let s = sample_uniform_state(inst, &mut rng);
            let x = sample_feasible_decision(inst, &s, &uniform, cem_cfg.rejection_cap, &mut rng)?;
            let d = sample_demand(inst, &mut rng);
            let c = cost(inst, &s, &x, &d);
            let s_next = transition(inst, &s, &x, &d);
            let x_next = cem::greedy_action(inst, features, params_prev, &s_next, cem_cfg, &mut rng)?;
            let sample = TransitionSample {
                phi_sx: features.eval(inst, &s, &x),
                phi_next: features.eval(inst, &s_next, &x_next),
                cost: c,
            };
            Ok((sample, c))
        })
        .collect::<Result<Vec<_>>>()?;

    // Absorption stays sequential and ordered so results are bit-identical
    // regardless of worker count.
    let mut acc = LstdAccumulator::new(features.num_features(), gamma);
    let mut cost_sum = 0.0;
    for (sample, c) in &samples {
        acc.absorb(sample);
        cost_sum += c;
    }
    let (theta, solve) = acc.solve_ridge(ridge)?;
    let stats = PolicyEvalStats {
        solve,
        mean_sampled_cost: cost_sum / l2 as f64,
    };
    Ok((theta, stats))
}
