//! Heuristic cutting policies for the stochastic cutting stock problem.
//!
//! A cutting operation faces random demand for items cut from stock objects
//! according to fixed patterns, with inventory carried between periods and
//! unmet demand lost. This crate models the problem as a discounted
//! infinite-horizon Markov decision process and learns cutting policies by
//! approximate policy iteration: least-squares policy evaluation over linear
//! basis features of the post-decision inventory, with cross-entropy search
//! for greedy actions. Myopic (integer-program) and random baselines share
//! the same policy interface, and a simulation harness produces cost curves,
//! confidence intervals, and discount sweeps.
//!
//! Everything is deterministic given a seed: random draws flow through
//! splittable counter-based streams ([`rng::RngStream`]), so training twice
//! with one config yields byte-identical artifacts.

pub mod baselines;
pub mod basis;
pub mod cem;
pub mod dynamics;
mod error;
pub mod harness;
pub mod instance;
pub mod lstd;
pub mod rng;
pub mod trainer;

pub use baselines::{expected_demand, myopic_decide, MyopicConfig, MyopicPolicy, Policy, RandomPolicy};
pub use basis::{BasisKind, BasisSpec, FeatureMap, FeatureVector, PolicyParams};
pub use cem::CemConfig;
pub use dynamics::{Decision, Demand, State};
pub use error::{Error, Result};
pub use harness::{EvalConfig, EvalReport};
pub use instance::{default_paper_instance, load_instance, InstanceError, ProblemInstance};
pub use rng::RngStream;
pub use trainer::{train, TrainConfig, TrainRun};
