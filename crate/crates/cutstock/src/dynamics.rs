//! The controlled inventory process: state transition, period cost,
//! feasibility of cutting decisions, post-decision (available) inventory,
//! and the seeded demand / decision samplers.
//!
//! All functions are pure given their inputs; the only stateful object is
//! the [`RngStream`] passed to the samplers. Unmet demand is lost (inventory
//! never goes negative) and inventory above `s_max` is forbidden rather than
//! truncated, which is what makes `is_feasible` a precondition of
//! [`transition`].

use crate::instance::ProblemInstance;
use crate::rng::RngStream;
use crate::{Error, Result};

/// Initial inventory per item at a decision epoch.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State(pub Vec<u32>);

/// Objects cut per pattern in one period.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decision(pub Vec<u32>);

/// Demand per item realized during one period.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Demand(pub Vec<u32>);

impl State {
    pub fn zero(m: usize) -> Self {
        Self(vec![0; m])
    }
}

impl Decision {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// Total number of objects cut.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// Default cap on rejection-sampling attempts in [`sample_feasible_decision`].
pub const DEFAULT_REJECTION_CAP: u32 = 10_000;

/// Items of each type produced by decision `x`: `(A x)_i`.
pub fn production(inst: &ProblemInstance, x: &Decision) -> Vec<u32> {
    assert_eq!(x.0.len(), inst.num_patterns(), "decision dimension mismatch");
    let m = inst.num_items();
    let mut out = vec![0u32; m];
    for (j, &xj) in x.0.iter().enumerate() {
        if xj == 0 {
            continue;
        }
        for (i, slot) in out.iter_mut().enumerate() {
            *slot += inst.patterns.count(i, j) * xj;
        }
    }
    out
}

/// Available inventory after cutting, before demand: `s + A x`.
pub fn post_decision(inst: &ProblemInstance, s: &State, x: &Decision) -> Vec<u32> {
    assert_eq!(s.0.len(), inst.num_items(), "state dimension mismatch");
    production(inst, x)
        .iter()
        .zip(&s.0)
        .map(|(&p, &si)| si + p)
        .collect()
}

/// Next state: available inventory minus demand, clamped at zero (lost sales).
pub fn transition(inst: &ProblemInstance, s: &State, x: &Decision, d: &Demand) -> State {
    assert_eq!(d.0.len(), inst.num_items(), "demand dimension mismatch");
    let avail = post_decision(inst, s, x);
    State(
        avail
            .iter()
            .zip(&d.0)
            .map(|(&a, &di)| a.saturating_sub(di))
            .collect(),
    )
}

/// The three components of a period's cost.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostTerms {
    pub trim: f64,
    pub holding: f64,
    pub lost_sales: f64,
}

impl CostTerms {
    pub fn total(&self) -> f64 {
        self.trim + self.holding + self.lost_sales
    }
}

/// Period cost split into trim, holding, and lost-sales terms.
pub fn cost_terms(inst: &ProblemInstance, s: &State, x: &Decision, d: &Demand) -> CostTerms {
    assert_eq!(d.0.len(), inst.num_items(), "demand dimension mismatch");
    let trim: f64 = x
        .0
        .iter()
        .zip(&inst.costs.g)
        .map(|(&xj, &gj)| gj * xj as f64)
        .sum();
    let avail = post_decision(inst, s, x);
    let mut holding = 0.0;
    let mut lost_sales = 0.0;
    for i in 0..inst.num_items() {
        let a = avail[i] as f64;
        let di = d.0[i] as f64;
        holding += inst.costs.h_plus[i] * (a - di).max(0.0);
        lost_sales += inst.costs.h_minus[i] * (di - a).max(0.0);
    }
    CostTerms {
        trim,
        holding,
        lost_sales,
    }
}

/// Period cost: trim loss plus inventory holding plus lost sales.
pub fn cost(inst: &ProblemInstance, s: &State, x: &Decision, d: &Demand) -> f64 {
    cost_terms(inst, s, x, d).total()
}

/// Whether `x` is admissible in state `s`: post-decision inventory within
/// `s_max` for every item and at most `x_max` objects cut in total.
pub fn is_feasible(inst: &ProblemInstance, s: &State, x: &Decision) -> bool {
    if x.total() > inst.bounds.x_max {
        return false;
    }
    post_decision(inst, s, x)
        .iter()
        .all(|&a| a <= inst.bounds.s_max)
}

/// Draws a demand vector: total uniform on `d_min..=d_max`, then split over
/// items by sequential categorical draws (an exact multinomial).
pub fn sample_demand(inst: &ProblemInstance, rng: &mut RngStream) -> Demand {
    let spec = &inst.demand;
    let total = rng.uniform_int(spec.d_min, spec.d_max);
    Demand(multinomial(total, &spec.p, inst.num_items(), rng))
}

/// Draws an initial inventory with each component uniform on `0..=s_max`.
pub fn sample_uniform_state(inst: &ProblemInstance, rng: &mut RngStream) -> State {
    State(
        (0..inst.num_items())
            .map(|_| rng.uniform_int(0, inst.bounds.s_max))
            .collect(),
    )
}

/// Draws a feasible decision by rejection: propose a total object count
/// uniform on `0..=x_max`, split it over patterns by a multinomial with the
/// given probabilities, and retry until the candidate is feasible in `s`.
///
/// The zero decision is feasible in every reachable state, so the attempt cap
/// only trips on defective inputs (e.g. a state above `s_max`).
pub fn sample_feasible_decision(
    inst: &ProblemInstance,
    s: &State,
    probs: &[f64],
    rejection_cap: u32,
    rng: &mut RngStream,
) -> Result<Decision> {
    assert_eq!(probs.len(), inst.num_patterns(), "probs dimension mismatch");
    debug_assert!(
        (probs.iter().sum::<f64>() - 1.0).abs() < 1e-9,
        "probs must sum to 1"
    );
    let n = inst.num_patterns();
    for _ in 0..rejection_cap {
        let total = rng.uniform_int(0, inst.bounds.x_max);
        let x = Decision(multinomial(total, probs, n, rng));
        if is_feasible(inst, s, &x) {
            return Ok(x);
        }
    }
    Err(Error::RejectionBudget { cap: rejection_cap })
}

fn multinomial(total: u32, probs: &[f64], len: usize, rng: &mut RngStream) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for _ in 0..total {
        out[rng.categorical(probs)] += 1;
    }
    out
}
