//! Benchmark policies: the per-period myopic integer program and the
//! uniform-random policy, behind a common [`Policy`] interface.
//!
//! The myopic policy covers the expected demand from current inventory at
//! minimum trim cost:
//!
//! ```text
//! min  Σ_j g_j x_j   s.t.  Σ_j a_ij x_j + s_i >= d̄_i,  x_j ∈ Z+
//! ```
//!
//! solved exactly by a depth-first branch-and-bound over pattern counts (no
//! LP relaxation; bounding uses per-item cost ratios). The program as stated
//! ignores the simulator's inventory and object caps, so an optimal solution
//! can be inadmissible; in that case it is re-solved with the caps added,
//! dropping coverage rows greatest-need-first if they become unreachable,
//! and the event is flagged.

use crate::dynamics::{is_feasible, sample_feasible_decision, Decision, State, DEFAULT_REJECTION_CAP};
use crate::instance::{DemandSpec, ProblemInstance};
use crate::rng::RngStream;
use crate::Result;
use std::sync::atomic::{AtomicU64, Ordering};

/// A stationary decision rule. Implementations are stateless per call and
/// safe to drive from concurrent replications with private streams.
pub trait Policy: Sync {
    fn name(&self) -> &str;
    /// Returns a decision feasible for `s`.
    fn decide(&self, inst: &ProblemInstance, s: &State, rng: &mut RngStream) -> Result<Decision>;
}

/// Mean demand per item: the mean total `(d_min + d_max) / 2` split by the
/// item probabilities.
pub fn expected_demand(demand: &DemandSpec) -> Vec<f64> {
    let mean_total = (demand.d_min as f64 + demand.d_max as f64) / 2.0;
    demand.p.iter().map(|&p| p * mean_total).collect()
}

#[derive(Clone, Debug)]
pub struct MyopicConfig {
    /// Expected demand vector d̄ (fractional entries allowed).
    pub d_bar: Vec<f64>,
    /// Branch-and-bound node budget per solve.
    pub node_cap: u64,
}

impl MyopicConfig {
    pub fn for_instance(inst: &ProblemInstance) -> Self {
        Self {
            d_bar: expected_demand(&inst.demand),
            node_cap: 1_000_000,
        }
    }
}

/// Outcome of one myopic decision.
#[derive(Clone, Debug)]
pub struct MyopicOutcome {
    pub decision: Decision,
    /// Trim-cost objective of the returned decision.
    pub objective: f64,
    /// True when the unconstrained optimum violated the simulator caps and a
    /// re-solve with caps was used.
    pub clipped: bool,
    /// Items whose coverage rows had to be dropped to restore feasibility
    /// (0-based indices).
    pub dropped_items: Vec<usize>,
    /// Branch-and-bound nodes expanded across all solves.
    pub nodes_expanded: u64,
}

/// Solves the myopic program for state `s`. Total: every input yields a
/// decision, in the worst case the zero decision with every row dropped.
pub fn myopic_decide(inst: &ProblemInstance, s: &State, cfg: &MyopicConfig) -> MyopicOutcome {
    let m = inst.num_items();
    assert_eq!(s.0.len(), m, "state dimension mismatch");
    assert_eq!(cfg.d_bar.len(), m, "expected-demand dimension mismatch");
    let need: Vec<f64> = (0..m)
        .map(|i| (cfg.d_bar[i] - s.0[i] as f64).max(0.0))
        .collect();
    let mut nodes_total = 0u64;

    if need.iter().all(|&v| v == 0.0) {
        return MyopicOutcome {
            decision: Decision::zero(inst.num_patterns()),
            objective: 0.0,
            clipped: false,
            dropped_items: Vec::new(),
            nodes_expanded: 0,
        };
    }

    // Pass 1: the program as stated, without the simulator caps.
    let unconstrained = BranchAndBound::new(inst, &need, None, cfg.node_cap).solve();
    nodes_total += unconstrained.nodes;
    if let Some((x, obj)) = unconstrained.best {
        if !unconstrained.capped && is_feasible(inst, s, &x) {
            return MyopicOutcome {
                decision: x,
                objective: obj,
                clipped: false,
                dropped_items: Vec::new(),
                nodes_expanded: nodes_total,
            };
        }
    }

    // Pass 2: add the caps. Rows whose need exceeds what the caps allow at
    // all are unreachable and dropped up front; if the rest still cannot be
    // covered jointly, rows are dropped smallest-need-first (greatest
    // coverage retained).
    let caps = Caps {
        x_max: inst.bounds.x_max,
        production_cap: (0..m)
            .map(|i| inst.bounds.s_max.saturating_sub(s.0[i]))
            .collect(),
    };
    let mut active: Vec<usize> = (0..m)
        .filter(|&i| {
            if need[i] <= 0.0 {
                return false;
            }
            let best_yield = (0..inst.num_patterns())
                .map(|j| inst.patterns.count(i, j))
                .max()
                .unwrap_or(0);
            let reachable = (best_yield as u64 * caps.x_max as u64)
                .min(caps.production_cap[i] as u64);
            need[i] <= reachable as f64
        })
        .collect();
    active.sort_by(|&a, &b| need[b].partial_cmp(&need[a]).unwrap());
    loop {
        let mut capped_need = vec![0.0; m];
        for &i in &active {
            capped_need[i] = need[i];
        }
        let run = BranchAndBound::new(inst, &capped_need, Some(&caps), cfg.node_cap).solve();
        nodes_total += run.nodes;
        if let Some((x, obj)) = run.best {
            if !run.capped {
                let dropped = (0..m)
                    .filter(|&i| need[i] > 0.0 && !active.contains(&i))
                    .collect();
                return MyopicOutcome {
                    decision: x,
                    objective: obj,
                    clipped: true,
                    dropped_items: dropped,
                    nodes_expanded: nodes_total,
                };
            }
        }
        match active.pop() {
            Some(_) => {}
            None => {
                // No coverage rows left; the zero decision is optimal.
                return MyopicOutcome {
                    decision: Decision::zero(inst.num_patterns()),
                    objective: 0.0,
                    clipped: true,
                    dropped_items: (0..m).filter(|&i| need[i] > 0.0).collect(),
                    nodes_expanded: nodes_total,
                };
            }
        }
    }
}

struct Caps {
    x_max: u32,
    /// Max items of each type that may still be produced (s_max - s_i).
    production_cap: Vec<u32>,
}

struct BranchAndBound<'a> {
    inst: &'a ProblemInstance,
    need: &'a [f64],
    caps: Option<&'a Caps>,
    node_cap: u64,
    /// Pattern indices ordered by trim cost ascending.
    order: Vec<usize>,
    /// `ratio[k][i]`: cheapest cost per unit of item `i` over patterns at
    /// position >= k in the order (infinite when none produces it).
    ratio: Vec<Vec<f64>>,
}

struct BnbOutcome {
    best: Option<(Decision, f64)>,
    nodes: u64,
    capped: bool,
}

impl<'a> BranchAndBound<'a> {
    fn new(
        inst: &'a ProblemInstance,
        need: &'a [f64],
        caps: Option<&'a Caps>,
        node_cap: u64,
    ) -> Self {
        let n = inst.num_patterns();
        let m = inst.num_items();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| inst.costs.g[a].partial_cmp(&inst.costs.g[b]).unwrap());
        // Suffix minima of g_j / a_ij over the ordered patterns.
        let mut ratio = vec![vec![f64::INFINITY; m]; n + 1];
        for k in (0..n).rev() {
            let j = order[k];
            for i in 0..m {
                let mut best = ratio[k + 1][i];
                let a = inst.patterns.count(i, j);
                if a > 0 {
                    best = best.min(inst.costs.g[j] / a as f64);
                }
                ratio[k][i] = best;
            }
        }
        Self {
            inst,
            need,
            caps,
            node_cap,
            order,
            ratio,
        }
    }

    fn solve(&self) -> BnbOutcome {
        let n = self.inst.num_patterns();
        let mut state = Search {
            x: vec![0u32; n],
            residual: self.need.to_vec(),
            produced: vec![0u32; self.inst.num_items()],
            total: 0,
            cost: 0.0,
            best: None,
            nodes: 0,
            capped: false,
        };
        self.dfs(0, &mut state);
        BnbOutcome {
            best: state
                .best
                .map(|(x, obj)| (Decision(x), obj)),
            nodes: state.nodes,
            capped: state.capped,
        }
    }

    /// Cheapest possible additional cost to cover the residual need with
    /// patterns at position >= k: each uncovered item needs at least
    /// `residual_i * min_j g_j / a_ij`, and one object can serve several
    /// items, so the max over items is a valid lower bound.
    fn lower_bound(&self, k: usize, residual: &[f64]) -> f64 {
        let mut bound = 0.0f64;
        for (i, &r) in residual.iter().enumerate() {
            if r > 0.0 {
                let ratio = self.ratio[k][i];
                if ratio.is_infinite() {
                    return f64::INFINITY;
                }
                bound = bound.max(r * ratio);
            }
        }
        bound
    }

    fn dfs(&self, k: usize, st: &mut Search) {
        if st.capped {
            return;
        }
        if st.residual.iter().all(|&r| r <= 0.0) {
            // Coverage met; remaining variables stay zero (g >= 0).
            if st.best.as_ref().is_none_or(|(_, obj)| st.cost < *obj) {
                st.best = Some((st.x.clone(), st.cost));
            }
            return;
        }
        if k == self.order.len() {
            return;
        }
        if let Some((_, incumbent)) = &st.best {
            if st.cost + self.lower_bound(k, &st.residual) >= *incumbent {
                return;
            }
        } else if self.lower_bound(k, &st.residual).is_infinite() {
            return;
        }

        let j = self.order[k];
        let upper = self.useful_copies(j, &st.residual, st);
        // Descending order reaches coverage (and an incumbent) early.
        for v in (0..=upper).rev() {
            st.nodes += 1;
            if st.nodes > self.node_cap {
                st.capped = true;
                return;
            }
            self.apply(j, v, st);
            self.dfs(k + 1, st);
            self.unapply(j, v, st);
            if st.capped {
                return;
            }
        }
    }

    /// Upper bound on copies of pattern `j` worth considering: beyond the
    /// point where `j` alone covers each of its items' residual need, a copy
    /// can be removed without losing coverage, so some optimal solution stays
    /// within the bound. Caps tighten it further when present.
    fn useful_copies(&self, j: usize, residual: &[f64], st: &Search) -> u32 {
        let mut upper = 0u32;
        for (i, &r) in residual.iter().enumerate() {
            let a = self.inst.patterns.count(i, j);
            if a > 0 && r > 0.0 {
                upper = upper.max((r / a as f64).ceil() as u32);
            }
        }
        if let Some(caps) = self.caps {
            upper = upper.min(caps.x_max - st.total);
            for (i, &cap) in caps.production_cap.iter().enumerate() {
                let a = self.inst.patterns.count(i, j);
                if a > 0 {
                    upper = upper.min((cap - st.produced[i]) / a);
                }
            }
        }
        upper
    }

    fn apply(&self, j: usize, v: u32, st: &mut Search) {
        st.x[j] = v;
        st.total += v;
        st.cost += self.inst.costs.g[j] * v as f64;
        if v > 0 {
            for i in 0..self.inst.num_items() {
                let a = self.inst.patterns.count(i, j);
                st.residual[i] -= (a * v) as f64;
                st.produced[i] += a * v;
            }
        }
    }

    fn unapply(&self, j: usize, v: u32, st: &mut Search) {
        st.x[j] = 0;
        st.total -= v;
        st.cost -= self.inst.costs.g[j] * v as f64;
        if v > 0 {
            for i in 0..self.inst.num_items() {
                let a = self.inst.patterns.count(i, j);
                st.residual[i] += (a * v) as f64;
                st.produced[i] -= a * v;
            }
        }
    }
}

struct Search {
    x: Vec<u32>,
    residual: Vec<f64>,
    produced: Vec<u32>,
    total: u32,
    cost: f64,
    best: Option<(Vec<u32>, f64)>,
    nodes: u64,
    capped: bool,
}

/// Myopic policy wrapper with a clip-event counter for run logs.
pub struct MyopicPolicy {
    cfg: MyopicConfig,
    clip_events: AtomicU64,
}

impl MyopicPolicy {
    pub fn new(cfg: MyopicConfig) -> Self {
        Self {
            cfg,
            clip_events: AtomicU64::new(0),
        }
    }

    pub fn for_instance(inst: &ProblemInstance) -> Self {
        Self::new(MyopicConfig::for_instance(inst))
    }

    /// Number of periods whose unconstrained optimum had to be clipped.
    pub fn clip_events(&self) -> u64 {
        self.clip_events.load(Ordering::Relaxed)
    }
}

impl Policy for MyopicPolicy {
    fn name(&self) -> &str {
        "myopic"
    }

    fn decide(&self, inst: &ProblemInstance, s: &State, _rng: &mut RngStream) -> Result<Decision> {
        let outcome = myopic_decide(inst, s, &self.cfg);
        if outcome.clipped {
            self.clip_events.fetch_add(1, Ordering::Relaxed);
        }
        Ok(outcome.decision)
    }
}

/// Decisions drawn from the feasible-decision generator with uniform pattern
/// probabilities (an approximation to uniform over the feasible set; see
/// [`sample_feasible_decision`]).
pub struct RandomPolicy {
    rejection_cap: u32,
}

impl RandomPolicy {
    pub fn new() -> Self {
        Self {
            rejection_cap: DEFAULT_REJECTION_CAP,
        }
    }
}

impl Default for RandomPolicy {
    fn default() -> Self {
        Self::new()
    }
}

impl Policy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn decide(&self, inst: &ProblemInstance, s: &State, rng: &mut RngStream) -> Result<Decision> {
        random_decide(inst, s, self.rejection_cap, rng)
    }
}

/// One uniform-probability feasible decision.
pub fn random_decide(
    inst: &ProblemInstance,
    s: &State,
    rejection_cap: u32,
    rng: &mut RngStream,
) -> Result<Decision> {
    let probs = vec![1.0 / inst.num_patterns() as f64; inst.num_patterns()];
    sample_feasible_decision(inst, s, &probs, rejection_cap, rng)
}
