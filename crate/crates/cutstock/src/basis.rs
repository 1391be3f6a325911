//! Linear action-value models over the post-decision state.
//!
//! A basis turns a `(state, decision)` pair into a feature vector φ computed
//! from the available inventory `s + A x`, so decisions producing the same
//! items yield identical features. Two families are provided:
//!
//! * polynomial — monomials `Π_i (s^x_i)^{c_ki}` over the raw counts;
//! * Fourier — `cos(π c_k · s_norm)` over inventory normalized by `s_max`,
//!   so every feature lies in `[-1, 1]`.
//!
//! The approximate action value is the dot product `q(s, x; θ) = φ(s, x) · θ`.

use crate::dynamics::{post_decision, Decision, State};
use crate::instance::ProblemInstance;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Polynomial,
    Fourier,
}

/// Declarative basis definition: one integer vector per feature, holding
/// exponents (polynomial) or frequencies (Fourier) per item.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub kind: BasisKind,
    pub terms: Vec<Vec<u32>>,
    /// Normalization constant for the Fourier basis (the inventory cap).
    pub s_max: u32,
    /// Evaluate polynomial features on inventory divided by `s_max` instead
    /// of raw counts. Off by default.
    #[serde(default)]
    pub normalize_polynomial: bool,
}

impl BasisSpec {
    pub fn new(kind: BasisKind, terms: Vec<Vec<u32>>, s_max: u32) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Basis("term list is empty".into()));
        }
        let m = terms[0].len();
        if m == 0 {
            return Err(Error::Basis("term vectors must have at least one entry".into()));
        }
        if let Some(bad) = terms.iter().position(|t| t.len() != m) {
            return Err(Error::Basis(format!(
                "term {} has {} entries, expected {m}",
                bad + 1,
                terms[bad].len()
            )));
        }
        if s_max == 0 {
            return Err(Error::Basis("s_max must be positive".into()));
        }
        if kind == BasisKind::Fourier {
            // Duplicate frequency vectors make the evaluation system singular.
            let mut seen = HashSet::new();
            for (k, t) in terms.iter().enumerate() {
                if !seen.insert(t.clone()) {
                    return Err(Error::Basis(format!(
                        "duplicate Fourier frequency vector at term {}",
                        k + 1
                    )));
                }
            }
        }
        Ok(Self {
            kind,
            terms,
            s_max,
            normalize_polynomial: false,
        })
    }

    /// Default polynomial basis: bias, all linear and all pure quadratic
    /// monomials (K = 2m + 1).
    pub fn polynomial_default(m: usize, s_max: u32) -> Self {
        Self::new(BasisKind::Polynomial, default_terms(BasisKind::Polynomial, m), s_max)
            .expect("default polynomial terms are valid")
    }

    /// Default Fourier basis: the zero frequency plus all vectors with at
    /// most two nonzero components, each in {1, 2} (K = 1 + 2m + 2m(m-1)).
    pub fn fourier_default(m: usize, s_max: u32) -> Self {
        Self::new(BasisKind::Fourier, default_terms(BasisKind::Fourier, m), s_max)
            .expect("default Fourier terms are valid")
    }

    /// Number of features K.
    pub fn num_features(&self) -> usize {
        self.terms.len()
    }

    /// Number of item types m the basis was built for.
    pub fn num_items(&self) -> usize {
        self.terms[0].len()
    }
}

/// Default term vectors for a basis family.
pub fn default_terms(kind: BasisKind, m: usize) -> Vec<Vec<u32>> {
    assert!(m >= 1);
    let mut terms = vec![vec![0u32; m]]; // bias first
    match kind {
        BasisKind::Polynomial => {
            for degree in [1u32, 2] {
                for i in 0..m {
                    let mut t = vec![0u32; m];
                    t[i] = degree;
                    terms.push(t);
                }
            }
        }
        BasisKind::Fourier => {
            for i in 0..m {
                for f in [1u32, 2] {
                    let mut t = vec![0u32; m];
                    t[i] = f;
                    terms.push(t);
                }
            }
            for i in 0..m {
                for j in (i + 1)..m {
                    for fi in [1u32, 2] {
                        for fj in [1u32, 2] {
                            let mut t = vec![0u32; m];
                            t[i] = fi;
                            t[j] = fj;
                            terms.push(t);
                        }
                    }
                }
            }
        }
    }
    terms
}

/// Evaluated feature vector φ(s, x).
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Parameter vector θ of a linear action-value model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams(pub Vec<f64>);

impl PolicyParams {
    pub fn zeros(k: usize) -> Self {
        Self(vec![0.0; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Anything that maps a `(state, decision)` pair to features. [`BasisSpec`]
/// is the shipped implementation; tests substitute tabular maps.
pub trait FeatureMap: Sync {
    fn num_features(&self) -> usize;
    fn eval(&self, inst: &ProblemInstance, s: &State, x: &Decision) -> FeatureVector;
}

impl FeatureMap for BasisSpec {
    fn num_features(&self) -> usize {
        self.num_features()
    }

    fn eval(&self, inst: &ProblemInstance, s: &State, x: &Decision) -> FeatureVector {
        features(inst, self, s, x)
    }
}

/// Evaluates the basis at `(s, x)` through the post-decision inventory.
pub fn features(inst: &ProblemInstance, spec: &BasisSpec, s: &State, x: &Decision) -> FeatureVector {
    let sx = post_decision(inst, s, x);
    assert_eq!(sx.len(), spec.num_items(), "basis/instance dimension mismatch");
    let phi = match spec.kind {
        BasisKind::Polynomial => {
            let scale = if spec.normalize_polynomial {
                1.0 / spec.s_max as f64
            } else {
                1.0
            };
            spec.terms
                .iter()
                .map(|term| {
                    term.iter()
                        .zip(&sx)
                        .map(|(&e, &v)| (v as f64 * scale).powi(e as i32))
                        .product()
                })
                .collect()
        }
        BasisKind::Fourier => {
            let norm: Vec<f64> = sx
                .iter()
                .map(|&v| {
                    let r = v as f64 / spec.s_max as f64;
                    debug_assert!(
                        (0.0..=1.0).contains(&r),
                        "post-decision inventory outside [0, s_max]"
                    );
                    r.clamp(0.0, 1.0)
                })
                .collect();
            spec.terms
                .iter()
                .map(|term| {
                    let arg: f64 = term
                        .iter()
                        .zip(&norm)
                        .map(|(&c, &v)| c as f64 * v)
                        .sum();
                    (PI * arg).cos()
                })
                .collect()
        }
    };
    FeatureVector(phi)
}

/// The linear model value `φ · θ`.
pub fn q_value(phi: &FeatureVector, params: &PolicyParams) -> f64 {
    assert_eq!(phi.len(), params.len(), "feature/parameter length mismatch");
    phi.0.iter().zip(&params.0).map(|(a, b)| a * b).sum()
}
