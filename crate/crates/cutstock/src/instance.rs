//! Problem data model: item catalog, cutting patterns, costs, capacity bounds
//! and demand distribution, together with the instance file format.
//!
//! An instance is immutable after construction and safe to share across
//! threads. Construction goes through validating constructors; the file
//! loader ([`load_instance`]) recomputes derived data (trim losses) and
//! rejects files that disagree with it.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("failed to read instance file: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse instance file: {0}")]
    Parse(String),
    #[error("invalid instance: {0}")]
    Validation(String),
}

fn invalid(msg: impl Into<String>) -> InstanceError {
    InstanceError::Validation(msg.into())
}

/// The demanded item types (lengths in cm).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ItemCatalog {
    lengths: Vec<u32>,
}

impl ItemCatalog {
    pub fn new(lengths: Vec<u32>, object_length: u32) -> Result<Self, InstanceError> {
        if lengths.is_empty() {
            return Err(invalid("item catalog is empty (need at least one item type)"));
        }
        for (i, &l) in lengths.iter().enumerate() {
            if l == 0 {
                return Err(invalid(format!("item {} has zero length", i + 1)));
            }
            if l > object_length {
                return Err(invalid(format!(
                    "item {} length {} exceeds object length {}",
                    i + 1,
                    l,
                    object_length
                )));
            }
        }
        Ok(Self { lengths })
    }

    /// Number of item types (m).
    pub fn num_items(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }
}

/// The cutting patterns. Stored row-per-pattern: `rows[j][i]` is the number
/// of items of type `i` produced by cutting one object in pattern `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternMatrix {
    rows: Vec<Vec<u32>>,
    object_length: u32,
    trim: Vec<u32>,
}

impl PatternMatrix {
    pub fn new(
        rows: Vec<Vec<u32>>,
        object_length: u32,
        catalog: &ItemCatalog,
    ) -> Result<Self, InstanceError> {
        if rows.is_empty() {
            return Err(invalid("pattern matrix is empty (need at least one pattern)"));
        }
        if object_length == 0 {
            return Err(invalid("object length must be positive"));
        }
        let m = catalog.num_items();
        let mut trim = Vec::with_capacity(rows.len());
        for (j, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(invalid(format!(
                    "pattern {} has {} entries, expected {} (one per item type)",
                    j + 1,
                    row.len(),
                    m
                )));
            }
            if row.iter().all(|&c| c == 0) {
                return Err(invalid(format!("pattern {} is empty (no items cut)", j + 1)));
            }
            trim.push(trim_of_pattern(row, catalog, object_length).map_err(|e| match e {
                InstanceError::Validation(msg) => invalid(format!("pattern {}: {msg}", j + 1)),
                other => other,
            })?);
        }
        Ok(Self {
            rows,
            object_length,
            trim,
        })
    }

    /// Number of patterns (n).
    pub fn num_patterns(&self) -> usize {
        self.rows.len()
    }

    pub fn object_length(&self) -> u32 {
        self.object_length
    }

    /// Items of type `item` produced by one object cut in `pattern`.
    pub fn count(&self, item: usize, pattern: usize) -> u32 {
        self.rows[pattern][item]
    }

    /// Pattern `j` as a slice of per-item counts.
    pub fn row(&self, pattern: usize) -> &[u32] {
        &self.rows[pattern]
    }

    /// Trim loss of each pattern (derived from lengths at construction).
    pub fn trim(&self) -> &[u32] {
        &self.trim
    }
}

/// Trim loss of a single pattern row: object length minus total cut length.
/// Fails when the pattern does not fit the object.
pub fn trim_of_pattern(
    row: &[u32],
    catalog: &ItemCatalog,
    object_length: u32,
) -> Result<u32, InstanceError> {
    assert_eq!(row.len(), catalog.num_items(), "pattern/catalog dimension mismatch");
    let used: u64 = row
        .iter()
        .zip(catalog.lengths())
        .map(|(&c, &l)| c as u64 * l as u64)
        .sum();
    if used > object_length as u64 {
        return Err(invalid(format!(
            "exceeds object length (total cut length {} > {})",
            used, object_length
        )));
    }
    Ok(object_length - used as u32)
}

/// Recomputes every pattern's trim loss from lengths and counts.
pub fn compute_trim(
    patterns: &PatternMatrix,
    catalog: &ItemCatalog,
) -> Result<Vec<u32>, InstanceError> {
    (0..patterns.num_patterns())
        .map(|j| trim_of_pattern(patterns.row(j), catalog, patterns.object_length()))
        .collect()
}

/// Per-pattern trim cost and per-item holding / lost-sales costs.
#[derive(Clone, Debug, PartialEq)]
pub struct CostSpec {
    pub g: Vec<f64>,
    pub h_plus: Vec<f64>,
    pub h_minus: Vec<f64>,
}

impl CostSpec {
    pub fn validate(&self, m: usize, n: usize) -> Result<(), InstanceError> {
        for (name, v, want) in [
            ("g", &self.g, n),
            ("h_plus", &self.h_plus, m),
            ("h_minus", &self.h_minus, m),
        ] {
            if v.len() != want {
                return Err(invalid(format!(
                    "cost vector {name} has {} entries, expected {want}",
                    v.len()
                )));
            }
            if let Some(idx) = v.iter().position(|x| !x.is_finite() || *x < 0.0) {
                return Err(invalid(format!(
                    "cost vector {name} entry {} is negative or non-finite",
                    idx + 1
                )));
            }
        }
        Ok(())
    }

    /// Builds costs from scalar factors applied to item lengths and trim
    /// losses: holding `f_h * l_i`, lost sales `f_l * l_i`, trim `f_t * trim_j`.
    pub fn from_factors(
        catalog: &ItemCatalog,
        patterns: &PatternMatrix,
        holding: f64,
        lost_sales: f64,
        trim: f64,
    ) -> Self {
        Self {
            g: patterns.trim().iter().map(|&t| trim * t as f64).collect(),
            h_plus: catalog.lengths().iter().map(|&l| holding * l as f64).collect(),
            h_minus: catalog.lengths().iter().map(|&l| lost_sales * l as f64).collect(),
        }
    }
}

/// Inventory cap per item and objects available per period.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityBounds {
    pub s_max: u32,
    pub x_max: u32,
}

impl CapacityBounds {
    pub fn validate(&self) -> Result<(), InstanceError> {
        if self.s_max == 0 {
            return Err(invalid("s_max must be at least 1"));
        }
        if self.x_max == 0 {
            return Err(invalid("x_max must be at least 1"));
        }
        Ok(())
    }
}

/// Demand model: total demand uniform on `d_min..=d_max`, split over items
/// by a multinomial with probabilities `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct DemandSpec {
    pub p: Vec<f64>,
    pub d_min: u32,
    pub d_max: u32,
}

impl DemandSpec {
    pub fn validate(&self, m: usize) -> Result<(), InstanceError> {
        if self.p.len() != m {
            return Err(invalid(format!(
                "demand probability vector has {} entries, expected {m}",
                self.p.len()
            )));
        }
        if let Some(idx) = self.p.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(invalid(format!(
                "demand probability {} is negative or non-finite",
                idx + 1
            )));
        }
        let sum: f64 = self.p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(invalid(format!(
                "demand probabilities sum to {sum}, expected 1 (tolerance 1e-12)"
            )));
        }
        if self.d_min > self.d_max {
            return Err(invalid(format!(
                "d_min {} exceeds d_max {}",
                self.d_min, self.d_max
            )));
        }
        Ok(())
    }
}

/// A fully validated problem instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub catalog: ItemCatalog,
    pub patterns: PatternMatrix,
    pub costs: CostSpec,
    pub bounds: CapacityBounds,
    pub demand: DemandSpec,
}

impl ProblemInstance {
    pub fn new(
        catalog: ItemCatalog,
        patterns: PatternMatrix,
        costs: CostSpec,
        bounds: CapacityBounds,
        demand: DemandSpec,
    ) -> Result<Self, InstanceError> {
        let m = catalog.num_items();
        let n = patterns.num_patterns();
        costs.validate(m, n)?;
        bounds.validate()?;
        demand.validate(m)?;
        Ok(Self {
            catalog,
            patterns,
            costs,
            bounds,
            demand,
        })
    }

    pub fn num_items(&self) -> usize {
        self.catalog.num_items()
    }

    pub fn num_patterns(&self) -> usize {
        self.patterns.num_patterns()
    }
}

// ---------------------------------------------------------------------------
// Built-in dataset
// ---------------------------------------------------------------------------

/// The built-in steel-bar dataset: seven item lengths cut from 1500 cm stock
/// objects with 15 handcrafted patterns, factor-derived costs, and a
/// uniform-total multinomial demand. Also shipped as `data/paper_instance.toml`.
pub fn default_paper_instance() -> ProblemInstance {
    let object_length = 1500;
    let catalog = ItemCatalog::new(vec![115, 180, 267, 314, 880, 1180, 1200], object_length)
        .expect("built-in catalog is valid");
    // One row per pattern, one entry per item type.
    let rows: Vec<Vec<u32>> = vec![
        vec![10, 0, 0, 1, 0, 0, 0],
        vec![13, 0, 0, 0, 0, 0, 0],
        vec![3, 1, 0, 0, 1, 0, 0],
        vec![3, 1, 0, 3, 0, 0, 0],
        vec![2, 2, 0, 0, 1, 0, 0],
        vec![2, 0, 0, 0, 0, 0, 1],
        vec![1, 1, 0, 0, 0, 0, 1],
        vec![1, 1, 0, 0, 0, 1, 0],
        vec![0, 0, 1, 0, 0, 0, 1],
        vec![0, 0, 1, 0, 0, 1, 0],
        vec![0, 0, 1, 1, 1, 0, 0],
        vec![0, 0, 2, 0, 1, 0, 0],
        vec![0, 0, 2, 3, 0, 0, 0],
        vec![0, 0, 3, 2, 0, 0, 0],
        vec![0, 1, 0, 4, 0, 0, 0],
    ];
    let patterns =
        PatternMatrix::new(rows, object_length, &catalog).expect("built-in patterns are valid");
    let costs = CostSpec::from_factors(&catalog, &patterns, 0.01, 1.0, 0.1);
    let bounds = CapacityBounds {
        s_max: 70,
        x_max: 30,
    };
    let demand = DemandSpec {
        p: vec![0.30, 0.20, 0.20, 0.10, 0.10, 0.05, 0.05],
        d_min: 40,
        d_max: 50,
    };
    ProblemInstance::new(catalog, patterns, costs, bounds, demand)
        .expect("built-in instance is valid")
}

// ---------------------------------------------------------------------------
// Instance file format (TOML; documented in docs/instance_format.md)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    object_length: u32,
    item_lengths: Vec<u32>,
    /// One row per pattern, one count per item type.
    patterns: Vec<Vec<u32>>,
    /// Optional documentation row; the loader recomputes trim and rejects
    /// mismatches.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trim: Option<Vec<u32>>,
    s_max: u32,
    x_max: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    costs: Option<CostsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cost_factors: Option<CostFactorsFile>,
    demand: DemandFile,
}

#[derive(Serialize, Deserialize)]
struct CostsFile {
    g: Vec<f64>,
    h_plus: Vec<f64>,
    h_minus: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CostFactorsFile {
    holding: f64,
    lost_sales: f64,
    trim: f64,
}

#[derive(Serialize, Deserialize)]
struct DemandFile {
    p: Vec<f64>,
    d_min: u32,
    d_max: u32,
}

/// Loads and validates an instance file.
pub fn load_instance(path: impl AsRef<Path>) -> Result<ProblemInstance, InstanceError> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text)
}

/// Parses and validates instance file contents.
pub fn parse_instance(text: &str) -> Result<ProblemInstance, InstanceError> {
    let file: InstanceFile = toml::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))?;
    let catalog = ItemCatalog::new(file.item_lengths, file.object_length)?;
    let patterns = PatternMatrix::new(file.patterns, file.object_length, &catalog)?;
    if let Some(declared) = &file.trim {
        if declared.len() != patterns.num_patterns() {
            return Err(invalid(format!(
                "declared trim vector has {} entries, expected {}",
                declared.len(),
                patterns.num_patterns()
            )));
        }
        for (j, (&dec, &comp)) in declared.iter().zip(patterns.trim()).enumerate() {
            if dec != comp {
                return Err(invalid(format!(
                    "declared trim for pattern {} is {dec} but computed trim is {comp}",
                    j + 1
                )));
            }
        }
    }
    // Explicit costs win over factors when both are present.
    let costs = match (&file.costs, &file.cost_factors) {
        (Some(c), _) => CostSpec {
            g: c.g.clone(),
            h_plus: c.h_plus.clone(),
            h_minus: c.h_minus.clone(),
        },
        (None, Some(f)) => {
            CostSpec::from_factors(&catalog, &patterns, f.holding, f.lost_sales, f.trim)
        }
        (None, None) => {
            return Err(invalid("either [costs] or [cost_factors] must be given"));
        }
    };
    let bounds = CapacityBounds {
        s_max: file.s_max,
        x_max: file.x_max,
    };
    let demand = DemandSpec {
        p: file.demand.p,
        d_min: file.demand.d_min,
        d_max: file.demand.d_max,
    };
    ProblemInstance::new(catalog, patterns, costs, bounds, demand)
}

/// Writes an instance as a TOML file with explicit costs and the derived
/// trim row included for documentation.
pub fn save_instance(
    inst: &ProblemInstance,
    path: impl AsRef<Path>,
) -> Result<(), InstanceError> {
    std::fs::write(path, instance_to_toml(inst)?)?;
    Ok(())
}

/// Renders an instance as TOML text (the same format [`parse_instance`] reads).
pub fn instance_to_toml(inst: &ProblemInstance) -> Result<String, InstanceError> {
    let file = InstanceFile {
        object_length: inst.patterns.object_length(),
        item_lengths: inst.catalog.lengths().to_vec(),
        patterns: (0..inst.num_patterns())
            .map(|j| inst.patterns.row(j).to_vec())
            .collect(),
        trim: Some(inst.patterns.trim().to_vec()),
        s_max: inst.bounds.s_max,
        x_max: inst.bounds.x_max,
        costs: Some(CostsFile {
            g: inst.costs.g.clone(),
            h_plus: inst.costs.h_plus.clone(),
            h_minus: inst.costs.h_minus.clone(),
        }),
        cost_factors: None,
        demand: DemandFile {
            p: inst.demand.p.clone(),
            d_min: inst.demand.d_min,
            d_max: inst.demand.d_max,
        },
    };
    toml::to_string_pretty(&file).map_err(|e| InstanceError::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_instance_dimensions() {
        let inst = default_paper_instance();
        assert_eq!(inst.num_items(), 7);
        assert_eq!(inst.num_patterns(), 15);
        assert_eq!(inst.patterns.object_length(), 1500);
    }

    #[test]
    fn paper_trim_row() {
        let inst = default_paper_instance();
        let expected = [36, 5, 95, 33, 30, 70, 5, 25, 33, 53, 39, 86, 24, 71, 64];
        assert_eq!(inst.patterns.trim(), &expected);
        let recomputed = compute_trim(&inst.patterns, &inst.catalog).unwrap();
        assert_eq!(recomputed, expected);
    }

    #[test]
    fn paper_cost_factors() {
        let inst = default_paper_instance();
        assert!((inst.costs.g[6] - 0.5).abs() < 1e-12); // pattern 7, trim 5
        assert!((inst.costs.h_plus[0] - 1.15).abs() < 1e-12); // item 1, length 115
        assert!((inst.costs.h_minus[4] - 880.0).abs() < 1e-12); // item 5, length 880
    }

    #[test]
    fn trim_of_single_patterns() {
        let inst = default_paper_instance();
        // P1 = 10 of item 1 plus one of item 4.
        assert_eq!(
            trim_of_pattern(&[10, 0, 0, 1, 0, 0, 0], &inst.catalog, 1500).unwrap(),
            36
        );
        // P9 = one of item 3 plus one of item 7.
        assert_eq!(
            trim_of_pattern(&[0, 0, 1, 0, 0, 0, 1], &inst.catalog, 1500).unwrap(),
            33
        );
        // Cutting nothing leaves the whole object as trim.
        assert_eq!(
            trim_of_pattern(&[0; 7], &inst.catalog, 1500).unwrap(),
            1500
        );
    }

    #[test]
    fn overlong_pattern_rejected() {
        let inst = default_paper_instance();
        let err = trim_of_pattern(&[14, 0, 0, 0, 0, 0, 0], &inst.catalog, 1500).unwrap_err();
        assert!(err.to_string().contains("exceeds object length"), "{err}");
    }

    #[test]
    fn empty_pattern_rejected() {
        let catalog = ItemCatalog::new(vec![10, 20], 50).unwrap();
        let err = PatternMatrix::new(vec![vec![1, 1], vec![0, 0]], 50, &catalog).unwrap_err();
        assert!(err.to_string().contains("pattern 2 is empty"), "{err}");
    }

    #[test]
    fn declared_trim_mismatch_rejected() {
        // Pattern 2 computes to trim 5 (1500 - 13*115); the file declares 6.
        let text = r#"
object_length = 1500
item_lengths = [115, 180, 267, 314, 880, 1180, 1200]
patterns = [[10, 0, 0, 1, 0, 0, 0], [13, 0, 0, 0, 0, 0, 0]]
trim = [36, 6]
s_max = 70
x_max = 30

[cost_factors]
holding = 0.01
lost_sales = 1.0
trim = 0.1

[demand]
p = [0.30, 0.20, 0.20, 0.10, 0.10, 0.05, 0.05]
d_min = 40
d_max = 50
"#;
        let err = parse_instance(text).unwrap_err();
        assert!(
            err.to_string().contains("pattern 2 is 6 but computed trim is 5"),
            "{err}"
        );
    }

    #[test]
    fn bad_probability_sum_rejected() {
        let inst = default_paper_instance();
        let mut demand = inst.demand.clone();
        demand.p[0] = 0.31;
        let err = ProblemInstance::new(
            inst.catalog.clone(),
            inst.patterns.clone(),
            inst.costs.clone(),
            inst.bounds,
            demand,
        )
        .unwrap_err();
        assert!(err.to_string().contains("sum to"), "{err}");
    }

    #[test]
    fn roundtrip_through_file() {
        let inst = default_paper_instance();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.toml");
        save_instance(&inst, &path).unwrap();
        let back = load_instance(&path).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn shipped_dataset_matches_builtin() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/paper_instance.toml");
        let loaded = load_instance(path).unwrap();
        assert_eq!(loaded, default_paper_instance());
    }

    #[test]
    fn explicit_costs_win_over_factors() {
        let inst = default_paper_instance();
        let mut text = instance_to_toml(&inst).unwrap();
        text.push_str("\n[cost_factors]\nholding = 99.0\nlost_sales = 99.0\ntrim = 99.0\n");
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(parsed.costs, inst.costs);
    }

    #[test]
    fn missing_costs_rejected() {
        let text = r#"
object_length = 10
item_lengths = [3]
patterns = [[2]]
s_max = 5
x_max = 2

[demand]
p = [1.0]
d_min = 0
d_max = 1
"#;
        let err = parse_instance(text).unwrap_err();
        assert!(err.to_string().contains("cost_factors"), "{err}");
    }
}
