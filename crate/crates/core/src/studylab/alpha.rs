//! Krippendorff's alpha for nominal data with missing values.
//!
//! Values are pooled into a coincidence matrix: every ordered pair of values
//! from two different coders within a unit adds `1 / (m_u - 1)`, where `m_u`
//! is the number of values in the unit. Units with fewer than two values are
//! not pairable and are ignored. Then
//!
//! ```text
//! D_o = sum_{c != k} o_ck / n
//! D_e = sum_{c != k} n_c n_k / (n (n - 1))
//! alpha = 1 - D_o / D_e
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AgreementResult {
    pub alpha: f64,
    /// Pairable units (at least two values).
    pub units: usize,
    pub raters: usize,
    /// Number of pairable values, `n`.
    pub values: usize,
    /// Missing cells over all units x raters cells.
    pub missing_fraction: f64,
    pub observed_disagreement: f64,
    pub expected_disagreement: f64,
}

/// Alpha over a units x raters table of nominal values.
pub fn nominal_alpha(table: &[Vec<Option<u32>>], raters: usize) -> Result<AgreementResult> {
    let mut coincidence: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    let mut units = 0usize;
    let mut cells = 0usize;
    let mut missing = 0usize;
    for unit in table {
        if unit.len() != raters {
            return Err(Error::Statistics(format!(
                "unit has {} cells, expected {raters}",
                unit.len()
            )));
        }
        cells += raters;
        let vals: Vec<u32> = unit.iter().flatten().copied().collect();
        missing += raters - vals.len();
        let m = vals.len();
        if m < 2 {
            continue;
        }
        units += 1;
        let w = 1.0 / (m - 1) as f64;
        for (i, &c) in vals.iter().enumerate() {
            for (j, &k) in vals.iter().enumerate() {
                if i != j {
                    *coincidence.entry((c, k)).or_insert(0.0) += w;
                }
            }
        }
    }
    if units == 0 {
        return Err(Error::Statistics("no pairable units".into()));
    }
    let mut marginals: BTreeMap<u32, f64> = BTreeMap::new();
    for (&(c, _), &o) in &coincidence {
        *marginals.entry(c).or_insert(0.0) += o;
    }
    let n: f64 = marginals.values().sum();
    let observed = coincidence
        .iter()
        .filter(|((c, k), _)| c != k)
        .map(|(_, &o)| o)
        .sum::<f64>()
        / n;
    let sum_sq: f64 = marginals.values().map(|m| m * m).sum();
    let expected = (n * n - sum_sq) / (n * (n - 1.0));
    let alpha = if expected == 0.0 {
        1.0
    } else {
        1.0 - observed / expected
    };
    Ok(AgreementResult {
        alpha,
        units,
        raters,
        values: n.round() as usize,
        missing_fraction: if cells == 0 {
            0.0
        } else {
            missing as f64 / cells as f64
        },
        observed_disagreement: observed,
        expected_disagreement: expected,
    })
}
