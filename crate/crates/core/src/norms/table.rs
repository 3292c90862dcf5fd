//! The `H_k` non-comparability table and certificate-level triangle and
//! symmetry checks.

use serde::{Deserialize, Serialize};

use crate::charts::ContactChart;
use crate::dynamics::field::{hk, ScalarField};
use crate::dynamics::flow::flow_endpoint;
use crate::error::{ContactError, Result};
use crate::norms::cost::{cost_suite, max_abs_at, shelukhin_cost, GridOptions};

pub const MAX_TABLE_K: u32 = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub k: u32,
    pub shelukhin: f64,
    pub rs: f64,
    pub rs_log: f64,
    pub modified: f64,
    /// `g_1` at the origin, where the flow of `H_k` is stationary.
    pub g1_at_origin: f64,
    /// `rs / shelukhin`.
    pub ratio: f64,
}

pub fn table_row(k: u32, opts: &GridOptions) -> Result<TableRow> {
    if !(1..=MAX_TABLE_K).contains(&k) {
        return Err(ContactError::Input(format!("k = {k} outside 1..={MAX_TABLE_K}")));
    }
    let chart = ContactChart::darboux(1);
    let h = hk(k);
    let suite = cost_suite(&chart, &h, opts)?;
    let (she, rs, modified) = (suite.shelukhin, suite.rs, suite.modified);
    let g1_at_origin = flow_endpoint(&chart, &h, &[0.0; 3], 0.0, 1.0, opts.step)?.conformal;
    Ok(TableRow {
        k,
        shelukhin: she.value,
        rs: rs.value,
        rs_log: rs.log_value,
        modified: modified.value,
        g1_at_origin,
        ratio: (rs.log_value - she.log_value).exp(),
    })
}

pub fn noncomparability_table(ks: &[u32], opts: &GridOptions) -> Result<Vec<TableRow>> {
    opts.validate()?;
    ks.iter().map(|&k| table_row(k, opts)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub first: f64,
    pub second: f64,
    pub concatenated: f64,
    /// `concatenated - first - second`.
    pub excess: f64,
    /// Trapezoid error from the jump at `t = 1/2`: `|max |K_0| - max |H_1|| / steps`.
    pub jump_allowance: f64,
    pub tol: f64,
    pub pass: bool,
}

/// The concatenated path generates `phi_K^1 o phi_H^1` and its Shelukhin cost
/// is at most the sum of the two costs, up to the trapezoid error at the switch.
pub fn triangle_check(
    chart: &ContactChart,
    h: &ScalarField,
    k: &ScalarField,
    opts: &GridOptions,
    tol: f64,
) -> Result<TriangleReport> {
    let first = shelukhin_cost(chart, h, opts)?.value;
    let second = shelukhin_cost(chart, k, opts)?.value;
    // even time_steps keeps t = 1/2, where the concatenation switches, on the grid
    let steps = 2 * opts.time_steps;
    let concatenated = shelukhin_cost(chart, &ScalarField::concatenate(h, k), &GridOptions { time_steps: steps, ..*opts })?.value;
    let excess = concatenated - first - second;
    let jump = (max_abs_at(chart, k, 0.0, opts.resolution)? - max_abs_at(chart, h, 1.0, opts.resolution)?).abs();
    let jump_allowance = jump / steps as f64;
    Ok(TriangleReport { first, second, concatenated, excess, jump_allowance, tol, pass: excess <= tol + jump_allowance })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub forward: f64,
    pub inverse: f64,
    pub deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Path cost of `H` against that of its reversal `-H(1 - t)`.
pub fn symmetry_check(chart: &ContactChart, h: &ScalarField, opts: &GridOptions, tol: f64) -> Result<SymmetryReport> {
    let forward = shelukhin_cost(chart, h, opts)?.value;
    let inverse = shelukhin_cost(chart, &h.time_reversed(), opts)?.value;
    let deviation = (forward - inverse).abs();
    Ok(SymmetryReport { forward, inverse, deviation, tol, pass: deviation <= tol })
}
