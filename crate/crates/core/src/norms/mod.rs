//! Cost functionals on contact isotopies.

pub mod circle;
pub mod conjugation;
pub mod cost;
pub mod table;

pub use circle::{angular_distance, circle_delta, circle_lower_bound_check, rotation_amount, CircleBoundReport};
pub use conjugation::{conjugation_cost_check, ConjugationOptions, ConjugationReport};
pub use cost::{
    conformal_sweep, cost_suite, modified_cost, orbit_cost, rs_cost, shelukhin_cost, BoundDirection, ConformalSweep, CostKind,
    CostReport, CostSuite, GridMeta, GridOptions,
};
pub use table::{noncomparability_table, symmetry_check, table_row, triangle_check, SymmetryReport, TableRow, TriangleReport};
