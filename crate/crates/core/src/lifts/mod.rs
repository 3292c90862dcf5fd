//! Symplectization and prequantization constructions.

pub mod prequantization;
pub mod symplectization;

pub use prequantization::{
    prequant_bracket_check, prequant_coisotropy_check, PrequantBracketReport, PrequantCoisotropyReport,
    PrequantizationChart,
};
pub use symplectization::{
    calibrate_bracket_sign, lifted_cost_bound_check, omega_complement, symp_coisotropy_correspondence_check,
    CorrespondenceReport, LiftedCostReport, LiftedMap, SymplectizationChart,
};
