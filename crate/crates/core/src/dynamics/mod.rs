//! Contact Hamiltonian dynamics: scalar fields, `X_H`, brackets, flows and
//! Hamiltonian-level composition.

pub mod compose;
pub mod field;
pub mod flow;
pub mod vector_field;

pub use compose::{
    beta, transition_hamiltonian, transported_field, truncate, verify_conformal_algebra, verify_conformal_naturality,
    ConformalAlgebraReport, NaturalityReport,
};
pub use field::{hk, Monomial, Polynomial, ScalarField, SupportBox};
pub use flow::{
    flow_endpoint, integrate_isotopy, measured_conformal_factor, pushforward, verify_contactomorphism, FlowEnd, FlowMap,
    Trajectory,
};
pub use vector_field::{contact_bracket_at, contact_bracket_with, conformal_rate_at, contact_field_at, BracketConvention};
