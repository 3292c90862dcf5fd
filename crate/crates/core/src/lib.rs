//! Numerical toolkit for contact geometry in coordinate charts: contact forms,
//! Hamiltonian dynamics, coisotropic submanifold tests, symplectization and
//! prequantization lifts, and cost functionals on contact isotopies.

pub mod charts;
pub mod dynamics;
pub mod error;
pub mod lifts;
pub mod linalg;
pub mod norms;
pub mod submanifolds;

pub use charts::{ContactChart, Point, TangentVector};
pub use error::{ContactError, Result};
