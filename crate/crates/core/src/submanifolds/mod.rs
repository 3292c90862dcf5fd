//! Parametrized submanifolds and the pointwise coisotropy, Legendrian and
//! displaceability tests.

pub mod frames;
pub mod ideal;
pub mod patch;
pub mod tangent;

pub use frames::{embedding_differential, local_frame_rank, model_frame, FrameFunction, FrameRank};
pub use ideal::{ideal_element, vanishing_ideal_check, IdealBracketReport};
pub use patch::{fixture, point_patch, LocalModel, Piece, PlanarPatch, SampleRef, SubmanifoldPatch, TangentSample, FIXTURE_NAMES};
pub use tangent::{
    cap_xi, cap_xi_at, coisotropy_at, coisotropy_invariance_experiment, coisotropy_test, coisotropy_test_with,
    dalpha_perp, dalpha_perp_with, displaceability_test, legendrian_test, xi_basis, CoisotropyOptions,
    CoisotropyVerdict, DisplaceabilityVerdict, InvarianceReport, LegendrianVerdict, PointRecord, Subspace,
};
