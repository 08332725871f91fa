//! Model solution, Airy parametrix and the residual checks of both.

mod airy_par;
pub use airy_par::{
    airy_identity, airy_suite, identity_grid, m0, m0_inv, normalization_fit, normalization_radii, ray_jump_residual, s_matrices,
    sector_of, sector_points, AiryIdentity, AiryParametrix, NormalizationFit, RAY_TOL,
};
mod model;
pub use model::{model_from_beta, model_matrix, model_report, model_vector, ModelContext};
mod parametrix;
pub use parametrix::{
    default_rho, gamma_phase, gamma_report, matching_report, parametrix_report, rho_min, GammaReport, MatchingReport,
    ParametrixContext,
};
mod jumps;
pub use jumps::{circle_jump_t, jump_symmetry_report, matsym_residual, sigma_inputs, u_on_sigma, u_slope, v3_matrix, V3Inputs};
