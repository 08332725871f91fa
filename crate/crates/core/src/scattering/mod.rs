//! Direct scattering for steplike Jacobi operators.

pub mod coeffs;
pub mod data;
pub mod jost;
pub mod lattice;
pub mod mvec;
pub mod spectrum;

pub use jost::{jost_left, jost_right, lambda_of_z, wronskian_at, zeta_at, zeta_of_z, JostPair, JostSequence, ZetaValue};
pub use lattice::{z_of_lambda, Gaps, LatticeData};
pub use coeffs::{chi, plucker_residual, plucker_terms, reflection, reflection_continued, transmission, PluckerTerms, ReflectionSample};
pub use spectrum::{blaschke, detect_resonance, tune_to_resonance, eigenvalues, norming_constants, EigenScan, Eigenvalue, NormingExponent, ResonanceReport, ResonanceState, ScanOptions};
pub use mvec::{build_m, m_jump_residual_circle, m_jump_residual_interval, m_symmetry_residual, small_z_report, SmallZReport};
pub use data::{evolve_gamma, evolve_reflection, BuildOptions, CircleSample, IntervalSample, ScatteringData};
