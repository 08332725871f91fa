//! Numerical laboratory for the long-time asymptotics of the Toda lattice with
//! steplike (rarefaction) initial data.
//!
//! The crate is organised bottom-up:
//!
//! * [`cplx`]: Airy functions, branch-aware roots, 2x2 complex matrices, quadrature.
//! * [`scattering`]: Jost solutions and scattering data of a steplike Jacobi operator.
//! * [`toda`]: direct integration of the truncated lattice.
//! * [`phase`]: the phase function, the g-function, the w-map and the scalar conjugant.
//! * [`rhp`]: model solution, Airy parametrix and their residual checks.
//! * [`verify`]: suites, the asymptotic-theorem check and CSV/JSON emitters.

pub mod config;
pub mod cplx;
pub mod error;
pub mod phase;
pub mod report;
pub mod rhp;
pub mod scattering;
pub mod toda;
pub mod verify;

pub use error::{exit, LabError, Result};
pub use num_complex::Complex64 as C64;
