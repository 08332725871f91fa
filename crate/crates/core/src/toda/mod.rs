//! Doubly infinite Toda lattice on a finite window with frozen backgrounds.

pub mod flow;
pub mod init;
pub mod io;

pub use flow::{
    buffer_deviation, convergence_order, default_half_width, integrate, integrate_observed, max_diff, probe,
    reflect_solution, rhs, Observer, SimConfig, SimState,
};
pub use init::{make_step_data, weighted_deviation, Profile};
pub use io::{read_snapshot, write_snapshot, TrajectoryRecorder, TrajectoryRow};
