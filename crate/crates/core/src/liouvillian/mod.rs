//! Lindblad generators of the collective spin: the symmetry-reduced real
//! generator used for production solves and the dense full Liouvillian kept
//! as a small-`J` oracle.

pub mod full;
pub mod gap;
pub mod generator;
pub mod layout;
pub mod solver;
pub mod steady;

pub use full::{build_full_generator, build_full_generator_capped, magnetization_z_full, reconstruct, reduce, FullGenerator};
pub use gap::{gap_estimator, gap_from_steady, liouvillian_gap, GapMethod, GapResult};
pub use generator::{
    build_reduced_generator, build_reduced_generator_extended, build_reduced_generator_in, ReducedState,
    SparseGenerator,
};
pub use layout::{ladder_coefficient, ReducedLayout};
pub use solver::{solve_qme, QmeOptions, QmeResult};
pub use steady::{default_pivot, magnetization_z, solve_steady, steady_state, SteadySolution};
