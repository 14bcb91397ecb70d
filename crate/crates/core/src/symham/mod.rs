//! Exact symbolic derivation of the auxiliary Hamiltonians.

pub mod expr;
pub mod hamiltonian;
pub mod poly;
pub mod symbols;
pub mod tape;

pub use expr::{CExpr, SymExpr};
pub use hamiltonian::{
    check_axis_restriction, check_mean_field_limit, check_mirror_symmetry, check_momentum_structure,
    derive_hamiltonian, hamilton_flow, k_matrix, mean_field_field, printed_cubic_coefficients, HamiltonianJet, KMatrix,
    KMode, SymbolicHamiltonian,
};
pub use poly::{Monomial, Poly, Var};
pub use symbols::{spin_operator_symbol, Side, SpinOp};
pub use tape::Tape;
