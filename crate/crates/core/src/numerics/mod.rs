//! Numerical building blocks shared by the physics modules.

pub mod arnoldi;
pub mod banded;
pub mod dense;
pub mod dual;
pub mod ode;
pub mod quadrature;
pub mod roots;
pub mod scalar;

pub use scalar::{Precision, Real, TwoFloat};
