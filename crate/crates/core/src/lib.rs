//! Steady states, Liouvillian gaps, mean-field portraits and quantum-instanton
//! activation barriers of a driven-dissipative collective spin.

pub mod error;
pub mod instanton;
pub mod liouvillian;
pub mod model;
pub mod numerics;
pub mod symham;

pub use error::{Error, Result};
pub use model::{FixedPoint, FixedPointKind, FpLabel, Magnetization, ModelParams, StereoPoint};
