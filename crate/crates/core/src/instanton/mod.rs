//! Instantons on the `w`–`pi_w` plane and the barriers they give.

pub mod barriers;
pub mod cubic;
pub mod sw;
pub mod trace;
pub mod transition;

pub use barriers::{
    activation_barriers, activation_barriers_with, representation_barriers, BarrierCandidate, BarrierOptions,
    BarrierTable, CandidateStatus, RepresentationBarriers,
};
pub use cubic::{cubic_coeffs, cubic_coeffs_dw, cubic_value_and_gradient, hamiltonian_on_axis, CubicCoeffs, Representation};
pub use sw::{
    sw_action, sw_barriers, sw_coefficients, sw_full_field, sw_reduced, SwBarrierTable, SwCandidate, SwCoefficients,
    SwField, SwReduced,
};
pub use trace::{
    action_of, continuation_rhs, running_action, trace_instanton, Branch, InstantonTrajectory, TraceOptions,
    TrajectorySample,
};
pub use transition::{crossing_of, sw_transition_point, transition_point, transition_point_with};
