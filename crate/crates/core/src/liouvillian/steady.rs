//! Steady state of the reduced generator from the rank-one augmented system.

use super::generator::{ReducedState, SparseGenerator};
use crate::error::{Error, Result};
use crate::model::{find_axis_fixed_points, FpLabel, ModelParams};
use crate::numerics::banded::BandedLu;
use crate::numerics::scalar::{Real, TwoFloat};

/// Largest relative iterative-refinement correction accepted before the
/// solve is declared unreliable at the working precision.
pub const REFINEMENT_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SteadySolution<T> {
    pub state: ReducedState,
    pub lu: BandedLu<T>,
    pub g: f64,
    pub e_index: usize,
    /// `||W p||_inf` evaluated in extended precision.
    pub residual_inf: f64,
    pub refinement_correction: f64,
}

/// Diagonal position nearest `J m_z` of the upper mean-field branch (the
/// single stable branch when only one exists).
pub fn default_pivot(p: &ModelParams) -> usize {
    let two_j = p.two_j();
    let mz = find_axis_fixed_points(&p.with_spin_j(1.0))
        .ok()
        .and_then(|fps| {
            let stable: Vec<_> = fps.into_iter().filter(|f| f.is_stable()).collect();
            stable.iter().find(|f| f.label == Some(FpLabel::Upper)).or(stable.first()).map(|f| f.mz())
        })
        .unwrap_or(0.0);
    let idx = (p.spin_j * mz + p.spin_j).round();
    idx.clamp(0.0, two_j as f64) as usize
}

/// `A p` for `A = W + g e 1^T`, evaluated in double-double.
fn deflated_apply(w: &SparseGenerator<TwoFloat>, g: f64, e: usize, x: &[TwoFloat]) -> Vec<TwoFloat> {
    let mut y = w.matvec(x);
    let mut tr = TwoFloat::from(0.0);
    for v in &x[..w.layout.levels()] {
        tr += *v;
    }
    y[e] += TwoFloat::from(g) * tr;
    y
}

fn norm_inf<T: Real>(x: &[T]) -> f64 {
    x.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
}

pub fn solve_steady<T: Real>(w: &SparseGenerator<T>, g: f64, e_index: usize) -> Result<SteadySolution<T>> {
    if g == 0.0 || !g.is_finite() {
        return Err(Error::InvalidArgument("weighting factor g must be finite and nonzero".into()));
    }
    let levels = w.layout.levels();
    if e_index >= levels {
        return Err(Error::InvalidArgument(format!("e_index {e_index} outside the diagonal block 0..{levels}")));
    }
    let lu = w.deflated_banded(g, e_index).factorize()?;
    let mut b = vec![T::zero(); w.dim()];
    b[e_index] = T::from_f64(g);
    let mut x = lu.solve(&b);

    let wx = w.to_extended();
    let xe: Vec<TwoFloat> = x.iter().map(|v| v.to_extended()).collect();
    let ax = deflated_apply(&wx, g, e_index, &xe);
    let mut r: Vec<T> = ax.iter().map(|v| {
        let neg = -*v;
        T::from_f64(neg.hi()) + T::from_f64(neg.lo())
    }).collect();
    r[e_index] += T::from_f64(g);
    let dx = lu.solve(&r);
    let correction = norm_inf(&dx) / norm_inf(&x).max(f64::MIN_POSITIVE);
    if !(correction <= REFINEMENT_LIMIT) {
        return Err(Error::Precision { correction });
    }
    for (xi, di) in x.iter_mut().zip(&dx) {
        *xi += *di;
    }
    let xe: Vec<TwoFloat> = x.iter().map(|v| v.to_extended()).collect();
    let residual_inf = norm_inf(&wx.matvec(&xe));
    let state = ReducedState { layout: w.layout, values: x.iter().map(|v| v.to_f64()).collect() };
    Ok(SteadySolution { state, lu, g, e_index, residual_inf, refinement_correction: correction })
}

/// Stationary reduced state normalized to unit trace.
pub fn steady_state<T: Real>(w: &SparseGenerator<T>, g: f64, e_index: usize) -> Result<ReducedState> {
    Ok(solve_steady(w, g, e_index)?.state)
}

pub fn magnetization_z(state: &ReducedState) -> f64 {
    let j = state.layout.spin_j();
    state.diagonal().iter().enumerate().map(|(i, p)| (i as f64 - j) * p).sum::<f64>() / j
}
