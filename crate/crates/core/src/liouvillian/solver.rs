//! Steady state and gap with automatic precision selection.

use serde::{Deserialize, Serialize};

use super::gap::{gap_from_steady, GapResult};
use super::generator::{build_reduced_generator_in, ReducedState, SparseGenerator, DEFAULT_BUDGET};
use super::steady::{default_pivot, magnetization_z, solve_steady};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::scalar::{Precision, Real, TwoFloat};

/// Gaps below this multiple of `||W||_inf` are recomputed in extended
/// precision when running in double mode.
pub const DOUBLE_GAP_FLOOR: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QmeOptions {
    pub precision: Precision,
    pub g: f64,
    pub e_index: Option<usize>,
    pub compute_gap: bool,
    pub budget: usize,
}

impl Default for QmeOptions {
    fn default() -> Self {
        Self { precision: Precision::Double, g: 1.0, e_index: None, compute_gap: true, budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QmeResult {
    pub params: ModelParams,
    pub m_z: f64,
    pub gap: Option<GapResult>,
    pub precision_used: Precision,
    pub residual_inf: f64,
    pub trace_error: f64,
    pub refinement_correction: f64,
    #[serde(skip)]
    pub state: Option<ReducedState>,
}

fn run<T: Real>(w: &SparseGenerator<T>, opts: &QmeOptions, e: usize, precision: Precision) -> Result<QmeResult> {
    let sol = solve_steady(w, opts.g, e)?;
    let gap = if opts.compute_gap { Some(gap_from_steady(w, &sol)?) } else { None };
    Ok(QmeResult {
        params: w.params,
        m_z: magnetization_z(&sol.state),
        gap,
        precision_used: precision,
        residual_inf: sol.residual_inf,
        trace_error: (sol.state.trace() - 1.0).abs(),
        refinement_correction: sol.refinement_correction,
        state: Some(sol.state),
    })
}

pub fn solve_qme(p: &ModelParams, opts: &QmeOptions) -> Result<QmeResult> {
    let e = opts.e_index.unwrap_or_else(|| default_pivot(p));
    if opts.precision == Precision::Double {
        let w = build_reduced_generator_in::<f64>(p, opts.budget)?;
        match run(&w, opts, e, Precision::Double) {
            Ok(r) => {
                let tiny = r.gap.as_ref().is_some_and(|g| g.lambda < DOUBLE_GAP_FLOOR * w.norm_inf());
                if !tiny {
                    return Ok(r);
                }
            }
            Err(Error::Precision { .. }) | Err(Error::Eigensolver { .. }) | Err(Error::Consistency(_)) => {}
            Err(other) => return Err(other),
        }
    }
    let w = build_reduced_generator_in::<TwoFloat>(p, opts.budget)?;
    run(&w, opts, e, Precision::Extended)
}
