//! Liouvillian gap of the reduced generator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::full::gap_after_deflation;
use super::generator::SparseGenerator;
use super::steady::{default_pivot, solve_steady, SteadySolution};
use crate::error::{Error, Result};
use crate::numerics::arnoldi::{dominant_ritz_pairs, ArnoldiOptions};
use crate::numerics::dense;
use crate::numerics::scalar::Real;

/// Sector dimensions up to this size use a dense eigendecomposition.
pub const DENSE_LIMIT: usize = 300;

/// Ritz vectors at least this parallel to the steady state are treated as
/// the stationary mode.
pub const STATIONARY_OVERLAP: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapMethod {
    Dense,
    Krylov,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub lambda: f64,
    pub eigenvalue: Complex64,
    pub method: GapMethod,
    pub rel_residual: f64,
}

/// Gap from a fresh steady-state solve with the default pivot and `g = 1`.
pub fn liouvillian_gap<T: Real>(w: &SparseGenerator<T>) -> Result<GapResult> {
    let sol = solve_steady(w, 1.0, default_pivot(&w.params))?;
    gap_from_steady(w, &sol)
}

/// Gap reusing the factorization of `W + g e 1^T`. That matrix shares every
/// nonzero eigenvalue of `W` and moves the stationary one to `g`, so it is
/// both the deflated operator and the shift-invert operator at shift 0.
pub fn gap_from_steady<T: Real>(w: &SparseGenerator<T>, sol: &SteadySolution<T>) -> Result<GapResult> {
    let n = w.dim();
    if n <= DENSE_LIMIT {
        let mut a = w.to_dense();
        for c in 0..w.layout.levels() {
            a[(sol.e_index, c)] += sol.g;
        }
        let ev = dense::eigenvalues_real(a)?;
        let lambda = gap_after_deflation(&ev, sol.g)?;
        let eig = ev
            .iter()
            .copied()
            .filter(|z| (z.re + lambda).abs() <= 1e-12 * lambda.max(1.0))
            .fold(Complex64::new(-lambda, f64::INFINITY), |a, z| if z.im.abs() < a.im.abs() { z } else { a });
        return Ok(GapResult { lambda, eigenvalue: eig, method: GapMethod::Dense, rel_residual: 0.0 });
    }

    let p = &sol.state.values;
    let pnorm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    let overlap = |v: &[Complex64]| {
        let dot: Complex64 = v.iter().zip(p).map(|(a, b)| a * b).sum();
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        dot.norm() / (vn * pnorm)
    };
    let admissible = |theta: Complex64, v: &[Complex64]| (1.0 / theta).re < 0.0 && overlap(v) < STATIONARY_OVERLAP;
    let start: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (0.7 * i as f64).sin()).collect();
    let opts = ArnoldiOptions::default();
    let pairs = dominant_ritz_pairs(
        n,
        |x| {
            let xt: Vec<T> = x.iter().map(|&v| T::from_f64(v)).collect();
            Ok(sol.lu.solve(&xt).iter().map(|v| v.to_f64()).collect())
        },
        &start,
        &opts,
        |rp| admissible(rp.theta, &rp.vector),
    )?;
    let best = pairs
        .iter()
        .filter(|rp| rp.rel_residual <= 100.0 * opts.tol && admissible(rp.theta, &rp.vector))
        .map(|rp| (1.0 / rp.theta, rp.rel_residual))
        .max_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap())
        .ok_or_else(|| Error::Eigensolver { detail: "no converged non-stationary Ritz value".into(), suggested_shift: 0.0 })?;
    let lambda = -best.0.re;
    if !(lambda > 0.0) {
        return Err(Error::Consistency(format!("non-positive gap {lambda:e}")));
    }
    Ok(GapResult { lambda, eigenvalue: best.0, method: GapMethod::Krylov, rel_residual: best.1 })
}

/// `(1/4) ln(lambda(J-4) / lambda(J))`.
pub fn gap_estimator(lambda_small: f64, lambda_big: f64) -> Result<f64> {
    if !(lambda_small > 0.0 && lambda_big > 0.0) {
        return Err(Error::InvalidArgument("gap estimator needs positive gaps".into()));
    }
    Ok(0.25 * (lambda_small / lambda_big).ln())
}
