//! Explicitly restarted Arnoldi iteration for the dominant eigenvalues of an
//! operator given only through its action (here: a shift-invert solve).

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dense;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct ArnoldiOptions {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Relative residual `|h_{m+1,m} y_m| / |theta|` accepted as converged.
    pub tol: f64,
}

impl Default for ArnoldiOptions {
    fn default() -> Self {
        Self { krylov_dim: 24, max_restarts: 40, tol: 1e-11 }
    }
}

#[derive(Debug, Clone)]
pub struct RitzPair {
    pub theta: Complex64,
    pub rel_residual: f64,
    pub vector: Vec<Complex64>,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Runs Arnoldi on `op` and returns the Ritz pairs of the final cycle sorted
/// by decreasing `|theta|`.
///
/// `admissible` filters Ritz pairs that must not drive convergence (the
/// deflated stationary mode, for instance). Iteration stops once the
/// admissible pair of largest modulus has converged.
pub fn dominant_ritz_pairs(
    n: usize,
    mut op: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    start: &[f64],
    opts: &ArnoldiOptions,
    admissible: impl Fn(&RitzPair) -> bool,
) -> Result<Vec<RitzPair>> {
    let m = opts.krylov_dim.min(n).max(1);
    let mut v0 = start.to_vec();
    let mut last_best: Option<RitzPair> = None;
    for _restart in 0..=opts.max_restarts {
        let nv = norm(&v0);
        if nv == 0.0 || !nv.is_finite() {
            return Err(Error::Eigensolver { detail: "degenerate Arnoldi start vector".into(), suggested_shift: 0.0 });
        }
        let mut basis: Vec<Vec<f64>> = vec![v0.iter().map(|a| a / nv).collect()];
        let mut h = DMatrix::<f64>::zeros(m + 1, m);
        let mut dim = m;
        for j in 0..m {
            let mut w = op(&basis[j])?;
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for (i, b) in basis.iter().enumerate() {
                    let c: f64 = b.iter().zip(&w).map(|(x, y)| x * y).sum();
                    h[(i, j)] += c;
                    for (wk, bk) in w.iter_mut().zip(b) {
                        *wk -= c * bk;
                    }
                }
            }
            let hn = norm(&w);
            h[(j + 1, j)] = hn;
            let scale = (0..=j).map(|i| h[(i, j)].abs()).fold(0.0, f64::max);
            if hn <= 1e-14 * scale.max(1e-300) {
                // invariant subspace found
                dim = j + 1;
                break;
            }
            basis.push(w.iter().map(|a| a / hn).collect());
        }
        let hm = h.view((0, 0), (dim, dim)).into_owned();
        let beta = h[(dim, dim - 1)];
        let hc = hm.map(|x| Complex64::new(x, 0.0));
        let thetas = dense::eigenvalues_real(hm)?;
        let mut pairs = Vec::with_capacity(thetas.len());
        for theta in thetas {
            let y = dense::eigenvector(&hc, theta)?;
            let ynorm = y.norm();
            let res = beta * y[dim - 1].norm() / ynorm;
            let mut vec = vec![Complex64::new(0.0, 0.0); n];
            for (k, b) in basis.iter().take(dim).enumerate() {
                let yk = y[k] / ynorm;
                for (vi, bi) in vec.iter_mut().zip(b) {
                    *vi += yk * *bi;
                }
            }
            let rel = if theta.norm() > 0.0 { res / theta.norm() } else { f64::INFINITY };
            pairs.push(RitzPair { theta, rel_residual: rel, vector: vec });
        }
        pairs.sort_by(|a, b| b.theta.norm().partial_cmp(&a.theta.norm()).unwrap());
        let best = pairs.iter().find(|p| admissible(p)).cloned();
        match best {
            Some(b) if b.rel_residual <= opts.tol || dim < m => return Ok(pairs),
            Some(b) => {
                v0 = b.vector.iter().map(|z| z.re + z.im).collect();
                last_best = Some(b);
            }
            None => {
                return Err(Error::Eigensolver {
                    detail: "no admissible Ritz value in the Krylov space".into(),
                    suggested_shift: 0.0,
                })
            }
        }
    }
    let detail = match last_best {
        Some(b) => format!("Arnoldi did not converge: best relative residual {:.3e}", b.rel_residual),
        None => "Arnoldi did not converge".into(),
    };
    Err(Error::Eigensolver { detail, suggested_shift: 0.0 })
}
