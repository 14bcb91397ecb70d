//! Dense Liouvillian on all `(2J+1)^2` matrix elements. Small-`J` oracle.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::generator::ReducedState;
use super::layout::{ladder_coefficient, ReducedLayout};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::dense;

pub const DEFAULT_ORACLE_CAP: f64 = 8.0;

#[derive(Debug, Clone)]
pub struct FullGenerator {
    pub params: ModelParams,
    pub levels: usize,
    /// Acts on `rho` flattened row-major: index `(M + J) * (2J+1) + (M' + J)`.
    pub matrix: DMatrix<Complex64>,
}

pub fn build_full_generator(p: &ModelParams) -> Result<FullGenerator> {
    build_full_generator_capped(p, DEFAULT_ORACLE_CAP)
}

pub fn build_full_generator_capped(p: &ModelParams, cap: f64) -> Result<FullGenerator> {
    p.validate()?;
    if p.spin_j > cap {
        return Err(Error::OracleCap { cap, requested: p.spin_j });
    }
    let j = p.spin_j;
    let n = p.two_j() + 1;
    let c = |m: f64| ladder_coefficient(j, m);
    let mval = |i: usize| i as f64 - j;
    let (rg, rgg) = (p.gamma / j, p.big_gamma / (j * j * j));
    let hom = Complex64::new(0.0, -0.5 * p.omega);
    let mut l = DMatrix::<Complex64>::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let row = a * n + b;
            let (m, mp) = (mval(a), mval(b));
            let mut put = |aa: isize, bb: isize, v: Complex64| {
                if aa < 0 || bb < 0 || aa >= n as isize || bb >= n as isize {
                    return;
                }
                l[(row, aa as usize * n + bb as usize)] += v;
            };
            let (ai, bi) = (a as isize, b as isize);
            put(ai - 1, bi, hom * c(m - 1.0));
            put(ai + 1, bi, hom * c(m));
            put(ai, bi - 1, -hom * c(mp - 1.0));
            put(ai, bi + 1, -hom * c(mp));
            put(ai - 1, bi - 1, Complex64::from(rg * c(-m) * c(-mp)));
            put(ai, bi, Complex64::from(-0.5 * rg * (c(m).powi(2) + c(mp).powi(2))));
            put(ai + 1, bi + 1, Complex64::from(rgg * (m + 1.0) * (mp + 1.0) * c(m) * c(mp)));
            put(
                ai,
                bi,
                Complex64::from(-0.5 * rgg * (m * m * c(-m).powi(2) + mp * mp * c(-mp).powi(2))),
            );
        }
    }
    Ok(FullGenerator { params: *p, levels: n, matrix: l })
}

impl FullGenerator {
    pub fn dim(&self) -> usize {
        self.levels * self.levels
    }

    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = self.levels;
        let v = DVector::from_iterator(n * n, (0..n * n).map(|i| rho[(i / n, i % n)]));
        let out = &self.matrix * v;
        DMatrix::from_fn(n, n, |a, b| out[a * n + b])
    }

    fn deflated(&self, g: f64, e: usize) -> DMatrix<Complex64> {
        let n = self.levels;
        let mut a = self.matrix.clone();
        for d in 0..n {
            a[(e * n + e, d * n + d)] += Complex64::from(g);
        }
        a
    }

    /// Normalized stationary density matrix.
    pub fn steady_state(&self) -> Result<DMatrix<Complex64>> {
        let n = self.levels;
        let e = n - 1;
        let a = self.deflated(1.0, e);
        let mut rhs = DVector::<Complex64>::zeros(n * n);
        rhs[e * n + e] = Complex64::from(1.0);
        let x = a.lu().solve(&rhs).ok_or(Error::Singular(0))?;
        Ok(DMatrix::from_fn(n, n, |r, s| x[r * n + s]))
    }

    /// All eigenvalues of the Liouvillian.
    pub fn spectrum(&self) -> Result<Vec<Complex64>> {
        dense::eigenvalues_complex(self.matrix.clone())
    }

    /// `-Re` of the slowest nonzero eigenvalue. The stationary mode is
    /// removed by the rank-one deflation used for the steady state.
    pub fn gap(&self) -> Result<f64> {
        let n = self.levels;
        let g = 1.0;
        let ev = dense::eigenvalues_complex(self.deflated(g, n - 1))?;
        gap_after_deflation(&ev, g)
    }
}

impl FullGenerator {
    /// Orthonormal basis of the `+1` eigenspace of the mirror map
    /// `T rho = P rho^T P`, `P = diag((-1)^M)`. `T` commutes with the
    /// Liouvillian; on Hermitian matrices its `+1` space is the sector
    /// carried by the reduced generator.
    fn mirror_basis(&self) -> DMatrix<Complex64> {
        let n = self.levels;
        let dim = n * (n + 1) / 2;
        let mut q = DMatrix::<Complex64>::zeros(n * n, dim);
        let mut col = 0;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for a in 0..n {
            q[(a * n + a, col)] = Complex64::from(1.0);
            col += 1;
        }
        for a in 0..n {
            for b in a + 1..n {
                let sign = if (b - a) % 2 == 0 { 1.0 } else { -1.0 };
                q[(a * n + b, col)] = Complex64::from(h);
                q[(b * n + a, col)] = Complex64::from(sign * h);
                col += 1;
            }
        }
        q
    }

    /// Liouvillian restricted to the mirror-symmetric sector.
    pub fn symmetric_sector_matrix(&self) -> DMatrix<Complex64> {
        let q = self.mirror_basis();
        q.adjoint() * &self.matrix * q
    }

    /// Gap of the mirror-symmetric sector alone. The first `2J+1` basis
    /// vectors are the populations, which carry the trace.
    pub fn symmetric_sector_gap(&self) -> Result<f64> {
        let n = self.levels;
        let g = 1.0;
        let mut a = self.symmetric_sector_matrix();
        for d in 0..n {
            a[(n - 1, d)] += Complex64::from(g);
        }
        gap_after_deflation(&dense::eigenvalues_complex(a)?, g)
    }
}

pub(crate) fn gap_after_deflation(ev: &[Complex64], g: f64) -> Result<f64> {
    let (idx, d) = ev
        .iter()
        .enumerate()
        .map(|(i, z)| (i, (z - Complex64::from(g)).norm()))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if d > 1e-6 * g.abs().max(1.0) {
        return Err(Error::Consistency(format!("deflated stationary mode not found (distance {d:e})")));
    }
    let best = ev
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != idx)
        .map(|(_, z)| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(best < 0.0) {
        return Err(Error::Consistency(format!("non-negative relaxation rate {best:e}")));
    }
    Ok(-best)
}

pub fn magnetization_z_full(rho: &DMatrix<Complex64>, spin_j: f64) -> f64 {
    (0..rho.nrows()).map(|i| (i as f64 - spin_j) * rho[(i, i)].re).sum::<f64>() / spin_j
}

/// Mirror-symmetric image of `rho`: `Re rho_{M,M+k}` for even `k`,
/// `Im rho_{M,M+k}` for odd `k`.
pub fn reduce(rho: &DMatrix<Complex64>) -> ReducedState {
    let n = rho.nrows();
    let layout = ReducedLayout::new(n - 1);
    let mut values = vec![0.0; layout.dim()];
    for k in 0..n {
        for m in 0..n - k {
            let z = rho[(m, m + k)];
            values[layout.index(k, m)] = if k % 2 == 0 { z.re } else { z.im };
        }
    }
    ReducedState { layout, values }
}

/// Hermitian density matrix of a reduced state.
pub fn reconstruct(state: &ReducedState) -> DMatrix<Complex64> {
    let layout = state.layout;
    let n = layout.levels();
    let mut rho = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        for m in 0..n - k {
            let p = state.values[layout.index(k, m)];
            let z = if k % 2 == 0 { Complex64::new(p, 0.0) } else { Complex64::new(0.0, p) };
            rho[(m, m + k)] = z;
            rho[(m + k, m)] = z.conj();
        }
    }
    rho
}
