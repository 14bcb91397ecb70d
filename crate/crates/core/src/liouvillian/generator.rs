//! The real generator `W` of the mirror-symmetric sector.

use serde::{Deserialize, Serialize};

use super::layout::ReducedLayout;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::banded::BandedMatrix;
use crate::numerics::scalar::{Real, TwoFloat};

/// Largest sector dimension assembled by default (`J` up to about 170).
pub const DEFAULT_BUDGET: usize = 60_000;

/// Reduced state vector `p_{M,M+k}` in the layout of [`ReducedLayout`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub layout: ReducedLayout,
    pub values: Vec<f64>,
}

impl ReducedState {
    pub fn get(&self, k: usize, m_idx: usize) -> f64 {
        self.values[self.layout.index(k, m_idx)]
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.values[..self.layout.levels()]
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }
}

/// Sparse row-compressed `W`, generic over the working precision.
#[derive(Debug, Clone)]
pub struct SparseGenerator<T = f64> {
    pub params: ModelParams,
    pub layout: ReducedLayout,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

pub fn build_reduced_generator(p: &ModelParams) -> Result<SparseGenerator<f64>> {
    build_reduced_generator_in::<f64>(p, DEFAULT_BUDGET)
}

pub fn build_reduced_generator_extended(p: &ModelParams) -> Result<SparseGenerator<TwoFloat>> {
    build_reduced_generator_in::<TwoFloat>(p, DEFAULT_BUDGET)
}

/// Assembles `W` with every coefficient formed in the working precision
/// `T` (square roots of exact integers included).
pub fn build_reduced_generator_in<T: Real>(p: &ModelParams, budget: usize) -> Result<SparseGenerator<T>> {
    p.validate()?;
    let layout = ReducedLayout::new(p.two_j());
    let dim = layout.dim();
    if dim > budget {
        return Err(Error::Resource { dim, budget });
    }
    let n = layout.levels() as i64;
    let two_j = layout.two_j() as i64;
    let jj = T::from_f64(p.spin_j);
    let rate_g = T::from_f64(p.gamma).quotient(jj);
    let rate_gg = T::from_f64(p.big_gamma).quotient(jj * jj * jj);
    let half_omega = T::from_f64(0.5 * p.omega);
    let omega = T::from_f64(p.omega);
    let c2 = |mi: i64| layout.ladder_sq(mi);
    // sqrt(a * b) of exact integers; products stay below 2^53 within budget
    let root = |a: i64, b: i64| T::from_f64((a * b) as f64).sqrt();
    let mval = |mi: i64| T::from_f64(mi as f64 - p.spin_j);

    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::with_capacity(dim * 8);
    let mut vals = Vec::with_capacity(dim * 8);
    row_ptr.push(0);
    let mut row: Vec<(usize, T)> = Vec::with_capacity(8);
    for k in 0..=two_j {
        for mi in 0..(n - k) {
            row.clear();
            let mut put = |kk: i64, mm: i64, v: T| {
                if kk < 0 || kk > two_j || mm < 0 || mm >= n - kk {
                    debug_assert!(v.to_f64() == 0.0, "dropped nonzero coupling to ({kk}, {mm})");
                    return;
                }
                if v.to_f64() == 0.0 {
                    return;
                }
                let c = layout.index(kk as usize, mm as usize);
                match row.iter_mut().find(|(cc, _)| *cc == c) {
                    Some(e) => e.1 += v,
                    None => row.push((c, v)),
                }
            };
            // mirrored index: C_{-M} uses position 2J - mi
            let neg = |x: i64| two_j - x;
            if k == 0 {
                put(1, mi - 1, omega * root(c2(mi - 1), 1));
                put(1, mi, -(omega * root(c2(mi), 1)));
                put(0, mi - 1, rate_g * T::from_i64(c2(neg(mi))));
                put(0, mi, -(rate_g * T::from_i64(c2(mi))));
                let m1 = mval(mi + 1);
                put(0, mi + 1, rate_gg * m1 * m1 * T::from_i64(c2(mi)));
                let m0 = mval(mi);
                put(0, mi, -(rate_gg * m0 * m0 * T::from_i64(c2(neg(mi)))));
            } else {
                let s = if k % 2 == 0 { half_omega } else { -half_omega };
                put(k + 1, mi - 1, s * root(c2(mi - 1), 1));
                put(k - 1, mi + 1, s * root(c2(mi), 1));
                put(k - 1, mi, -(s * root(c2(mi + k - 1), 1)));
                put(k + 1, mi, -(s * root(c2(mi + k), 1)));
                put(k, mi - 1, rate_g * root(c2(neg(mi)), c2(neg(mi + k))));
                let half = T::from_f64(0.5);
                put(k, mi, -(rate_g * half * T::from_i64(c2(mi) + c2(mi + k))));
                let (ma, mb) = (mval(mi + 1), mval(mi + k + 1));
                put(k, mi + 1, rate_gg * ma * mb * root(c2(mi), c2(mi + k)));
                let (m0, mk) = (mval(mi), mval(mi + k));
                let diag = m0 * m0 * T::from_i64(c2(neg(mi))) + mk * mk * T::from_i64(c2(neg(mi + k)));
                put(k, mi, -(rate_gg * half * diag));
            }
            row.sort_by_key(|e| e.0);
            for &(c, v) in &row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
    }
    Ok(SparseGenerator { params: *p, layout, row_ptr, cols, vals })
}

impl<T: Real> SparseGenerator<T> {
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.row(i).find(|&(c, _)| c == j).map(|e| e.1).unwrap_or_else(T::zero)
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.dim())
            .map(|i| {
                let mut acc = T::zero();
                for (c, v) in self.row(i) {
                    acc += v * x[c];
                }
                acc
            })
            .collect()
    }

    /// `1^T W`: sums of each column over the diagonal-sector rows.
    pub fn trace_row(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        for i in 0..self.layout.levels() {
            for (c, v) in self.row(i) {
                out[c] += v;
            }
        }
        out
    }

    /// Largest `i - j` and `j - i` over stored entries.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0;
        let mut ku = 0;
        for i in 0..self.dim() {
            for (c, _) in self.row(i) {
                if c < i {
                    kl = kl.max(i - c);
                } else {
                    ku = ku.max(c - i);
                }
            }
        }
        (kl, ku)
    }

    /// `max_i sum_j |W_ij|`.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim()).map(|i| self.row(i).map(|(_, v)| v.to_f64().abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `W + g e 1^T` in banded storage, `e` the unit vector at diagonal
    /// position `e_index`.
    pub fn deflated_banded(&self, g: f64, e_index: usize) -> BandedMatrix<T> {
        let levels = self.layout.levels();
        let (kl, ku) = self.bandwidths();
        let kl = kl.max(e_index);
        let ku = ku.max(levels - 1 - e_index);
        let mut band = BandedMatrix::zeros(self.dim(), kl, ku);
        for i in 0..self.dim() {
            for (c, v) in self.row(i) {
                band.add(i, c, v);
            }
        }
        let gt = T::from_f64(g);
        for c in 0..levels {
            band.add(e_index, c, gt);
        }
        band
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            for (c, v) in self.row(i) {
                m[(i, c)] = v.to_f64();
            }
        }
        m
    }

    /// Entries of `W` converted to double-double (exact for both precisions).
    pub fn to_extended(&self) -> SparseGenerator<TwoFloat> {
        SparseGenerator {
            params: self.params,
            layout: self.layout,
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            vals: self.vals.iter().map(|v| v.to_extended()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_one_has_dimension_six() {
        let w = build_reduced_generator(&ModelParams::new(0.25, 9.0, 1.0).unwrap()).unwrap();
        assert_eq!(w.dim(), 6);
    }

    #[test]
    fn trace_row_vanishes() {
        let w = build_reduced_generator(&ModelParams::new(0.25, 9.0, 4.0).unwrap()).unwrap();
        let t = w.trace_row();
        assert!(t.iter().all(|v| v.abs() < 1e-13), "{t:?}");
        let we = build_reduced_generator_extended(&ModelParams::new(0.25, 9.0, 16.0).unwrap()).unwrap();
        assert!(we.trace_row().iter().all(|v| v.to_f64().abs() < 1e-28));
    }

    #[test]
    fn at_most_eight_couplings_per_row() {
        let w = build_reduced_generator(&ModelParams::new(0.7, 3.0, 5.5).unwrap()).unwrap();
        for i in 0..w.dim() {
            assert!(w.row(i).count() <= 8);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let p = ModelParams::new(0.25, 9.0, 64.0).unwrap();
        assert!(matches!(build_reduced_generator_in::<f64>(&p, 100), Err(Error::Resource { .. })));
    }
}
