//! Banded LU factorization with partial pivoting, generic over the working
//! precision.
//!
//! Storage follows the LAPACK `gbtrf` convention in spirit: every row keeps a
//! window of `2*kl + ku + 1` columns centered so that row interchanges within
//! the band never leave the window. Multipliers are stored in place and the
//! interchanges are replayed step by step during the solve.

use super::scalar::Real;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandedMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Real> BandedMatrix<T> {
    /// Zero matrix of order `n` with `kl` sub- and `ku` super-diagonals.
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![T::zero(); n * width] }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn slot(&self, row: usize, col: usize) -> usize {
        // col lies in [row - kl, row + kl + ku]
        row * self.width + (col + self.kl - row)
    }

    #[inline]
    fn in_band(&self, row: usize, col: usize) -> bool {
        col + self.kl >= row && col <= row + self.kl + self.ku
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        if self.in_band(row, col) {
            self.data[self.slot(row, col)]
        } else {
            T::zero()
        }
    }

    /// Adds `value` at `(row, col)`; the position must lie inside the
    /// declared band `[row - kl, row + ku]`.
    pub fn add(&mut self, row: usize, col: usize, value: T) {
        assert!(
            col + self.kl >= row && col <= row + self.ku,
            "entry ({row}, {col}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let s = self.slot(row, col);
        self.data[s] += value;
    }

    /// Factorizes in place. Fails on an exactly zero pivot column.
    pub fn factorize(mut self) -> Result<BandedLu<T>> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last_row {
                let a = self.get(i, k).abs();
                if a > best {
                    best = a;
                    p = i;
                }
            }
            if best.to_f64() == 0.0 {
                return Err(Error::Singular(k));
            }
            pivots[k] = p;
            let last_col = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let a = self.slot(k, j);
                    let b = self.slot(p, j);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.slot(k, k)];
            for i in k + 1..=last_row {
                let sik = self.slot(i, k);
                let m = self.data[sik].quotient(pivot);
                self.data[sik] = m;
                if m.to_f64() == 0.0 {
                    continue;
                }
                let rk = self.slot(k, k) - k;
                let ri = self.slot(i, k) - k;
                for j in k + 1..=last_col {
                    let u = self.data[rk + j];
                    self.data[ri + j] -= m * u;
                }
            }
        }
        Ok(BandedLu { band: self, pivots })
    }
}

/// Factorized banded matrix `P A = L U`.
#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    band: BandedMatrix<T>,
    pivots: Vec<usize>,
}

impl<T: Real> BandedLu<T> {
    pub fn order(&self) -> usize {
        self.band.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) {
        let a = &self.band;
        let n = a.n;
        assert_eq!(b.len(), n);
        let (kl, ku) = (a.kl, a.ku);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                let m = a.data[a.slot(i, k)];
                b[i] -= m * bk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            let base = a.slot(k, k) - k;
            for j in k + 1..=(k + kl + ku).min(n - 1) {
                acc -= a.data[base + j] * b[j];
            }
            b[k] = acc.quotient(a.data[base + k]);
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
