//! Flat indexing of the mirror-symmetric sector `p_{M,M+k}`.

use serde::{Deserialize, Serialize};

/// Blocks ordered by `k` ascending, `M` ascending inside a block. Within a
/// block the position is `M + J`, so the diagonal block occupies the first
/// `2J + 1` slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedLayout {
    two_j: usize,
}

impl ReducedLayout {
    pub fn new(two_j: usize) -> Self {
        Self { two_j }
    }

    pub fn two_j(&self) -> usize {
        self.two_j
    }

    pub fn spin_j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Number of levels `2J + 1`.
    pub fn levels(&self) -> usize {
        self.two_j + 1
    }

    /// `(2J+1)(J+1)`.
    pub fn dim(&self) -> usize {
        (self.two_j + 1) * (self.two_j + 2) / 2
    }

    pub fn block_offset(&self, k: usize) -> usize {
        k * self.levels() - k * k.saturating_sub(1) / 2
    }

    pub fn block_len(&self, k: usize) -> usize {
        self.levels() - k
    }

    /// Flat index of `p_{M,M+k}` with `M = m_idx - J`.
    #[inline]
    pub fn index(&self, k: usize, m_idx: usize) -> usize {
        debug_assert!(k <= self.two_j && m_idx < self.block_len(k));
        self.block_offset(k) + m_idx
    }

    /// Inverse of [`index`](Self::index).
    pub fn coords(&self, flat: usize) -> (usize, usize) {
        let mut k = 0;
        while k < self.two_j && self.block_offset(k + 1) <= flat {
            k += 1;
        }
        (k, flat - self.block_offset(k))
    }

    /// `M` for a position inside a block.
    pub fn m_value(&self, m_idx: usize) -> f64 {
        m_idx as f64 - self.spin_j()
    }

    /// `C_M^2 = J(J+1) - M(M+1)` for `M = m_idx - J`, clamped at zero
    /// outside `-J-1 <= M <= J`. Exact integer arithmetic.
    #[inline]
    pub fn ladder_sq(&self, m_idx: i64) -> i64 {
        ((self.two_j as i64 - m_idx) * (m_idx + 1)).max(0)
    }
}

/// Ladder coefficient `C_M = sqrt(J(J+1) - M(M+1))` for arbitrary real `M`.
pub fn ladder_coefficient(spin_j: f64, m: f64) -> f64 {
    (spin_j * (spin_j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_map_is_a_bijection() {
        for two_j in 1..9 {
            let l = ReducedLayout::new(two_j);
            let mut seen = vec![false; l.dim()];
            for k in 0..=two_j {
                for m in 0..l.block_len(k) {
                    let i = l.index(k, m);
                    assert!(!seen[i]);
                    seen[i] = true;
                    assert_eq!(l.coords(i), (k, m));
                }
            }
            assert!(seen.into_iter().all(|s| s));
        }
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(ReducedLayout::new(2).dim(), 6);
        assert_eq!(ReducedLayout::new(128).dim(), 129 * 65);
    }

    #[test]
    fn ladder_matches_closed_form() {
        let l = ReducedLayout::new(5);
        for mi in -1..=5i64 {
            let m = mi as f64 - 2.5;
            let direct = ladder_coefficient(2.5, m).powi(2);
            assert!((l.ladder_sq(mi) as f64 - direct).abs() < 1e-12);
        }
        assert_eq!(l.ladder_sq(6), 0);
        assert_eq!(l.ladder_sq(-2), 0);
    }
}
