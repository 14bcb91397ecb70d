//! Small dense eigenvalue helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn eigenvalues_real(m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-15, 100 * n.max(10))
        .ok_or_else(|| Error::Eigensolver { detail: "dense real Schur did not converge".into(), suggested_shift: 0.0 })?;
    Ok(schur.complex_eigenvalues().iter().map(|z| Complex64::new(z.re, z.im)).collect())
}

pub fn eigenvalues_complex(m: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-15, 100 * n.max(10)).ok_or_else(|| {
        Error::Eigensolver { detail: "dense complex Schur did not converge".into(), suggested_shift: 0.0 }
    })?;
    schur.eigenvalues().map(|v| v.iter().copied().collect()).ok_or_else(|| Error::Eigensolver {
        detail: "complex Schur form not triangular".into(),
        suggested_shift: 0.0,
    })
}

/// Right singular vector of the smallest singular value, with that value.
pub fn null_vector(m: DMatrix<Complex64>) -> Result<(DVector<Complex64>, f64)> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Eigensolver { detail: "SVD failed".into(), suggested_shift: 0.0 })?;
    let (idx, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let v = v_t.row(idx).transpose().map(|z| z.conj());
    Ok((v, smin))
}

/// Eigenvector of `m` for the eigenvalue `lambda` (unit 2-norm).
pub fn eigenvector(m: &DMatrix<Complex64>, lambda: Complex64) -> Result<DVector<Complex64>> {
    let n = m.nrows();
    let shifted = m - DMatrix::<Complex64>::identity(n, n) * lambda;
    Ok(null_vector(shifted)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_generator_has_imaginary_pair() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        let mut ev = eigenvalues_real(m).unwrap();
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((ev[0] - Complex64::new(0.0, -2.0)).norm() < 1e-14);
        assert!((ev[1] - Complex64::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn eigenvector_satisfies_definition() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                Complex64::new(1.0, 0.5), Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(3.0, 0.0),
                Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0), Complex64::new(2.0, -1.0),
            ],
        );
        for lam in eigenvalues_complex(m.clone()).unwrap() {
            let v = eigenvector(&m, lam).unwrap();
            let r = &m * &v - &v * lam;
            assert!(r.norm() < 1e-12);
        }
    }
}
