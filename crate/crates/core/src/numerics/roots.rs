//! Real roots of real polynomials via companion-matrix eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients in ascending powers: `c[0] + c[1] x + ... + c[n] x^n`.
/// Returns the value and the first derivative.
pub fn eval_poly(c: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &a in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

fn eval_poly_c(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots, each polished by Newton steps.
pub fn complex_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let mut c: Vec<f64> = coeffs.to_vec();
    let scale = c.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if scale == 0.0 {
        return Err(Error::RootFinder("zero polynomial".into()));
    }
    while c.len() > 1 && c.last().unwrap().abs() <= 1e-300 {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    let schur = nalgebra::linalg::Schur::try_new(comp, 1e-15, 10_000)
        .ok_or_else(|| Error::RootFinder("companion-matrix Schur iteration did not converge".into()))?;
    let mut roots: Vec<Complex64> =
        schur.complex_eigenvalues().iter().map(|z| Complex64::new(z.re, z.im)).collect();
    for z in roots.iter_mut() {
        let mut best = *z;
        let mut best_res = eval_poly_c(&c, best).0.norm();
        let mut cur = *z;
        for _ in 0..20 {
            let (p, dp) = eval_poly_c(&c, cur);
            if dp.norm() == 0.0 {
                break;
            }
            cur -= p / dp;
            let res = eval_poly_c(&c, cur).0.norm();
            if res < best_res {
                best = cur;
                best_res = res;
            }
            if res == 0.0 {
                break;
            }
        }
        *z = best;
    }
    Ok(roots)
}

/// Real roots sorted ascending. A root counts as real when its imaginary part
/// after polishing is at most `imag_tol`.
pub fn real_roots(coeffs: &[f64], imag_tol: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for z in complex_roots(coeffs)? {
        if z.im.abs() > imag_tol {
            continue;
        }
        let mut best = z.re;
        let mut best_res = eval_poly(coeffs, best).0.abs();
        let mut x = best;
        for _ in 0..20 {
            let (p, dp) = eval_poly(coeffs, x);
            if dp == 0.0 || p == 0.0 {
                break;
            }
            x -= p / dp;
            let res = eval_poly(coeffs, x).0.abs();
            if res < best_res {
                best = x;
                best_res = res;
            }
        }
        out.push(best);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_roots_of_a_product() {
        // (x - 1)(x + 2)(x - 64)(x^2 + 1)
        let mut c = vec![1.0];
        for r in [1.0, -2.0, 64.0] {
            let mut n = vec![0.0; c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                n[i] -= r * a;
                n[i + 1] += a;
            }
            c = n;
        }
        let mut n = vec![0.0; c.len() + 2];
        for (i, a) in c.iter().enumerate() {
            n[i] += a;
            n[i + 2] += a;
        }
        let found = real_roots(&n, 1e-9).unwrap();
        assert_eq!(found.len(), 3);
        for (f, e) in found.iter().zip([-2.0, 1.0, 64.0]) {
            assert!((f - e).abs() < 1e-10 * e.abs().max(1.0));
        }
    }

    #[test]
    fn trims_vanishing_leading_coefficient() {
        let found = real_roots(&[-4.0, 0.0, 1.0, 0.0], 1e-9).unwrap();
        assert_eq!(found.len(), 2);
        assert!((found[0] + 2.0).abs() < 1e-14 && (found[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert!(real_roots(&[0.0, 0.0], 1e-9).is_err());
    }
}
