//! On-axis auxiliary Hamiltonian `H(w, pi) = pi * C(w, pi)` with the cubic
//! `C = c0 + c1 pi + c2 pi^2 + c3 pi^3`.

use serde::{Deserialize, Serialize};

use crate::model::ModelParams;

/// Quasiprobability representation the auxiliary Hamiltonian belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    /// Husimi
    #[serde(rename = "H")]
    Husimi,
    /// Glauber–Sudarshan P
    #[serde(rename = "P")]
    GlauberP,
}

impl Representation {
    pub const BOTH: [Representation; 2] = [Representation::Husimi, Representation::GlauberP];

    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Husimi => "H",
            Representation::GlauberP => "P",
        }
    }
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coefficients `c0..c3` evaluated at one `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoeffs {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl CubicCoeffs {
    pub fn as_array(&self) -> [f64; 4] {
        [self.c0, self.c1, self.c2, self.c3]
    }

    pub fn eval(&self, pi: f64) -> f64 {
        self.c0 + pi * (self.c1 + pi * (self.c2 + pi * self.c3))
    }

    pub fn d_pi(&self, pi: f64) -> f64 {
        self.c1 + pi * (2.0 * self.c2 + 3.0 * pi * self.c3)
    }
}

pub fn cubic_coeffs(alpha: Representation, w: f64, p: &ModelParams) -> CubicCoeffs {
    let (om, g, gg) = (p.omega, p.gamma, p.big_gamma);
    let w2 = w * w;
    let r = w2 + 1.0;
    let q = w2 - 1.0;
    let c0 = 0.5 * om * r + g * w - gg * w * q * q / (r * r);
    match alpha {
        Representation::Husimi => CubicCoeffs {
            c0,
            c1: (g * (w * r).powi(2) + gg * (5.0 * w2 * w2 - 6.0 * w2 + 1.0)) / (4.0 * r),
            c2: 0.25 * gg * (w - 2.0 * w * w2),
            c3: gg * w2 * r / 16.0,
        },
        Representation::GlauberP => CubicCoeffs {
            c0,
            c1: (g * r * r + gg * (w2 * w2 - 6.0 * w2 + 5.0) * w2) / (4.0 * r),
            c2: 0.25 * gg * w * w2 * (w2 - 2.0),
            c3: gg * w2 * w2 * r / 16.0,
        },
    }
}

/// `d/dw` of each coefficient.
pub fn cubic_coeffs_dw(alpha: Representation, w: f64, p: &ModelParams) -> CubicCoeffs {
    let (om, g, gg) = (p.omega, p.gamma, p.big_gamma);
    let w2 = w * w;
    let r = w2 + 1.0;
    let q = w2 - 1.0;
    let c0 = om * w + g - gg * (q * q / (r * r) + 8.0 * w2 * q / (r * r * r));
    match alpha {
        Representation::Husimi => CubicCoeffs {
            c0,
            c1: 0.5 * g * (2.0 * w * w2 + w)
                + gg * (10.0 * w * w2 * w2 + 20.0 * w * w2 - 14.0 * w) / (4.0 * r * r),
            c2: 0.25 * gg * (1.0 - 6.0 * w2),
            c3: gg * (4.0 * w * w2 + 2.0 * w) / 16.0,
        },
        Representation::GlauberP => CubicCoeffs {
            c0,
            c1: 0.5 * g * w
                + gg * (4.0 * w * w2 * w2 * w2 - 6.0 * w * w2 * w2 - 24.0 * w * w2 + 10.0 * w) / (4.0 * r * r),
            c2: 0.25 * gg * (5.0 * w2 * w2 - 6.0 * w2),
            c3: gg * (6.0 * w * w2 * w2 + 4.0 * w * w2) / 16.0,
        },
    }
}

/// `(C, dC/dw, dC/dpi)` at `(w, pi)`.
pub fn cubic_value_and_gradient(alpha: Representation, w: f64, pi: f64, p: &ModelParams) -> (f64, f64, f64) {
    let c = cubic_coeffs(alpha, w, p);
    let dc = cubic_coeffs_dw(alpha, w, p);
    (c.eval(pi), dc.eval(pi), c.d_pi(pi))
}

/// `H(w, pi) = pi * C(w, pi)` on the invariant plane `v = pi_v = 0`.
pub fn hamiltonian_on_axis(alpha: Representation, w: f64, pi: f64, p: &ModelParams) -> f64 {
    pi * cubic_coeffs(alpha, w, p).eval(pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mf_rhs_stereo, StereoPoint};

    #[test]
    fn c0_is_the_axis_drift() {
        let p = ModelParams::classical(0.25, 9.0).unwrap();
        for w in [-3.0, -0.7, 0.0, 0.2, 1.0, 5.5, 64.0] {
            let c = cubic_coeffs(Representation::Husimi, w, &p);
            let d = mf_rhs_stereo(StereoPoint::new(0.0, w), &p)[1];
            assert!((c.c0 - d).abs() <= 1e-13 * d.abs().max(1.0));
            assert_eq!(c.c0, cubic_coeffs(Representation::GlauberP, w, &p).c0);
        }
    }

    #[test]
    fn printed_values() {
        let p = ModelParams::classical(0.25, 9.0).unwrap();
        assert_eq!(cubic_coeffs(Representation::Husimi, 1.0, &p).c3, 9.0 / 8.0);
        let c = cubic_coeffs(Representation::GlauberP, 0.0, &p);
        assert_eq!((c.c2, c.c3), (0.0, 0.0));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = ModelParams::classical(0.4, 6.5).unwrap();
        for alpha in Representation::BOTH {
            for w in [-2.3, -0.9, -0.1, 0.3, 0.8, 1.7, 4.0] {
                let h = 1e-5;
                let a = cubic_coeffs(alpha, w + h, &p).as_array();
                let b = cubic_coeffs(alpha, w - h, &p).as_array();
                let d = cubic_coeffs_dw(alpha, w, &p).as_array();
                for i in 0..4 {
                    let fd = (a[i] - b[i]) / (2.0 * h);
                    assert!((fd - d[i]).abs() <= 1e-7 * fd.abs().max(1.0), "{alpha} w={w} c{i}: {fd} vs {}", d[i]);
                }
            }
        }
    }

    #[test]
    fn hamiltonian_vanishes_without_momentum() {
        let p = ModelParams::classical(0.25, 9.0).unwrap();
        assert_eq!(hamiltonian_on_axis(Representation::GlauberP, 0.37, 0.0, &p), 0.0);
    }
}
