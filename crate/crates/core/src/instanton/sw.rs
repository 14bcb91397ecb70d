//! Semiclassical-Wigner baseline: Fokker–Planck drift and diffusion on the
//! stereographic plane and the resulting one-dimensional barriers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{find_axis_fixed_points, relaxation_targets, FixedPoint, FpLabel, ModelParams, StereoPoint};
use crate::numerics::dual::{Dual, Scalar};
use crate::numerics::quadrature;

/// Drift and diffusion on the axis `v = pi_v = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwReduced {
    pub h_w: f64,
    pub d_ww: f64,
}

pub fn sw_reduced(w: f64, p: &ModelParams) -> SwReduced {
    let w2 = w * w;
    let (r, q) = (w2 + 1.0, w2 - 1.0);
    SwReduced {
        h_w: 0.5 * p.omega * r + p.gamma * w - p.big_gamma * w * q * q / (r * r),
        d_ww: (p.gamma * r * r + p.big_gamma * q * q) / 8.0,
    }
}

/// Full drift `(h_v, h_w)` and diffusion `(D_vv, D_ww, D_vw)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwCoefficients {
    pub h_v: f64,
    pub h_w: f64,
    pub d_vv: f64,
    pub d_ww: f64,
    pub d_vw: f64,
}

fn coefficients<T: Scalar>(v: T, w: T, p: &ModelParams) -> [T; 5] {
    let c = |x: f64| T::from(x);
    let (om, g, gg) = (c(p.omega), c(p.gamma), c(p.big_gamma));
    let (v2, w2) = (v * v, w * w);
    let r = v2 + w2 + c(1.0);
    let s = v2 + w2 - c(1.0);
    let f = s * s / (r * r);
    let h_v = om * v * w + g * v - gg * v * f;
    let h_w = c(0.5) * om * (c(1.0) - v2 + w2) + g * w - gg * w * f;
    let (v4, w4) = (v2 * v2, w2 * w2);
    let w1 = w - c(1.0);
    let w1p = w + c(1.0);
    let pvv = v4 * v4 + c(4.0) * v4 * v2 * w2 + c(2.0) * v4 * (c(3.0) * w4 - c(6.0) * w2 - c(1.0))
        + c(4.0) * v2 * w2 * (w2 - c(3.0)) * (w2 - c(3.0))
        + (w4 - c(6.0) * w2 + c(1.0)) * (w4 - c(6.0) * w2 + c(1.0));
    let d_vv = c(0.125) * (g * (v2 + w1 * w1) * (v2 + w1p * w1p) + gg * pvv / (r * r));
    let v1 = v - c(1.0);
    let v1p = v + c(1.0);
    let pww = c(4.0) * v2 * w4 * w2 + c(4.0) * v2 * (v2 - c(3.0)) * (v2 - c(3.0)) * w2
        + c(2.0) * (c(3.0) * v4 - c(6.0) * v2 - c(1.0)) * w4
        + (v4 - c(6.0) * v2 + c(1.0)) * (v4 - c(6.0) * v2 + c(1.0))
        + w4 * w4;
    let d_ww = c(0.125) * (g * (v1 * v1 + w2) * (v1p * v1p + w2) + gg * pww / (r * r));
    let d_vw = c(0.5) * v * w * (g + gg * (v2 + w2 - c(3.0)) * (c(3.0) * v2 + c(3.0) * w2 - c(1.0)) / (r * r));
    [h_v, h_w, d_vv, d_ww, d_vw]
}

pub fn sw_coefficients(x: StereoPoint, p: &ModelParams) -> SwCoefficients {
    let [h_v, h_w, d_vv, d_ww, d_vw] = coefficients(x.v, x.w, p);
    SwCoefficients { h_v, h_w, d_vv, d_ww, d_vw }
}

/// Value of the quadratic SW Hamiltonian and its gradient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwField {
    pub value: f64,
    /// `(dH/dv, dH/dw)`
    pub grad_x: [f64; 2],
    /// `(dH/dpi_v, dH/dpi_w)`
    pub grad_pi: [f64; 2],
}

pub fn sw_full_field(x: StereoPoint, pi: [f64; 2], p: &ModelParams) -> SwField {
    let v = Dual::<2>::variable(x.v, 0);
    let w = Dual::<2>::variable(x.w, 1);
    let [h_v, h_w, d_vv, d_ww, d_vw] = coefficients(v, w, p);
    let (pv, pw) = (Dual::from(pi[0]), Dual::from(pi[1]));
    let two = Dual::from(2.0);
    let ham = pv * h_v + pw * h_w + pv * pv * d_vv + pw * pw * d_ww + two * pv * pw * d_vw;
    SwField {
        value: ham.v,
        grad_x: ham.d,
        grad_pi: [
            h_v.v + 2.0 * pi[0] * d_vv.v + 2.0 * pi[1] * d_vw.v,
            h_w.v + 2.0 * pi[1] * d_ww.v + 2.0 * pi[0] * d_vw.v,
        ],
    }
}

/// `-int_{w_i}^{w*} h_w / D_ww dw` between two axis fixed points.
pub fn sw_action(w_i: f64, w_star: f64, p: &ModelParams) -> Result<f64> {
    for w in [w_i, w_star] {
        let h = sw_reduced(w, p).h_w;
        if h.abs() > 1e-8 * (1.0 + w * w) {
            return Err(Error::InvalidArgument(format!("w = {w} is not a fixed point of the drift (h_w = {h:e})")));
        }
    }
    if w_i == w_star {
        return Ok(0.0);
    }
    let f = |w: f64| {
        let r = sw_reduced(w, p);
        -r.h_w / r.d_ww
    };
    quadrature::integrate(f, w_i, w_star, 1e-14, 1e-12)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwCandidate {
    pub from: FpLabel,
    pub via: Option<FpLabel>,
    pub via_w: f64,
    pub action: f64,
    pub targets: Vec<FpLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwBarrierTable {
    pub omega: f64,
    pub big_gamma: f64,
    pub a_lu: f64,
    pub a_ul: f64,
    pub a_min: f64,
    pub via_lu: Option<FpLabel>,
    pub via_ul: Option<FpLabel>,
    pub candidates: Vec<SwCandidate>,
}

/// Barriers over the neighbouring unstable axis points of each stable one,
/// with basins assigned by mean-field relaxation (the SW drift is the
/// mean-field field).
pub fn sw_barriers(p: &ModelParams, basin_displacement: f64) -> Result<SwBarrierTable> {
    let fps = find_axis_fixed_points(p)?;
    let stable: Vec<&FixedPoint> = fps.iter().filter(|f| f.is_stable()).collect();
    if stable.len() != 2 {
        return Err(Error::NotBistable(format!("{} stable fixed point(s) at Γ = {}", stable.len(), p.big_gamma)));
    }
    let mut candidates = Vec::new();
    for (i, f) in fps.iter().enumerate() {
        if !f.is_stable() {
            continue;
        }
        let from = f.label.expect("stable points are labelled");
        let neighbours = [i.checked_sub(1), Some(i + 1).filter(|&j| j < fps.len())];
        for j in neighbours.into_iter().flatten() {
            let target = &fps[j];
            if target.is_stable() {
                continue;
            }
            let action = sw_action(f.w(), target.w(), p)?;
            let targets = relaxation_targets(target, p, basin_displacement)?;
            candidates.push(SwCandidate { from, via: target.label, via_w: target.w(), action, targets });
        }
    }
    let pick = |from: FpLabel, to: FpLabel| -> Result<(f64, Option<FpLabel>)> {
        candidates
            .iter()
            .filter(|c| c.from == from && c.targets.contains(&to))
            .map(|c| (c.action, c.via))
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .ok_or_else(|| Error::BasinUndecided(format!("no SW path {from} -> {to} at Γ = {}", p.big_gamma)))
    };
    let (a_lu, via_lu) = pick(FpLabel::Lower, FpLabel::Upper)?;
    let (a_ul, via_ul) = pick(FpLabel::Upper, FpLabel::Lower)?;
    Ok(SwBarrierTable {
        omega: p.omega,
        big_gamma: p.big_gamma,
        a_lu,
        a_ul,
        a_min: a_lu.min(a_ul),
        via_lu,
        via_ul,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::mf_rhs_stereo;

    #[test]
    fn reduced_special_values() {
        let p = ModelParams::classical(0.25, 9.0).unwrap();
        assert!((sw_reduced(0.0, &p).d_ww - 10.0 / 8.0).abs() < 1e-15);
        assert!((sw_reduced(1.0, &p).d_ww - 0.5).abs() < 1e-15);
        assert!((sw_reduced(-1.0, &p).d_ww - 0.5).abs() < 1e-15);
    }

    #[test]
    fn full_field_reduces_on_axis() {
        let p = ModelParams::classical(0.3, 4.0).unwrap();
        for w in [-2.0, -0.3, 0.5, 1.7] {
            let c = sw_coefficients(StereoPoint::new(0.0, w), &p);
            let r = sw_reduced(w, &p);
            assert!((c.d_ww - r.d_ww).abs() < 1e-13 * r.d_ww);
            assert!((c.h_w - r.h_w).abs() < 1e-13 * r.h_w.abs().max(1.0));
            assert_eq!(c.d_vw, 0.0);
            let f = sw_full_field(StereoPoint::new(0.0, w), [0.0, 0.7], &p);
            assert!((f.value - (0.7 * r.h_w + 0.49 * r.d_ww)).abs() < 1e-12);
        }
    }

    #[test]
    fn drift_is_the_mean_field_field() {
        let p = ModelParams::classical(0.3, 4.0).unwrap();
        for (v, w) in [(0.3, -1.2), (-0.8, 0.4), (1.5, 2.5)] {
            let c = sw_coefficients(StereoPoint::new(v, w), &p);
            let m = mf_rhs_stereo(StereoPoint::new(v, w), &p);
            assert_eq!([c.h_v, c.h_w], m);
            assert_eq!(sw_full_field(StereoPoint::new(v, w), [0.0, 0.0], &p).value, 0.0);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let p = ModelParams::classical(0.3, 4.0).unwrap();
        let x = StereoPoint::new(0.4, -0.9);
        let pi = [0.3, -0.6];
        let f = sw_full_field(x, pi, &p);
        let h = 1e-6;
        let val = |v: f64, w: f64, a: f64, b: f64| sw_full_field(StereoPoint::new(v, w), [a, b], &p).value;
        let fd = [
            (val(x.v + h, x.w, pi[0], pi[1]) - val(x.v - h, x.w, pi[0], pi[1])) / (2.0 * h),
            (val(x.v, x.w + h, pi[0], pi[1]) - val(x.v, x.w - h, pi[0], pi[1])) / (2.0 * h),
            (val(x.v, x.w, pi[0] + h, pi[1]) - val(x.v, x.w, pi[0] - h, pi[1])) / (2.0 * h),
            (val(x.v, x.w, pi[0], pi[1] + h) - val(x.v, x.w, pi[0], pi[1] - h)) / (2.0 * h),
        ];
        let an = [f.grad_x[0], f.grad_x[1], f.grad_pi[0], f.grad_pi[1]];
        for i in 0..4 {
            assert!((fd[i] - an[i]).abs() < 1e-6 * an[i].abs().max(1.0), "{i}: {} vs {}", fd[i], an[i]);
        }
    }

    #[test]
    fn diffusion_is_positive() {
        let p = ModelParams::classical(0.25, 9.0).unwrap();
        for k in -200..=200 {
            assert!(sw_reduced(k as f64 * 0.05, &p).d_ww > 0.0);
        }
    }

    #[test]
    fn action_requires_fixed_points() {
        let p = ModelParams::classical(0.25, 9.0).unwrap();
        assert!(sw_action(0.3, 0.5, &p).is_err());
        let fps = find_axis_fixed_points(&p).unwrap();
        assert_eq!(sw_action(fps[0].w(), fps[0].w(), &p).unwrap(), 0.0);
    }
}
