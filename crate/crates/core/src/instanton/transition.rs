//! First-order transition points: where the two barriers cross.

use super::barriers::{activation_barriers_with, BarrierOptions};
use super::sw::sw_barriers;
use crate::error::{Error, Result};
use crate::model::ModelParams;

pub const SCAN_STEP: f64 = 0.25;
pub const ROOT_TOL: f64 = 1e-3;

/// Root of `f` on `[lo, hi]` from a coarse scan followed by bisection and a
/// final secant step. Points where `f` fails are skipped in the scan.
pub fn crossing_of(mut f: impl FnMut(f64) -> Result<f64>, lo: f64, hi: f64, step: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) || !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("bad bracket [{lo}, {hi}]")));
    }
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    for k in 0..=n {
        let x = (lo + k as f64 * step).min(hi);
        let Ok(y) = f(x) else { continue };
        if y == 0.0 {
            return Ok(x);
        }
        if let Some((xp, yp)) = prev {
            if (yp > 0.0) != (y > 0.0) {
                bracket = Some(((xp, yp), (x, y)));
                break;
            }
        }
        prev = Some((x, y));
    }
    let Some(((mut a, mut fa), (mut b, mut fb))) = bracket else {
        return Err(Error::Bracket { lo, hi, detail: "barrier difference does not change sign".into() });
    };
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == (fa > 0.0) {
            (a, fa) = (m, fm);
        } else {
            (b, fb) = (m, fm);
        }
    }
    Ok(a - fa * (b - a) / (fb - fa))
}

/// Γ at which `A_{l->u} = A_{u->l}` for the instanton barriers.
pub fn transition_point(omega: f64, bracket: (f64, f64)) -> Result<f64> {
    transition_point_with(omega, bracket, &BarrierOptions::default())
}

pub fn transition_point_with(omega: f64, bracket: (f64, f64), opts: &BarrierOptions) -> Result<f64> {
    let base = ModelParams::classical(omega, bracket.0)?;
    crossing_of(
        |g| {
            let t = activation_barriers_with(&base.with_big_gamma(g), opts)?;
            Ok(t.a_lu - t.a_ul)
        },
        bracket.0,
        bracket.1,
        SCAN_STEP,
        ROOT_TOL,
    )
}

/// Γ at which the semiclassical-Wigner barriers cross.
pub fn sw_transition_point(omega: f64, bracket: (f64, f64)) -> Result<f64> {
    let base = ModelParams::classical(omega, bracket.0)?;
    crossing_of(
        |g| {
            let t = sw_barriers(&base.with_big_gamma(g), 1e-4)?;
            Ok(t.a_lu - t.a_ul)
        },
        bracket.0,
        bracket.1,
        SCAN_STEP,
        ROOT_TOL,
    )
}
