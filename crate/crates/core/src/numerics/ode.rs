//! Dormand–Prince 5(4) integrator with the Hairer continuous extension.
//!
//! The integrator hands every accepted step to an observer together with a
//! fourth-order dense interpolant, so callers can resample on a uniform grid
//! or locate sign changes of an event function inside the step.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; `None` selects one from the local derivative scale.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_init: None, h_max: f64::INFINITY, max_steps: 1_000_000 }
    }
}

/// What the observer wants after seeing a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// An accepted step `[t0, t0 + h]` with its dense interpolant.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    pub f0: [f64; N],
    pub f1: [f64; N],
    r: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Interpolated state at `t` in `[t0, t1]`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut out = [0.0; N];
        for i in 0..N {
            let r = &self.r;
            out[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        out
    }
}

/// Final state of an integration.
#[derive(Debug, Clone)]
pub struct OdeOutcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    pub stopped_by_observer: bool,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for &(c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` towards `t_end` (either direction).
///
/// `f` may fail (for example when the state leaves the domain); the error is
/// propagated. The observer sees each accepted step and may stop early.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    mut observer: O,
) -> Result<OdeOutcome<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    O: FnMut(&DenseStep<N>) -> Result<Control>,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    let span = (t_end - t0).abs();
    if span == 0.0 {
        return Ok(OdeOutcome { t, y, steps: 0, stopped_by_observer: false });
    }
    let err_norm = |y: &[f64; N], yn: &[f64; N], e: &[f64; N]| -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let sc = opts.atol + opts.rtol * y[i].abs().max(yn[i].abs());
            acc += (e[i] / sc).powi(2);
        }
        (acc / N as f64).sqrt()
    };
    let mut h = match opts.h_init {
        Some(h) => h.abs(),
        None => {
            let mut d0 = 0.0;
            let mut d1 = 0.0;
            for i in 0..N {
                let sc = opts.atol + opts.rtol * y[i].abs();
                d0 += (y[i] / sc).powi(2);
                d1 += (k1[i] / sc).powi(2);
            }
            let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
            if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }
        }
    }
    .min(opts.h_max)
    .min(span);
    let mut steps = 0usize;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;
    loop {
        if steps >= opts.max_steps {
            return Err(Error::InvalidArgument(format!(
                "ODE integration exceeded {} steps at t = {t}",
                opts.max_steps
            )));
        }
        let remaining = (t_end - t) * dir;
        if remaining <= 1e-14 * span.max(1.0) {
            return Ok(OdeOutcome { t, y, steps, stopped_by_observer: false });
        }
        let hs = h.min(remaining) * dir;
        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(t + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = f(
            t + hs,
            &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y_new = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + hs, &y_new)?;
        let mut e = [0.0; N];
        for i in 0..N {
            e[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err = err_norm(&y, &y_new, &e);
        steps += 1;
        if !err.is_finite() {
            h *= 0.1;
            last_rejected = true;
            if h < 1e-14 * span.max(1.0) {
                return Err(Error::InvalidArgument(format!("ODE step size underflow at t = {t}")));
            }
            continue;
        }
        if err <= 1.0 {
            // Lund-stabilized step control (Hairer, DOPRI5 defaults)
            let fac11 = err.powf(0.2 - 0.04 * 0.75);
            let mut fac = fac11 / fac_old.powf(0.04);
            fac = (fac / 0.9).clamp(0.1, 5.0);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            fac_old = err.max(1e-4);
            last_rejected = false;

            let mut r = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = hs * k1[i] - ydiff;
                r[0][i] = y[i];
                r[1][i] = ydiff;
                r[2][i] = bspl;
                r[3][i] = ydiff - hs * k7[i] - bspl;
                r[4][i] = hs
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let step = DenseStep { t0: t, h: hs, y0: y, y1: y_new, f0: k1, f1: k7, r };
            t += hs;
            y = y_new;
            k1 = k7;
            if observer(&step)? == Control::Stop {
                return Ok(OdeOutcome { t, y, steps, stopped_by_observer: true });
            }
            h = h_new.min(opts.h_max);
        } else {
            let fac11 = err.powf(0.2 - 0.04 * 0.75);
            h /= (fac11 / 0.9).min(10.0);
            last_rejected = true;
            if h < 1e-14 * span.max(1.0) {
                return Err(Error::InvalidArgument(format!("ODE step size underflow at t = {t}")));
            }
        }
    }
}

/// Bisection for a sign change of `g` inside an accepted step, using the
/// dense interpolant. `ta` and `tb` must bracket the change.
pub fn locate_crossing<const N: usize>(
    step: &DenseStep<N>,
    g: impl Fn(&[f64; N]) -> f64,
    mut ta: f64,
    mut tb: f64,
    tol: f64,
) -> f64 {
    let mut ga = g(&step.eval(ta));
    for _ in 0..200 {
        if (tb - ta).abs() <= tol {
            break;
        }
        let tm = 0.5 * (ta + tb);
        let gm = g(&step.eval(tm));
        if gm == 0.0 {
            return tm;
        }
        if (gm > 0.0) == (ga > 0.0) {
            ta = tm;
            ga = gm;
        } else {
            tb = tm;
        }
    }
    0.5 * (ta + tb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_is_accurate() {
        let opts = OdeOptions { rtol: 1e-11, atol: 1e-12, ..Default::default() };
        let out = integrate(|_, y: &[f64; 2]| Ok([y[1], -y[0]]), 0.0, [1.0, 0.0], 10.0, &opts, |_| {
            Ok(Control::Continue)
        })
        .unwrap();
        assert!((out.y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((out.y[1] + 10f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn dense_output_is_fourth_order_accurate() {
        let opts = OdeOptions { rtol: 1e-10, atol: 1e-12, ..Default::default() };
        let mut worst: f64 = 0.0;
        integrate(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], 3.0, &opts, |st| {
            for j in 0..=8 {
                let t = st.t0 + st.h * j as f64 / 8.0;
                worst = worst.max((st.eval(t)[0] - t.exp()).abs() / t.exp());
            }
            Ok(Control::Continue)
        })
        .unwrap();
        assert!(worst < 1e-8, "worst dense error {worst}");
    }

    #[test]
    fn backward_integration_and_crossing() {
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-13, h_max: 0.3, ..Default::default() };
        let mut root = None;
        integrate(|_, y: &[f64; 2]| Ok([y[1], -y[0]]), 0.0, [1.0, 0.0], -4.0, &opts, |st| {
            if st.y0[0] > 0.0 && st.y1[0] <= 0.0 {
                root = Some(locate_crossing(st, |y| y[0], st.t0, st.t1(), 1e-13));
                return Ok(Control::Stop);
            }
            Ok(Control::Continue)
        })
        .unwrap();
        let r = root.unwrap();
        assert!((r + std::f64::consts::FRAC_PI_2).abs() < 1e-10, "{r}");
    }
}
