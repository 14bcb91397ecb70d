//! Arclength continuation of the zero level set `C(w, pi) = 0` leaving a
//! stable fixed point, and the action accumulated along it.

use serde::{Deserialize, Serialize};

use super::cubic::{cubic_value_and_gradient, Representation};
use crate::error::{Error, Result};
use crate::model::{find_axis_fixed_points, FixedPoint, ModelParams};
use crate::numerics::ode::{self, Control, DenseStep, OdeOptions};
use crate::numerics::quadrature::{GL3_NODES, GL3_WEIGHTS};

/// Which of the two level-set tangents leaves the start point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Relaxation rate towards the level set.
    pub tau: f64,
    /// Spacing of the stored samples.
    pub ds: f64,
    pub s_max: f64,
    /// Number of times `s_max` is doubled before giving up.
    pub max_extensions: u32,
    pub rtol: f64,
    pub atol: f64,
    pub event_tol: f64,
    /// Distance within which the terminal `w` must match a fixed point.
    pub match_tol: f64,
    /// `|w|` or `|pi|` beyond this counts as leaving through the pole.
    pub escape_bound: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            tau: 1.0,
            ds: 5e-3,
            s_max: 50.0,
            max_extensions: 3,
            rtol: 1e-12,
            atol: 1e-13,
            event_tol: 1e-12,
            match_tol: 1e-6,
            escape_bound: 1e4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub s: f64,
    pub w: f64,
    pub pi_w: f64,
    pub dw_ds: f64,
    pub dpi_ds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstantonTrajectory {
    pub representation: Representation,
    pub branch: Branch,
    pub start: FixedPoint,
    pub terminal_fp: FixedPoint,
    pub samples: Vec<TrajectorySample>,
    /// Running action at each sample.
    pub action_profile: Vec<f64>,
    pub total_action: f64,
}

impl InstantonTrajectory {
    pub fn s_end(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.s)
    }

    /// Largest `|C|` over the stored samples.
    pub fn max_abs_cubic(&self, p: &ModelParams) -> f64 {
        self.samples
            .iter()
            .map(|s| cubic_value_and_gradient(self.representation, s.w, s.pi_w, p).0.abs())
            .fold(0.0, f64::max)
    }
}

/// Right-hand side of the continuation equations at `(w, pi)`: unit tangent
/// plus a pull back onto `C = 0`.
pub fn continuation_rhs(
    alpha: Representation,
    branch: Branch,
    tau: f64,
    p: &ModelParams,
    w: f64,
    pi: f64,
) -> [f64; 2] {
    let (c, cw, cp) = cubic_value_and_gradient(alpha, w, pi, p);
    let n2 = cw * cw + cp * cp;
    let n = n2.sqrt();
    let s = branch.sign();
    // relaxation scaled so that dC/ds = -tau C regardless of |grad C|
    let r = tau * c / n2;
    [s * cp / n - r * cw, -s * cw / n - r * cp]
}

fn sample_at(step: &DenseStep<2>, s: f64, rhs: &impl Fn(f64, f64) -> [f64; 2]) -> TrajectorySample {
    let y = step.eval(s);
    let d = rhs(y[0], y[1]);
    TrajectorySample { s, w: y[0], pi_w: y[1], dw_ds: d[0], dpi_ds: d[1] }
}

/// Traces the instanton leaving the stable on-axis point `start`.
pub fn trace_instanton(
    alpha: Representation,
    start: &FixedPoint,
    branch: Branch,
    p: &ModelParams,
    opts: &TraceOptions,
) -> Result<InstantonTrajectory> {
    if !start.is_stable() || start.location.v != 0.0 {
        return Err(Error::InvalidArgument("instantons start at a stable fixed point on the v = 0 axis".into()));
    }
    if !(opts.ds > 0.0 && opts.tau >= 0.0 && opts.s_max > 0.0) {
        return Err(Error::InvalidArgument("trace options need ds > 0, tau >= 0, s_max > 0".into()));
    }
    let w0 = start.w();
    let (_, cw, cp) = cubic_value_and_gradient(alpha, w0, 0.0, p);
    if cw == 0.0 && cp == 0.0 {
        return Err(Error::InvalidArgument("level-set gradient vanishes at the start point".into()));
    }
    let fps = find_axis_fixed_points(p)?;
    let rhs = |w: f64, pi: f64| continuation_rhs(alpha, branch, opts.tau, p, w, pi);
    let d0 = rhs(w0, 0.0);
    let mut samples = vec![TrajectorySample { s: 0.0, w: w0, pi_w: 0.0, dw_ds: d0[0], dpi_ds: d0[1] }];
    let ode_opts = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        h_init: Some(opts.ds.min(1e-3)),
        h_max: opts.ds,
        max_steps: 10_000_000,
    };
    let s_arm = 10.0 * opts.ds;
    let mut s_cap = opts.s_max;
    let mut state = (0.0, [w0, 0.0]);
    let mut next_k = 1usize;
    let mut crossing: Option<TrajectorySample> = None;
    let mut escaped = false;
    for _ in 0..=opts.max_extensions {
        let out = ode::integrate(
            |_, y: &[f64; 2]| {
                let d = rhs(y[0], y[1]);
                if d[0].is_finite() && d[1].is_finite() {
                    Ok(d)
                } else {
                    Err(Error::Consistency(format!("singular continuation field at w = {}, pi = {}", y[0], y[1])))
                }
            },
            state.0,
            state.1,
            s_cap,
            &ode_opts,
            |st| {
                let t1 = st.t1();
                if t1 > s_arm {
                    let ta = st.t0.max(s_arm);
                    let pa = if ta > st.t0 { st.eval(ta)[1] } else { st.y0[1] };
                    let pb = st.y1[1];
                    if pb == 0.0 || (pa != 0.0 && (pa > 0.0) != (pb > 0.0)) {
                        let s_star = if pb == 0.0 { t1 } else { ode::locate_crossing(st, |y| y[1], ta, t1, opts.event_tol) };
                        while (next_k as f64) * opts.ds < s_star {
                            samples.push(sample_at(st, next_k as f64 * opts.ds, &rhs));
                            next_k += 1;
                        }
                        crossing = Some(sample_at(st, s_star, &rhs));
                        return Ok(Control::Stop);
                    }
                }
                while (next_k as f64) * opts.ds < t1 {
                    samples.push(sample_at(st, next_k as f64 * opts.ds, &rhs));
                    next_k += 1;
                }
                // step ends are exact points and resolve features finer than ds
                samples.push(sample_at(st, t1, &rhs));
                if (next_k as f64) * opts.ds <= t1 {
                    next_k += 1;
                }
                if st.y1[0].abs() > opts.escape_bound || st.y1[1].abs() > opts.escape_bound {
                    escaped = true;
                    return Ok(Control::Stop);
                }
                Ok(Control::Continue)
            },
        )?;
        if crossing.is_some() || escaped {
            break;
        }
        state = (out.t, out.y);
        s_cap *= 2.0;
    }
    let Some(end) = crossing else {
        let reached = if escaped { samples.last().map_or(0.0, |s| s.s) } else { s_cap / 2.0 };
        return Err(Error::OpenTrajectory { s_max: reached });
    };
    if samples.last().is_some_and(|s| end.s - s.s < 1e-9 * opts.ds) {
        samples.pop();
    }
    samples.push(end);

    let terminal = fps
        .iter()
        .filter(|f| (f.w() - end.w).abs() <= opts.match_tol * (1.0 + f.w().abs()))
        .min_by(|a, b| (a.w() - end.w).abs().partial_cmp(&(b.w() - end.w).abs()).unwrap())
        .ok_or_else(|| Error::Consistency(format!("trajectory ended at w = {} which is no fixed point", end.w)))?;
    if terminal.is_stable() {
        return Err(Error::Consistency(format!("trajectory ended at the stable fixed point w = {}", terminal.w())));
    }
    let (action_profile, total_action) = running_action(&samples);
    Ok(InstantonTrajectory {
        representation: alpha,
        branch,
        start: start.clone(),
        terminal_fp: terminal.clone(),
        samples,
        action_profile,
        total_action,
    })
}

/// Running `int pi dw` over the samples: cubic Hermite interpolation of
/// `w(s)` and `pi(s)` on each interval, integrated exactly by three-point
/// Gauss–Legendre.
pub fn running_action(samples: &[TrajectorySample]) -> (Vec<f64>, f64) {
    let mut profile = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    profile.push(0.0);
    for pair in samples.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let h = b.s - a.s;
        let mut seg = 0.0;
        for (&t, &wt) in GL3_NODES.iter().zip(&GL3_WEIGHTS) {
            // Hermite basis and derivatives on [0, 1]
            let (t2, t3) = (t * t, t * t * t);
            let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
            let h10 = t3 - 2.0 * t2 + t;
            let h01 = -2.0 * t3 + 3.0 * t2;
            let h11 = t3 - t2;
            let d00 = 6.0 * t2 - 6.0 * t;
            let d10 = 3.0 * t2 - 4.0 * t + 1.0;
            let d01 = -d00;
            let d11 = 3.0 * t2 - 2.0 * t;
            let pi = h00 * a.pi_w + h10 * h * a.dpi_ds + h01 * b.pi_w + h11 * h * b.dpi_ds;
            let dw = (d00 * a.w + d10 * h * a.dw_ds + d01 * b.w + d11 * h * b.dw_ds) / h;
            seg += wt * pi * dw;
        }
        acc += seg * h;
        profile.push(acc);
    }
    (profile, acc)
}

/// Recomputes the running action of `traj` in place and returns the total.
pub fn action_of(traj: &mut InstantonTrajectory) -> f64 {
    let (profile, total) = running_action(&traj.samples);
    traj.action_profile = profile;
    traj.total_action = total;
    total
}
