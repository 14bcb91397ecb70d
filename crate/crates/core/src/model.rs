//! Model parameters and the mean-field dynamics of the collective spin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ode::{self, Control, OdeOptions};
use crate::numerics::roots;

/// Rates of the master equation and the spin size.
///
/// All rates are in units of the pump `gamma`; constructors set `gamma = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub gamma: f64,
    pub big_gamma: f64,
    pub spin_j: f64,
}

impl ModelParams {
    pub fn new(omega: f64, big_gamma: f64, spin_j: f64) -> Result<Self> {
        let p = Self { omega, gamma: 1.0, big_gamma, spin_j };
        p.validate()?;
        Ok(p)
    }

    /// Parameters for the mean-field and instanton layers, where `J` only
    /// enters as an overall scale and is set to 1.
    pub fn classical(omega: f64, big_gamma: f64) -> Result<Self> {
        Self::new(omega, big_gamma, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return bad("gamma must be positive");
        }
        if !(self.big_gamma.is_finite() && self.big_gamma >= 0.0) {
            return bad("big_gamma must be non-negative");
        }
        if !(self.omega.is_finite() && self.omega >= 0.0) {
            return bad("omega must be non-negative");
        }
        let twice = 2.0 * self.spin_j;
        if !(self.spin_j > 0.0 && twice.is_finite() && twice.fract() == 0.0) {
            return bad("spin_j must be a positive multiple of 1/2");
        }
        Ok(())
    }

    /// `2J` as an integer.
    pub fn two_j(&self) -> usize {
        (2.0 * self.spin_j).round() as usize
    }

    pub fn with_big_gamma(self, big_gamma: f64) -> Self {
        Self { big_gamma, ..self }
    }

    pub fn with_spin_j(self, spin_j: f64) -> Self {
        Self { spin_j, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Magnetization {
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
}

impl Magnetization {
    pub fn new(mx: f64, my: f64, mz: f64) -> Self {
        Self { mx, my, mz }
    }

    pub fn norm(&self) -> f64 {
        (self.mx * self.mx + self.my * self.my + self.mz * self.mz).sqrt()
    }

    /// Projection from the north pole. The pole itself has no image.
    pub fn to_stereo(&self) -> Result<StereoPoint> {
        let d = 1.0 - self.mz;
        if d <= 1e-14 {
            return Err(Error::NorthPole);
        }
        Ok(StereoPoint { v: self.mx / d, w: self.my / d })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StereoPoint {
    pub v: f64,
    pub w: f64,
}

impl StereoPoint {
    pub fn new(v: f64, w: f64) -> Self {
        Self { v, w }
    }

    pub fn to_magnetization(&self) -> Magnetization {
        let r = self.v * self.v + self.w * self.w + 1.0;
        Magnetization { mx: 2.0 * self.v / r, my: 2.0 * self.w / r, mz: (r - 2.0) / r }
    }

    pub fn mz(&self) -> f64 {
        let r2 = self.v * self.v + self.w * self.w;
        (r2 - 1.0) / (r2 + 1.0)
    }
}

/// Stability class from the signs of the Jacobian eigenvalues' real parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedPointKind {
    Stable,
    Saddle,
    Source,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FpLabel {
    #[serde(rename = "l")]
    Lower,
    #[serde(rename = "u")]
    Upper,
    #[serde(rename = "s1")]
    S1,
    #[serde(rename = "s2")]
    S2,
    #[serde(rename = "r1")]
    R1,
    #[serde(rename = "r2")]
    R2,
}

impl FpLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            FpLabel::Lower => "l",
            FpLabel::Upper => "u",
            FpLabel::S1 => "s1",
            FpLabel::S2 => "s2",
            FpLabel::R1 => "r1",
            FpLabel::R2 => "r2",
        }
    }
}

impl std::fmt::Display for FpLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub location: StereoPoint,
    pub jacobian_eigenvalues: [Complex64; 2],
    pub kind: FixedPointKind,
    pub label: Option<FpLabel>,
}

impl FixedPoint {
    pub fn w(&self) -> f64 {
        self.location.w
    }

    pub fn mz(&self) -> f64 {
        self.location.mz()
    }

    pub fn is_stable(&self) -> bool {
        self.kind == FixedPointKind::Stable
    }

    /// Real directions in the (v, w) plane along which the point repels.
    pub fn unstable_directions(&self, p: &ModelParams) -> Vec<[f64; 2]> {
        let jt = mf_jacobian(self.location, p);
        // standard layout Df[i][j] = d f_i / d x_j
        let df = [[jt[0][0], jt[1][0]], [jt[0][1], jt[1][1]]];
        let mut out = Vec::new();
        for lam in eig2(&df) {
            if lam.re <= 0.0 {
                continue;
            }
            if lam.im.abs() > 1e-12 * lam.norm() {
                // spiral source: both real directions repel
                out.push([1.0, 0.0]);
                out.push([0.0, 1.0]);
                break;
            }
            let l = lam.re;
            let a = [df[0][0] - l, df[0][1]];
            let b = [df[1][0], df[1][1] - l];
            let cand = if a[0].abs() + a[1].abs() >= b[0].abs() + b[1].abs() { [-a[1], a[0]] } else { [-b[1], b[0]] };
            let n = (cand[0] * cand[0] + cand[1] * cand[1]).sqrt();
            let dir = if n == 0.0 { [1.0, 0.0] } else { [cand[0] / n, cand[1] / n] };
            out.push(dir);
        }
        out
    }
}

fn eig2(m: &[[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
    let half = Complex64::new(tr / 2.0, 0.0);
    [half + disc, half - disc]
}

pub fn classify(eigs: &[Complex64; 2]) -> FixedPointKind {
    match eigs.iter().filter(|z| z.re >= 0.0).count() {
        0 => FixedPointKind::Stable,
        1 => FixedPointKind::Saddle,
        _ => FixedPointKind::Source,
    }
}

pub fn mf_rhs_cartesian(m: &Magnetization, p: &ModelParams) -> Magnetization {
    let f = p.big_gamma * m.mz * m.mz - p.gamma;
    Magnetization {
        mx: f * m.mx * m.mz,
        my: -p.omega * m.mz + f * m.my * m.mz,
        mz: p.omega * m.my - f * (m.mx * m.mx + m.my * m.my),
    }
}

pub fn mf_rhs_stereo(x: StereoPoint, p: &ModelParams) -> [f64; 2] {
    let (v, w) = (x.v, x.w);
    let r2 = v * v + w * w;
    let f = ((r2 - 1.0) / (r2 + 1.0)).powi(2);
    [
        p.omega * v * w + p.gamma * v - p.big_gamma * v * f,
        0.5 * p.omega * (1.0 - v * v + w * w) + p.gamma * w - p.big_gamma * w * f,
    ]
}

/// Jacobian in the layout `[[dv vdot, dv wdot], [dw vdot, dw wdot]]`.
pub fn mf_jacobian(x: StereoPoint, p: &ModelParams) -> [[f64; 2]; 2] {
    let (v, w) = (x.v, x.w);
    let r2 = v * v + w * w;
    let f = ((r2 - 1.0) / (r2 + 1.0)).powi(2);
    let df = 4.0 * (r2 - 1.0) / (r2 + 1.0).powi(3);
    let (fv, fw) = (2.0 * v * df, 2.0 * w * df);
    let (om, g, gg) = (p.omega, p.gamma, p.big_gamma);
    [
        [om * w + g - gg * f - gg * v * fv, -om * v - gg * w * fv],
        [om * v - gg * v * fw, om * w + g - gg * f - gg * w * fw],
    ]
}

pub fn jacobian_eigenvalues(x: StereoPoint, p: &ModelParams) -> [Complex64; 2] {
    // the layout is a transpose, which leaves the spectrum unchanged
    eig2(&mf_jacobian(x, p))
}

/// Ascending coefficients of `(w^2+1)^2 * wdot(0, w)`.
pub fn axis_polynomial(p: &ModelParams) -> [f64; 7] {
    let (h, g, gg) = (0.5 * p.omega, p.gamma, p.big_gamma);
    [h, g - gg, 3.0 * h, 2.0 * (g + gg), 3.0 * h, g - gg, h]
}

/// All fixed points on the invariant axis `v = 0`, ascending in `w`, labelled.
pub fn find_axis_fixed_points(p: &ModelParams) -> Result<Vec<FixedPoint>> {
    let roots = roots::real_roots(&axis_polynomial(p), 1e-9)?;
    let mut fps: Vec<FixedPoint> = Vec::with_capacity(roots.len());
    for w in roots {
        let loc = StereoPoint::new(0.0, w);
        let res = mf_rhs_stereo(loc, p)[1].abs();
        if res > 1e-8 * (1.0 + w * w) {
            return Err(Error::RootFinder(format!("axis root w = {w} has drift residual {res:e}")));
        }
        if fps.last().is_some_and(|q: &FixedPoint| (q.w() - w).abs() <= 1e-12 * (1.0 + w.abs())) {
            continue;
        }
        let eigs = jacobian_eigenvalues(loc, p);
        fps.push(FixedPoint { location: loc, jacobian_eigenvalues: eigs, kind: classify(&eigs), label: None });
    }
    assign_labels(&mut fps);
    Ok(fps)
}

fn assign_labels(fps: &mut [FixedPoint]) {
    let stable: Vec<usize> = (0..fps.len()).filter(|&i| fps[i].kind == FixedPointKind::Stable).collect();
    match stable.len() {
        1 => {
            let i = stable[0];
            fps[i].label = Some(if fps[i].mz() > 0.0 { FpLabel::Upper } else { FpLabel::Lower });
        }
        2 => {
            let (a, b) = (stable[0], stable[1]);
            let (lo, hi) = if fps[a].mz() <= fps[b].mz() { (a, b) } else { (b, a) };
            fps[lo].label = Some(FpLabel::Lower);
            fps[hi].label = Some(FpLabel::Upper);
        }
        _ => {}
    }
    let mut put = |kind: FixedPointKind, labels: [FpLabel; 2]| {
        let idx: Vec<usize> = (0..fps.len()).filter(|&i| fps[i].kind == kind).collect();
        for (&i, l) in idx.iter().zip(labels) {
            fps[i].label = Some(l);
        }
    };
    put(FixedPointKind::Saddle, [FpLabel::S1, FpLabel::S2]);
    put(FixedPointKind::Source, [FpLabel::R1, FpLabel::R2]);
}

pub fn find_label(fps: &[FixedPoint], label: FpLabel) -> Option<&FixedPoint> {
    fps.iter().find(|f| f.label == Some(label))
}

pub fn count_stable(p: &ModelParams) -> Result<usize> {
    Ok(find_axis_fixed_points(p)?.iter().filter(|f| f.is_stable()).count())
}

/// Saddle-node location in `Γ` where the number of stable fixed points
/// changes, bisected to width `1e-3`.
pub fn bistability_onset(omega: f64, template: &ModelParams, bracket: (f64, f64)) -> Result<f64> {
    bistability_onset_with_tol(omega, template, bracket, 1e-3)
}

pub fn bistability_onset_with_tol(
    omega: f64,
    template: &ModelParams,
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64> {
    let base = ModelParams { omega, ..*template };
    let (mut lo, mut hi) = bracket;
    let n_lo = count_stable(&base.with_big_gamma(lo))?;
    let n_hi = count_stable(&base.with_big_gamma(hi))?;
    if n_lo == n_hi {
        return Err(Error::Bracket {
            lo,
            hi,
            detail: format!("both ends have {n_lo} stable fixed point(s)"),
        });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if count_stable(&base.with_big_gamma(mid))? == n_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy)]
pub struct MfOptions {
    pub t_max: f64,
    pub tol: f64,
    pub capture_radius: f64,
    pub escape_bound: f64,
    /// Displacement applied along the unstable direction when the flow
    /// stalls at a saddle or source.
    pub hop_displacement: f64,
    pub max_hops: usize,
}

impl Default for MfOptions {
    fn default() -> Self {
        Self { t_max: 1e4, tol: 1e-10, capture_radius: 1e-6, escape_bound: 1e6, hop_displacement: 1e-4, max_hops: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MfOutcome {
    Captured { label: Option<FpLabel>, w: f64 },
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<StereoPoint>,
    /// Non-stable fixed points the flow stalled at and was pushed off.
    pub visited: Vec<Option<FpLabel>>,
    pub outcome: MfOutcome,
}

impl MfTrajectory {
    pub fn terminal_label(&self) -> Option<FpLabel> {
        match self.outcome {
            MfOutcome::Captured { label, .. } => label,
            MfOutcome::Undecided => None,
        }
    }
}

fn dist(a: StereoPoint, b: StereoPoint) -> f64 {
    ((a.v - b.v).powi(2) + (a.w - b.w).powi(2)).sqrt()
}

/// Relaxes `x0` under the mean-field flow until it is captured by a stable
/// fixed point, escapes, or `t_max` elapses.
pub fn integrate_mf(x0: StereoPoint, p: &ModelParams, opts: &MfOptions) -> Result<MfTrajectory> {
    let fps = find_axis_fixed_points(p)?;
    let mut traj = MfTrajectory { times: vec![0.0], points: vec![x0], visited: Vec::new(), outcome: MfOutcome::Undecided };
    let captured = |x: StereoPoint| fps.iter().find(|f| f.is_stable() && dist(x, f.location) < opts.capture_radius);
    if let Some(f) = captured(x0) {
        traj.outcome = MfOutcome::Captured { label: f.label, w: f.w() };
        return Ok(traj);
    }
    let ode_opts = OdeOptions { rtol: opts.tol, atol: opts.tol, h_max: 1.0, ..Default::default() };
    let mut t = 0.0;
    let mut x = x0;
    let mut hops = 0;
    while t < opts.t_max {
        let mut hop_at: Option<&FixedPoint> = None;
        let mut escaped = false;
        let mut cap: Option<&FixedPoint> = None;
        let out = ode::integrate(
            |_, y: &[f64; 2]| Ok(mf_rhs_stereo(StereoPoint::new(y[0], y[1]), p)),
            t,
            [x.v, x.w],
            opts.t_max,
            &ode_opts,
            |st| {
                let y = StereoPoint::new(st.y1[0], st.y1[1]);
                traj.times.push(st.t1());
                traj.points.push(y);
                if y.v.abs().max(y.w.abs()) > opts.escape_bound || !y.w.is_finite() {
                    escaped = true;
                    return Ok(Control::Stop);
                }
                if let Some(f) = captured(y) {
                    cap = Some(f);
                    return Ok(Control::Stop);
                }
                if let Some(f) = fps.iter().find(|f| !f.is_stable() && dist(y, f.location) < opts.capture_radius) {
                    hop_at = Some(f);
                    return Ok(Control::Stop);
                }
                Ok(Control::Continue)
            },
        )?;
        if escaped {
            return Err(Error::Escaped { bound: opts.escape_bound });
        }
        if let Some(f) = cap {
            traj.outcome = MfOutcome::Captured { label: f.label, w: f.w() };
            return Ok(traj);
        }
        t = out.t;
        x = StereoPoint::new(out.y[0], out.y[1]);
        match hop_at {
            Some(f) if hops < opts.max_hops => {
                hops += 1;
                traj.visited.push(f.label);
                let dirs = f.unstable_directions(p);
                let Some(d) = dirs.first() else { break };
                let along = (x.v - f.location.v) * d[0] + (x.w - f.location.w) * d[1];
                let sgn = if along < 0.0 { -1.0 } else { 1.0 };
                x = StereoPoint::new(
                    f.location.v + sgn * opts.hop_displacement * d[0],
                    f.location.w + sgn * opts.hop_displacement * d[1],
                );
                traj.times.push(t);
                traj.points.push(x);
            }
            _ => break,
        }
    }
    Ok(traj)
}

/// Stable fixed points reached by relaxing from `fp` displaced by `delta`
/// along each of its unstable directions, both signs.
pub fn relaxation_targets(fp: &FixedPoint, p: &ModelParams, delta: f64) -> Result<Vec<FpLabel>> {
    let opts = MfOptions::default();
    let mut out = Vec::new();
    for d in fp.unstable_directions(p) {
        for sgn in [1.0, -1.0] {
            let x0 = StereoPoint::new(fp.location.v + sgn * delta * d[0], fp.location.w + sgn * delta * d[1]);
            match integrate_mf(x0, p, &opts) {
                Ok(tr) => {
                    if let Some(l) = tr.terminal_label() {
                        if !out.contains(&l) {
                            out.push(l);
                        }
                    }
                }
                Err(Error::Escaped { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(omega: f64, gg: f64) -> ModelParams {
        ModelParams::classical(omega, gg).unwrap()
    }

    #[test]
    fn validation_rejects_bad_spin() {
        assert!(ModelParams::new(0.25, 9.0, 1.25).is_err());
        assert!(ModelParams::new(0.25, 9.0, 0.0).is_err());
        assert!(ModelParams::new(-0.1, 9.0, 1.0).is_err());
        assert!(ModelParams::new(0.25, 9.0, 1.5).is_ok());
    }

    #[test]
    fn south_pole_rates() {
        let s = Magnetization::new(0.0, 0.0, -1.0);
        let r = mf_rhs_cartesian(&s, &p(0.0, 9.0));
        assert_eq!((r.mx, r.my, r.mz), (0.0, 0.0, 0.0));
        let r = mf_rhs_cartesian(&s, &p(0.25, 9.0));
        assert_eq!((r.mx, r.my, r.mz), (0.0, 0.25, 0.0));
    }

    #[test]
    fn north_pole_has_no_stereographic_image() {
        assert_eq!(Magnetization::new(0.0, 0.0, 1.0).to_stereo(), Err(Error::NorthPole));
    }

    #[test]
    fn origin_without_drive() {
        let q = p(0.0, 2.0);
        assert_eq!(mf_rhs_stereo(StereoPoint::new(0.0, 0.0), &q), [0.0, 0.0]);
        let j = mf_jacobian(StereoPoint::new(0.0, 0.0), &q);
        assert_eq!(j[1][1], -1.0);
        let fps = find_axis_fixed_points(&q).unwrap();
        let origin = fps.iter().find(|f| f.w().abs() < 1e-12).unwrap();
        assert_eq!(origin.kind, FixedPointKind::Stable);
    }

    #[test]
    fn six_fixed_points_in_the_bistable_regime() {
        let fps = find_axis_fixed_points(&p(0.25, 9.0)).unwrap();
        let labels: Vec<_> = fps.iter().map(|f| f.label.unwrap()).collect();
        use FpLabel::*;
        assert_eq!(labels, vec![Upper, R1, Lower, S1, S2, R2]);
        assert!(fps[5].w() > 60.0 && fps[5].w() < 68.0);
    }

    #[test]
    fn single_stable_point_below_onset() {
        let fps = find_axis_fixed_points(&p(0.25, 1.0)).unwrap();
        let stable: Vec<_> = fps.iter().filter(|f| f.is_stable()).collect();
        assert_eq!(stable.len(), 1);
        assert!(stable[0].mz() > 0.0);
    }

    #[test]
    fn onset_bracket_errors() {
        let t = p(0.25, 1.0);
        assert!(matches!(bistability_onset(0.25, &t, (3.0, 5.0)), Err(Error::Bracket { .. })));
        let g = bistability_onset(0.25, &t, (1.0, 3.0)).unwrap();
        assert!((1.92..=1.96).contains(&g), "{g}");
    }

    #[test]
    fn relaxation_from_unstable_points() {
        let q = p(0.25, 9.0);
        let fps = find_axis_fixed_points(&q).unwrap();
        let r1 = find_label(&fps, FpLabel::R1).unwrap();
        let tr = integrate_mf(StereoPoint::new(0.0, r1.w() + 1e-4), &q, &MfOptions::default()).unwrap();
        assert_eq!(tr.terminal_label(), Some(FpLabel::Lower));

        let s1 = find_label(&fps, FpLabel::S1).unwrap();
        let d = s1.unstable_directions(&q)[0];
        let sgn = d[1].signum();
        let x0 = StereoPoint::new(1e-4 * sgn * d[0], s1.w() + 1e-4 * sgn * d[1]);
        let tr = integrate_mf(x0, &q, &MfOptions::default()).unwrap();
        assert_eq!(tr.terminal_label(), Some(FpLabel::Upper));
        assert_eq!(tr.visited, vec![Some(FpLabel::S2)]);

        let u = find_label(&fps, FpLabel::Upper).unwrap();
        let tr = integrate_mf(StereoPoint::new(0.0, u.w() + 1e-8), &q, &MfOptions::default()).unwrap();
        assert_eq!(tr.times.len(), 1);
        assert_eq!(tr.terminal_label(), Some(FpLabel::Upper));
    }
}
