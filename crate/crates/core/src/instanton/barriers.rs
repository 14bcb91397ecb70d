//! Activation barriers from the minimal instanton action per basin pair.

use serde::{Deserialize, Serialize};

use super::cubic::Representation;
use super::trace::{trace_instanton, Branch, InstantonTrajectory, TraceOptions};
use crate::error::{Error, Result};
use crate::model::{find_axis_fixed_points, relaxation_targets, FixedPoint, FpLabel, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierOptions {
    pub trace: TraceOptions,
    /// Displacement off the terminal fixed point before mean-field relaxation.
    pub basin_displacement: f64,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self { trace: TraceOptions::default(), basin_displacement: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateStatus {
    Accepted,
    /// No return to the axis: the branch leaves through the pole.
    Open,
    /// Relaxation from the terminal point only reaches the originating basin.
    Discarded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierCandidate {
    pub from: FpLabel,
    pub branch: Branch,
    pub status: CandidateStatus,
    pub via: Option<FpLabel>,
    pub via_w: Option<f64>,
    pub action: Option<f64>,
    pub targets: Vec<FpLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationBarriers {
    pub representation: Representation,
    pub a_lu: f64,
    pub a_ul: f64,
    pub via_lu: Option<FpLabel>,
    pub via_ul: Option<FpLabel>,
    pub candidates: Vec<BarrierCandidate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierTable {
    pub omega: f64,
    pub big_gamma: f64,
    /// Husimi values; the P values are kept alongside for the cross-check.
    pub a_lu: f64,
    pub a_ul: f64,
    pub a_min: f64,
    pub via_lu: Option<FpLabel>,
    pub via_ul: Option<FpLabel>,
    pub husimi: RepresentationBarriers,
    pub glauber_p: RepresentationBarriers,
    /// Largest relative H/P difference over the two barriers.
    pub representation_discrepancy: f64,
}

fn stable_pair(fps: &[FixedPoint], p: &ModelParams) -> Result<()> {
    let n = fps.iter().filter(|f| f.is_stable()).count();
    let labelled = fps.iter().any(|f| f.label == Some(FpLabel::Lower)) && fps.iter().any(|f| f.label == Some(FpLabel::Upper));
    if n != 2 || !labelled {
        return Err(Error::NotBistable(format!("{n} stable fixed point(s) at Ω = {}, Γ = {}", p.omega, p.big_gamma)));
    }
    Ok(())
}

/// Traces both branches from both stable points for one representation.
pub fn representation_barriers(
    alpha: Representation,
    p: &ModelParams,
    opts: &BarrierOptions,
) -> Result<(RepresentationBarriers, Vec<InstantonTrajectory>)> {
    let fps = find_axis_fixed_points(p)?;
    stable_pair(&fps, p)?;
    let mut targets_cache: Vec<(FpLabel, Vec<FpLabel>)> = Vec::new();
    let mut candidates = Vec::new();
    let mut trajectories = Vec::new();
    for start in fps.iter().filter(|f| f.is_stable()) {
        let from = start.label.expect("stable points are labelled");
        for branch in Branch::BOTH {
            let traj = match trace_instanton(alpha, start, branch, p, &opts.trace) {
                Ok(t) => t,
                Err(Error::OpenTrajectory { .. }) => {
                    candidates.push(BarrierCandidate {
                        from,
                        branch,
                        status: CandidateStatus::Open,
                        via: None,
                        via_w: None,
                        action: None,
                        targets: vec![],
                    });
                    continue;
                }
                Err(e) => return Err(e),
            };
            let end = &traj.terminal_fp;
            let via = end.label.ok_or_else(|| Error::Consistency(format!("unlabelled terminal point w = {}", end.w())))?;
            let targets = match targets_cache.iter().find(|(l, _)| *l == via) {
                Some((_, t)) => t.clone(),
                None => {
                    let t = relaxation_targets(end, p, opts.basin_displacement)?;
                    targets_cache.push((via, t.clone()));
                    t
                }
            };
            let status = if targets.iter().any(|&t| t != from) {
                CandidateStatus::Accepted
            } else {
                CandidateStatus::Discarded
            };
            candidates.push(BarrierCandidate {
                from,
                branch,
                status,
                via: Some(via),
                via_w: Some(end.w()),
                action: Some(traj.total_action),
                targets,
            });
            trajectories.push(traj);
        }
    }
    let pick = |from: FpLabel, to: FpLabel| -> Result<(f64, Option<FpLabel>)> {
        candidates
            .iter()
            .filter(|c| c.status == CandidateStatus::Accepted && c.from == from && c.targets.contains(&to))
            .filter_map(|c| c.action.map(|a| (a, c.via)))
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .ok_or_else(|| {
                Error::BasinUndecided(format!("no instanton {from} -> {to} at Ω = {}, Γ = {} ({})", p.omega, p.big_gamma, alpha.as_str()))
            })
    };
    let (a_lu, via_lu) = pick(FpLabel::Lower, FpLabel::Upper)?;
    let (a_ul, via_ul) = pick(FpLabel::Upper, FpLabel::Lower)?;
    Ok((RepresentationBarriers { representation: alpha, a_lu, a_ul, via_lu, via_ul, candidates }, trajectories))
}

pub fn activation_barriers(p: &ModelParams) -> Result<BarrierTable> {
    activation_barriers_with(p, &BarrierOptions::default())
}

pub fn activation_barriers_with(p: &ModelParams, opts: &BarrierOptions) -> Result<BarrierTable> {
    let (h, _) = representation_barriers(Representation::Husimi, p, opts)?;
    let (g, _) = representation_barriers(Representation::GlauberP, p, opts)?;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
    let representation_discrepancy = rel(h.a_lu, g.a_lu).max(rel(h.a_ul, g.a_ul));
    Ok(BarrierTable {
        omega: p.omega,
        big_gamma: p.big_gamma,
        a_lu: h.a_lu,
        a_ul: h.a_ul,
        a_min: h.a_lu.min(h.a_ul),
        via_lu: h.via_lu,
        via_ul: h.via_ul,
        husimi: h,
        glauber_p: g,
        representation_discrepancy,
    })
}
