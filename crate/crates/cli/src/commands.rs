//! Subcommand implementations. Each returns a [`Report`]; writing is left to
//! the caller so rows always come out in input order.

use anyhow::{bail, Context, Result};
use metaspin::instanton::{
    activation_barriers_with, sw_barriers, sw_reduced, sw_transition_point, trace_instanton, transition_point_with,
    BarrierOptions, Branch, Representation,
};
use metaspin::liouvillian::gap_estimator;
use metaspin::model::{find_axis_fixed_points, find_label, mf_rhs_stereo, FixedPointKind, FpLabel, StereoPoint};
use metaspin::numerics::quadrature;
use metaspin::symham::derive_hamiltonian;
use metaspin::{Error, ModelParams};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cache::Cache;
use crate::config::{Format, RunConfig};
use crate::output::{Cell, Report};

fn pool(cfg: &RunConfig) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?)
}

fn classical(cfg: &RunConfig, big_gamma: f64) -> Result<ModelParams> {
    Ok(ModelParams::classical(cfg.omega, big_gamma)?)
}

fn barrier_options(cfg: &RunConfig) -> BarrierOptions {
    BarrierOptions { trace: cfg.trace_options(), ..Default::default() }
}

fn cache_notes(r: &mut Report, cache: &Cache) {
    r.note("cache_hits", cache.hits());
    r.note("solves", cache.solves());
}

/// Mean-field magnetization of the stable branch labelled `label`, if any.
fn mf_branch(p: &ModelParams, label: FpLabel) -> Result<Option<f64>> {
    let fps = find_axis_fixed_points(p)?;
    Ok(find_label(&fps, label).filter(|f| f.is_stable()).map(|f| f.mz()))
}

pub fn steady_sweep(cfg: &RunConfig, cache: &Cache) -> Result<Report> {
    let points: Vec<(f64, f64)> =
        cfg.gamma_grid().into_iter().flat_map(|g| cfg.spin_j.iter().map(move |&j| (g, j))).collect();
    let opts = cfg.qme_options(false);
    let rows: Vec<Result<Vec<Cell>>> = pool(cfg)?.install(|| {
        points
            .par_iter()
            .map(|&(g, j)| {
                let p = ModelParams::new(cfg.omega, g, j)?;
                let out = cache.solve(&p, &opts)?;
                let mf = classical(cfg, g)?;
                Ok(vec![
                    g.into(),
                    j.into(),
                    out.m_z.into(),
                    mf_branch(&mf, FpLabel::Upper)?.into(),
                    mf_branch(&mf, FpLabel::Lower)?.into(),
                ])
            })
            .collect()
    });
    let mut r = Report::new(&["gamma_ratio", "J", "m_z_qme", "m_z_mf_upper", "m_z_mf_lower"]);
    for row in rows {
        r.push(row?);
    }
    r.note("omega", cfg.omega);
    cache_notes(&mut r, cache);
    Ok(r)
}

pub fn barriers(cfg: &RunConfig) -> Result<Report> {
    let grid = cfg.gamma_grid();
    let bopts = barrier_options(cfg);
    let rows: Vec<Result<Vec<Cell>>> = pool(cfg)?.install(|| {
        grid.par_iter()
            .map(|&g| {
                let p = classical(cfg, g)?;
                let q = activation_barriers_with(&p, &bopts);
                let s = sw_barriers(&p, bopts.basin_displacement);
                let status = match (&q, &s) {
                    (Ok(_), Ok(_)) => "ok".to_string(),
                    (Err(Error::NotBistable(_)), _) | (_, Err(Error::NotBistable(_))) => "not_bistable".to_string(),
                    (Err(e), _) | (_, Err(e)) => format!("error: {e}"),
                };
                let (q, s) = (q.ok(), s.ok());
                Ok(vec![
                    g.into(),
                    q.as_ref().map(|t| t.a_lu).into(),
                    q.as_ref().map(|t| t.a_ul).into(),
                    s.as_ref().map(|t| t.a_lu).into(),
                    s.as_ref().map(|t| t.a_ul).into(),
                    q.as_ref().map(|t| t.representation_discrepancy).into(),
                    status.into(),
                ])
            })
            .collect()
    });
    let mut r = Report::new(&["gamma_ratio", "a_lu", "a_ul", "a_lu_sw", "a_ul_sw", "representation_discrepancy", "status"]);
    for row in rows {
        r.push(row?);
    }
    let bracket = (cfg.gamma_min, cfg.gamma_max);
    let crossing = |x: metaspin::Result<f64>| match x {
        Ok(g) => json!(g),
        Err(e) => json!(format!("not found: {e}")),
    };
    r.note("omega", cfg.omega);
    r.note("gamma_c", crossing(transition_point_with(cfg.omega, bracket, &bopts)));
    r.note("gamma_c_sw", crossing(sw_transition_point(cfg.omega, bracket)));
    Ok(r)
}

/// Least-squares slope of `y` against `x` and its standard error.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() < 3 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let c = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - c - slope * a).powi(2)).sum();
    Some((slope, (ss / (n - 2.0) / sxx).sqrt()))
}

pub fn gap_scaling(cfg: &RunConfig, cache: &Cache) -> Result<Report> {
    let js = &cfg.spin_j;
    if js.len() < 3 {
        bail!("gap-scaling needs at least 3 --spin-j values, got {}", js.len());
    }
    if js.windows(2).any(|w| w[1] - w[0] != 4.0) {
        bail!("gap-scaling needs ascending --spin-j values spaced by 4");
    }
    let grid = cfg.gamma_grid();
    let points: Vec<(f64, f64)> = grid.iter().flat_map(|&g| js.iter().map(move |&j| (g, j))).collect();
    let opts = cfg.qme_options(true);
    let lambdas: Vec<std::result::Result<f64, String>> = pool(cfg)?.install(|| {
        points
            .par_iter()
            .map(|&(g, j)| {
                let p = ModelParams::new(cfg.omega, g, j).map_err(|e| e.to_string())?;
                let out = cache.solve(&p, &opts).map_err(|e| format!("{e:#}"))?;
                out.lambda.ok_or_else(|| "no gap returned".to_string())
            })
            .collect()
    });
    let mut r = Report::new(&["gamma_ratio", "J", "lambda", "a_min_estimate", "status"]);
    let mut fits = Vec::new();
    for (gi, &g) in grid.iter().enumerate() {
        let row = &lambdas[gi * js.len()..(gi + 1) * js.len()];
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (k, (&j, l)) in js.iter().zip(row).enumerate() {
            let est = match (k.checked_sub(1).map(|i| &row[i]), l) {
                (Some(Ok(a)), Ok(b)) => gap_estimator(*a, *b).ok(),
                _ => None,
            };
            let status = match l {
                Ok(l) => {
                    xs.push(j);
                    ys.push(l.ln());
                    "ok".to_string()
                }
                Err(e) => format!("error: {e}"),
            };
            r.push(vec![g.into(), j.into(), l.as_ref().ok().copied().into(), est.into(), status.into()]);
        }
        let p = classical(cfg, g)?;
        let a_min = activation_barriers_with(&p, &barrier_options(cfg)).ok().map(|t| t.a_min);
        let a_min_sw = sw_barriers(&p, 1e-4).ok().map(|t| t.a_min);
        let fit = fit_slope(&xs, &ys);
        fits.push(json!({
            "gamma_ratio": g,
            "slope": fit.map(|f| f.0),
            "slope_stderr": fit.map(|f| f.1),
            "a_min": a_min,
            "a_min_sw": a_min_sw,
        }));
    }
    r.note("omega", cfg.omega);
    r.note("fits", Value::Array(fits));
    cache_notes(&mut r, cache);
    Ok(r)
}

fn kind_str(k: FixedPointKind) -> &'static str {
    match k {
        FixedPointKind::Stable => "stable",
        FixedPointKind::Saddle => "saddle",
        FixedPointKind::Source => "source",
    }
}

pub fn portrait(cfg: &RunConfig) -> Result<Report> {
    let p = classical(cfg, cfg.gamma)?;
    let mut r = Report::new(&["kind", "label", "v", "w", "dv", "dw", "stability"]);
    let n = cfg.grid;
    let at = |k: usize| -cfg.extent + 2.0 * cfg.extent * k as f64 / (n - 1) as f64;
    for i in 0..n {
        for k in 0..n {
            let x = StereoPoint::new(at(i), at(k));
            let [dv, dw] = mf_rhs_stereo(x, &p);
            r.push(vec!["grid".into(), Cell::Empty, x.v.into(), x.w.into(), dv.into(), dw.into(), Cell::Empty]);
        }
    }
    let fps = find_axis_fixed_points(&p)?;
    for f in &fps {
        let [dv, dw] = mf_rhs_stereo(f.location, &p);
        let label = f.label.map_or(Cell::Empty, |l| l.as_str().into());
        r.push(vec![
            "fixed_point".into(),
            label,
            f.location.v.into(),
            f.location.w.into(),
            dv.into(),
            dw.into(),
            kind_str(f.kind).into(),
        ]);
    }
    r.note("omega", cfg.omega);
    r.note("gamma_ratio", cfg.gamma);
    r.note("fixed_points", fps.len());
    Ok(r)
}

const SW_SAMPLES: usize = 200;

pub fn instanton(cfg: &RunConfig) -> Result<Report> {
    let p = classical(cfg, cfg.gamma)?;
    let fps = find_axis_fixed_points(&p)?;
    let topts = cfg.trace_options();
    let mut r = Report::new(&["representation", "from", "branch", "to", "status", "s", "w", "pi_w", "action"]);
    let mut totals = Vec::new();
    for rep in Representation::BOTH {
        for f in fps.iter().filter(|f| f.is_stable()) {
            let from = f.label.map_or("", |l| l.as_str());
            for b in Branch::BOTH {
                match trace_instanton(rep, f, b, &p, &topts) {
                    Ok(t) => {
                        let to = t.terminal_fp.label.map_or("", |l| l.as_str());
                        for (s, a) in t.samples.iter().zip(&t.action_profile) {
                            r.push(vec![
                                rep.as_str().into(),
                                from.into(),
                                b.as_str().into(),
                                to.into(),
                                "closed".into(),
                                s.s.into(),
                                s.w.into(),
                                s.pi_w.into(),
                                (*a).into(),
                            ]);
                        }
                        totals.push(json!({"representation": rep.as_str(), "from": from, "branch": b.as_str(), "to": to, "action": t.total_action}));
                    }
                    Err(e) => {
                        let status = match e {
                            Error::OpenTrajectory { .. } => "open".to_string(),
                            Error::Escaped { .. } => "escaped".to_string(),
                            other => format!("error: {other}"),
                        };
                        let mut row = vec![rep.as_str().into(), from.into(), b.as_str().into(), Cell::Empty, status.into()];
                        row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
                        r.push(row);
                    }
                }
            }
        }
    }
    // SW: the zero-energy path along the axis, with momentum -h_w / D_ww.
    let sw = sw_barriers(&p, 1e-4).context("SW barriers")?;
    for c in &sw.candidates {
        let w0 = find_label(&fps, c.from).map(|f| f.w()).context("SW start point")?;
        let branch = if c.via_w > w0 { Branch::Plus } else { Branch::Minus };
        let to = c.via.map_or("", |l| l.as_str());
        let integrand = |w: f64| {
            let q = sw_reduced(w, &p);
            -q.h_w / q.d_ww
        };
        let mut action = 0.0;
        let mut prev = w0;
        for k in 0..=SW_SAMPLES {
            let w = w0 + (c.via_w - w0) * k as f64 / SW_SAMPLES as f64;
            if k > 0 {
                action += quadrature::integrate(integrand, prev, w, 1e-14, 1e-12)?;
            }
            prev = w;
            r.push(vec![
                "SW".into(),
                c.from.as_str().into(),
                branch.as_str().into(),
                to.into(),
                "closed".into(),
                (w - w0).abs().into(),
                w.into(),
                integrand(w).into(),
                action.into(),
            ]);
        }
        totals.push(json!({"representation": "SW", "from": c.from.as_str(), "branch": branch.as_str(), "to": to, "action": c.action}));
    }
    r.note("omega", cfg.omega);
    r.note("gamma_ratio", cfg.gamma);
    r.note("totals", Value::Array(totals));
    Ok(r)
}

/// Coefficients of the auxiliary Hamiltonians grouped by momentum monomial.
pub fn derive(format: Format) -> Result<String> {
    let mut text = String::new();
    let mut obj = serde_json::Map::new();
    for rep in Representation::BOTH {
        let h = derive_hamiltonian(rep)?;
        let mut terms = Vec::new();
        for ((a, b), c) in h.momentum_coefficients()? {
            text.push_str(&format!("{rep} pi_v^{a}*pi_w^{b}: {c}\n"));
            terms.push(json!({"pi_v": a, "pi_w": b, "coefficient": c.to_string()}));
        }
        obj.insert(rep.as_str().to_string(), Value::Array(terms));
    }
    Ok(match format {
        Format::Csv => text,
        Format::Json => serde_json::to_string_pretty(&Value::Object(obj))? + "\n",
    })
}
