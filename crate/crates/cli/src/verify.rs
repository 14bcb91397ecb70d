//! Self-check suite run by `metaspin verify`.

use std::time::Instant;

use metaspin::instanton::{activation_barriers, sw_barriers, trace_instanton, Branch, Representation, TraceOptions};
use metaspin::liouvillian::{
    build_full_generator, build_reduced_generator, default_pivot, gap_from_steady, magnetization_z, magnetization_z_full,
    reconstruct, solve_steady,
};
use metaspin::model::{bistability_onset, find_axis_fixed_points, find_label, mf_rhs_stereo, FpLabel};
use metaspin::symham::{
    check_axis_restriction, check_mean_field_limit, check_mirror_symmetry, check_momentum_structure, derive_hamiltonian,
    SymbolicHamiltonian,
};
use metaspin::ModelParams;
use num_complex::Complex64;

pub type CheckResult = Result<String, String>;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub result: CheckResult,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        match &self.result {
            Ok(d) => format!("PASS {}: {d} ({:.2} s)", self.name, self.seconds),
            Err(d) => format!("FAIL {}: {d} ({:.2} s)", self.name, self.seconds),
        }
    }
}

fn timed(name: String, f: impl FnOnce() -> CheckResult) -> CheckOutcome {
    let t0 = Instant::now();
    let result = f();
    CheckOutcome { name, result, seconds: t0.elapsed().as_secs_f64() }
}

/// The exact identities for one derived Hamiltonian.
pub fn symbolic_checks(h: &SymbolicHamiltonian) -> Vec<CheckOutcome> {
    let rep = h.representation;
    let named: [(&str, fn(&SymbolicHamiltonian) -> metaspin::Result<()>); 4] = [
        ("axis restriction", check_axis_restriction),
        ("mean-field limit", check_mean_field_limit),
        ("mirror symmetry", check_mirror_symmetry),
        ("momentum structure", check_momentum_structure),
    ];
    named
        .into_iter()
        .map(|(n, f)| timed(format!("symham {rep} {n}"), || f(h).map(|()| "exact".into()).map_err(|e| e.to_string())))
        .collect()
}

const ORACLE_DRAWS: [(f64, f64); 3] = [(0.25, 9.0), (0.6, 2.5), (0.1, 0.0)];

fn oracle_check(j: f64) -> CheckResult {
    let mut worst: f64 = 0.0;
    for (omega, big_gamma) in ORACLE_DRAWS {
        let p = ModelParams::new(omega, big_gamma, j).map_err(|e| e.to_string())?;
        let full = build_full_generator(&p).map_err(|e| e.to_string())?;
        let rho_full = full.steady_state().map_err(|e| e.to_string())?;
        let w = build_reduced_generator(&p).map_err(|e| e.to_string())?;
        let sol = solve_steady(&w, 1.0, default_pivot(&p)).map_err(|e| e.to_string())?;
        let rho = reconstruct(&sol.state);
        let d_rho = (&rho - &rho_full).camax();
        let d_mz = (magnetization_z(&sol.state) - magnetization_z_full(&rho_full, j)).abs();
        let gr = gap_from_steady(&w, &sol).map_err(|e| e.to_string())?.lambda;
        let gs = full.symmetric_sector_gap().map_err(|e| e.to_string())?;
        let d_gap = (gr - gs).abs() / gs.max(1.0);
        let herm = (&rho - rho.adjoint()).camax();
        let tr = (rho.trace() - Complex64::from(1.0)).norm();
        let d = d_rho.max(d_mz).max(d_gap).max(herm).max(tr);
        if d > 1e-10 {
            return Err(format!("Ω={omega}, Γ={big_gamma}: deviation {d:.2e} (ρ {d_rho:.1e}, m_z {d_mz:.1e}, gap {d_gap:.1e})"));
        }
        worst = worst.max(d);
    }
    Ok(format!("worst deviation {worst:.1e} over {} parameter sets", ORACLE_DRAWS.len()))
}

fn model_check() -> CheckResult {
    let t = ModelParams::classical(0.25, 1.0).map_err(|e| e.to_string())?;
    let onset = bistability_onset(0.25, &t, (0.5, 5.0)).map_err(|e| e.to_string())?;
    if !(1.92..=1.96).contains(&onset) {
        return Err(format!("bistability onset {onset}"));
    }
    let p = ModelParams::classical(0.25, 9.0).map_err(|e| e.to_string())?;
    let fps = find_axis_fixed_points(&p).map_err(|e| e.to_string())?;
    let worst = fps.iter().map(|f| mf_rhs_stereo(f.location, &p).iter().fold(0.0f64, |m, x| m.max(x.abs()))).fold(0.0, f64::max);
    if fps.len() != 6 || worst > 1e-10 {
        return Err(format!("{} fixed points at Γ=9, max residual {worst:.1e}", fps.len()));
    }
    Ok(format!("onset Γ* = {onset:.4}; 6 fixed points at Γ=9 with residual {worst:.1e}"))
}

fn instanton_check() -> CheckResult {
    let p = ModelParams::classical(0.25, 9.0).map_err(|e| e.to_string())?;
    let t = activation_barriers(&p).map_err(|e| e.to_string())?;
    if t.representation_discrepancy > 1e-6 {
        return Err(format!("H/P discrepancy {:.2e}", t.representation_discrepancy));
    }
    let sw = sw_barriers(&p, 1e-4).map_err(|e| e.to_string())?;
    if sw.a_lu > t.a_lu || sw.a_ul > t.a_ul {
        return Err("SW barrier exceeds the quantum barrier".into());
    }
    let fps = find_axis_fixed_points(&p).map_err(|e| e.to_string())?;
    let u = find_label(&fps, FpLabel::Upper).ok_or("no u")?;
    let mut worst: f64 = 0.0;
    let mut reached = false;
    for b in Branch::BOTH {
        if let Ok(tr) = trace_instanton(Representation::GlauberP, u, b, &p, &TraceOptions::default()) {
            worst = worst.max(tr.max_abs_cubic(&p));
            reached |= tr.terminal_fp.label == Some(FpLabel::R1);
        }
    }
    if !reached || worst > 1e-8 {
        return Err(format!("u→r1 reached: {reached}, max |C| {worst:.1e}"));
    }
    Ok(format!(
        "A_lu {:.4}, A_ul {:.4}, H/P {:.1e}; SW below quantum; u→r1 on the level set to {worst:.1e}",
        t.a_lu, t.a_ul, t.representation_discrepancy
    ))
}

pub fn run_all() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for rep in Representation::BOTH {
        match derive_hamiltonian(rep) {
            Ok(h) => out.extend(symbolic_checks(&h)),
            Err(e) => out.push(CheckOutcome { name: format!("symham {rep} derivation"), result: Err(e.to_string()), seconds: 0.0 }),
        }
    }
    for j in [1.0, 2.0, 4.0, 6.0] {
        out.push(timed(format!("oracle J={j}"), || oracle_check(j)));
    }
    out.push(timed("model fixed points".into(), model_check));
    out.push(timed("instanton invariants".into(), instanton_check));
    out
}
