use metaspin::instanton::*;
use metaspin::model::{find_axis_fixed_points, find_label, mf_rhs_stereo, FpLabel, ModelParams, StereoPoint};
use metaspin::Error;
use proptest::prelude::*;

fn params(gg: f64) -> ModelParams {
    ModelParams::classical(0.25, gg).unwrap()
}

fn trace_from(alpha: Representation, from: FpLabel, branch: Branch, p: &ModelParams) -> InstantonTrajectory {
    let fps = find_axis_fixed_points(p).unwrap();
    let start = find_label(&fps, from).unwrap();
    trace_instanton(alpha, start, branch, p, &TraceOptions::default()).unwrap()
}

/// Terminal labels reached from `from` over both branches; open branches are skipped.
fn terminals(alpha: Representation, from: FpLabel, p: &ModelParams) -> Vec<(Branch, FpLabel)> {
    let fps = find_axis_fixed_points(p).unwrap();
    let start = find_label(&fps, from).unwrap();
    Branch::BOTH
        .into_iter()
        .filter_map(|b| match trace_instanton(alpha, start, b, p, &TraceOptions::default()) {
            Ok(t) => Some((b, t.terminal_fp.label.unwrap())),
            Err(Error::OpenTrajectory { .. }) => None,
            Err(e) => panic!("{e}"),
        })
        .collect()
}

#[test]
fn trajectories_end_at_expected_points() {
    let p = params(9.0);
    for alpha in Representation::BOTH {
        let from_u: Vec<_> = terminals(alpha, FpLabel::Upper, &p).into_iter().map(|t| t.1).collect();
        assert_eq!(from_u, vec![FpLabel::R1], "{alpha:?}");
        let mut from_l: Vec<_> = terminals(alpha, FpLabel::Lower, &p).into_iter().map(|t| t.1).collect();
        from_l.sort();
        let mut want = vec![FpLabel::S1, FpLabel::R1];
        want.sort();
        assert_eq!(from_l, want, "{alpha:?}");
    }
}

#[test]
fn branch_flip_gives_a_distinct_trajectory() {
    let p = params(9.0);
    let a = trace_from(Representation::Husimi, FpLabel::Lower, Branch::Plus, &p);
    let b = trace_from(Representation::Husimi, FpLabel::Lower, Branch::Minus, &p);
    assert_ne!(a.terminal_fp.label, b.terminal_fp.label);
    assert!(a.samples[5].pi_w * b.samples[5].pi_w < 0.0 || a.samples[5].w != b.samples[5].w);
}

#[test]
fn trajectories_stay_on_the_zero_level_set_with_vanishing_end_momenta() {
    let p = params(9.0);
    for alpha in Representation::BOTH {
        for from in [FpLabel::Upper, FpLabel::Lower] {
            for (branch, _) in terminals(alpha, from, &p) {
                let t = trace_from(alpha, from, branch, &p);
                assert!(t.max_abs_cubic(&p) <= 1e-8, "{alpha:?} {from} {branch:?}: {}", t.max_abs_cubic(&p));
                assert_eq!(t.samples[0].pi_w, 0.0);
                assert_eq!(t.samples[0].w, t.start.w());
                assert!(t.samples.last().unwrap().pi_w.abs() <= 1e-10);
                assert!((t.samples.last().unwrap().w - t.terminal_fp.w()).abs() <= 1e-6);
                assert_eq!(t.action_profile.len(), t.samples.len());
                assert_eq!(*t.action_profile.last().unwrap(), t.total_action);
                assert!(t.total_action > 0.0);
            }
        }
    }
}

#[test]
fn running_action_of_upper_escape_dips_negative() {
    let p = params(9.0);
    let t = trace_from(Representation::GlauberP, FpLabel::Upper, Branch::Plus, &p);
    let min = t.action_profile.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min < 0.0, "min running action {min}");
    assert!(t.total_action > 0.0);
}

#[test]
fn competing_lower_branch_has_larger_action() {
    let p = params(9.0);
    for alpha in Representation::BOTH {
        let mut by_label = std::collections::HashMap::new();
        for (b, l) in terminals(alpha, FpLabel::Lower, &p) {
            by_label.insert(l, trace_from(alpha, FpLabel::Lower, b, &p).total_action);
        }
        assert!(by_label[&FpLabel::R1] > by_label[&FpLabel::S1]);
    }
}

#[test]
fn barrier_table_at_gamma_nine() {
    let t = activation_barriers(&params(9.0)).unwrap();
    assert_eq!(t.via_lu, Some(FpLabel::S1));
    assert_eq!(t.via_ul, Some(FpLabel::R1));
    assert!(t.a_lu > t.a_ul);
    assert_eq!(t.a_min, t.a_ul);
    assert!(t.representation_discrepancy <= 1e-6);
    // the l -> r1 path relaxes back to l and is discarded, the pole branch is open
    let h = &t.husimi;
    assert!(h.candidates.iter().any(|c| c.from == FpLabel::Upper && c.status == CandidateStatus::Open));
    let lr1 = h.candidates.iter().find(|c| c.from == FpLabel::Lower && c.via == Some(FpLabel::R1)).unwrap();
    assert!(lr1.targets.contains(&FpLabel::Lower));
}

#[test]
fn path_quadrature_is_exact_for_polynomial_curves() {
    // w = s, pi = s^2: int pi dw = s^3 / 3
    let samples: Vec<TrajectorySample> = (0..=7)
        .map(|k| {
            let s = 0.3 * k as f64;
            TrajectorySample { s, w: s, pi_w: s * s, dw_ds: 1.0, dpi_ds: 2.0 * s }
        })
        .collect();
    let (profile, total) = running_action(&samples);
    let end = 2.1_f64;
    assert!((total - end.powi(3) / 3.0).abs() < 1e-14);
    assert!((profile[3] - 0.9_f64.powi(3) / 3.0).abs() < 1e-14);
    let flat: Vec<TrajectorySample> = samples.iter().map(|s| TrajectorySample { pi_w: 0.0, dpi_ds: 0.0, ..*s }).collect();
    assert_eq!(running_action(&flat).1, 0.0);
}

#[test]
fn path_quadrature_converges_with_order_at_least_two() {
    // w = sin s, pi = cos s over [0, 2]: int cos^2 ds = 1 + sin(4) / 4
    let exact = 1.0 + 4f64.sin() / 4.0;
    let err = |n: usize| {
        let samples: Vec<TrajectorySample> = (0..=n)
            .map(|k| {
                let s = 2.0 * k as f64 / n as f64;
                TrajectorySample { s, w: s.sin(), pi_w: s.cos(), dw_ds: s.cos(), dpi_ds: -s.sin() }
            })
            .collect();
        (running_action(&samples).1 - exact).abs()
    };
    let (e1, e2, e3) = (err(4), err(8), err(16));
    assert!((e1 / e2).log2() >= 2.0, "{e1} {e2}");
    assert!((e2 / e3).log2() >= 2.0, "{e2} {e3}");
}

#[test]
fn action_of_recomputes_the_profile() {
    let p = params(9.0);
    let mut t = trace_from(Representation::Husimi, FpLabel::Lower, Branch::Plus, &p);
    let total = t.total_action;
    t.action_profile.clear();
    t.total_action = 0.0;
    assert_eq!(action_of(&mut t), total);
    assert_eq!(t.action_profile.len(), t.samples.len());
}

#[test]
fn barriers_are_converged_in_ds_and_independent_of_tau() {
    let p = params(8.0);
    let base = activation_barriers(&p).unwrap();
    let mut half = BarrierOptions::default();
    half.trace.ds /= 2.0;
    let h = activation_barriers_with(&p, &half).unwrap();
    assert!((h.a_lu - base.a_lu).abs() < 1e-8 && (h.a_ul - base.a_ul).abs() < 1e-8);
    let mut tau2 = BarrierOptions::default();
    tau2.trace.tau *= 2.0;
    let t = activation_barriers_with(&p, &tau2).unwrap();
    assert!((t.a_lu - base.a_lu).abs() <= 1e-7 * base.a_lu);
    assert!((t.a_ul - base.a_ul).abs() <= 1e-7 * base.a_ul);
}

#[test]
fn outside_the_bistable_window_is_an_error() {
    assert!(matches!(activation_barriers(&params(1.0)), Err(Error::NotBistable(_))));
    assert!(matches!(sw_barriers(&params(1.0), 1e-4), Err(Error::NotBistable(_))));
}

#[test]
fn trace_rejects_unstable_start() {
    let p = params(9.0);
    let fps = find_axis_fixed_points(&p).unwrap();
    let r1 = find_label(&fps, FpLabel::R1).unwrap();
    assert!(trace_instanton(Representation::Husimi, r1, Branch::Plus, &p, &TraceOptions::default()).is_err());
}

#[test]
fn far_source_sits_near_the_pole() {
    let fps = find_axis_fixed_points(&params(9.0)).unwrap();
    let r2 = find_label(&fps, FpLabel::R2).unwrap();
    assert!((60.0..=68.0).contains(&r2.w()), "{}", r2.w());
}

#[test]
fn transition_points_at_quarter_drive() {
    let gc = transition_point(0.25, (7.0, 10.0)).unwrap();
    assert!((8.8..=9.0).contains(&gc), "{gc}");
    let gsw = sw_transition_point(0.25, (3.0, 10.0)).unwrap();
    assert!((7.8..=8.0).contains(&gsw), "{gsw}");
    assert!(gsw < gc);
}

#[test]
fn transition_point_needs_a_sign_change() {
    // both ends below the crossing
    assert!(matches!(transition_point(0.25, (5.0, 6.0)), Err(Error::Bracket { .. })));
    assert!(transition_point(0.25, (6.0, 6.0)).is_err());
}

#[test]
fn sw_drift_equals_the_constant_cubic_coefficient() {
    let p = params(6.5);
    for k in -40..=40 {
        let w = 0.1 * k as f64;
        let c0 = cubic_coeffs(Representation::Husimi, w, &p).c0;
        assert!((sw_reduced(w, &p).h_w - c0).abs() <= 1e-13 * c0.abs().max(1.0));
        assert!((mf_rhs_stereo(StereoPoint::new(0.0, w), &p)[1] - c0).abs() <= 1e-13 * c0.abs().max(1.0));
    }
}

#[test]
fn sw_action_matches_composite_simpson() {
    let p = params(9.0);
    let fps = find_axis_fixed_points(&p).unwrap();
    let (a, b) = (find_label(&fps, FpLabel::Lower).unwrap().w(), find_label(&fps, FpLabel::S1).unwrap().w());
    let n = 20_000;
    let h = (b - a) / n as f64;
    let f = |w: f64| {
        let r = sw_reduced(w, &p);
        -r.h_w / r.d_ww
    };
    let mut acc = f(a) + f(b);
    for k in 1..n {
        acc += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    let simpson = acc * h / 3.0;
    assert!((sw_action(a, b, &p).unwrap() - simpson).abs() < 1e-10);
}

#[test]
fn sw_barriers_are_below_quantum_ones() {
    let p = params(9.0);
    let q = activation_barriers(&p).unwrap();
    let s = sw_barriers(&p, 1e-4).unwrap();
    assert!(s.a_lu < q.a_lu && s.a_ul < q.a_ul);
    assert!(s.a_lu > 0.0 && s.a_ul > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn representations_agree_across_the_bistable_window(gg in 3.0f64..10.0) {
        let p = params(gg);
        let t = activation_barriers(&p).unwrap();
        prop_assert!(t.representation_discrepancy <= 1e-6, "Γ = {gg}: {}", t.representation_discrepancy);
        prop_assert!(t.a_lu > 0.0 && t.a_ul > 0.0);
        for rep in [&t.husimi, &t.glauber_p] {
            for c in rep.candidates.iter().filter(|c| c.status == CandidateStatus::Accepted) {
                prop_assert!(c.action.unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn zero_energy_manifold_across_the_window(gg in 3.0f64..10.0) {
        let p = params(gg);
        let fps = find_axis_fixed_points(&p).unwrap();
        for alpha in Representation::BOTH {
            for start in fps.iter().filter(|f| f.is_stable()) {
                for b in Branch::BOTH {
                    match trace_instanton(alpha, start, b, &p, &TraceOptions::default()) {
                        Ok(t) => {
                            prop_assert!(t.max_abs_cubic(&p) <= 1e-8);
                            prop_assert!(t.samples.last().unwrap().pi_w.abs() <= 1e-10);
                        }
                        Err(Error::OpenTrajectory { .. }) => {}
                        Err(e) => return Err(TestCaseError::fail(e.to_string())),
                    }
                }
            }
        }
    }

    #[test]
    fn hamiltonian_vanishes_on_the_axis(w in -5.0f64..5.0, gg in 0.0f64..12.0) {
        let p = params(gg);
        for alpha in Representation::BOTH {
            prop_assert_eq!(hamiltonian_on_axis(alpha, w, 0.0, &p), 0.0);
        }
        prop_assert_eq!(sw_full_field(StereoPoint::new(0.3, w), [0.0, 0.0], &p).value, 0.0);
        prop_assert!(sw_reduced(w, &p).d_ww > 0.0);
    }
}
