use metaspin::instanton::{hamiltonian_on_axis, Representation};
use metaspin::model::{find_axis_fixed_points, jacobian_eigenvalues, Magnetization, ModelParams, StereoPoint};
use metaspin::numerics::ode::{integrate, Control, OdeOptions};
use metaspin::symham::poly::{q, qr};
use metaspin::symham::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn ham(rep: Representation) -> &'static SymbolicHamiltonian {
    static H: OnceLock<SymbolicHamiltonian> = OnceLock::new();
    static P: OnceLock<SymbolicHamiltonian> = OnceLock::new();
    match rep {
        Representation::Husimi => H.get_or_init(|| derive_hamiltonian(rep).unwrap()),
        Representation::GlauberP => P.get_or_init(|| derive_hamiltonian(rep).unwrap()),
    }
}

#[test]
fn exact_identities_hold() {
    for rep in Representation::BOTH {
        let h = ham(rep);
        check_axis_restriction(h).unwrap();
        check_mean_field_limit(h).unwrap();
        check_mirror_symmetry(h).unwrap();
        check_momentum_structure(h).unwrap();
        assert_eq!(h.momentum_degree().unwrap(), 4);
        assert!(!h.expr.contains(Var::J));
    }
}

#[test]
fn representations_differ_off_the_mean_field_limit() {
    assert_ne!(ham(Representation::Husimi).expr, ham(Representation::GlauberP).expr);
}

#[test]
fn raising_symbol_matches_the_stereographic_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for rep in Representation::BOTH {
        let s = spin_operator_symbol(SpinOp::Plus, Side::Left, rep);
        let zero_pi = |e: &SymExpr| e.rescale_var(Var::PiV, &q(0)).rescale_var(Var::PiW, &q(0));
        let (re, im) = (zero_pi(&s.re), zero_pi(&s.im));
        for _ in 0..20 {
            let th: f64 = rng.random_range(0.2..3.0);
            let ph: f64 = rng.random_range(0.0..6.28);
            let m = Magnetization::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos());
            let x = m.to_stereo().unwrap();
            let j = 7.0;
            let inp = [x.v, x.w, 0.0, 0.0, j, 0.0, 0.0, 0.0];
            // J_+ / J -> m_x + i m_y
            assert!((re.eval(&inp) / j - m.mx).abs() < 1e-12);
            assert!((im.eval(&inp) / j - m.my).abs() < 1e-12);
        }
    }
}

#[test]
fn compiled_evaluator_matches_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for rep in Representation::BOTH {
        let h = ham(rep);
        for _ in 0..100 {
            let x = StereoPoint::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let pi = [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)];
            let p = ModelParams::classical(rng.random_range(0.0..1.0), rng.random_range(0.0..12.0)).unwrap();
            let a = h.value(x, pi, &p);
            let b = h.value_direct(x, pi, &p);
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn exact_rational_evaluation_agrees() {
    let h = ham(Representation::GlauberP);
    let x = [qr(1, 3), qr(-2, 5), qr(1, 7), qr(3, 4), q(0), qr(1, 4), q(1), q(9)];
    let exact = h.expr.eval_exact(&x).unwrap();
    let xf: [f64; 8] = std::array::from_fn(|i| num_traits::ToPrimitive::to_f64(&x[i]).unwrap());
    let f = h.expr.eval(&xf);
    assert!((num_traits::ToPrimitive::to_f64(&exact).unwrap() - f).abs() < 1e-12 * f.abs().max(1.0));
}

#[test]
fn axis_restriction_matches_the_numeric_cubic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for rep in Representation::BOTH {
        let h = ham(rep);
        for _ in 0..50 {
            let p = ModelParams::classical(0.25, rng.random_range(0.0..12.0)).unwrap();
            let w = rng.random_range(-3.0..3.0);
            let pw = rng.random_range(-2.0..2.0);
            let a = h.value(StereoPoint::new(0.0, w), [0.0, pw], &p);
            let b = hamiltonian_on_axis(rep, w, pw, &p);
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }
}

#[test]
fn flow_preserves_the_invariant_plane() {
    let p = ModelParams::classical(0.25, 9.0).unwrap();
    for rep in Representation::BOTH {
        for (w, pw) in [(-1.0, 0.3), (0.4, -0.8), (2.0, 0.1)] {
            let f = hamilton_flow(ham(rep), StereoPoint::new(0.0, w), [0.0, pw], &p);
            assert!(f[0].abs() < 1e-12 && f[2].abs() < 1e-12, "{f:?}");
        }
    }
}

#[test]
fn gradients_match_finite_differences() {
    let p = ModelParams::classical(0.25, 9.0).unwrap();
    let h = ham(Representation::Husimi);
    let q0 = [0.3, -0.6, 0.2, 0.5];
    let val = |q: [f64; 4]| h.value(StereoPoint::new(q[0], q[1]), [q[2], q[3]], &p);
    let jet = h.jet(StereoPoint::new(q0[0], q0[1]), [q0[2], q0[3]], &p);
    for i in 0..4 {
        let step = 1e-6;
        let mut a = q0;
        let mut b = q0;
        a[i] += step;
        b[i] -= step;
        let fd = (val(a) - val(b)) / (2.0 * step);
        assert!((fd - jet.grad[i]).abs() <= 1e-6 * jet.grad[i].abs().max(1.0), "{i}: {fd} vs {}", jet.grad[i]);
    }
}

#[test]
fn flow_conserves_the_hamiltonian() {
    let p = ModelParams::classical(0.25, 9.0).unwrap();
    for rep in Representation::BOTH {
        let h = ham(rep);
        let y0 = [0.1, 0.2, 0.05, -0.1];
        let e0 = h.value(StereoPoint::new(y0[0], y0[1]), [y0[2], y0[3]], &p);
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-12, h_init: Some(1e-3), h_max: 0.05, max_steps: 1_000_000 };
        let out = integrate(
            |_, y: &[f64; 4]| Ok(hamilton_flow(h, StereoPoint::new(y[0], y[1]), [y[2], y[3]], &p)),
            0.0,
            y0,
            1.0,
            &opts,
            |_| Ok(Control::Continue),
        )
        .unwrap();
        let y = out.y;
        let e1 = h.value(StereoPoint::new(y[0], y[1]), [y[2], y[3]], &p);
        assert!((e1 - e0).abs() <= 1e-10, "{rep:?}: {e0} -> {e1}");
    }
}

#[test]
fn k_matrix_structure() {
    let p = ModelParams::classical(0.25, 9.0).unwrap();
    for rep in Representation::BOTH {
        for fp in find_axis_fixed_points(&p).unwrap().iter().filter(|f| f.w().abs() < 10.0) {
            let k = k_matrix(ham(rep), fp, &p).unwrap();
            assert!(k.trace().abs() < 1e-10);
            let mut mf: Vec<f64> = jacobian_eigenvalues(fp.location, &p).iter().map(|z| z.re).collect();
            mf.extend(mf.clone().iter().map(|x| -x));
            mf.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (m, want) in k.modes.iter().zip(&mf) {
                assert!((m.eigenvalue.re - want).abs() < 1e-8 * want.abs().max(1.0));
            }
            if fp.is_stable() {
                for m in &k.modes {
                    assert_eq!(m.pi_vanishes, m.stable, "{:?} {:?}", fp.label, m.eigenvalue);
                }
            }
        }
    }
}
