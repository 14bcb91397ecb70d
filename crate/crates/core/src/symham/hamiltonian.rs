//! Auxiliary Hamiltonians from the correspondence rules, their exact checks,
//! and compiled evaluators for the Hamilton flow.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expr::{CExpr, SymExpr};
use super::poly::{q, qr, Poly, Var, NVARS};
use super::symbols::{adjoint, product_symbol, spin_operator_symbol, stereo_norm, Side, SpinOp};
use super::tape::Tape;
use crate::error::{Error, Result};
use crate::instanton::Representation;
use crate::model::{FixedPoint, ModelParams, StereoPoint};
use crate::numerics::dense;

const PHASE: [Var; 4] = [Var::V, Var::W, Var::PiV, Var::PiW];

/// Hessian entries in the order (0,0) (0,1) ... (3,3), upper triangle.
fn hessian_pairs() -> impl Iterator<Item = (usize, usize)> {
    (0..4).flat_map(|i| (i..4).map(move |j| (i, j)))
}

#[derive(Debug, Clone)]
pub struct SymbolicHamiltonian {
    pub representation: Representation,
    /// Function of `v, w, pi_v, pi_w` and the rates `Omega, gamma, Gamma`.
    pub expr: SymExpr,
    /// Outputs: value, gradient in (v, w, pi_v, pi_w), upper-triangular Hessian.
    evaluator: Tape,
}

/// Value, gradient and Hessian at one phase-space point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianJet {
    pub value: f64,
    pub grad: [f64; 4],
    pub hessian: [[f64; 4]; 4],
}

fn inputs(x: StereoPoint, pi: [f64; 2], p: &ModelParams) -> [f64; NVARS] {
    [x.v, x.w, pi[0], pi[1], 0.0, p.omega, p.gamma, p.big_gamma]
}

impl SymbolicHamiltonian {
    pub fn from_expr(representation: Representation, expr: SymExpr) -> Self {
        let mut outs = vec![expr.clone()];
        let grad: Vec<SymExpr> = PHASE.iter().map(|&v| expr.derivative(v)).collect();
        outs.extend(grad.iter().cloned());
        for (i, j) in hessian_pairs() {
            outs.push(grad[i].derivative(PHASE[j]));
        }
        Self { representation, expr, evaluator: Tape::compile(&outs) }
    }

    pub fn tape_len(&self) -> usize {
        self.evaluator.len()
    }

    pub fn value(&self, x: StereoPoint, pi: [f64; 2], p: &ModelParams) -> f64 {
        self.jet(x, pi, p).value
    }

    pub fn jet(&self, x: StereoPoint, pi: [f64; 2], p: &ModelParams) -> HamiltonianJet {
        let out = self.evaluator.eval(&inputs(x, pi, p));
        let mut hessian = [[0.0; 4]; 4];
        for (k, (i, j)) in hessian_pairs().enumerate() {
            hessian[i][j] = out[5 + k];
            hessian[j][i] = out[5 + k];
        }
        HamiltonianJet { value: out[0], grad: [out[1], out[2], out[3], out[4]], hessian }
    }

    /// Direct evaluation of the rational expression, bypassing the tape.
    pub fn value_direct(&self, x: StereoPoint, pi: [f64; 2], p: &ModelParams) -> f64 {
        self.expr.eval(&inputs(x, pi, p))
    }

    /// Coefficient functions of each momentum monomial `pi_v^a pi_w^b`.
    pub fn momentum_coefficients(&self) -> Result<Vec<((u8, u8), SymExpr)>> {
        let mut out = Vec::new();
        let da = self.expr.degree_in(Var::PiV).unwrap_or(0);
        for a in 0..=da {
            let ca = self.expr.coefficient(Var::PiV, a)?;
            let db = ca.degree_in(Var::PiW).unwrap_or(0);
            for b in 0..=db {
                let c = ca.coefficient(Var::PiW, b)?;
                if !c.is_zero() {
                    out.push(((a, b), c));
                }
            }
        }
        Ok(out)
    }

    /// Largest total degree in the momenta.
    pub fn momentum_degree(&self) -> Result<u8> {
        Ok(self.momentum_coefficients()?.iter().map(|((a, b), _)| a + b).max().unwrap_or(0))
    }
}

/// Real-valued symbol of one generator term for the chosen representation.
fn generator_symbol(rep: Representation) -> CExpr {
    let j = Poly::var(Var::J);
    let half = qr(1, 2);
    let l = |ops: &[SpinOp]| product_symbol(ops, Side::Left, rep);
    let r = |ops: &[SpinOp]| product_symbol(ops, Side::Right, rep);

    // Hamiltonian Omega J_x; the adjoint generator flips its sign
    let jx_l = spin_operator_symbol(SpinOp::Plus, Side::Left, rep)
        .add(&spin_operator_symbol(SpinOp::Minus, Side::Left, rep))
        .scale(&half);
    let jx_r = spin_operator_symbol(SpinOp::Plus, Side::Right, rep)
        .add(&spin_operator_symbol(SpinOp::Minus, Side::Right, rep))
        .scale(&half);
    let ham_sign = match rep {
        Representation::Husimi => q(1),
        Representation::GlauberP => q(-1),
    };
    let mut total = jx_l.sub(&jx_r).times_i().scale(&ham_sign).mul_real(&SymExpr::var(Var::Omega));

    let dissipators: [(&[SpinOp], SymExpr); 2] = [
        (&[SpinOp::Plus], SymExpr::var(Var::Gamma).div_factor(&j, 1)),
        (&[SpinOp::Minus, SpinOp::Z], SymExpr::var(Var::BigGamma).div_factor(&j, 3)),
    ];
    for (a, rate) in dissipators {
        let ad = adjoint(a);
        let mut ada = ad.clone();
        ada.extend_from_slice(a);
        // jump term: A^dag X A for the adjoint generator, A X A^dag otherwise
        let jump = match rep {
            Representation::Husimi => l(&ad).mul(&r(a)),
            Representation::GlauberP => l(a).mul(&r(&ad)),
        };
        let anti = l(&ada).add(&r(&ada)).scale(&half);
        total = total.add(&jump.sub(&anti).mul_real(&rate));
    }
    total
}

/// `lim J^-1 L(x, sigma J pi)` assembled from the operator symbols.
pub fn derive_hamiltonian(rep: Representation) -> Result<SymbolicHamiltonian> {
    let sym = generator_symbol(rep);
    if !sym.im.is_zero() {
        return Err(Error::Derivation(format!("imaginary residue {} survives", sym.im)));
    }
    let h = sym.re.div_factor(&Poly::var(Var::J), 1).limit_j_infinity()?;
    if h.contains(Var::J) {
        return Err(Error::Derivation("J survives the limit".into()));
    }
    Ok(SymbolicHamiltonian::from_expr(rep, h))
}

/// Printed cubic coefficients `C^(k)` as exact functions of `w` and the rates.
pub fn printed_cubic_coefficients(rep: Representation) -> [SymExpr; 4] {
    let w = Poly::var(Var::W);
    let w2 = w.pow(2);
    let r = w2.add(&Poly::one());
    let qm = w2.sub(&Poly::one());
    let (om, g, gg) = (Poly::var(Var::Omega), Poly::var(Var::Gamma), Poly::var(Var::BigGamma));
    let c0 = SymExpr::poly(om.mul(&r).scale(&qr(1, 2)).add(&g.mul(&w)))
        .sub(&SymExpr::over(gg.mul(&w).mul(&qm.pow(2)), &r, 2));
    let quad = |a: i64, b: i64, c: i64| w2.pow(2).scale(&q(a)).add(&w2.scale(&q(b))).add(&Poly::int(c));
    match rep {
        Representation::Husimi => [
            c0,
            SymExpr::over(g.mul(&w2).mul(&r.pow(2)).add(&gg.mul(&quad(5, -6, 1))), &r, 1).scale(&qr(1, 4)),
            SymExpr::poly(gg.mul(&w.sub(&w.pow(3).scale(&q(2)))).scale(&qr(1, 4))),
            SymExpr::poly(gg.mul(&w2).mul(&r).scale(&qr(1, 16))),
        ],
        Representation::GlauberP => [
            c0,
            SymExpr::over(g.mul(&r.pow(2)).add(&gg.mul(&quad(1, -6, 5)).mul(&w2)), &r, 1).scale(&qr(1, 4)),
            SymExpr::poly(gg.mul(&w.pow(3)).mul(&w2.sub(&Poly::int(2))).scale(&qr(1, 4))),
            SymExpr::poly(gg.mul(&w2.pow(2)).mul(&r).scale(&qr(1, 16))),
        ],
    }
}

/// Mean-field right-hand side `(dv/dt, dw/dt)` in stereographic coordinates.
pub fn mean_field_field() -> [SymExpr; 2] {
    let (v, w) = (Poly::var(Var::V), Poly::var(Var::W));
    let (om, g, gg) = (Poly::var(Var::Omega), Poly::var(Var::Gamma), Poly::var(Var::BigGamma));
    let r = stereo_norm();
    let m2 = r.sub(&Poly::int(2)).pow(2);
    let vdot = SymExpr::poly(om.mul(&v).mul(&w).add(&g.mul(&v))).sub(&SymExpr::over(gg.mul(&v).mul(&m2), &r, 2));
    let wpart = Poly::one().sub(&v.pow(2)).add(&w.pow(2));
    let wdot = SymExpr::poly(om.mul(&wpart).scale(&qr(1, 2)).add(&g.mul(&w)))
        .sub(&SymExpr::over(gg.mul(&w).mul(&m2), &r, 2));
    [vdot, wdot]
}

fn at_zero(e: &SymExpr, vars: &[Var]) -> SymExpr {
    vars.iter().fold(e.clone(), |acc, &v| acc.rescale_var(v, &q(0)))
}

/// Restriction to `v = pi_v = 0` equals `pi_w * sum_k C^(k) pi_w^k` exactly.
pub fn check_axis_restriction(h: &SymbolicHamiltonian) -> Result<()> {
    let axis = at_zero(&h.expr, &[Var::V, Var::PiV]);
    let c = printed_cubic_coefficients(h.representation);
    let mut want = SymExpr::zero();
    for (k, ck) in c.iter().enumerate() {
        want = want.add(&ck.mul(&SymExpr::poly(Poly::var(Var::PiW).pow(k as u32 + 1))));
    }
    if axis != want {
        return Err(Error::Derivation(format!(
            "axis restriction differs from the cubic form by {}",
            axis.sub(&want)
        )));
    }
    Ok(())
}

/// `grad_pi H` at `pi = 0` equals the mean-field field exactly.
pub fn check_mean_field_limit(h: &SymbolicHamiltonian) -> Result<()> {
    let mf = mean_field_field();
    for (k, var) in [Var::PiV, Var::PiW].into_iter().enumerate() {
        let g = at_zero(&h.expr.derivative(var), &[Var::PiV, Var::PiW]);
        if g != mf[k] {
            return Err(Error::Derivation(format!("d H / d {} at pi = 0 differs by {}", var.name(), g.sub(&mf[k]))));
        }
    }
    Ok(())
}

/// `H(-v, w, -pi_v, pi_w) = H(v, w, pi_v, pi_w)` exactly.
pub fn check_mirror_symmetry(h: &SymbolicHamiltonian) -> Result<()> {
    let m = h.expr.rescale_var(Var::V, &q(-1)).rescale_var(Var::PiV, &q(-1));
    if m != h.expr {
        return Err(Error::Derivation("mirror image differs".into()));
    }
    Ok(())
}

/// `H(x, 0) = 0` and degree at most four in the momenta (momentum times a
/// cubic; the `J_- J_z` dissipator carries four operator factors).
pub fn check_momentum_structure(h: &SymbolicHamiltonian) -> Result<()> {
    if !at_zero(&h.expr, &[Var::PiV, Var::PiW]).is_zero() {
        return Err(Error::Derivation("H does not vanish at zero momentum".into()));
    }
    let d = h.momentum_degree()?;
    if d > 4 {
        return Err(Error::Derivation(format!("momentum degree {d} exceeds 4")));
    }
    Ok(())
}

/// `(dx/dt, dpi/dt) = (grad_pi H, -grad_x H)` as `[dv, dw, dpi_v, dpi_w]`.
pub fn hamilton_flow(h: &SymbolicHamiltonian, x: StereoPoint, pi: [f64; 2], p: &ModelParams) -> [f64; 4] {
    let g = h.jet(x, pi, p).grad;
    [g[2], g[3], -g[0], -g[1]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMode {
    pub eigenvalue: Complex64,
    /// Row vector `y` with `y K = lambda y`; the dynamical direction.
    pub left: [Complex64; 4],
    pub right: [Complex64; 4],
    /// Momentum part of `left` is zero relative to its norm.
    pub pi_vanishes: bool,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMatrix {
    /// `K[k][l] = d qdot_l / d q_k` at `(x*, 0)`.
    pub k: [[f64; 4]; 4],
    pub modes: Vec<KMode>,
}

impl KMatrix {
    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.k[i][i]).sum()
    }
}

pub fn k_matrix(h: &SymbolicHamiltonian, fp: &FixedPoint, p: &ModelParams) -> Result<KMatrix> {
    let jet = h.jet(fp.location, [0.0, 0.0], p);
    let hs = jet.hessian;
    // qdot = (H_pv, H_pw, -H_v, -H_w)
    let mut k = [[0.0; 4]; 4];
    for (row, kr) in k.iter_mut().enumerate() {
        kr[0] = hs[row][2];
        kr[1] = hs[row][3];
        kr[2] = -hs[row][0];
        kr[3] = -hs[row][1];
    }
    let km = DMatrix::from_fn(4, 4, |i, j| Complex64::new(k[i][j], 0.0));
    let kt = km.transpose();
    let eigs = dense::eigenvalues_complex(km.clone())?;
    let mut modes = Vec::with_capacity(4);
    for lambda in eigs {
        let l = dense::eigenvector(&kt, lambda)?;
        let r = dense::eigenvector(&km, lambda)?;
        let norm = l.norm();
        let pi_norm = (l[2].norm_sqr() + l[3].norm_sqr()).sqrt();
        modes.push(KMode {
            eigenvalue: lambda,
            left: std::array::from_fn(|i| l[i]),
            right: std::array::from_fn(|i| r[i]),
            pi_vanishes: pi_norm <= 1e-9 * norm,
            stable: lambda.re < 0.0,
        });
    }
    modes.sort_by(|a, b| a.eigenvalue.re.partial_cmp(&b.eigenvalue.re).unwrap());
    Ok(KMatrix { k, modes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_c0_is_the_on_axis_field() {
        let mf = mean_field_field();
        let on_axis = at_zero(&mf[1], &[Var::V]);
        for rep in Representation::BOTH {
            assert_eq!(printed_cubic_coefficients(rep)[0], on_axis);
        }
        assert!(at_zero(&mf[0], &[Var::V]).is_zero());
    }
}
