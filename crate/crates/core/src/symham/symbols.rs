//! Coherent-state images of the spin operators after the momentum
//! substitution `d/dx -> sigma J pi`.

use serde::{Deserialize, Serialize};

use super::expr::{CExpr, SymExpr};
use super::poly::{q, qr, Poly, Var};
use crate::instanton::Representation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpinOp {
    Plus,
    Minus,
    Z,
}

impl SpinOp {
    pub fn dagger(self) -> Self {
        match self {
            SpinOp::Plus => SpinOp::Minus,
            SpinOp::Minus => SpinOp::Plus,
            SpinOp::Z => SpinOp::Z,
        }
    }
}

/// Whether the operator multiplies the projector from the left or the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Sign of the momentum substitution: `-J pi` for H, `+J pi` for P.
pub fn momentum_sign(rep: Representation) -> i64 {
    match rep {
        Representation::Husimi => -1,
        Representation::GlauberP => 1,
    }
}

/// `v^2 + w^2 + 1`
pub fn stereo_norm() -> Poly {
    Poly::var(Var::V).pow(2).add(&Poly::var(Var::W).pow(2)).add(&Poly::one())
}

fn left_symbol(op: SpinOp, rep: Representation) -> CExpr {
    let s = q(momentum_sign(rep));
    let j = Poly::var(Var::J);
    let (v, w) = (Poly::var(Var::V), Poly::var(Var::W));
    let r = stereo_norm();
    // sigma J (pi_v + i pi_w)
    let d = CExpr::new(
        SymExpr::poly(j.mul(&Poly::var(Var::PiV)).scale(&s)),
        SymExpr::poly(j.mul(&Poly::var(Var::PiW)).scale(&s)),
    );
    let half = qr(1, 2);
    match op {
        SpinOp::Plus => {
            let pos = CExpr::new(
                SymExpr::over(j.mul(&v).scale(&q(4)), &r, 1),
                SymExpr::over(j.mul(&w).scale(&q(4)), &r, 1),
            );
            d.add(&pos).scale(&half)
        }
        SpinOp::Minus => {
            let vw = CExpr::new(SymExpr::poly(v.clone()), SymExpr::poly(w.neg()));
            let pos = CExpr::new(
                SymExpr::over(j.mul(&v).scale(&q(4)), &r, 1),
                SymExpr::over(j.mul(&w).scale(&q(-4)), &r, 1),
            );
            vw.mul(&vw).mul(&d).scale(&q(-1)).add(&pos).scale(&half)
        }
        SpinOp::Z => {
            let vw = CExpr::new(SymExpr::poly(v.clone()), SymExpr::poly(w.neg()));
            let m = v.pow(2).add(&w.pow(2)).sub(&Poly::one());
            let pos = CExpr::real(SymExpr::over(j.mul(&m).scale(&q(2)), &r, 1));
            vw.mul(&d).add(&pos).scale(&half)
        }
    }
}

/// Symbol of `op` acting on `|x><x|` from `side`: the left image, or the
/// complex conjugate of the left image of the adjoint.
pub fn spin_operator_symbol(op: SpinOp, side: Side, rep: Representation) -> CExpr {
    match side {
        Side::Left => left_symbol(op, rep),
        Side::Right => left_symbol(op.dagger(), rep).conj(),
    }
}

/// Symbol of an operator product. After the substitution all symbols
/// commute, so the product is a plain product in either order.
pub fn product_symbol(ops: &[SpinOp], side: Side, rep: Representation) -> CExpr {
    ops.iter().fold(CExpr::real(SymExpr::one()), |acc, &o| acc.mul(&spin_operator_symbol(o, side, rep)))
}

pub fn adjoint(ops: &[SpinOp]) -> Vec<SpinOp> {
    ops.iter().rev().map(|o| o.dagger()).collect()
}
