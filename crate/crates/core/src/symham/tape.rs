//! Flat instruction tapes for evaluating a batch of rational expressions.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use super::expr::SymExpr;
use super::poly::{Monomial, Poly, Var, NVARS};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Instr {
    Input(usize),
    Const(f64),
    Add(u32, u32),
    Mul(u32, u32),
    Div(u32, u32),
}

/// Straight-line program; every instruction writes its own register.
#[derive(Debug, Clone, PartialEq)]
pub struct Tape {
    instrs: Vec<Instr>,
    outputs: Vec<u32>,
}

struct Builder {
    instrs: Vec<Instr>,
    monomials: HashMap<Monomial, u32>,
    consts: HashMap<u64, u32>,
    polys: Vec<(Poly, u32)>,
    powers: HashMap<(u32, u32), u32>,
}

impl Builder {
    fn push(&mut self, i: Instr) -> u32 {
        self.instrs.push(i);
        (self.instrs.len() - 1) as u32
    }

    fn constant(&mut self, c: f64) -> u32 {
        if let Some(&r) = self.consts.get(&c.to_bits()) {
            return r;
        }
        let r = self.push(Instr::Const(c));
        self.consts.insert(c.to_bits(), r);
        r
    }

    fn monomial(&mut self, m: Monomial) -> u32 {
        if let Some(&r) = self.monomials.get(&m) {
            return r;
        }
        let r = match (0..NVARS).find(|&i| m.0[i] > 0) {
            None => self.constant(1.0),
            Some(i) => {
                let mut rest = m;
                rest.0[i] -= 1;
                let input = self.monomials[&Monomial::var(Var::ALL[i], 1)];
                if rest.degree() == 0 {
                    input
                } else {
                    let a = self.monomial(rest);
                    self.push(Instr::Mul(a, input))
                }
            }
        };
        self.monomials.insert(m, r);
        r
    }

    fn poly(&mut self, p: &Poly) -> u32 {
        if let Some((_, r)) = self.polys.iter().find(|(q, _)| q == p) {
            return *r;
        }
        let mut acc: Option<u32> = None;
        for (m, c) in p.terms() {
            let c = c.to_f64().unwrap_or(f64::NAN);
            let t = if m.degree() == 0 {
                self.constant(c)
            } else {
                let mr = self.monomial(*m);
                if c == 1.0 {
                    mr
                } else {
                    let cr = self.constant(c);
                    self.push(Instr::Mul(cr, mr))
                }
            };
            acc = Some(match acc {
                None => t,
                Some(a) => self.push(Instr::Add(a, t)),
            });
        }
        let r = match acc {
            Some(r) => r,
            None => self.constant(0.0),
        };
        self.polys.push((p.clone(), r));
        r
    }

    fn power(&mut self, base: u32, k: u32) -> u32 {
        if k == 1 {
            return base;
        }
        if let Some(&r) = self.powers.get(&(base, k)) {
            return r;
        }
        let lower = self.power(base, k - 1);
        let r = self.push(Instr::Mul(lower, base));
        self.powers.insert((base, k), r);
        r
    }

    fn expr(&mut self, e: &SymExpr) -> u32 {
        let n = self.poly(e.numerator());
        let mut den: Option<u32> = None;
        for (f, k) in e.denominator_factors() {
            let fr = self.poly(f);
            let pr = self.power(fr, *k);
            den = Some(match den {
                None => pr,
                Some(d) => self.push(Instr::Mul(d, pr)),
            });
        }
        match den {
            None => n,
            Some(d) => self.push(Instr::Div(n, d)),
        }
    }
}

impl Tape {
    pub fn compile(exprs: &[SymExpr]) -> Self {
        let mut b = Builder {
            instrs: Vec::new(),
            monomials: HashMap::new(),
            consts: HashMap::new(),
            polys: Vec::new(),
            powers: HashMap::new(),
        };
        for i in 0..NVARS {
            let r = b.push(Instr::Input(i));
            b.monomials.insert(Monomial::var(Var::ALL[i], 1), r);
        }
        let outputs = exprs.iter().map(|e| b.expr(e)).collect();
        Tape { instrs: b.instrs, outputs }
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Evaluates all outputs at `x` into `out`.
    pub fn eval_into(&self, x: &[f64; NVARS], regs: &mut Vec<f64>, out: &mut [f64]) {
        regs.clear();
        regs.reserve(self.instrs.len());
        for ins in &self.instrs {
            let v = match *ins {
                Instr::Input(i) => x[i],
                Instr::Const(c) => c,
                Instr::Add(a, b) => regs[a as usize] + regs[b as usize],
                Instr::Mul(a, b) => regs[a as usize] * regs[b as usize],
                Instr::Div(a, b) => regs[a as usize] / regs[b as usize],
            };
            regs.push(v);
        }
        for (o, &r) in out.iter_mut().zip(&self.outputs) {
            *o = regs[r as usize];
        }
    }

    pub fn eval(&self, x: &[f64; NVARS]) -> Vec<f64> {
        let mut regs = Vec::new();
        let mut out = vec![0.0; self.outputs.len()];
        self.eval_into(x, &mut regs, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symham::poly::q;

    #[test]
    fn tape_matches_direct_evaluation() {
        let r = Poly::var(Var::V).pow(2).add(&Poly::var(Var::W).pow(2)).add(&Poly::one());
        let num = Poly::var(Var::PiW).pow(3).scale(&q(3)).sub(&Poly::var(Var::V).mul(&Poly::var(Var::BigGamma)));
        let e = SymExpr::over(num, &r, 2);
        let d = e.derivative(Var::W);
        let tape = Tape::compile(&[e.clone(), d.clone(), SymExpr::zero()]);
        let x = [0.4, -1.3, 0.2, 0.9, 0.0, 0.25, 1.0, 9.0];
        let out = tape.eval(&x);
        assert!((out[0] - e.eval(&x)).abs() < 1e-14);
        assert!((out[1] - d.eval(&x)).abs() < 1e-13);
        assert_eq!(out[2], 0.0);
    }
}
