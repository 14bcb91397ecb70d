//! Rational functions with a factored denominator, and complex pairs of them.

use std::fmt;

use num_traits::{One, Zero};

use super::poly::{Poly, Var, NVARS, Q};
use crate::error::{Error, Result};

/// `num / prod(f_i^k_i)`. The factors are monic, pairwise distinct and
/// assumed irreducible; after canonicalization no factor divides `num`.
#[derive(Debug, Clone)]
pub struct SymExpr {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

impl SymExpr {
    pub fn zero() -> Self {
        Self::poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::poly(Poly::one())
    }

    pub fn poly(num: Poly) -> Self {
        Self { num, den: Vec::new() }
    }

    pub fn constant(c: Q) -> Self {
        Self::poly(Poly::constant(c))
    }

    pub fn var(v: Var) -> Self {
        Self::poly(Poly::var(v))
    }

    /// `num / factor^k` for a factor assumed irreducible.
    pub fn over(num: Poly, factor: &Poly, k: u32) -> Self {
        let (f, c) = factor.monic();
        let scale = c.pow(k as i32).recip();
        Self { num: num.scale(&scale), den: vec![(f, k)] }.canonical()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> Poly {
        self.den.iter().fold(Poly::one(), |acc, (f, k)| acc.mul(&f.pow(*k)))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels factors that divide the numerator and orders the factor list.
    pub fn canonical(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        for (f, k) in self.den.iter_mut() {
            while *k > 0 {
                match self.num.div_exact(f) {
                    Some(q) => {
                        self.num = q;
                        *k -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, k)| *k > 0);
        self.den.sort_by(|a, b| a.0.leading().map(|t| *t.0).cmp(&b.0.leading().map(|t| *t.0)).then(a.1.cmp(&b.1)));
        self
    }

    fn exponent_of(&self, f: &Poly) -> u32 {
        self.den.iter().find(|(g, _)| g == f).map_or(0, |(_, k)| *k)
    }

    /// Least common denominator of the two, with the cofactors to apply.
    fn common(&self, o: &Self) -> (Vec<(Poly, u32)>, Poly, Poly) {
        let mut den: Vec<(Poly, u32)> = self.den.clone();
        for (f, k) in &o.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some(e) => e.1 = e.1.max(*k),
                None => den.push((f.clone(), *k)),
            }
        }
        let cof = |e: &Self| den.iter().fold(Poly::one(), |acc, (f, k)| acc.mul(&f.pow(k - e.exponent_of(f))));
        let (a, b) = (cof(self), cof(o));
        (den, a, b)
    }

    pub fn add(&self, o: &Self) -> Self {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let (den, a, b) = self.common(o);
        Self { num: self.num.mul(&a).add(&o.num.mul(&b)), den }.canonical()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self { num: self.num.scale(k), den: self.den.clone() }.canonical()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut den = self.den.clone();
        for (f, k) in &o.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some(e) => e.1 += k,
                None => den.push((f.clone(), *k)),
            }
        }
        Self { num: self.num.mul(&o.num), den }.canonical()
    }

    /// Divides by `factor^k`.
    pub fn div_factor(&self, factor: &Poly, k: u32) -> Self {
        self.mul(&Self::over(Poly::one(), factor, k))
    }

    pub fn derivative(&self, v: Var) -> Self {
        // d(n / prod f^k) = (n' prod f - n sum k f' prod_{g != f} g) / prod f^(k+1)
        let prod = self.den.iter().fold(Poly::one(), |acc, (f, _)| acc.mul(f));
        let mut num = self.num.derivative(v).mul(&prod);
        for (i, (f, k)) in self.den.iter().enumerate() {
            let df = f.derivative(v);
            if df.is_zero() {
                continue;
            }
            let others = self
                .den
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(Poly::one(), |acc, (_, (g, _))| acc.mul(g));
            num = num.sub(&self.num.mul(&df).mul(&others).scale(&Q::from_integer((*k).into())));
        }
        let den = self.den.iter().map(|(f, k)| (f.clone(), k + 1)).collect();
        Self { num, den }.canonical()
    }

    /// Substitutes `v -> s * v`. Factors that change are re-normalized.
    pub fn rescale_var(&self, v: Var, s: &Q) -> Self {
        let mut out = Self::poly(self.num.rescale_var(v, s));
        for (f, k) in &self.den {
            let g = f.rescale_var(v, s);
            if g.is_zero() {
                // the factor vanishes identically; keep the poly as the caller
                // will see a division by zero on evaluation
                out.den.push((g, *k));
            } else {
                out = out.div_factor(&g, *k);
            }
        }
        out.canonical()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.num.contains(v) || self.den.iter().any(|(f, _)| f.contains(v))
    }

    /// Coefficient of `v^k` when the denominator does not involve `v`.
    pub fn coefficient(&self, v: Var, k: u8) -> Result<Self> {
        if self.den.iter().any(|(f, _)| f.contains(v)) {
            return Err(Error::Derivation(format!("denominator depends on {}", v.name())));
        }
        Ok(Self { num: self.num.coefficient(v, k), den: self.den.clone() }.canonical())
    }

    pub fn degree_in(&self, v: Var) -> Option<u8> {
        self.num.degree_in(v)
    }

    /// `lim_{J -> inf}` as the ratio of the leading `J` coefficients.
    pub fn limit_j_infinity(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Ok(Self::zero());
        }
        let nd = self.num.degree_in(Var::J).unwrap_or(0);
        let mut dd = 0u32;
        let mut rest = Vec::new();
        for (f, k) in &self.den {
            match f.degree_in(Var::J).unwrap_or(0) {
                0 => rest.push((f.clone(), *k)),
                1 if *f == Poly::var(Var::J) => dd += k,
                _ => return Err(Error::Consistency("denominator factor mixes J with other variables".into())),
            }
        }
        let nd = nd as u32;
        if nd > dd {
            return Err(Error::Consistency(format!("J limit diverges: numerator degree {nd} over denominator degree {dd}")));
        }
        if nd < dd {
            return Ok(Self::zero());
        }
        Ok(Self { num: self.num.coefficient(Var::J, nd as u8), den: rest }.canonical())
    }

    pub fn eval(&self, x: &[f64; NVARS]) -> f64 {
        let d: f64 = self.den.iter().map(|(f, k)| f.eval(x).powi(*k as i32)).product();
        self.num.eval(x) / d
    }

    /// Exact value; `None` where the denominator vanishes.
    pub fn eval_exact(&self, x: &[Q; NVARS]) -> Option<Q> {
        let mut d = Q::one();
        for (f, k) in &self.den {
            d *= f.eval_exact(x).pow(*k as i32);
        }
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_exact(x) / d)
    }
}

impl PartialEq for SymExpr {
    /// Cross-multiplied polynomial identity.
    fn eq(&self, o: &Self) -> bool {
        let (_, a, b) = self.common(o);
        self.num.mul(&a) == o.num.mul(&b)
    }
}

impl fmt::Display for SymExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|(g, k)| {
                let base = if g.len() == 1 { g.to_string() } else { format!("({g})") };
                if *k == 1 {
                    base
                } else {
                    format!("{base}^{k}")
                }
            })
            .collect();
        write!(f, "({}) / ({})", self.num, den.join("*"))
    }
}

/// `re + i im` with both parts rational functions.
#[derive(Debug, Clone, PartialEq)]
pub struct CExpr {
    pub re: SymExpr,
    pub im: SymExpr,
}

impl CExpr {
    pub fn new(re: SymExpr, im: SymExpr) -> Self {
        Self { re, im }
    }

    pub fn real(re: SymExpr) -> Self {
        Self { re, im: SymExpr::zero() }
    }

    pub fn zero() -> Self {
        Self::real(SymExpr::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self { re: self.re.scale(k), im: self.im.scale(k) }
    }

    /// Multiplies by a real expression.
    pub fn mul_real(&self, r: &SymExpr) -> Self {
        Self { re: self.re.mul(r), im: self.im.mul(r) }
    }

    pub fn times_i(&self) -> Self {
        Self { re: self.im.neg(), im: self.re.clone() }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: self.im.neg() }
    }
}
