//! Sparse multivariate polynomials with rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Number of variables every polynomial is defined over.
pub const NVARS: usize = 8;

/// Variable slots, in monomial-order priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    V = 0,
    W = 1,
    PiV = 2,
    PiW = 3,
    J = 4,
    Omega = 5,
    Gamma = 6,
    BigGamma = 7,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::V, Var::W, Var::PiV, Var::PiW, Var::J, Var::Omega, Var::Gamma, Var::BigGamma];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::V => "v",
            Var::W => "w",
            Var::PiV => "pi_v",
            Var::PiW => "pi_w",
            Var::J => "J",
            Var::Omega => "Omega",
            Var::Gamma => "gamma",
            Var::BigGamma => "Gamma",
        }
    }
}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u8; NVARS]);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn var(v: Var, e: u8) -> Self {
        let mut m = [0; NVARS];
        m[v.index()] = e;
        Monomial(m)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Monomial(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }

    pub fn divides(&self, o: &Self) -> bool {
        (0..NVARS).all(|i| self.0[i] <= o.0[i])
    }

    /// `o / self`, assuming `self` divides `o`.
    pub fn quotient_of(&self, o: &Self) -> Self {
        Monomial(std::array::from_fn(|i| o.0[i] - self.0[i]))
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Polynomial in the variables of [`Var`]; terms are kept with nonzero
/// coefficients only, so structural equality is polynomial equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Q) -> Self {
        Self::term(c, Monomial::default())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(q(n))
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn var(v: Var) -> Self {
        Self::term(Q::one(), Monomial::var(v, 1))
    }

    pub fn term(c: Q, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    /// Largest term in graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Monomial::default()).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, -c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                r.add_term(ma.mul(mb), ca * cb);
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    pub fn derivative(&self, v: Var) -> Self {
        let i = v.index();
        let mut r = Self::zero();
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e > 0 {
                let mut mm = *m;
                mm.0[i] -= 1;
                r.add_term(mm, c * q(e as i64));
            }
        }
        r
    }

    pub fn degree_in(&self, v: Var) -> Option<u8> {
        self.terms.keys().map(|m| m.0[v.index()]).max()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.degree_in(v).is_some_and(|d| d > 0)
    }

    /// Coefficient of `v^k`, as a polynomial free of `v`.
    pub fn coefficient(&self, v: Var, k: u8) -> Self {
        let i = v.index();
        let mut r = Self::zero();
        for (m, c) in &self.terms {
            if m.0[i] == k {
                let mut mm = *m;
                mm.0[i] = 0;
                r.add_term(mm, c.clone());
            }
        }
        r
    }

    /// Substitutes `v -> s * v` for a rational scale `s` (zero and sign flips included).
    pub fn rescale_var(&self, v: Var, s: &Q) -> Self {
        let i = v.index();
        let mut r = Self::zero();
        for (m, c) in &self.terms {
            let e = m.0[i];
            let mut k = c.clone();
            for _ in 0..e {
                k *= s;
            }
            r.add_term(*m, k);
        }
        r
    }

    /// Exact quotient by `d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (ld, lc) = d.leading()?;
        let (ld, lc) = (*ld, lc.clone());
        let mut rem = self.clone();
        let mut quo = Self::zero();
        while let Some((lm, c)) = rem.leading() {
            // a single divisor is a Groebner basis of its ideal, so a leading
            // term that is not reducible means d does not divide
            if !ld.divides(lm) {
                return None;
            }
            let t = Self::term(c / &lc, ld.quotient_of(lm));
            rem = rem.sub(&t.mul(d));
            quo = quo.add(&t);
        }
        Some(quo)
    }

    pub fn eval(&self, x: &[f64; NVARS]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (i, &e) in m.0.iter().enumerate() {
                    if e > 0 {
                        t *= x[i].powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    pub fn eval_exact(&self, x: &[Q; NVARS]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &x[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Makes the leading coefficient one; returns the removed factor.
    pub fn monic(&self) -> (Self, Q) {
        match self.leading() {
            None => (Self::zero(), Q::one()),
            Some((_, c)) => {
                let c = c.clone();
                (self.scale(&c.recip()), c)
            }
        }
    }
}

impl fmt::Display for Poly {
    /// Terms in descending graded-lex order, e.g. `3/4*v^2*w - Gamma + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mut factors = Vec::new();
            for v in Var::ALL {
                match m.0[v.index()] {
                    0 => {}
                    1 => factors.push(v.name().to_string()),
                    e => factors.push(format!("{}^{}", v.name(), e)),
                }
            }
            if factors.is_empty() || !a.is_one() {
                factors.insert(0, a.to_string());
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r() -> Poly {
        Poly::var(Var::V).pow(2).add(&Poly::var(Var::W).pow(2)).add(&Poly::one())
    }

    #[test]
    fn grlex_order() {
        let a = Monomial::var(Var::V, 1);
        let b = Monomial::var(Var::W, 2);
        assert!(a < b);
        let c = Monomial::var(Var::W, 1);
        assert!(a > c);
    }

    #[test]
    fn exact_division_round_trip() {
        let p = Poly::var(Var::PiW).mul(&Poly::var(Var::J)).add(&Poly::int(3));
        let prod = p.mul(&r()).mul(&r());
        assert_eq!(prod.div_exact(&r()).unwrap(), p.mul(&r()));
        assert!(p.div_exact(&r()).is_none());
        assert!(prod.add(&Poly::one()).div_exact(&r()).is_none());
    }

    #[test]
    fn derivative_and_coefficients() {
        let p = r().pow(2);
        let dp = p.derivative(Var::V);
        assert_eq!(dp, Poly::int(4).mul(&Poly::var(Var::V)).mul(&r()));
        assert_eq!(p.degree_in(Var::W), Some(4));
        assert_eq!(p.coefficient(Var::W, 4), Poly::one());
        assert_eq!(p.rescale_var(Var::V, &q(-1)), p);
    }

    #[test]
    fn display_is_readable() {
        let p = Poly::var(Var::V).pow(2).scale(&qr(3, 4)).sub(&Poly::var(Var::BigGamma)).add(&Poly::one());
        assert_eq!(p.to_string(), "3/4*v^2 - Gamma + 1");
    }
}
