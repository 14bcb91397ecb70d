//! Working-precision abstraction for the linear-algebra kernels.
//!
//! Two instantiations exist: machine `f64` and the double-double
//! [`TwoFloat`] (about 31 significant digits). The Liouvillian generators,
//! the banded factorization and the shift-invert solves are written once,
//! generic over [`Real`].

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

pub use twofloat::TwoFloat;

pub trait Real:
    Copy
    + Debug
    + Send
    + Sync
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    /// Short tag used in diagnostics and result records.
    const NAME: &'static str;
    /// Unit roundoff of the representation.
    const EPSILON: f64;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn to_extended(self) -> TwoFloat;
    /// Correctly rounded (to the working precision) quotient `self / rhs`.
    fn quotient(self, rhs: Self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn from_i64(x: i64) -> Self {
        Self::from_f64(x as f64)
    }
}

impl Real for f64 {
    const NAME: &'static str = "double";
    const EPSILON: f64 = f64::EPSILON;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn quotient(self, rhs: Self) -> Self {
        self / rhs
    }
    #[inline]
    fn to_extended(self) -> TwoFloat {
        TwoFloat::from(self)
    }
}

impl Real for TwoFloat {
    const NAME: &'static str = "extended";
    // 2^-104
    const EPSILON: f64 = 4.930380657631324e-32;

    #[inline]
    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }
    #[inline]
    fn sqrt(self) -> Self {
        TwoFloat::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        TwoFloat::abs(&self)
    }
    /// Three-term long division. The crate's own `Div` skips the fused
    /// residual and only delivers double accuracy.
    #[inline]
    fn quotient(self, rhs: Self) -> Self {
        let q1 = self.hi() / rhs.hi();
        let r = self - rhs * q1;
        let q2 = r.hi() / rhs.hi();
        let r = r - rhs * q2;
        let q3 = r.hi() / rhs.hi();
        TwoFloat::new_add(q1, q2) + q3
    }
    #[inline]
    fn to_extended(self) -> TwoFloat {
        self
    }
}

/// Precision mode requested by callers of the QME solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// Machine double, with automatic promotion to extended precision when
    /// the reliability checks fail.
    Double,
    /// Double-double arithmetic throughout assembly, factorization and solves.
    Extended,
}

impl Precision {
    pub fn as_str(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision mode `{other}` (expected double|extended)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_carries_more_digits_than_double() {
        let third = TwoFloat::from_f64(1.0).quotient(TwoFloat::from_f64(3.0));
        let back = third * TwoFloat::from_f64(3.0) - TwoFloat::one();
        assert!(back.to_f64().abs() < 1e-30);

        let root2 = TwoFloat::from_f64(2.0).sqrt();
        let err = root2 * root2 - TwoFloat::from_f64(2.0);
        assert!(err.to_f64().abs() < 1e-30);

        let a = TwoFloat::new_add(7.0, 3e-17);
        let b = TwoFloat::new_add(3.0, -1e-17);
        let back = a.quotient(b) * b - a;
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn precision_parses() {
        assert_eq!("double".parse::<Precision>().unwrap(), Precision::Double);
        assert_eq!("extended".parse::<Precision>().unwrap(), Precision::Extended);
        assert!("quad".parse::<Precision>().is_err());
    }
}
