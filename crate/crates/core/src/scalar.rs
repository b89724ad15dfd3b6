//! Scalar coefficients: exact big rationals (the default) and `f64` for the
//! float-mode matrix models.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar, the default coefficient field.
pub type Rat = BigRational;

/// Construct an exact rational from an integer pair. Panics on `den == 0`;
/// callers validate user input before reaching this.
pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Parse "p/q" or "p" into an exact rational.
pub fn parse_rat(text: &str) -> crate::Result<Rat> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| crate::Error::Parse(format!("bad rational numerator {num:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| crate::Error::Parse(format!("bad rational denominator {den:?}")))?;
    if d.is_zero() {
        return Err(crate::Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(n, d))
}

/// Scalar field for coefficients and traces. Implemented by exact rationals
/// and by `f64` (float mode).
pub trait Scalar: Clone + PartialEq + std::fmt::Debug + std::fmt::Display + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Magnitude as f64, for deviation reports.
    fn abs_f64(&self) -> f64;
    /// True when the scalar type is exact; equality is then literal.
    const EXACT: bool;
}

impl Scalar for Rat {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_int(n: i64) -> Self {
        rat_int(n)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        rat(num, den)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_f64(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    const EXACT: bool = true;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs_f64(&self) -> f64 {
        self.abs()
    }
    const EXACT: bool = false;
}

/// Equality mode used by models: exact comparison or absolute tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EqMode {
    Exact,
    Abs(f64),
}

impl EqMode {
    pub fn eq<S: Scalar>(&self, a: &S, b: &S) -> bool {
        match self {
            EqMode::Exact => a == b,
            EqMode::Abs(tol) => a.sub(b).abs_f64() <= *tol,
        }
    }

    pub fn is_zero<S: Scalar>(&self, a: &S) -> bool {
        match self {
            EqMode::Exact => a.is_zero(),
            EqMode::Abs(tol) => a.abs_f64() <= *tol,
        }
    }
}

/// Default tolerance of float mode.
pub const FLOAT_TOL: f64 = 1e-10;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rat("2/3").unwrap(), rat(2, 3));
        assert_eq!(parse_rat("-7").unwrap(), rat_int(-7));
        assert_eq!(parse_rat(" 4 / 6 ").unwrap(), rat(2, 3));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn eq_modes() {
        assert!(EqMode::Exact.eq(&rat(1, 3), &rat(2, 6)));
        assert!(!EqMode::Exact.eq(&rat(1, 3), &rat(1, 4)));
        assert!(EqMode::Abs(1e-10).eq(&0.3, &(0.1 + 0.2)));
    }
}
