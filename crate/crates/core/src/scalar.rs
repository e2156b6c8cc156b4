//! Scalar abstraction shared by every measure-theoretic routine.
//!
//! All of the crate's algorithms are written against [`Scalar`]. The exact
//! instantiation ([`Rational`]) is what the verification layers use; the
//! floating-point instances exist for fast approximate exploration and use a
//! tolerance in [`Scalar::near`] instead of structural equality.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, Zero};

/// Arbitrary-precision rational, always gcd-reduced with a positive denominator.
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + Sum + Send + Sync + 'static
{
    /// Equality used by all invariant checks. Exact for rationals.
    fn near(&self, other: &Self) -> bool;

    /// `num / den` as a scalar. Panics on a zero denominator.
    fn ratio(num: i64, den: i64) -> Self;

    /// Whether this value counts as zero mass.
    fn is_null(&self) -> bool {
        self.near(&Self::zero())
    }

    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits every scalar")
    }
}

impl Scalar for BigRational {
    fn near(&self, other: &Self) -> bool {
        self == other
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

impl Scalar for Ratio<i64> {
    fn near(&self, other: &Self) -> bool {
        self == other
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Ratio::new(num, den)
    }
}

impl Scalar for f64 {
    fn near(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= 1e-9 * scale
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }
}

impl Scalar for f32 {
    fn near(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= 1e-4 * scale
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f32 / den as f32
    }
}

/// Sum of a slice of scalars.
pub fn total<S: Scalar>(values: &[S]) -> S {
    values.iter().cloned().sum()
}

/// Canonical `"p/q"` rendering; integers render with denominator 1.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`. Returns `None` on malformed input
/// or a zero denominator.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::parse_bytes(num.as_bytes(), 10)?;
    let den = BigInt::parse_bytes(den.as_bytes(), 10)?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Least common multiple of two positive integers.
pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / num_integer::gcd(a, b) * b
}
