use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational numbers.
pub type Rational = BigRational;
/// Exact Gaussian rationals.
pub type QComplex = Complex<BigRational>;
/// Complex doubles.
pub type C64 = Complex<f64>;

/// Field elements usable as matrix entries.
///
/// `EXACT` backends compare against zero exactly. The floating backend uses
/// tolerances wherever a zero test matters.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn modulus(&self) -> f64;
    /// Compare absolute values (exactly, when the backend is exact).
    fn cmp_modulus(&self, other: &Self) -> Ordering;
    fn to_c64(&self) -> C64;

    /// Zero test used for genericity conditions: exact for exact backends,
    /// `|x| <= tol * max(scale, 1)` otherwise.
    fn is_negligible(&self, scale: f64, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.modulus() <= tol * scale.max(1.0)
        }
    }
}

fn rat(num: i64, den: i64) -> BigRational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as num_traits::One>::one()
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        rat(num, den)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn modulus(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }
    fn cmp_modulus(&self, other: &Self) -> Ordering {
        self.abs().cmp(&other.abs())
    }
    fn to_c64(&self) -> C64 {
        C64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl Scalar for QComplex {
    const EXACT: bool = true;

    fn zero() -> Self {
        Complex::new(<BigRational as Zero>::zero(), <BigRational as Zero>::zero())
    }
    fn one() -> Self {
        Complex::new(<BigRational as num_traits::One>::one(), <BigRational as Zero>::zero())
    }
    fn from_i64(n: i64) -> Self {
        Complex::new(<BigRational as Scalar>::from_i64(n), <BigRational as Zero>::zero())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(rat(num, den), <BigRational as Zero>::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }
    fn cmp_modulus(&self, other: &Self) -> Ordering {
        self.norm_sqr().cmp(&other.norm_sqr())
    }
    fn to_c64(&self) -> C64 {
        C64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Scalar for C64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        C64::new(n as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        C64::new(num as f64 / den as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn cmp_modulus(&self, other: &Self) -> Ordering {
        self.norm_sqr()
            .partial_cmp(&other.norm_sqr())
            .unwrap_or(Ordering::Equal)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
}

/// Parse `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if Zero::is_zero(&d) {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Format as `"p/q"` (the denominator is always written).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
