//! Exact rational and dyadic arithmetic.
//!
//! Every quantity handled by the crate (redundancy index, scaled digit
//! boundaries, truncated operands, partial remainders) is an exact rational,
//! and most are dyadic. Arithmetic is carried out on 128-bit integers with
//! overflow checks; an overflow is reported as [`ArithError::Overflow`] by the
//! `checked_*` methods and panics in the operator impls. Nothing wraps.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("division by zero")]
    DivisionByZero,
}

/// `⌊n / d⌋` with the mathematical convention on negatives.
///
/// Panics if `d == 0`.
#[inline]
pub fn floor_div(n: i128, d: i128) -> i128 {
    let q = n / d;
    if (n % d != 0) && ((n < 0) != (d < 0)) {
        q - 1
    } else {
        q
    }
}

/// `⌈n / d⌉` with the mathematical convention on negatives.
///
/// Panics if `d == 0`.
#[inline]
pub fn ceil_div(n: i128, d: i128) -> i128 {
    let q = n / d;
    if (n % d != 0) && ((n < 0) == (d < 0)) {
        q + 1
    } else {
        q
    }
}

/// `2^e` as an `i128`, checked.
#[inline]
pub fn pow2(e: u32) -> Result<i128, ArithError> {
    if e >= 127 {
        Err(ArithError::Overflow)
    } else {
        Ok(1i128 << e)
    }
}

/// `v · 2^e`, checked.
#[inline]
pub fn shl_checked(v: i128, e: u32) -> Result<i128, ArithError> {
    v.checked_mul(pow2(e)?).ok_or(ArithError::Overflow)
}

/// An exact rational number in lowest terms with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));
    pub const HALF: Rational = Rational(Ratio::new_raw(1, 2));

    pub fn new(numer: i128, denom: i128) -> Result<Self, ArithError> {
        if denom == 0 {
            return Err(ArithError::DivisionByZero);
        }
        // Ratio::new negates both parts when the denominator is negative.
        if numer == i128::MIN || denom == i128::MIN {
            return Err(ArithError::Overflow);
        }
        Ok(Rational(Ratio::new(numer, denom)))
    }

    pub const fn from_int(n: i128) -> Self {
        Rational(Ratio::new_raw(n, 1))
    }

    /// `2^e` for any signed exponent.
    pub fn pow2(e: i32) -> Result<Self, ArithError> {
        if e >= 0 {
            Ok(Self::from_int(pow2(e as u32)?))
        } else {
            Self::new(1, pow2(e.unsigned_abs())?)
        }
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.0.checked_add(&rhs.0).map(Rational).ok_or(ArithError::Overflow)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.0.checked_sub(&rhs.0).map(Rational).ok_or(ArithError::Overflow)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.0.checked_mul(&rhs.0).map(Rational).ok_or(ArithError::Overflow)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ArithError> {
        if rhs.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        self.0.checked_div(&rhs.0).map(Rational).ok_or(ArithError::Overflow)
    }

    /// `self · 2^e`, exact.
    pub fn mul_pow2(&self, e: i32) -> Result<Self, ArithError> {
        self.checked_mul(&Self::pow2(e)?)
    }

    pub fn floor(&self) -> i128 {
        floor_div(self.numer(), self.denom())
    }

    pub fn ceil(&self) -> i128 {
        ceil_div(self.numer(), self.denom())
    }

    pub fn is_integer(&self) -> bool {
        self.denom() == 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Lossy conversion, for display and plotting only.
    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl From<i128> for Rational {
    fn from(n: i128) -> Self {
        Self::from_int(n)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_int(n as i128)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Self) -> Rational {
        self.checked_add(&rhs).expect("rational addition overflowed")
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Self) -> Rational {
        self.checked_sub(&rhs).expect("rational subtraction overflowed")
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Self) -> Rational {
        self.checked_mul(&rhs).expect("rational multiplication overflowed")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// `mantissa · 2^exponent`, kept canonical: the mantissa is odd, or the value
/// is zero with exponent 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: i128,
    exponent: i32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { mantissa: 0, exponent: 0 };

    pub fn new(mantissa: i128, exponent: i32) -> Self {
        if mantissa == 0 {
            return Self::ZERO;
        }
        let tz = mantissa.trailing_zeros();
        Dyadic { mantissa: mantissa >> tz, exponent: exponent + tz as i32 }
    }

    pub fn from_int(n: i128) -> Self {
        Self::new(n, 0)
    }

    pub fn mantissa(&self) -> i128 {
        self.mantissa
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa < 0
    }

    pub fn abs(&self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// Number of fractional bits needed to represent the value.
    pub fn fractional_bits(&self) -> u32 {
        if self.exponent < 0 {
            self.exponent.unsigned_abs()
        } else {
            0
        }
    }

    /// `self · 2^e`, always exact.
    pub fn shl(&self, e: i32) -> Self {
        if self.is_zero() {
            return *self;
        }
        Dyadic { mantissa: self.mantissa, exponent: self.exponent + e }
    }

    /// Mantissa re-expressed over `2^exponent` for an exponent no greater
    /// than the canonical one.
    fn mantissa_at(&self, exponent: i32) -> Result<i128, ArithError> {
        if self.is_zero() {
            return Ok(0);
        }
        debug_assert!(exponent <= self.exponent);
        shl_checked(self.mantissa, (self.exponent - exponent) as u32)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ArithError> {
        let e = self.exponent.min(rhs.exponent);
        let m = self.mantissa_at(e)?.checked_add(rhs.mantissa_at(e)?).ok_or(ArithError::Overflow)?;
        Ok(Self::new(m, e))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, ArithError> {
        self.checked_add(&-*rhs)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ArithError> {
        let m = self.mantissa.checked_mul(rhs.mantissa).ok_or(ArithError::Overflow)?;
        Ok(Self::new(m, self.exponent + rhs.exponent))
    }

    pub fn checked_mul_int(&self, n: i128) -> Result<Self, ArithError> {
        self.checked_mul(&Self::from_int(n))
    }

    pub fn floor(&self) -> Result<i128, ArithError> {
        if self.exponent >= 0 {
            shl_checked(self.mantissa, self.exponent as u32)
        } else {
            let e = self.exponent.unsigned_abs();
            if e >= 127 {
                return Ok(if self.mantissa < 0 { -1 } else { 0 });
            }
            Ok(self.mantissa >> e)
        }
    }

    pub fn to_rational(&self) -> Result<Rational, ArithError> {
        Rational::from_int(self.mantissa).mul_pow2(self.exponent)
    }

    /// Exact conversion; `None` when the denominator is not a power of two.
    pub fn from_rational(r: &Rational) -> Option<Self> {
        let den = r.denom();
        if den.count_ones() != 1 {
            return None;
        }
        Some(Self::new(r.numer(), -(den.trailing_zeros() as i32)))
    }

    pub fn to_f64(&self) -> f64 {
        self.mantissa as f64 * 2f64.powi(self.exponent)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -self.mantissa, exponent: self.exponent }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.checked_sub(other) {
            Ok(diff) => diff.mantissa.cmp(&0),
            Err(_) => self
                .to_rational()
                .and_then(|a| other.to_rational().map(|b| a.cmp(&b)))
                .expect("dyadic comparison out of range"),
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_rational() {
            Ok(r) => write!(f, "{}", r),
            Err(_) => write!(f, "{:?}", self),
        }
    }
}
