//! Exact integer scalars.
//!
//! All quadruple and matrix algebra is written against [`Scalar`], which is
//! implemented for `i64`, `i128` and [`BigInt`]. The fixed-width types use
//! checked arithmetic: an overflow surfaces as [`Error::Overflow`] rather
//! than wrapping, and callers that need unbounded range either pick `BigInt`
//! up front or retry with it (see [`crate::group::word_to_matrix`]).

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

use crate::error::{Error, Result};

/// An exact signed integer type usable as a curvature or matrix entry.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + Ord
    + Hash
    + Integer
    + Signed
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Lossless conversion from a small literal.
    fn lit(v: i64) -> Self {
        Self::from_i64(v).expect("every scalar type holds an i64")
    }

    fn add_c(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(rhs).ok_or(Error::Overflow)
    }

    fn sub_c(&self, rhs: &Self) -> Result<Self> {
        self.checked_sub(rhs).ok_or(Error::Overflow)
    }

    fn mul_c(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(rhs).ok_or(Error::Overflow)
    }

    /// `2 * self`, checked.
    fn double_c(&self) -> Result<Self> {
        self.add_c(self)
    }

    fn to_big(&self) -> BigInt;
}

impl Scalar for i64 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for i128 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Sum of a slice with overflow checking.
pub fn checked_sum<T: Scalar>(values: &[T]) -> Result<T> {
    values.iter().try_fold(T::zero(), |acc, v| acc.add_c(v))
}

/// Integer square root of a nonnegative scalar, if it is a perfect square.
pub fn exact_sqrt<T: Scalar>(v: &T) -> Option<T> {
    if v.is_negative() {
        return None;
    }
    let r = v.to_big().sqrt();
    if &r * &r == v.to_big() {
        big_to::<T>(&r)
    } else {
        None
    }
}

pub(crate) fn big_to<T: Scalar>(v: &BigInt) -> Option<T> {
    if let Some(x) = v.to_i64() {
        return Some(T::lit(x));
    }
    if let Some(x) = v.to_i128() {
        if let Some(t) = T::from_i128(x) {
            return Some(t);
        }
    }
    let s = v.to_string();
    let mut acc = T::zero();
    let ten = T::lit(10);
    let neg = s.starts_with('-');
    for ch in s.trim_start_matches('-').chars() {
        let d = T::lit(ch.to_digit(10)? as i64);
        acc = acc.checked_mul(&ten)?.checked_add(&d)?;
    }
    Some(if neg { -acc } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_ops_report_overflow() {
        assert!(matches!(i64::MAX.add_c(&1), Err(Error::Overflow)));
        assert!(matches!(i64::MIN.sub_c(&1), Err(Error::Overflow)));
        assert_eq!(3i64.double_c().unwrap(), 6);
        let big = BigInt::from(i64::MAX);
        assert_eq!(big.add_c(&BigInt::from(1)).unwrap(), BigInt::from(i64::MAX) + 1);
    }

    #[test]
    fn exact_sqrt_detects_squares() {
        assert_eq!(exact_sqrt(&16i64), Some(4));
        assert_eq!(exact_sqrt(&0i64), Some(0));
        assert_eq!(exact_sqrt(&15i64), None);
        assert_eq!(exact_sqrt(&-4i64), None);
        let sq = BigInt::from(10u64).pow(40);
        assert_eq!(exact_sqrt(&sq), Some(BigInt::from(10u64).pow(20)));
    }

    #[test]
    fn big_to_narrows_or_fails() {
        assert_eq!(big_to::<i64>(&BigInt::from(-42)), Some(-42));
        assert_eq!(big_to::<i64>(&(BigInt::from(i64::MAX) + 1)), None);
        assert_eq!(
            big_to::<i128>(&(BigInt::from(i64::MAX) + 1)),
            Some(i64::MAX as i128 + 1)
        );
    }
}
