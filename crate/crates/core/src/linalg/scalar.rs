//! Integer scalars for the elimination kernels.
//!
//! The kernels are written once over [`Scalar`] and run first on `i128` with
//! checked arithmetic; any overflow aborts the attempt and the caller reruns
//! the same kernel on [`BigInt`].

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Raised by the `i128` fast path when an intermediate leaves the range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow;

pub trait Scalar: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_big(v: &BigInt) -> Result<Self, Overflow>;
    fn to_big(&self) -> BigInt;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn cmp_abs(&self, other: &Self) -> Ordering;
    fn is_abs_one(&self) -> bool;
    fn add(&self, o: &Self) -> Result<Self, Overflow>;
    fn sub(&self, o: &Self) -> Result<Self, Overflow>;
    fn mul(&self, o: &Self) -> Result<Self, Overflow>;
    fn neg(&self) -> Result<Self, Overflow>;
    /// Quotient rounded toward zero.
    fn quot(&self, o: &Self) -> Result<Self, Overflow>;
    fn rem(&self, o: &Self) -> Self;
    /// `self - q * o`, the fused step used by every row and column operation.
    fn sub_mul(&self, q: &Self, o: &Self) -> Result<Self, Overflow> {
        self.sub(&q.mul(o)?)
    }
}

impl Scalar for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_big(v: &BigInt) -> Result<Self, Overflow> {
        v.to_i128().ok_or(Overflow)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn is_abs_one(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn add(&self, o: &Self) -> Result<Self, Overflow> {
        self.checked_add(*o).ok_or(Overflow)
    }
    fn sub(&self, o: &Self) -> Result<Self, Overflow> {
        self.checked_sub(*o).ok_or(Overflow)
    }
    fn mul(&self, o: &Self) -> Result<Self, Overflow> {
        self.checked_mul(*o).ok_or(Overflow)
    }
    fn neg(&self) -> Result<Self, Overflow> {
        self.checked_neg().ok_or(Overflow)
    }
    fn quot(&self, o: &Self) -> Result<Self, Overflow> {
        self.checked_div(*o).ok_or(Overflow)
    }
    fn rem(&self, o: &Self) -> Self {
        self.checked_rem(*o).unwrap_or(0)
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_big(v: &BigInt) -> Result<Self, Overflow> {
        Ok(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn is_abs_one(&self) -> bool {
        self.magnitude().is_one()
    }
    fn add(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self * o)
    }
    fn neg(&self) -> Result<Self, Overflow> {
        Ok(-self)
    }
    fn quot(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self / o)
    }
    fn rem(&self, o: &Self) -> Self {
        self % o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i128_overflow_is_reported() {
        assert_eq!(i128::MAX.add(&1), Err(Overflow));
        assert_eq!(i128::MIN.neg(), Err(Overflow));
        assert_eq!(3i128.sub_mul(&2, &5), Ok(-7));
    }

    #[test]
    fn bigint_remainder_truncates_like_i128() {
        for a in -9i64..=9 {
            for b in [-4i64, -3, 2, 5] {
                let big = Scalar::rem(&BigInt::from(a), &BigInt::from(b));
                assert_eq!(big, BigInt::from(Scalar::rem(&(a as i128), &(b as i128))));
            }
        }
    }
}
