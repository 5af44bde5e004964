//! Exact rational numbers.
//!
//! `num_rational::BigRational` keeps values in lowest terms with a positive
//! denominator, which is all the invariants this crate needs.

use num_bigint::BigInt;

use crate::Wide;

/// Arbitrary-precision rational in reduced form.
pub type Rational = num_rational::BigRational;

pub(crate) fn int(v: Wide) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub(crate) fn ratio(num: Wide, den: Wide) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Half of an integer, for turning doubled bounds back into bounds.
pub(crate) fn half(v: Wide) -> Rational {
    ratio(v, 2)
}

/// Exact value of a 64-bit word read as a dyadic fraction in `[0, 1)`.
pub fn dyadic(word: u64) -> Rational {
    Rational::new(BigInt::from(word), BigInt::from(1u8) << 64)
}
