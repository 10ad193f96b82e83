//! Exact scalars.
//!
//! Everything in this crate is evaluated either over the rationals or over a
//! prime field. The [`Field`] trait is the small common surface that the
//! numeric code is generic over.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    /// The additive identity of the field `self` lives in.
    fn zero_like(&self) -> Self;
    /// The multiplicative identity of the field `self` lives in.
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn inverse(&self) -> Option<Self>;
    fn from_i64_like(value: i64, like: &Self) -> Self;

    fn checked_div(&self, other: &Self) -> Option<Self> {
        other.inverse().map(|inv| self.clone() * inv)
    }

    fn square(&self) -> Self {
        self.clone() * self
    }

    /// Integer power; negative exponents require an invertible base.
    fn pow_i(&self, exp: i32) -> Option<Self> {
        let base = if exp < 0 {
            self.inverse()?
        } else {
            self.clone()
        };
        let mut acc = self.one_like();
        let mut b = base;
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &b;
            }
            b = b.clone() * &b;
            e >>= 1;
        }
        Some(acc)
    }
}

impl Field for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }

    fn one_like(&self) -> Self {
        Rational::one()
    }

    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_i64_like(value: i64, _like: &Self) -> Self {
        Rational::from_integer(BigInt::from(value))
    }
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Renders as `num/den`, including a unit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational: {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Bit length of the larger of numerator and denominator.
pub fn bit_height(r: &Rational) -> u64 {
    r.numer().abs().bits().max(r.denom().bits())
}

/// Serde adapters emitting rationals as `"num/den"` strings.
pub mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format_rational(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let texts = Vec::<String>::deserialize(d)?;
            texts
                .iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_some(&format_rational(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            let text = Option::<String>::deserialize(d)?;
            text.map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(format_rational(&rat(6, -4)), "-3/2");
        assert_eq!(format_rational(&int(5)), "5/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn pow_i_handles_negative_exponents() {
        assert_eq!(int(2).pow_i(-2).unwrap(), rat(1, 4));
        assert_eq!(rat(3, 2).pow_i(3).unwrap(), rat(27, 8));
        assert_eq!(int(0).pow_i(0).unwrap(), int(1));
        assert!(int(0).pow_i(-1).is_none());
    }
}
