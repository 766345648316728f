//! Exact rational numbers used for every distance and level value in this crate.
//!
//! All geometry here depends on decidable equality and a total order — scaled-copy
//! verification compares products of distances exactly, and tree level values must
//! sort without ties being an artifact of rounding. `Rational` therefore wraps an
//! arbitrary-precision fraction that is always kept in lowest terms with a positive
//! denominator.
//!
//! The textual form is `"p"` for integers and `"p/q"` otherwise; the same grammar is
//! accepted when parsing. JSON serialization always emits the string form, and
//! deserialization additionally accepts plain JSON integers. Floating-point values
//! are rejected outright rather than approximated.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An exact rational number (arbitrary precision, always reduced).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

/// Failure to construct or parse a [`Rational`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalError {
    /// A denominator of zero was supplied.
    #[error("denominator is zero")]
    ZeroDenominator,
    /// The input string does not match `p` or `p/q` with integer parts.
    #[error("malformed rational {0:?}: expected `p` or `p/q` with integer p, q")]
    Malformed(String),
}

impl Rational {
    /// Builds `numer/denom`, reduced, with the sign carried by the numerator.
    pub fn new(numer: i64, denom: i64) -> Result<Self, RationalError> {
        if denom == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer.into(), denom.into())))
    }

    /// The integer `n` as a rational.
    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// Builds from arbitrary-precision parts.
    pub fn from_big(numer: BigInt, denom: BigInt) -> Result<Self, RationalError> {
        if denom.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    /// Zero.
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    /// One.
    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `true` when the value is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `true` when the value is strictly greater than zero.
    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Numerator after reduction (carries the sign).
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Denominator after reduction (always positive).
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// The smaller of two values, by the exact order.
    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// The larger of two values, by the exact order.
    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rational({})", self)
    }
}

impl FromStr for Rational {
    type Err = RationalError;

    /// Parses `"p"` or `"p/q"`. Parts must be plain (optionally signed) integers;
    /// decimal points, exponents, and empty parts are rejected. Surrounding ASCII
    /// whitespace is ignored, interior whitespace is not.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let malformed = || RationalError::Malformed(s.to_string());
        let mut parts = trimmed.splitn(3, '/');
        let numer_part = parts.next().ok_or_else(malformed)?;
        let numer = BigInt::from_str(numer_part).map_err(|_| malformed())?;
        match parts.next() {
            None => Ok(Rational(BigRational::from_integer(numer))),
            Some(denom_part) => {
                if parts.next().is_some() {
                    return Err(malformed());
                }
                let denom = BigInt::from_str(denom_part).map_err(|_| malformed())?;
                if denom.is_zero() {
                    return Err(RationalError::ZeroDenominator);
                }
                Ok(Rational(BigRational::new(numer, denom)))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RationalVisitor;

        impl Visitor<'_> for RationalVisitor {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational number as a string \"p/q\" (or \"p\") or a plain integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(de::Error::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from_integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational(BigRational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
                Err(de::Error::custom(format!(
                    "floating-point value {v} rejected: values must be exact (write \"p/q\")"
                )))
            }
        }

        deserializer.deserialize_any(RationalVisitor)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }

        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }

        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }

        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    /// Exact division. Panics on a zero divisor; callers guard divisors explicitly.
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division of Rational by zero");
        Rational(self.0 / rhs.0)
    }
}

impl Div for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division of Rational by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}
