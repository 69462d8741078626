//! Exact rational scalars.
//!
//! `Rational` is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator. Text form is `p` or `p/q`; decimals are rejected so
//! that every value read from a file is exactly the value written.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{HerdError, Result};

pub type Rational = BigRational;

/// Sign of a nonzero rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn of(value: &Rational) -> Option<Sign> {
        match value.numer().sign() {
            num_bigint::Sign::Plus => Some(Sign::Positive),
            num_bigint::Sign::Minus => Some(Sign::Negative),
            num_bigint::Sign::NoSign => None,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    /// `+1` or `-1` as a rational.
    pub fn unit(self) -> Rational {
        match self {
            Sign::Positive => Rational::one(),
            Sign::Negative => -Rational::one(),
        }
    }
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"p"` or `"p/q"` (optional leading sign, `q > 0`).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || HerdError::InvalidInput(format!("`{text}` is not a rational of the form p or p/q"));
    let (numer, denom) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), Some(q.trim())),
        None => (text, None),
    };
    let parse_int = |s: &str, allow_sign: bool| -> Result<BigInt> {
        let digits = if allow_sign {
            s.strip_prefix(['-', '+']).unwrap_or(s)
        } else {
            s
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse::<BigInt>().map_err(|_| bad())
    };
    let p = parse_int(numer, true)?;
    let q = match denom {
        Some(q) => parse_int(q, false)?,
        None => BigInt::one(),
    };
    if q.is_zero() {
        return Err(HerdError::InvalidInput(format!("`{text}` has a zero denominator")));
    }
    Ok(Rational::new(p, q))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn format_vector(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

/// `true` when the fraction is already reduced with a positive denominator.
pub fn is_canonical(value: &Rational) -> bool {
    use num_integer::Integer;
    value.denom().is_positive() && value.numer().gcd(value.denom()).is_one()
}

pub(crate) fn max_of<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<&'a Rational> {
    values
        .into_iter()
        .max_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
}

pub(crate) fn serialize_rational<S: serde::Serializer>(
    value: &Rational,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.serialize_str(&format_rational(value))
}

pub(crate) fn serialize_rationals<S: serde::Serializer>(
    values: &[Rational],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_seq(values.iter().map(format_rational))
}

pub(crate) fn serialize_rational_rows<S: serde::Serializer>(
    rows: &[Vec<Rational>],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_seq(rows.iter().map(|row| format_vector(row)))
}
