//! Exact nonnegative rational arithmetic for costs, weights and ratios.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational number used for weights, ratios and guarantee factors.
pub type Rational = Ratio<i128>;

/// A nonnegative exact cost.
///
/// Serialized as a `"p/q"` string (or `"p"` when integral). Deserialization also
/// accepts decimal strings such as `"0.25"` and plain JSON numbers, converted
/// exactly from their decimal text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cost(Rational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as a nonnegative rational: {reason}")]
pub struct ParseRationalError {
    input: String,
    reason: &'static str,
}

impl Cost {
    pub const ZERO: Cost = Cost(Ratio::new_raw(0, 1));

    /// Returns `None` for negative values.
    pub fn new(value: Rational) -> Option<Self> {
        if value.is_negative() {
            None
        } else {
            Some(Cost(value))
        }
    }

    pub fn from_integer(value: u64) -> Self {
        Cost(Rational::from_integer(value as i128))
    }

    pub fn from_ratio(numer: u64, denom: u64) -> Self {
        assert!(denom > 0, "zero denominator");
        Cost(Rational::new(numer as i128, denom as i128))
    }

    pub fn value(self) -> Rational {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    /// Multiplies by a nonnegative factor.
    pub fn scale(self, factor: Rational) -> Cost {
        assert!(!factor.is_negative(), "negative scale factor {factor}");
        Cost(self.0 * factor)
    }

    /// `self / other`, or `None` when `other` is zero.
    pub fn ratio_to(self, other: Cost) -> Option<Rational> {
        if other.is_zero() {
            None
        } else {
            Some(self.0 / other.0)
        }
    }

    pub fn checked_sub(self, other: Cost) -> Option<Cost> {
        Cost::new(self.0 - other.0)
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl From<Cost> for Rational {
    fn from(c: Cost) -> Rational {
        c.0
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        self.0 += rhs.0;
    }
}

/// Panics if the result would be negative.
impl Sub for Cost {
    type Output = Cost;
    fn sub(self, rhs: Cost) -> Cost {
        self.checked_sub(rhs)
            .unwrap_or_else(|| panic!("negative cost difference {self} - {rhs}"))
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a Cost> for Cost {
    fn sum<I: Iterator<Item = &'a Cost>>(iter: I) -> Cost {
        iter.copied().sum()
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Cost {
    type Err = ParseRationalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s).map(Cost)
    }
}

/// Parses `"p"`, `"p/q"` or a decimal `"i.f"` into an exact nonnegative rational.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: input.to_string(),
        reason,
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(err("empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_digits(num.trim()).ok_or_else(|| err("bad numerator"))?;
        let den = parse_digits(den.trim()).ok_or_else(|| err("bad denominator"))?;
        if den == 0 {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("no digits"));
    }
    let int = if int_part.is_empty() {
        0
    } else {
        parse_digits(int_part).ok_or_else(|| err("bad integer part"))?
    };
    if frac_part.is_empty() {
        return Ok(Rational::from_integer(int));
    }
    if frac_part.len() > 30 {
        return Err(err("too many decimal places"));
    }
    let frac = parse_digits(frac_part).ok_or_else(|| err("bad fractional part"))?;
    let scale = 10i128.pow(frac_part.len() as u32);
    let numer = int
        .checked_mul(scale)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(|| err("overflow"))?;
    Ok(Rational::new(numer, scale))
}

fn parse_digits(s: &str) -> Option<i128> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// `H_n = 1 + 1/2 + … + 1/n`; `H_0 = 1` so it can serve as an approximation ratio.
pub fn harmonic(n: usize) -> Rational {
    if n == 0 {
        return Rational::one();
    }
    (1..=n as i128).map(|k| Rational::new(1, k)).sum()
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CostVisitor;

        impl Visitor<'_> for CostVisitor {
            type Value = Cost;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a nonnegative rational as \"p/q\", a decimal string, or a number")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Cost, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cost, E> {
                Ok(Cost::from_integer(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cost, E> {
                if v < 0 {
                    return Err(E::custom(format!("negative value {v}")));
                }
                Ok(Cost::from_integer(v as u64))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Cost, E> {
                if !v.is_finite() || v < 0.0 {
                    return Err(E::custom(format!("invalid value {v}")));
                }
                // Display for f64 never uses exponent notation.
                format!("{v}").parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(CostVisitor)
    }
}

/// Serde adapter writing a [`Rational`] as a `"p/q"` string.
pub mod rational_string {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}
