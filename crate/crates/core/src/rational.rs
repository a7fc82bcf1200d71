//! Exact rationals and their JSON encoding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Coefficient printed in front of a monomial: `""`, `"-"`, `"3/2*"`, ...
pub(crate) fn coefficient_prefix(c: &Q, is_unit_monomial: bool) -> String {
    if is_unit_monomial {
        return c.to_string();
    }
    if c.is_one() {
        String::new()
    } else if (-c).is_one() {
        "-".to_string()
    } else if c.is_integer() || c.is_positive() {
        format!("{c}*")
    } else {
        format!("({c})*")
    }
}

/// Rational carried over the wire as `[numerator, denominator]`.
///
/// Deserialization also accepts a bare integer or a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireRational(pub Q);

impl Serialize for WireRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        for part in [self.0.numer(), self.0.denom()] {
            // integers beyond i64 travel as decimal strings
            match part.to_i64() {
                Some(v) => t.serialize_element(&v)?,
                None => t.serialize_element(&part.to_string())?,
            }
        }
        t.end()
    }
}

impl<'de> Deserialize<'de> for WireRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(RationalVisitor)
    }
}

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = WireRational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer, a [numerator, denominator] pair or a \"p/q\" string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Self::Value, E> {
        Ok(WireRational(qi(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
        Ok(WireRational(Q::from_integer(BigInt::from(v))))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
        parse_rational(v).map(WireRational).map_err(E::custom)
    }

    fn visit_seq<A: de::SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
        let num: serde_json::Value = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(0, &self))?;
        let den: serde_json::Value = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(1, &self))?;
        if seq.next_element::<serde_json::Value>()?.is_some() {
            return Err(de::Error::invalid_length(3, &self));
        }
        let num = json_integer(&num).map_err(de::Error::custom)?;
        let den = json_integer(&den).map_err(de::Error::custom)?;
        if den.is_zero() {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(WireRational(Q::new(num, den)))
    }
}

fn json_integer(v: &serde_json::Value) -> std::result::Result<BigInt, String> {
    match v {
        serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => n
            .to_string()
            .parse::<BigInt>()
            .map_err(|e| e.to_string()),
        serde_json::Value::String(s) => s.trim().parse::<BigInt>().map_err(|e| e.to_string()),
        other => Err(format!("expected an integer, found {other}")),
    }
}

/// Parses `"3"`, `"-3/4"` and surrounding whitespace.
pub fn parse_rational(s: &str) -> std::result::Result<Q, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let den: BigInt = den.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Q::new(num, den))
}
