//! JSON encoding shared by certificates, traces and the CLI.
//!
//! Every number is emitted as a string: rationals as `num/den` (or `num`),
//! integers in decimal. Polynomials are arrays of coefficient strings in
//! ascending degree order.

use num_bigint::{BigInt, BigUint};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ratpoly::{rational_to_string, RatPoly, Rational};

/// Schema tag written at the top level of every JSON document.
pub const SCHEMA: &str = "padic-sos/1";

/// Parses `num`, `num/den`, with optional sign and surrounding whitespace.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = |msg: &str| Error::Parse {
        pos: 0,
        msg: format!("{msg}: {s:?}"),
    };
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad("invalid numerator"))?;
    let d: BigInt = d.parse().map_err(|_| bad("invalid denominator"))?;
    if d == BigInt::from(0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rational::new(n, d))
}

pub fn ser_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_to_string(q))
}

pub fn ser_opt_rational<S: Serializer>(
    q: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => ser_rational(q, s),
        None => s.serialize_none(),
    }
}

pub fn ser_rationals<S: Serializer>(
    qs: &[Rational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(qs.len()))?;
    for q in qs {
        seq.serialize_element(&rational_to_string(q))?;
    }
    seq.end()
}

pub fn ser_bigint<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

pub fn ser_biguint<S: Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

impl Serialize for RatPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_zero() {
            let mut seq = s.serialize_seq(Some(1))?;
            seq.serialize_element("0")?;
            return seq.end();
        }
        ser_rationals(self.coeffs(), s)
    }
}

impl<'de> Deserialize<'de> for RatPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        poly_from_strings(&items).map_err(de::Error::custom)
    }
}

/// Builds a polynomial from ascending coefficient strings.
pub fn poly_from_strings<S: AsRef<str>>(items: &[S]) -> Result<RatPoly> {
    if items.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty coefficient array".into(),
        });
    }
    let coeffs = items
        .iter()
        .map(|s| parse_rational(s.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(RatPoly::from_coeffs(coeffs))
}

/// Rewrites every JSON number as a string so the output never carries floats
/// or width-limited integers.
pub fn stringify_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(n.to_string()),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify_numbers).collect()),
        Value::Object(o) => Value::Object(
            o.into_iter()
                .map(|(k, v)| (k, stringify_numbers(v)))
                .collect(),
        ),
        other => other,
    }
}

/// Serializes to a `Value` with every number turned into a string.
pub fn to_value<T: Serialize>(x: &T) -> Value {
    stringify_numbers(serde_json::to_value(x).expect("serializable"))
}

/// Canonical pretty-printed JSON text.
pub fn to_string_pretty<T: Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(&to_value(x)).expect("serializable")
}
