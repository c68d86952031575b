//! Serialization helpers: big integers as decimal strings, rationals as
//! `"a/b"`; nothing downstream should have to assume 64-bit arithmetic.

use num_bigint::BigUint;
use serde::Serializer;

use crate::Rational;

pub fn biguint_dec<S: Serializer>(value: &BigUint, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&value.to_string())
}

pub fn rational_frac<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&format_rational(value))
}

pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}
