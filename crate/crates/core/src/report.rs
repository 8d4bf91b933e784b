//! Serialization helpers shared by the JSON reports.

use num_bigint::BigInt;
use serde::Serializer;

use crate::linalg::Rational;

/// JSON report format version.
pub const SCHEMA_VERSION: u32 = 1;

pub fn bigint_str<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub fn bigint_vec_str<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(ToString::to_string))
}

/// Rationals are always written `p/q`, including integers (`3/1`, `0/1`).
pub fn rational_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}
