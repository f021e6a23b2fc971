//! Fixed six-decimal rendering of floating-point report values.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

pub const DECIMALS: usize = 6;

/// Formats `v` with exactly six fractional digits; negative zero prints as zero.
pub fn fixed(v: f64) -> String {
    let s = format!("{v:.DECIMALS$}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_owned()
    } else {
        s
    }
}

fn raw<S: Serializer>(v: f64, s: S) -> Result<S::Ok, S::Error> {
    if !v.is_finite() {
        return Err(serde::ser::Error::custom(format!("non-finite value {v} in report")));
    }
    RawValue::from_string(fixed(v))
        .map_err(serde::ser::Error::custom)?
        .serialize(s)
}

/// A float that serializes with six fractional digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Six(pub f64);

impl Serialize for Six {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        raw(self.0, s)
    }
}

pub mod six {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        raw(*v, s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        serde::Deserialize::deserialize(d)
    }
}

pub mod six_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => raw(*v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        serde::Deserialize::deserialize(d)
    }
}

#[cfg(test)]
mod tests {
    use super::fixed;

    #[test]
    fn six_digits() {
        assert_eq!(fixed(7.0710678118), "7.071068");
        assert_eq!(fixed(0.0), "0.000000");
        assert_eq!(fixed(-0.0), "0.000000");
        assert_eq!(fixed(-1e-9), "0.000000");
        assert_eq!(fixed(-2.5), "-2.500000");
    }
}
