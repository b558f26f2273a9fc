//! Exact rationals travel as `"p/q"` strings in every file format.

use serde::{de, Deserialize, Deserializer, Serializer};

use crate::exactlin::{format_scalar, parse_scalar, Scalar};

pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_scalar(x))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
    let s = String::deserialize(d)?;
    parse_scalar(&s).map_err(|e| de::Error::custom(e.to_string()))
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<Scalar>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&format_scalar(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Scalar>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse_scalar(&s).map_err(|e| de::Error::custom(e.to_string())))
            .transpose()
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(format_scalar))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scalar>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_scalar(s).map_err(|e| de::Error::custom(e.to_string())))
            .collect()
    }
}
