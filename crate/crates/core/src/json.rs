//! Serde helpers: exact numbers are always emitted as decimal strings.

use std::fmt::Display;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::Serializer;

pub fn display<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(value)
}

pub fn display_vec<T: Display, S: Serializer>(values: &[T], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for v in values {
        seq.serialize_element(&v.to_string())?;
    }
    seq.end()
}

pub fn display_opt_vec<T: Display, S: Serializer>(
    values: &Option<Vec<T>>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match values {
        Some(v) => display_vec(v, s),
        None => s.serialize_none(),
    }
}

/// A map written in insertion order.
pub fn ordered_pairs<K: Display, V: Display, S: Serializer>(
    pairs: &[(K, V)],
    s: S,
) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(pairs.len()))?;
    for (k, v) in pairs {
        map.serialize_entry(&k.to_string(), &v.to_string())?;
    }
    map.end()
}
