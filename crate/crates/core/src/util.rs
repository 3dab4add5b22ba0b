//! Small serde helpers shared by report types.

use std::fmt::Display;

use serde::Serializer;

/// Serialize through `Display`, used for big integers and rationals.
pub(crate) fn ser_display<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}
