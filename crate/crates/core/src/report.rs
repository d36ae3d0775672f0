//! Serialization helpers shared by report types.

use serde::Serializer;

use crate::rational::{fmt_q, MeasureValue};

pub fn ser_q<S: Serializer>(v: &MeasureValue, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(v))
}

pub fn ser_q_vec<S: Serializer>(v: &[MeasureValue], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(fmt_q))
}

pub fn ser_q_opt<S: Serializer>(v: &Option<MeasureValue>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&fmt_q(v)),
        None => s.serialize_none(),
    }
}

/// Finite floats as numbers, non-finite ones as the strings `inf`, `-inf`, `nan`.
pub fn ser_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&fmt_f64(*v))
    }
}

/// Stable text form used in CSV output.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.12e}")
    }
}
