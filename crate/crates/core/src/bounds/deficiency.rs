use num_traits::Zero;
use serde::Serialize;

use crate::error::Result;
use crate::measures::{Evaluate, FinStr};
use crate::rational::{ceil_log2_q, log2_q, MeasureValue};
use crate::report::{ser_f64, ser_q, ser_q_opt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeficiencyStatus {
    Finite,
    /// `μ(x) = 0`: bounds in terms of `d` hold trivially.
    PlusInfinite,
    /// The surrogate vanishes on a `μ`-positive string.
    MinusInfinite,
}

/// `d(x) = log2 surrogate(x)/μ(x)` with the exact ratio kept.
#[derive(Clone, Debug, Serialize)]
pub struct DeficiencyRecord {
    pub surrogate: String,
    pub mu: String,
    pub x: FinStr,
    #[serde(serialize_with = "ser_q")]
    pub surrogate_mass: MeasureValue,
    #[serde(serialize_with = "ser_q")]
    pub mu_mass: MeasureValue,
    #[serde(serialize_with = "ser_q_opt")]
    pub ratio: Option<MeasureValue>,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    /// `⌈d(x)⌉`, exact.
    pub ceil: Option<i64>,
    pub status: DeficiencyStatus,
}

pub fn deficiency(surrogate: &dyn Evaluate, mu: &dyn Evaluate, x: &FinStr) -> Result<DeficiencyRecord> {
    let s = surrogate.eval(x)?;
    let m = mu.eval(x)?;
    let (ratio, value, ceil, status) = if m.is_zero() {
        (None, f64::INFINITY, None, DeficiencyStatus::PlusInfinite)
    } else if s.is_zero() {
        (Some(s.clone()), f64::NEG_INFINITY, None, DeficiencyStatus::MinusInfinite)
    } else {
        let r = &s / &m;
        let v = log2_q(&r);
        let c = ceil_log2_q(&r);
        (Some(r), v, Some(c), DeficiencyStatus::Finite)
    };
    Ok(DeficiencyRecord {
        surrogate: surrogate.label(),
        mu: mu.label(),
        x: x.clone(),
        surrogate_mass: s,
        mu_mass: m,
        ratio,
        value,
        ceil,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Semimeasure;
    use crate::mixture::WeightedClass;
    use crate::rational::q;

    #[test]
    fn self_deficiency_is_zero() {
        let mu = Semimeasure::bernoulli(q(1, 3)).unwrap();
        for x in ["", "0", "0110"] {
            let d = deficiency(&mu, &mu, &FinStr::bin(x)).unwrap();
            assert_eq!(d.value, 0.0);
            assert_eq!(d.ceil, Some(0));
        }
    }

    #[test]
    fn mixture_deficiency_is_at_least_log_weight() {
        let mu = Semimeasure::bernoulli(q(2, 3)).unwrap();
        let class = WeightedClass::uniform(vec![Semimeasure::bernoulli(q(1, 3)).unwrap(), mu.clone()]).unwrap();
        for x in crate::measures::Alphabet::BINARY.strings_up_to(6) {
            let d = deficiency(&class, &mu, &x).unwrap();
            assert!(d.ratio.unwrap() >= q(1, 2));
            assert!(d.ceil.unwrap() >= -1);
        }
    }

    #[test]
    fn infinite_flags() {
        let det = Semimeasure::parse("det:(0)").unwrap();
        let d = deficiency(&Semimeasure::uniform(crate::measures::Alphabet::BINARY), &det, &FinStr::bin("1")).unwrap();
        assert_eq!(d.status, DeficiencyStatus::PlusInfinite);
        let d = deficiency(&det, &Semimeasure::uniform(crate::measures::Alphabet::BINARY), &FinStr::bin("1")).unwrap();
        assert_eq!(d.status, DeficiencyStatus::MinusInfinite);
    }
}
