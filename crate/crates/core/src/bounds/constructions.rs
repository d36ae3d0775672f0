use serde::Serialize;

use super::{deficiency, BoundReport, DeficiencyRecord, HorizonMeta};
use crate::error::{Error, Result};
use crate::losses::{step_distance, DistanceKind, TOLERANCE};
use crate::machines::{int_code, nat_code, Program, TableCache};
use crate::measures::{conditional, next_distribution, Alphabet, Evaluate, FinStr, Semimeasure};
use crate::rational::{ln_q, q, times_ln2_exceeds, MeasureValue};
use crate::report::{ser_f64, ser_q};

/// `c = 1/(3 ln 2)`.
pub const LEMMA1_C: f64 = 1.0 / (3.0 * std::f64::consts::LN_2);

/// One step of the adversarial sequence: `μ(b|α_{<l}) > c` and `α_l = 1 − b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub l: usize,
    pub b: u8,
    #[serde(serialize_with = "ser_q")]
    pub mu_b: MeasureValue,
    /// `3 ln 2 · μ(b|α_{<l}) > 1`, decided exactly.
    pub exceeds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Adversarial {
    pub mu: String,
    pub alpha: FinStr,
    pub certificates: Vec<Certificate>,
}

/// Builds `α_{1:n}` by flipping the first symbol whose conditional exceeds `c`.
pub fn lemma1_adversarial(mu: &dyn Evaluate, n: usize) -> Result<Adversarial> {
    if mu.alphabet() != Alphabet::BINARY {
        return Err(Error::AlphabetMismatch { expected: 2, got: mu.alphabet().size() });
    }
    let three = q(3, 1);
    let one = q(1, 1);
    let mut alpha = FinStr::empty(Alphabet::BINARY);
    let mut certificates = Vec::with_capacity(n);
    for l in 1..=n {
        let next = next_distribution(mu, &alpha)?;
        let (b, mu_b) = next
            .iter()
            .enumerate()
            .find(|(_, p)| times_ln2_exceeds(&(&three * *p), &one))
            .map(|(b, p)| (b as u8, p.clone()))
            .ok_or_else(|| Error::Input(format!("no conditional above c at step {l}; is the measure normalized?")))?;
        certificates.push(Certificate { l, b, mu_b, exceeds: true });
        alpha = alpha.pushed(1 - b);
    }
    Ok(Adversarial { mu: mu.label(), alpha, certificates })
}

/// One-step divergence against `ξ` at each step, bounded below by `c ln(c/ξ(b|α_{<l})) − 1/e`.
pub fn lemma1_certificates(adv: &Adversarial, mu: &dyn Evaluate, xi: &dyn Evaluate) -> Result<Vec<BoundReport>> {
    let mut out = Vec::with_capacity(adv.certificates.len());
    for cert in &adv.certificates {
        let h = adv.alpha.prefix(cert.l - 1);
        let d = step_distance(&next_distribution(mu, &h)?, &next_distribution(xi, &h)?, &DistanceKind::Kl)?;
        let xb = conditional(xi, &h, &FinStr::new(Alphabet::BINARY, vec![cert.b])?)?;
        let bound = LEMMA1_C * (LEMMA1_C.ln() - ln_q(&xb)) - (-1.0f64).exp();
        let case = format!("mu={} xi={} h={h} b={}", adv.mu, xi.label(), cert.b);
        out.push(
            BoundReport::exact("lemma1-step", case, bound, d)
                .with_direction("lhs is the certificate c ln(c/xi(b|h)) - 1/e, rhs the exact one-step KL")
                .at(Some(cert.l), Some(cert.l)),
        );
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma2Instance {
    pub l: usize,
    pub mu: String,
    pub x: FinStr,
    #[serde(serialize_with = "ser_q")]
    pub mass_x: MeasureValue,
    #[serde(serialize_with = "ser_q")]
    pub mass_x0: MeasureValue,
    #[serde(serialize_with = "ser_q")]
    pub mass_x1: MeasureValue,
    pub deficiency: DeficiencyRecord,
    /// `Σ_b μ(b|x) ln(μ(b|x)/ρ(b|x))`.
    #[serde(serialize_with = "ser_f64")]
    pub one_step: f64,
    /// `ln 1/ρ(1|x)`.
    #[serde(serialize_with = "ser_f64")]
    pub formula: f64,
    pub report: BoundReport,
}

/// `μ^l = 0^l 1^∞` at `x = 0^l` against a surrogate.
pub fn lemma2_instance(l: usize, surrogate: &dyn Evaluate) -> Result<Lemma2Instance> {
    if l == 0 {
        return Err(Error::Input("lemma2 needs l >= 1".into()));
    }
    let mu = Semimeasure::suffix_deterministic(l);
    let x = FinStr::repeat(Alphabet::BINARY, 0, l);
    let mass_x = mu.eval(&x)?;
    let mass_x0 = mu.eval(&x.pushed(0))?;
    let mass_x1 = mu.eval(&x.pushed(1))?;
    let def = deficiency(surrogate, &mu, &x)?;
    let one_step = step_distance(&next_distribution(&mu, &x)?, &next_distribution(surrogate, &x)?, &DistanceKind::Kl)?;
    let r1 = conditional(surrogate, &x, &FinStr::bin("1"))?;
    let formula = -ln_q(&r1);
    let same = (one_step.is_infinite() && formula.is_infinite()) || (one_step - formula).abs() <= TOLERANCE;
    let report = BoundReport::exact("lemma2-step", format!("l={l} rho={}", surrogate.label()), one_step, formula)
        .with_holds(same)
        .with_direction("identity up to float tolerance")
        .at(Some(l + 1), Some(l + 1));
    Ok(Lemma2Instance { l, mu: mu.canonical(), x, mass_x, mass_x0, mass_x1, deficiency: def, one_step, formula, report })
}

/// The periodic target `(0^n 1)^∞` after one period: `K*` of its parameter, the
/// `K`-based quantities of the cruder bound, and both right-hand sides.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodExample {
    pub n: usize,
    pub x: FinStr,
    pub mu_code: FinStr,
    pub kstar: Option<usize>,
    pub kstar_witness: Option<Program>,
    pub k_cond: Option<usize>,
    pub k_len: Option<usize>,
    pub ceil_d: Option<i64>,
    pub k_ceil_d: Option<usize>,
    #[serde(serialize_with = "ser_f64")]
    pub thm1_rhs: f64,
    #[serde(serialize_with = "ser_f64")]
    pub thm3_rhs: f64,
    pub horizon: HorizonMeta,
}

pub fn period_example(n: usize, surrogate: &dyn Evaluate, prefix: &TableCache, kstar: &TableCache) -> Result<PeriodExample> {
    let a = Alphabet::BINARY;
    let mut syms = vec![0u8; n];
    syms.push(1);
    let period = FinStr::new(a, syms)?;
    let mu = Semimeasure::periodic(&FinStr::empty(a), &period)?;
    let x = period;
    let code = nat_code(n as u64, a);
    let star = kstar.table(&x)?;
    let w = star.get(&code);
    let k_cond = prefix.value(&code, &x)?;
    let k_len = prefix.value(&nat_code(x.len() as u64, a), &FinStr::empty(a))?;
    let d = deficiency(surrogate, &mu, &x)?;
    let k_ceil_d = match d.ceil {
        Some(c) => prefix.value(&int_code(c, a), &FinStr::empty(a))?,
        None => None,
    };
    let sum = |u: Option<usize>, v: Option<usize>| match (u, v) {
        (Some(u), Some(v)) => (u + v) as f64,
        _ => f64::INFINITY,
    };
    Ok(PeriodExample {
        n,
        x,
        mu_code: code,
        kstar: w.map(|w| w.len()),
        kstar_witness: w.map(|w| w.program.clone()),
        k_cond,
        k_len,
        ceil_d: d.ceil,
        k_ceil_d,
        thm1_rhs: sum(k_cond, k_len),
        thm3_rhs: sum(w.map(|w| w.len()), k_ceil_d),
        horizon: HorizonMeta::new(kstar.horizon(), None),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::WeightedClass;

    #[test]
    fn bernoulli_three_fifths_gives_zeros() {
        let mu = Semimeasure::bernoulli(q(3, 5)).unwrap();
        let adv = lemma1_adversarial(&mu, 16).unwrap();
        assert_eq!(adv.alpha.to_string(), "0".repeat(16));
        assert!(adv.certificates.iter().all(|c| c.b == 1 && c.mu_b == q(3, 5)));
    }

    #[test]
    fn fair_coin_tie_breaks_to_zero() {
        let mu = Semimeasure::bernoulli(q(1, 2)).unwrap();
        let adv = lemma1_adversarial(&mu, 8).unwrap();
        assert_eq!(adv.alpha.to_string(), "11111111");
        assert!(adv.certificates.iter().all(|c| c.b == 0));
    }

    #[test]
    fn certificates_hold_against_a_mixture() {
        let mu = Semimeasure::bernoulli(q(3, 5)).unwrap();
        let class = WeightedClass::uniform(vec![mu.clone(), Semimeasure::bernoulli(q(1, 5)).unwrap()]).unwrap();
        let adv = lemma1_adversarial(&mu, 10).unwrap();
        for r in lemma1_certificates(&adv, &mu, &class).unwrap() {
            assert_eq!(r.verdict, super::super::Verdict::Verified, "{}", r.case);
        }
    }

    #[test]
    fn lemma2_values() {
        let rho = Semimeasure::bernoulli(q(1, 3)).unwrap();
        let inst = lemma2_instance(5, &rho).unwrap();
        assert_eq!((inst.mass_x.clone(), inst.mass_x0.clone(), inst.mass_x1.clone()), (q(1, 1), q(0, 1), q(1, 1)));
        assert!((inst.one_step - 3f64.ln()).abs() < 1e-12);
        assert_eq!(inst.report.verdict, super::super::Verdict::Verified);
        assert!((inst.deficiency.value - crate::rational::log2_q(&q(32, 243))).abs() < 1e-12);
    }
}
