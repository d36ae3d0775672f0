//! Finite Bayes mixtures `ξ = Σ_ν w_ν ν`, posterior weights and sequential updating.

use std::io::Write;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::machines::coding::gamma_len;
use crate::measures::{Alphabet, Cursor, Evaluate, FinStr, Semimeasure};
use crate::rational::{fmt_q, ln_q, one, pow2_neg, q, zero, MeasureValue};
use crate::report::{ser_f64, ser_q};

/// Ordered model class with strictly positive prior weights summing to at most 1.
#[derive(Clone, Debug)]
pub struct WeightedClass {
    alphabet: Alphabet,
    models: Vec<Semimeasure>,
    weights: Vec<MeasureValue>,
}

impl WeightedClass {
    pub fn new(models: Vec<Semimeasure>, weights: Vec<MeasureValue>) -> Result<Self> {
        if models.is_empty() {
            return input("model class must not be empty");
        }
        if models.len() != weights.len() {
            return input(format!("{} models but {} weights", models.len(), weights.len()));
        }
        if let Some(w) = weights.iter().find(|w| **w <= zero()) {
            return input(format!("prior weight {} is not positive", fmt_q(w)));
        }
        let total: MeasureValue = weights.iter().sum();
        if total > one() {
            return input(format!("prior weights sum to {} > 1", fmt_q(&total)));
        }
        let alphabet = models[0].alphabet();
        if let Some(m) = models.iter().find(|m| m.alphabet() != alphabet) {
            return Err(Error::AlphabetMismatch { expected: alphabet.size(), got: m.alphabet().size() });
        }
        Ok(WeightedClass { alphabet, models, weights })
    }

    /// Equal weights `1/k`.
    pub fn uniform(models: Vec<Semimeasure>) -> Result<Self> {
        let w = q(1, models.len().max(1) as i64);
        let weights = vec![w; models.len()];
        WeightedClass::new(models, weights)
    }

    /// `w_i = 2^{-ℓ(γ(i))}` for the 1-based position `i`: the registry code length of the model index.
    pub fn with_gamma_prior(models: Vec<Semimeasure>) -> Result<Self> {
        let weights = (1..=models.len() as u64).map(|i| pow2_neg(gamma_len(i))).collect();
        WeightedClass::new(models, weights)
    }

    /// `w_i = 2^{-len_i}` from explicit code lengths (which must satisfy Kraft).
    pub fn with_code_lengths(models: Vec<Semimeasure>, lengths: &[usize]) -> Result<Self> {
        WeightedClass::new(models, lengths.iter().map(|&l| pow2_neg(l)).collect())
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn models(&self) -> &[Semimeasure] {
        &self.models
    }

    pub fn weights(&self) -> &[MeasureValue] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> Result<&MeasureValue> {
        self.weights.get(i).ok_or_else(|| Error::Input(format!("model index {i} out of range 0..{}", self.len())))
    }

    pub fn model(&self, i: usize) -> Result<&Semimeasure> {
        self.models.get(i).ok_or_else(|| Error::Input(format!("model index {i} out of range 0..{}", self.len())))
    }

    pub fn total_weight(&self) -> MeasureValue {
        self.weights.iter().sum()
    }
}

impl Evaluate for WeightedClass {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn label(&self) -> String {
        let terms: Vec<String> =
            self.weights.iter().zip(&self.models).map(|(w, m)| format!("{}*{}", fmt_q(w), m.canonical())).collect();
        format!("mix({})", terms.join("|"))
    }

    fn eval(&self, x: &FinStr) -> Result<MeasureValue> {
        x.check_alphabet(self.alphabet)?;
        let mut acc = zero();
        for (w, m) in self.weights.iter().zip(&self.models) {
            acc += w * m.eval(x)?;
        }
        Ok(acc)
    }

    fn is_measure(&self) -> bool {
        self.total_weight().is_one() && self.models.iter().all(|m| m.is_measure())
    }

    fn cursor<'a>(&'a self, x: &FinStr) -> Result<Box<dyn Cursor<'a> + 'a>> {
        let parts = self.models.iter().map(|m| m.cursor(x)).collect::<Result<Vec<_>>>()?;
        Ok(MixtureCursor::boxed(self, parts))
    }
}

struct MixtureCursor<'a> {
    class: &'a WeightedClass,
    parts: Vec<Box<dyn Cursor<'a> + 'a>>,
    mass: MeasureValue,
}

impl<'a> MixtureCursor<'a> {
    fn boxed(class: &'a WeightedClass, parts: Vec<Box<dyn Cursor<'a> + 'a>>) -> Box<dyn Cursor<'a> + 'a> {
        let mass = class.weights.iter().zip(&parts).map(|(w, c)| w * c.mass()).sum();
        Box::new(MixtureCursor { class, parts, mass })
    }
}

/// Regroups per-model child lists into per-symbol lists of model cursors.
fn transpose<'a>(parts: &[Box<dyn Cursor<'a> + 'a>], size: usize) -> Vec<Vec<Box<dyn Cursor<'a> + 'a>>> {
    let mut by_symbol: Vec<Vec<_>> = (0..size).map(|_| Vec::with_capacity(parts.len())).collect();
    for part in parts {
        for (a, kid) in part.children().into_iter().enumerate() {
            by_symbol[a].push(kid);
        }
    }
    by_symbol
}

impl<'a> Cursor<'a> for MixtureCursor<'a> {
    fn mass(&self) -> &MeasureValue {
        &self.mass
    }

    fn children(&self) -> Vec<Box<dyn Cursor<'a> + 'a>> {
        transpose(&self.parts, self.class.alphabet.size())
            .into_iter()
            .map(|parts| MixtureCursor::boxed(self.class, parts))
            .collect()
    }
}

/// `ξ(x)`.
pub fn xi_eval(class: &WeightedClass, x: &FinStr) -> Result<MeasureValue> {
    class.eval(x)
}

/// Result of an exhaustive dominance scan `ξ(x) ≥ w_μ μ(x)`.
#[derive(Clone, Debug, Serialize)]
pub struct DominanceReport {
    pub mu_index: usize,
    pub depth: usize,
    pub strings_checked: u64,
    pub violations: u64,
    #[serde(serialize_with = "ser_q")]
    pub min_slack: MeasureValue,
    pub argmin: FinStr,
}

/// Scans every `ℓ(x) ≤ depth`.
pub fn dominance_check(class: &WeightedClass, mu_index: usize, depth: usize) -> Result<DominanceReport> {
    let w_mu = class.weight(mu_index)?.clone();
    crate::ensure_budget(class.alphabet.count_up_to(depth + 1))?;
    let root = FinStr::empty(class.alphabet);
    let parts = class.models.iter().map(|m| m.cursor(&root)).collect::<Result<Vec<_>>>()?;
    let mut rep = DominanceReport {
        mu_index,
        depth,
        strings_checked: 0,
        violations: 0,
        min_slack: zero(),
        argmin: root.clone(),
    };
    let mut first = true;
    let mut stack = vec![(root, parts)];
    while let Some((x, parts)) = stack.pop() {
        let xi: MeasureValue = class.weights.iter().zip(&parts).map(|(w, c)| w * c.mass()).sum();
        let slack = xi - &w_mu * parts[mu_index].mass();
        rep.strings_checked += 1;
        if slack < zero() {
            rep.violations += 1;
        }
        // ties keep the length-lex smallest string
        if first || slack < rep.min_slack || (slack == rep.min_slack && (x.len(), x.syms()) < (rep.argmin.len(), rep.argmin.syms())) {
            rep.min_slack = slack;
            rep.argmin = x.clone();
            first = false;
        }
        if x.len() < depth {
            for (a, kids) in transpose(&parts, class.alphabet.size()).into_iter().enumerate().rev() {
                stack.push((x.pushed(a as u8), kids));
            }
        }
    }
    Ok(rep)
}

/// `w_ν(x) = w_ν ν(x)/ξ(x)` for every model.
pub fn posterior_weights(class: &WeightedClass, x: &FinStr) -> Result<Vec<MeasureValue>> {
    let likelihood = class.models.iter().map(|m| m.eval(x)).collect::<Result<Vec<_>>>()?;
    posterior_from_likelihood(class, &likelihood, x)
}

fn posterior_from_likelihood(
    class: &WeightedClass,
    likelihood: &[MeasureValue],
    x: &FinStr,
) -> Result<Vec<MeasureValue>> {
    let joint: Vec<MeasureValue> = class.weights.iter().zip(likelihood).map(|(w, l)| w * l).collect();
    let xi: MeasureValue = joint.iter().sum();
    if xi.is_zero() {
        return Err(Error::DegenerateHistory(format!("ξ({x}) = 0")));
    }
    Ok(joint.into_iter().map(|j| j / &xi).collect())
}

/// `ln w_μ(x)^{-1}` with the exact posterior weight attached.
#[derive(Clone, Debug, Serialize)]
pub struct PosteriorBound {
    #[serde(serialize_with = "ser_q")]
    pub weight: MeasureValue,
    /// `+inf` (flagged by `infinite`) when the posterior weight vanishes.
    #[serde(serialize_with = "ser_f64")]
    pub ln_inverse: f64,
    pub infinite: bool,
}

impl PosteriorBound {
    pub fn from_weight(weight: MeasureValue) -> Self {
        let infinite = weight.is_zero();
        let ln_inverse = if infinite { f64::INFINITY } else { -ln_q(&weight) };
        PosteriorBound { weight, ln_inverse, infinite }
    }
}

pub fn posterior_bound(class: &WeightedClass, mu_index: usize, x: &FinStr) -> Result<PosteriorBound> {
    class.weight(mu_index)?;
    let post = posterior_weights(class, x)?;
    Ok(PosteriorBound::from_weight(post[mu_index].clone()))
}

/// Posterior state after a history; updating returns a new state.
#[derive(Clone, Debug)]
pub struct MixtureState {
    class: Arc<WeightedClass>,
    history: FinStr,
    likelihood: Vec<MeasureValue>,
    posterior: Vec<MeasureValue>,
}

impl MixtureState {
    pub fn new(class: Arc<WeightedClass>) -> Result<Self> {
        let empty = FinStr::empty(class.alphabet);
        MixtureState::from_history(class, &empty)
    }

    /// Recomputes everything from scratch.
    pub fn from_history(class: Arc<WeightedClass>, x: &FinStr) -> Result<Self> {
        let likelihood = class.models.iter().map(|m| m.eval(x)).collect::<Result<Vec<_>>>()?;
        let posterior = posterior_from_likelihood(&class, &likelihood, x)?;
        Ok(MixtureState { class, history: x.clone(), likelihood, posterior })
    }

    pub fn class(&self) -> &WeightedClass {
        &self.class
    }

    pub fn history(&self) -> &FinStr {
        &self.history
    }

    pub fn posterior(&self) -> &[MeasureValue] {
        &self.posterior
    }

    /// `ν(x)` for each model, `x` the history.
    pub fn likelihood(&self) -> &[MeasureValue] {
        &self.likelihood
    }

    /// `ξ(a|x) = Σ_ν w_ν(x) ν(a|x)` for every symbol `a`.
    pub fn predictive(&self) -> Result<Vec<MeasureValue>> {
        self.class
            .alphabet
            .symbols()
            .map(|a| {
                let xa = self.history.pushed(a);
                let mut acc = zero();
                for ((m, w), l) in self.class.models.iter().zip(&self.posterior).zip(&self.likelihood) {
                    if !w.is_zero() {
                        acc += w * m.eval(&xa)? / l;
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    /// Bayes update by one symbol: `w_ν(xa) ∝ w_ν(x) ν(a|x)`.
    pub fn observe(&self, a: u8) -> Result<Self> {
        let xa = self.history.pushed(a);
        xa.check_alphabet(self.class.alphabet)?;
        let mut likelihood = Vec::with_capacity(self.class.len());
        let mut unnorm = Vec::with_capacity(self.class.len());
        for ((m, w), l) in self.class.models.iter().zip(&self.posterior).zip(&self.likelihood) {
            let next = m.eval(&xa)?;
            unnorm.push(if l.is_zero() { zero() } else { w * &next / l });
            likelihood.push(next);
        }
        let z: MeasureValue = unnorm.iter().sum();
        if z.is_zero() {
            return Err(Error::DegenerateHistory(format!("ξ({xa}) = 0")));
        }
        let posterior = unnorm.into_iter().map(|u| u / &z).collect();
        Ok(MixtureState { class: Arc::clone(&self.class), history: xa, likelihood, posterior })
    }
}

/// One row of a posterior trace: the prediction `ξ(·|x_{<t})` made before
/// seeing `x_t`, and the posterior after it.
#[derive(Clone, Debug)]
pub struct TraceRow {
    pub t: usize,
    pub symbol: u8,
    pub predictive: Vec<MeasureValue>,
    pub posterior: Vec<MeasureValue>,
}

pub fn posterior_trace(class: Arc<WeightedClass>, seq: &FinStr) -> Result<Vec<TraceRow>> {
    let mut state = MixtureState::new(class)?;
    let mut rows = Vec::with_capacity(seq.len());
    for (i, &a) in seq.syms().iter().enumerate() {
        let predictive = state.predictive()?;
        state = state.observe(a)?;
        rows.push(TraceRow { t: i + 1, symbol: a, predictive, posterior: state.posterior.clone() });
    }
    Ok(rows)
}

/// CSV with columns `t, symbol, w_0.., xi_0..`, rationals as `num/den`.
pub fn write_trace_csv<W: Write>(rows: &[TraceRow], models: usize, alphabet: Alphabet, out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string(), "symbol".to_string()];
    header.extend((0..models).map(|i| format!("w_{i}")));
    header.extend((0..alphabet.size()).map(|a| format!("xi_{a}")));
    wr.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![r.t.to_string(), r.symbol.to_string()];
        rec.extend(r.posterior.iter().map(fmt_q));
        rec.extend(r.predictive.iter().map(fmt_q));
        wr.write_record(&rec).map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> WeightedClass {
        let a = Semimeasure::bernoulli(q(1, 3)).unwrap();
        let b = Semimeasure::bernoulli(q(2, 3)).unwrap();
        WeightedClass::uniform(vec![a, b]).unwrap()
    }

    #[test]
    fn xi_values() {
        let c = pair();
        assert_eq!(xi_eval(&c, &FinStr::bin("1")).unwrap(), q(1, 2));
        assert_eq!(xi_eval(&c, &FinStr::bin("11")).unwrap(), q(5, 18));
    }

    #[test]
    fn dominance_slack_at_11() {
        let c = pair();
        let x = FinStr::bin("11");
        let slack = c.eval(&x).unwrap() - q(1, 2) * c.models()[0].eval(&x).unwrap();
        assert_eq!(slack, q(2, 9));
        let rep = dominance_check(&c, 0, 6).unwrap();
        assert_eq!(rep.violations, 0);
        assert_eq!(rep.strings_checked, 127);
    }

    #[test]
    fn single_model_dominance_is_tight() {
        let c = WeightedClass::new(vec![Semimeasure::bernoulli(q(1, 4)).unwrap()], vec![one()]).unwrap();
        let rep = dominance_check(&c, 0, 5).unwrap();
        assert_eq!(rep.min_slack, zero());
        assert_eq!(rep.violations, 0);
    }

    #[test]
    fn posterior_examples() {
        let c = pair();
        assert_eq!(posterior_weights(&c, &FinStr::bin("")).unwrap(), vec![q(1, 2), q(1, 2)]);
        assert_eq!(posterior_weights(&c, &FinStr::bin("1")).unwrap(), vec![q(1, 3), q(2, 3)]);
        let b = posterior_bound(&c, 1, &FinStr::bin("1")).unwrap();
        assert!((b.ln_inverse - (1.5f64).ln()).abs() < 1e-12);
        let det = WeightedClass::uniform(vec![
            Semimeasure::periodic(&FinStr::bin(""), &FinStr::bin("0")).unwrap(),
            Semimeasure::uniform(Alphabet::BINARY),
        ])
        .unwrap();
        let post = posterior_weights(&det, &FinStr::bin("1")).unwrap();
        assert_eq!(post[0], zero());
        assert!(posterior_bound(&det, 0, &FinStr::bin("1")).unwrap().infinite);
    }

    #[test]
    fn degenerate_history_is_an_error() {
        let c = WeightedClass::new(
            vec![Semimeasure::periodic(&FinStr::bin(""), &FinStr::bin("0")).unwrap()],
            vec![one()],
        )
        .unwrap();
        assert!(matches!(posterior_weights(&c, &FinStr::bin("1")), Err(Error::DegenerateHistory(_))));
    }

    #[test]
    fn incremental_equals_from_scratch() {
        let c = Arc::new(pair());
        let x = FinStr::bin("1101001");
        let mut s = MixtureState::new(Arc::clone(&c)).unwrap();
        for &a in x.syms() {
            s = s.observe(a).unwrap();
        }
        let fresh = MixtureState::from_history(c, &x).unwrap();
        assert_eq!(s.posterior(), fresh.posterior());
    }

    #[test]
    fn validation() {
        let m = || Semimeasure::bernoulli(q(1, 2)).unwrap();
        assert!(WeightedClass::new(vec![], vec![]).is_err());
        assert!(WeightedClass::new(vec![m()], vec![zero()]).is_err());
        assert!(WeightedClass::new(vec![m(), m()], vec![q(2, 3), q(2, 3)]).is_err());
        assert!(WeightedClass::new(vec![m(), Semimeasure::uniform(Alphabet::TERNARY)], vec![q(1, 2), q(1, 2)]).is_err());
        let g = WeightedClass::with_gamma_prior(vec![m(), m(), m()]).unwrap();
        assert_eq!(g.weights(), &[q(1, 2), q(1, 8), q(1, 8)]);
    }

    #[test]
    fn trace_csv_shape() {
        let rows = posterior_trace(Arc::new(pair()), &FinStr::bin("10")).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&rows, 2, Alphabet::BINARY, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,symbol,w_0,w_1,xi_0,xi_1");
        assert_eq!(text.lines().nth(1).unwrap(), "1,1,1/3,2/3,1/2,1/2");
    }
}
