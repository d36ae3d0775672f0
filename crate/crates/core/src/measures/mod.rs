//! Finite strings, exact semimeasure values and computable measure families.
//!
//! Every evaluator implements [`Evaluate`]: an exact map from finite strings
//! to nonnegative rationals. [`Semimeasure`] is the closed catalog of
//! families used throughout the crate; [`Tabulated`] and the machine
//! semimeasure from [`crate::machines`] plug into the same trait.

mod family;
mod string;
mod text;

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

pub use family::{Iid, Markov, Periodic, Tabulated};
pub use string::{Alphabet, FinStr};

use crate::error::{Error, Result};
use crate::machines::MachineSemimeasure;
use crate::mixture::WeightedClass;
use crate::rational::{one, uniform_mass, zero, MeasureValue};

/// Exact evaluator of a (semi)measure on finite strings.
pub trait Evaluate: Send + Sync {
    fn alphabet(&self) -> Alphabet;

    /// `ρ(x)`. Fails on alphabet mismatch.
    fn eval(&self, x: &FinStr) -> Result<MeasureValue>;

    /// Claimed to sum to exactly 1 at every depth.
    fn is_measure(&self) -> bool {
        false
    }

    /// Short name used in ledgers and reports.
    fn label(&self) -> String {
        format!("evaluator|X|={}", self.alphabet().size())
    }

    /// Sequential view positioned at `x`, used for exhaustive tree walks.
    fn cursor<'a>(&'a self, x: &FinStr) -> Result<Box<dyn Cursor<'a> + 'a>>;
}

/// Position in the prefix tree of an evaluator: `ρ(x)` plus the children `ρ(xa)`.
pub trait Cursor<'a> {
    fn mass(&self) -> &MeasureValue;

    /// One cursor per symbol `a`, in symbol order, positioned at `xa`.
    fn children(&self) -> Vec<Box<dyn Cursor<'a> + 'a>>;
}

/// Fallback cursor that re-evaluates whole strings.
pub struct StringCursor<'a> {
    m: &'a dyn Evaluate,
    x: FinStr,
    mass: MeasureValue,
}

impl<'a> StringCursor<'a> {
    pub fn boxed(m: &'a dyn Evaluate, x: &FinStr) -> Result<Box<dyn Cursor<'a> + 'a>> {
        let mass = m.eval(x)?;
        Ok(Box::new(StringCursor { m, x: x.clone(), mass }))
    }
}

impl<'a> Cursor<'a> for StringCursor<'a> {
    fn mass(&self) -> &MeasureValue {
        &self.mass
    }

    fn children(&self) -> Vec<Box<dyn Cursor<'a> + 'a>> {
        self.m
            .alphabet()
            .symbols()
            .map(|a| {
                let x = self.x.pushed(a);
                let mass = self.m.eval(&x).expect("alphabet already checked");
                Box::new(StringCursor { m: self.m, x, mass }) as Box<dyn Cursor<'a> + 'a>
            })
            .collect()
    }
}

struct ScaledCursor<'a> {
    inner: Box<dyn Cursor<'a> + 'a>,
    scale: MeasureValue,
    mass: MeasureValue,
}

impl<'a> ScaledCursor<'a> {
    fn boxed(inner: Box<dyn Cursor<'a> + 'a>, scale: MeasureValue) -> Box<dyn Cursor<'a> + 'a> {
        let mass = inner.mass() * &scale;
        Box::new(ScaledCursor { inner, scale, mass })
    }
}

impl<'a> Cursor<'a> for ScaledCursor<'a> {
    fn mass(&self) -> &MeasureValue {
        &self.mass
    }

    fn children(&self) -> Vec<Box<dyn Cursor<'a> + 'a>> {
        self.inner.children().into_iter().map(|c| ScaledCursor::boxed(c, self.scale.clone())).collect()
    }
}

/// Catalog of measure families.
#[derive(Clone, Debug)]
pub enum Semimeasure {
    /// I.i.d. categorical source (Bernoulli on binary alphabets).
    Bernoulli(Iid),
    Markov(Markov),
    /// Deterministic `u v^∞`.
    Deterministic(Periodic),
    /// `0^l 1^∞`, the one-switch deterministic family.
    SuffixDeterministic { l: usize, inner: Periodic },
    /// `μ^x(y) := μ(y|x)` with the uniform version on `μ(x) = 0`.
    Conditionalized { base: Box<Semimeasure>, prefix: FinStr },
    Mixture(Arc<WeightedClass>),
    Machine(Arc<MachineSemimeasure>),
}

impl Semimeasure {
    pub fn bernoulli(p1: MeasureValue) -> Result<Self> {
        Ok(Semimeasure::Bernoulli(Iid::bernoulli(p1)?))
    }

    pub fn categorical(probs: Vec<MeasureValue>) -> Result<Self> {
        Ok(Semimeasure::Bernoulli(Iid::new(probs)?))
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        Semimeasure::Bernoulli(Iid::uniform(alphabet))
    }

    pub fn markov(order: usize, initial: Vec<MeasureValue>, table: Vec<Vec<MeasureValue>>) -> Result<Self> {
        Ok(Semimeasure::Markov(Markov::new(order, initial, table)?))
    }

    /// Deterministic `prefix · period^∞`.
    pub fn periodic(prefix: &FinStr, period: &FinStr) -> Result<Self> {
        prefix.check_alphabet(period.alphabet())?;
        Ok(Semimeasure::Deterministic(Periodic::new(
            prefix.alphabet(),
            prefix.syms().to_vec(),
            period.syms().to_vec(),
        )?))
    }

    /// The binary measure equal to 1 on the prefixes of `0^l 1^∞`.
    pub fn suffix_deterministic(l: usize) -> Self {
        let inner = Periodic::new(Alphabet::BINARY, vec![0; l], vec![1]).expect("binary symbols");
        Semimeasure::SuffixDeterministic { l, inner }
    }

    pub fn conditionalized(base: Semimeasure, prefix: FinStr) -> Result<Self> {
        prefix.check_alphabet(base.alphabet())?;
        Ok(Semimeasure::Conditionalized { base: Box::new(base), prefix })
    }

    pub fn mixture(class: WeightedClass) -> Self {
        Semimeasure::Mixture(Arc::new(class))
    }

    pub fn is_deterministic(&self) -> bool {
        match self {
            Semimeasure::Deterministic(_) | Semimeasure::SuffixDeterministic { .. } => true,
            Semimeasure::Conditionalized { base, prefix } => {
                // a deterministic base conditioned off its support falls back to uniform
                base.is_deterministic() && base.eval(prefix).map(|v| !v.is_zero()).unwrap_or(false)
            }
            Semimeasure::Mixture(c) => c.len() == 1 && c.models()[0].is_deterministic(),
            _ => false,
        }
    }

    /// The target sequence of a deterministic catalog entry.
    pub fn as_periodic(&self) -> Option<&Periodic> {
        match self {
            Semimeasure::Deterministic(p) => Some(p),
            Semimeasure::SuffixDeterministic { inner, .. } => Some(inner),
            _ => None,
        }
    }

    /// Canonical text form; see [`Semimeasure::parse`].
    pub fn canonical(&self) -> String {
        text::render(self)
    }

    /// Parses the canonical text form, e.g. `ber:1/3`, `cat:1/2,1/4,1/4`,
    /// `markov:1:1/2,1/2;3/4,1/4;1/4,3/4`, `det:0(01)`, `det:(012)@3`,
    /// `lemma2:5`, `cond[01]:ber:2/3`, `mix(1/2*ber:1/3|1/2*ber:2/3)` and
    /// `machine:L=12,S=256`.
    pub fn parse(spec: &str) -> Result<Self> {
        text::parse(spec)
    }
}

impl std::fmt::Display for Semimeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl std::str::FromStr for Semimeasure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Semimeasure::parse(s)
    }
}

impl Evaluate for Semimeasure {
    fn alphabet(&self) -> Alphabet {
        match self {
            Semimeasure::Bernoulli(m) => m.alphabet(),
            Semimeasure::Markov(m) => Evaluate::alphabet(m),
            Semimeasure::Deterministic(m) => Evaluate::alphabet(m),
            Semimeasure::SuffixDeterministic { .. } => Alphabet::BINARY,
            Semimeasure::Conditionalized { base, .. } => base.alphabet(),
            Semimeasure::Mixture(c) => Evaluate::alphabet(c.as_ref()),
            Semimeasure::Machine(m) => Evaluate::alphabet(m.as_ref()),
        }
    }

    fn eval(&self, x: &FinStr) -> Result<MeasureValue> {
        match self {
            Semimeasure::Bernoulli(m) => m.eval(x),
            Semimeasure::Markov(m) => m.eval(x),
            Semimeasure::Deterministic(m) => m.eval(x),
            Semimeasure::SuffixDeterministic { inner, .. } => inner.eval(x),
            Semimeasure::Conditionalized { base, prefix } => conditional(base.as_ref(), prefix, x),
            Semimeasure::Mixture(c) => c.eval(x),
            Semimeasure::Machine(m) => m.eval(x),
        }
    }

    fn label(&self) -> String {
        self.canonical()
    }

    fn is_measure(&self) -> bool {
        match self {
            Semimeasure::Bernoulli(m) => m.is_measure(),
            Semimeasure::Markov(m) => Evaluate::is_measure(m),
            Semimeasure::Deterministic(_) | Semimeasure::SuffixDeterministic { .. } => true,
            Semimeasure::Conditionalized { base, .. } => base.is_measure(),
            Semimeasure::Mixture(c) => Evaluate::is_measure(c.as_ref()),
            Semimeasure::Machine(m) => Evaluate::is_measure(m.as_ref()),
        }
    }

    fn cursor<'a>(&'a self, x: &FinStr) -> Result<Box<dyn Cursor<'a> + 'a>> {
        match self {
            Semimeasure::Bernoulli(m) => m.cursor(x),
            Semimeasure::Markov(m) => m.cursor(x),
            Semimeasure::Deterministic(m) => m.cursor(x),
            Semimeasure::SuffixDeterministic { inner, .. } => inner.cursor(x),
            Semimeasure::Conditionalized { base, prefix } => {
                x.check_alphabet(base.alphabet())?;
                let head = base.eval(prefix)?;
                if head.is_zero() {
                    let size = x.alphabet().size();
                    Ok(UniformCursor::boxed(x.alphabet(), uniform_mass(size, x.len())))
                } else {
                    let inner = base.cursor(&prefix.concat(x))?;
                    Ok(ScaledCursor::boxed(inner, one() / head))
                }
            }
            Semimeasure::Mixture(c) => c.cursor(x),
            Semimeasure::Machine(m) => m.cursor(x),
        }
    }
}

struct UniformCursor {
    alphabet: Alphabet,
    mass: MeasureValue,
}

impl UniformCursor {
    fn boxed<'a>(alphabet: Alphabet, mass: MeasureValue) -> Box<dyn Cursor<'a> + 'a> {
        Box::new(UniformCursor { alphabet, mass })
    }
}

impl<'a> Cursor<'a> for UniformCursor {
    fn mass(&self) -> &MeasureValue {
        &self.mass
    }

    fn children(&self) -> Vec<Box<dyn Cursor<'a> + 'a>> {
        let share = &self.mass * uniform_mass(self.alphabet.size(), 1);
        self.alphabet.symbols().map(|_| UniformCursor::boxed(self.alphabet, share.clone())).collect()
    }
}

/// `ρ(y|x) = ρ(xy)/ρ(x)`, or the uniform version `|X|^-ℓ(y)` when `ρ(x) = 0`.
pub fn conditional(m: &dyn Evaluate, x: &FinStr, y: &FinStr) -> Result<MeasureValue> {
    let head = m.eval(x)?;
    y.check_alphabet(m.alphabet())?;
    if y.is_empty() {
        return Ok(one());
    }
    if head.is_zero() {
        return Ok(uniform_mass(m.alphabet().size(), y.len()));
    }
    Ok(m.eval(&x.concat(y))? / head)
}

/// Next-symbol distribution `ρ(·|x)`, not renormalized.
pub fn next_distribution(m: &dyn Evaluate, x: &FinStr) -> Result<Vec<MeasureValue>> {
    let head = m.eval(x)?;
    if head.is_zero() {
        let u = uniform_mass(m.alphabet().size(), 1);
        return Ok(vec![u; m.alphabet().size()]);
    }
    m.alphabet().symbols().map(|a| Ok(m.eval(&x.pushed(a))? / &head)).collect()
}

/// Outcome of an exhaustive semimeasure check.
#[derive(Clone, Debug, Serialize)]
pub struct SemimeasureCheck {
    pub depth: usize,
    pub nodes_checked: u64,
    /// Largest `Σ_a ρ(xa) − ρ(x)` over checked `x` (0 or negative when fine).
    #[serde(serialize_with = "crate::report::ser_q")]
    pub max_excess: MeasureValue,
    /// Where `max_excess` is attained (first in length-lex order).
    pub worst: FinStr,
    #[serde(serialize_with = "crate::report::ser_q")]
    pub root_mass: MeasureValue,
    pub is_semimeasure: bool,
    pub is_measure_up_to_depth: bool,
}

impl SemimeasureCheck {
    /// Largest positive excess, `0` when the check passes.
    pub fn max_violation(&self) -> MeasureValue {
        if self.max_excess > zero() {
            self.max_excess.clone()
        } else {
            zero()
        }
    }
}

/// Verifies `Σ_a ρ(xa) ≤ ρ(x)` for every `ℓ(x) < depth` and `ρ(ε) ≤ 1`, exactly.
pub fn check_semimeasure(m: &dyn Evaluate, depth: usize) -> Result<SemimeasureCheck> {
    let alphabet = m.alphabet();
    let needed = alphabet.count_up_to(depth);
    crate::ensure_budget(needed)?;
    let root = m.cursor(&FinStr::empty(alphabet))?;
    let root_mass = root.mass().clone();
    let mut state = CheckState {
        max_excess: None,
        worst: FinStr::empty(alphabet),
        all_equal: root_mass == one(),
        nodes: 0,
    };
    walk_check(root.as_ref(), &mut FinStr::empty(alphabet), depth, &mut state);
    let max_excess = state.max_excess.unwrap_or_else(zero);
    let is_semimeasure = max_excess <= zero() && root_mass <= one();
    Ok(SemimeasureCheck {
        depth,
        nodes_checked: state.nodes,
        is_measure_up_to_depth: is_semimeasure && state.all_equal,
        max_excess,
        worst: state.worst,
        root_mass,
        is_semimeasure,
    })
}

struct CheckState {
    max_excess: Option<MeasureValue>,
    worst: FinStr,
    all_equal: bool,
    nodes: u64,
}

fn walk_check<'a>(node: &dyn Cursor<'a>, x: &mut FinStr, remaining: usize, st: &mut CheckState) {
    if remaining == 0 {
        return;
    }
    st.nodes += 1;
    let kids = node.children();
    let total: MeasureValue = kids.iter().map(|c| c.mass()).sum();
    let excess = total - node.mass();
    if !excess.is_zero() {
        st.all_equal = false;
    }
    if st.max_excess.as_ref().is_none_or(|m| &excess > m) {
        st.max_excess = Some(excess);
        st.worst = x.clone();
    }
    for (a, kid) in kids.iter().enumerate() {
        let child = x.pushed(a as u8);
        let saved = std::mem::replace(x, child);
        walk_check(kid.as_ref(), x, remaining - 1, st);
        *x = saved;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn conditional_examples() {
        let half = Semimeasure::bernoulli(q(1, 2)).unwrap();
        for x in ["", "0", "1101"] {
            assert_eq!(conditional(&half, &FinStr::bin(x), &FinStr::bin("10")).unwrap(), q(1, 4));
        }
        let third = Semimeasure::bernoulli(q(1, 3)).unwrap();
        assert_eq!(conditional(&third, &FinStr::bin("0110"), &FinStr::bin("")).unwrap(), one());
        let lemma = Semimeasure::suffix_deterministic(4);
        let x = FinStr::repeat(Alphabet::BINARY, 0, 4);
        assert_eq!(conditional(&lemma, &x, &FinStr::bin("1")).unwrap(), one());
        assert_eq!(conditional(&lemma, &x, &FinStr::bin("0")).unwrap(), zero());
    }

    #[test]
    fn zero_mass_condition_uses_uniform_version() {
        let zeros = Semimeasure::periodic(&FinStr::bin(""), &FinStr::bin("0")).unwrap();
        assert_eq!(conditional(&zeros, &FinStr::bin("1"), &FinStr::bin("011")).unwrap(), q(1, 8));
        let cond = Semimeasure::conditionalized(zeros, FinStr::bin("1")).unwrap();
        assert_eq!(cond.eval(&FinStr::bin("01")).unwrap(), q(1, 4));
        assert!(!cond.is_deterministic());
        let check = check_semimeasure(&cond, 5).unwrap();
        assert!(check.is_measure_up_to_depth);
    }

    #[test]
    fn bernoulli_check_is_exact_measure() {
        let half = Semimeasure::bernoulli(q(1, 2)).unwrap();
        let c = check_semimeasure(&half, 6).unwrap();
        assert!(c.is_measure_up_to_depth);
        assert_eq!(c.max_violation(), zero());
        assert_eq!(c.nodes_checked, 63);
    }

    #[test]
    fn corrupted_table_is_flagged_at_the_offending_node() {
        let mut t = Tabulated::new(Alphabet::BINARY);
        t.set(FinStr::bin(""), one())
            .set(FinStr::bin("0"), q(1, 2))
            .set(FinStr::bin("1"), q(1, 2))
            .set(FinStr::bin("10"), q(1, 3))
            .set(FinStr::bin("11"), q(1, 3));
        let c = check_semimeasure(&t, 3).unwrap();
        assert!(!c.is_semimeasure);
        assert_eq!(c.worst, FinStr::bin("1"));
        assert_eq!(c.max_violation(), q(1, 6));
    }

    #[test]
    fn cursor_masses_match_eval_for_conditionalized() {
        let m = Semimeasure::markov(
            1,
            vec![q(1, 3), q(2, 3)],
            vec![vec![q(1, 2), q(1, 2)], vec![q(1, 4), q(3, 4)]],
        )
        .unwrap();
        let c = Semimeasure::conditionalized(m, FinStr::bin("1")).unwrap();
        let cur = c.cursor(&FinStr::bin("0")).unwrap();
        for (a, kid) in cur.children().iter().enumerate() {
            assert_eq!(kid.mass(), &c.eval(&FinStr::bin("0").pushed(a as u8)).unwrap());
        }
    }
}
