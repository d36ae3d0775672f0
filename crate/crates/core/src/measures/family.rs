//! Computable measure families with exact conditionals.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::{Alphabet, Cursor, Evaluate, FinStr};
use crate::error::{input, Result};
use crate::rational::{one, zero, MeasureValue};

fn check_distribution(probs: &[MeasureValue], what: &str) -> Result<bool> {
    if probs.iter().any(|p| p.is_negative()) {
        return input(format!("{what}: negative probability"));
    }
    let total: MeasureValue = probs.iter().sum();
    if total > one() {
        return input(format!("{what}: probabilities sum to {total} > 1"));
    }
    Ok(total.is_one())
}

/// I.i.d. source: every symbol drawn from the same categorical distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Iid {
    alphabet: Alphabet,
    probs: Vec<MeasureValue>,
    normalized: bool,
}

impl Iid {
    pub fn new(probs: Vec<MeasureValue>) -> Result<Self> {
        let alphabet = Alphabet::new(probs.len())?;
        let normalized = check_distribution(&probs, "i.i.d. source")?;
        Ok(Iid { alphabet, probs, normalized })
    }

    /// Binary source with `P(1) = p1`.
    pub fn bernoulli(p1: MeasureValue) -> Result<Self> {
        Iid::new(vec![one() - &p1, p1])
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let p = MeasureValue::new(1.into(), (alphabet.size() as i64).into());
        Iid { alphabet, probs: vec![p; alphabet.size()], normalized: true }
    }

    pub fn probs(&self) -> &[MeasureValue] {
        &self.probs
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn is_measure(&self) -> bool {
        self.normalized
    }

    pub(crate) fn eval_syms(&self, syms: &[u8]) -> MeasureValue {
        syms.iter().fold(one(), |acc, &s| acc * &self.probs[s as usize])
    }
}

struct IidCursor<'a> {
    src: &'a Iid,
    mass: MeasureValue,
}

impl<'a> Cursor<'a> for IidCursor<'a> {
    fn mass(&self) -> &MeasureValue {
        &self.mass
    }

    fn children(&self) -> Vec<Box<dyn Cursor<'a> + 'a>> {
        self.src
            .probs
            .iter()
            .map(|p| Box::new(IidCursor { src: self.src, mass: &self.mass * p }) as Box<dyn Cursor<'a> + 'a>)
            .collect()
    }
}

impl Evaluate for Iid {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn eval(&self, x: &FinStr) -> Result<MeasureValue> {
        x.check_alphabet(self.alphabet)?;
        Ok(self.eval_syms(x.syms()))
    }

    fn is_measure(&self) -> bool {
        self.normalized
    }

    fn cursor<'a>(&'a self, x: &FinStr) -> Result<Box<dyn Cursor<'a> + 'a>> {
        Ok(Box::new(IidCursor { src: self, mass: self.eval(x)? }))
    }
}

/// Order-`k` Markov source. Positions with fewer than `k` predecessors draw
/// from `initial`; afterwards the row indexed by the last `k` symbols
/// (most recent symbol least significant) is used.
#[derive(Clone, Debug, PartialEq)]
pub struct Markov {
    alphabet: Alphabet,
    order: usize,
    initial: Vec<MeasureValue>,
    table: Vec<Vec<MeasureValue>>,
    normalized: bool,
}

impl Markov {
    pub fn new(order: usize, initial: Vec<MeasureValue>, table: Vec<Vec<MeasureValue>>) -> Result<Self> {
        let alphabet = Alphabet::new(initial.len())?;
        if order == 0 || order > 6 {
            return input("Markov order must be in 1..=6");
        }
        let rows = alphabet.count(order) as usize;
        if table.len() != rows {
            return input(format!("Markov table needs {rows} rows, got {}", table.len()));
        }
        let mut normalized = check_distribution(&initial, "Markov initial distribution")?;
        for (i, row) in table.iter().enumerate() {
            if row.len() != alphabet.size() {
                return input(format!("Markov row {i} has {} entries", row.len()));
            }
            normalized &= check_distribution(row, "Markov row")?;
        }
        Ok(Markov { alphabet, order, initial, table, normalized })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn initial(&self) -> &[MeasureValue] {
        &self.initial
    }

    pub fn table(&self) -> &[Vec<MeasureValue>] {
        &self.table
    }

    fn row_index(&self, context: &[u8]) -> usize {
        context.iter().fold(0usize, |acc, &s| acc * self.alphabet.size() + s as usize)
    }

    fn next_probs(&self, history: &[u8]) -> &[MeasureValue] {
        if history.len() < self.order {
            &self.initial
        } else {
            &self.table[self.row_index(&history[history.len() - self.order..])]
        }
    }

    pub(crate) fn eval_syms(&self, syms: &[u8]) -> MeasureValue {
        let mut acc = one();
        for t in 0..syms.len() {
            acc *= &self.next_probs(&syms[..t])[syms[t] as usize];
            if acc.is_zero() {
                break;
            }
        }
        acc
    }
}

struct MarkovCursor<'a> {
    src: &'a Markov,
    tail: Vec<u8>,
    mass: MeasureValue,
}

impl<'a> Cursor<'a> for MarkovCursor<'a> {
    fn mass(&self) -> &MeasureValue {
        &self.mass
    }

    fn children(&self) -> Vec<Box<dyn Cursor<'a> + 'a>> {
        let probs = self.src.next_probs(&self.tail);
        self.src
            .alphabet
            .symbols()
            .map(|a| {
                let mut tail = self.tail.clone();
                tail.push(a);
                if tail.len() > self.src.order {
                    tail.remove(0);
                }
                Box::new(MarkovCursor { src: self.src, tail, mass: &self.mass * &probs[a as usize] })
                    as Box<dyn Cursor<'a> + 'a>
            })
            .collect()
    }
}

impl Evaluate for Markov {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn eval(&self, x: &FinStr) -> Result<MeasureValue> {
        x.check_alphabet(self.alphabet)?;
        Ok(self.eval_syms(x.syms()))
    }

    fn is_measure(&self) -> bool {
        self.normalized
    }

    fn cursor<'a>(&'a self, x: &FinStr) -> Result<Box<dyn Cursor<'a> + 'a>> {
        let mass = self.eval(x)?;
        let s = x.syms();
        let tail = s[s.len().saturating_sub(self.order)..].to_vec();
        Ok(Box::new(MarkovCursor { src: self, tail, mass }))
    }
}

/// Deterministic measure concentrated on the eventually periodic sequence
/// `prefix · period^∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Periodic {
    alphabet: Alphabet,
    prefix: Vec<u8>,
    period: Vec<u8>,
}

impl Periodic {
    pub fn new(alphabet: Alphabet, prefix: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        if period.is_empty() {
            return input("periodic part of a deterministic sequence must be nonempty");
        }
        FinStr::new(alphabet, prefix.clone())?;
        FinStr::new(alphabet, period.clone())?;
        Ok(Periodic { alphabet, prefix, period })
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    /// `α_t` for zero-based position `t`.
    pub fn symbol_at(&self, t: usize) -> u8 {
        if t < self.prefix.len() {
            self.prefix[t]
        } else {
            self.period[(t - self.prefix.len()) % self.period.len()]
        }
    }

    /// `α_{1:n}`.
    pub fn head(&self, n: usize) -> FinStr {
        FinStr::new(self.alphabet, (0..n).map(|t| self.symbol_at(t)).collect()).expect("valid symbols")
    }

    pub(crate) fn eval_syms(&self, syms: &[u8]) -> MeasureValue {
        if syms.iter().enumerate().all(|(t, &s)| s == self.symbol_at(t)) {
            one()
        } else {
            zero()
        }
    }
}

struct PeriodicCursor<'a> {
    src: &'a Periodic,
    pos: usize,
    mass: MeasureValue,
}

impl<'a> Cursor<'a> for PeriodicCursor<'a> {
    fn mass(&self) -> &MeasureValue {
        &self.mass
    }

    fn children(&self) -> Vec<Box<dyn Cursor<'a> + 'a>> {
        let next = self.src.symbol_at(self.pos);
        self.src
            .alphabet
            .symbols()
            .map(|a| {
                let mass = if a == next { self.mass.clone() } else { zero() };
                Box::new(PeriodicCursor { src: self.src, pos: self.pos + 1, mass }) as Box<dyn Cursor<'a> + 'a>
            })
            .collect()
    }
}

impl Evaluate for Periodic {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn eval(&self, x: &FinStr) -> Result<MeasureValue> {
        x.check_alphabet(self.alphabet)?;
        Ok(self.eval_syms(x.syms()))
    }

    fn is_measure(&self) -> bool {
        true
    }

    fn cursor<'a>(&'a self, x: &FinStr) -> Result<Box<dyn Cursor<'a> + 'a>> {
        Ok(Box::new(PeriodicCursor { src: self, pos: x.len(), mass: self.eval(x)? }))
    }
}

/// Explicit finite table of values; strings not listed evaluate to zero.
///
/// Not guaranteed to be a semimeasure. Used to build negative controls.
#[derive(Clone, Debug, Default)]
pub struct Tabulated {
    alphabet: Option<Alphabet>,
    values: BTreeMap<FinStr, MeasureValue>,
}

impl Tabulated {
    pub fn new(alphabet: Alphabet) -> Self {
        Tabulated { alphabet: Some(alphabet), values: BTreeMap::new() }
    }

    pub fn set(&mut self, x: FinStr, v: MeasureValue) -> &mut Self {
        self.values.insert(x, v);
        self
    }

    /// Tabulates another evaluator on every string up to `depth`.
    pub fn from_eval(m: &dyn Evaluate, depth: usize) -> Result<Self> {
        let mut t = Tabulated::new(m.alphabet());
        for x in m.alphabet().strings_up_to(depth) {
            let v = m.eval(&x)?;
            t.values.insert(x, v);
        }
        Ok(t)
    }
}

impl Evaluate for Tabulated {
    fn alphabet(&self) -> Alphabet {
        self.alphabet.unwrap_or(Alphabet::BINARY)
    }

    fn eval(&self, x: &FinStr) -> Result<MeasureValue> {
        x.check_alphabet(self.alphabet())?;
        Ok(self.values.get(x).cloned().unwrap_or_else(zero))
    }

    fn cursor<'a>(&'a self, x: &FinStr) -> Result<Box<dyn Cursor<'a> + 'a>> {
        super::StringCursor::boxed(self, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn bernoulli_products() {
        let half = Iid::bernoulli(q(1, 2)).unwrap();
        assert_eq!(half.eval(&FinStr::bin("101")).unwrap(), q(1, 8));
        let third = Iid::bernoulli(q(1, 3)).unwrap();
        // hand product: (1/3)(1/3)
        assert_eq!(third.eval(&FinStr::bin("11")).unwrap(), q(1, 9));
        assert_eq!(third.eval(&FinStr::bin("10")).unwrap(), q(1, 3) * q(2, 3));
        assert!(Iid::new(vec![q(2, 3), q(2, 3)]).is_err());
        assert!(!Iid::new(vec![q(1, 3), q(1, 3)]).unwrap().is_measure());
    }

    #[test]
    fn deterministic_zero_run() {
        let zeros = Periodic::new(Alphabet::BINARY, vec![], vec![0]).unwrap();
        assert_eq!(zeros.eval(&FinStr::bin("01")).unwrap(), zero());
        assert_eq!(zeros.eval(&FinStr::bin("00")).unwrap(), one());
        let p = Periodic::new(Alphabet::BINARY, vec![1, 1], vec![0, 1]).unwrap();
        assert_eq!(p.head(7), FinStr::bin("1101010"));
    }

    #[test]
    fn markov_eval_and_cursor_agree() {
        let m = Markov::new(
            1,
            vec![q(1, 2), q(1, 2)],
            vec![vec![q(3, 4), q(1, 4)], vec![q(1, 5), q(4, 5)]],
        )
        .unwrap();
        // 0 -> 1 -> 1: 1/2 * 1/4 * 4/5
        assert_eq!(m.eval(&FinStr::bin("011")).unwrap(), q(1, 10));
        let c = m.cursor(&FinStr::bin("01")).unwrap();
        let kids = c.children();
        assert_eq!(kids[1].mass(), &q(1, 10));
        assert_eq!(kids[0].mass(), &m.eval(&FinStr::bin("010")).unwrap());
    }

    #[test]
    fn alphabet_mismatch_is_an_input_error() {
        let t = Iid::uniform(Alphabet::TERNARY);
        assert!(t.eval(&FinStr::bin("01")).is_err());
    }
}
