//! Finite `K*`-correct sets of triples `⟨p, x, y⟩` and their validator.
//!
//! A set is correct when
//! 1. `⟨p,x,y₁⟩, ⟨p,x,y₂⟩ ∈ E` implies `y₁ = y₂`;
//! 2. `⟨p,x,y⟩ ∈ E` implies `⟨p',x',y⟩ ∈ E` for all prolongations `p' ⊒ p`, `x' ⊒ x`;
//! 3. `⟨p,x',y⟩, ⟨p',x,y⟩ ∈ E` with `p ⊑ p'`, `x ⊑ x'` implies `⟨p,x,y⟩ ∈ E`.
//!
//! Finite sets live inside a horizon (`ℓ(p) ≤ L`, `ℓ(x) ≤ depth`) and
//! requirement 2 is checked only within it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::coding::Program;
use super::enumerate::Horizon;
use super::registry::{Entry, MachineRegistry};
use super::run::{Mode, RunStatus, Stall};
use crate::error::Result;
use crate::measures::{Alphabet, FinStr};

type Triple = (Vec<u8>, Vec<u8>, Vec<u8>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectSet {
    alphabet: Alphabet,
    max_len: usize,
    depth: usize,
    triples: BTreeSet<Triple>,
}

/// A halting twice-prefix run: reads exactly `program` and `condition`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Root {
    pub program: Program,
    pub condition: FinStr,
    pub output: FinStr,
}

impl CorrectSet {
    pub fn new(alphabet: Alphabet, max_len: usize, depth: usize) -> Self {
        CorrectSet { alphabet, max_len, depth, triples: BTreeSet::new() }
    }

    /// All halting twice-prefix runs with `ℓ(p) ≤ L`, `ℓ(x) ≤ depth`.
    pub fn roots(reg: &MachineRegistry, entry: Entry, h: Horizon, depth: usize) -> Result<Vec<Root>> {
        let a = reg.alphabet();
        crate::ensure_budget(2u64.saturating_pow(h.max_len as u32 + 1).saturating_mul(a.count_up_to(depth + 1)))?;
        let mut roots = Vec::new();
        let mut stack: Vec<(Vec<u8>, Vec<u8>)> = vec![(Vec::new(), Vec::new())];
        while let Some((p, x)) = stack.pop() {
            let run = reg.run_bits(entry, Mode::TwicePrefix, &p, &x, h.limits);
            match (run.status, run.stall) {
                (RunStatus::Halted, _) => {
                    debug_assert_eq!(run.condition_symbols_consumed, x.len());
                    roots.push(Root {
                        program: Program::from_bits_unchecked(p),
                        condition: FinStr::new(a, x).expect("condition symbols"),
                        output: run.output,
                    });
                }
                (_, Some(Stall::ProgramExhausted)) if p.len() < h.max_len => {
                    for b in [1u8, 0] {
                        let mut q = p.clone();
                        q.push(b);
                        stack.push((q, x.clone()));
                    }
                }
                (_, Some(Stall::ConditionExhausted)) if x.len() < depth => {
                    for s in a.symbols().rev() {
                        let mut z = x.clone();
                        z.push(s);
                        stack.push((p.clone(), z));
                    }
                }
                _ => {}
            }
        }
        roots.sort();
        Ok(roots)
    }

    /// Runs the machine on all inputs in the horizon and closes the halting
    /// runs under prolongation of program and condition.
    pub fn induce(reg: &MachineRegistry, entry: Entry, h: Horizon, depth: usize) -> Result<Self> {
        let roots = CorrectSet::roots(reg, entry, h, depth)?;
        let mut set = CorrectSet::new(reg.alphabet(), h.max_len, depth);
        let programs: Vec<Vec<Vec<u8>>> = (0..=h.max_len).map(|n| all_strings(2, n)).collect();
        let conds: Vec<Vec<Vec<u8>>> = (0..=depth).map(|n| all_strings(reg.alphabet().size(), n)).collect();
        for r in &roots {
            let (p, x) = (r.program.bits(), r.condition.syms());
            let mut needed: u64 = 0;
            for ps in programs.iter().take(h.max_len - p.len() + 1) {
                for xs in conds.iter().take(depth - x.len() + 1) {
                    needed += (ps.len() * xs.len()) as u64;
                }
            }
            crate::ensure_budget(set.triples.len() as u64 + needed)?;
            for ps in programs.iter().take(h.max_len - p.len() + 1).flatten() {
                for xs in conds.iter().take(depth - x.len() + 1).flatten() {
                    set.triples.insert(([p, ps].concat(), [x, xs].concat(), r.output.syms().to_vec()));
                }
            }
        }
        Ok(set)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, p: &Program, x: &FinStr, y: &FinStr) -> bool {
        self.triples.contains(&(p.bits().to_vec(), x.syms().to_vec(), y.syms().to_vec()))
    }

    pub fn insert(&mut self, p: &Program, x: &FinStr, y: &FinStr) -> bool {
        self.triples.insert((p.bits().to_vec(), x.syms().to_vec(), y.syms().to_vec()))
    }

    pub fn remove(&mut self, p: &Program, x: &FinStr, y: &FinStr) -> bool {
        self.triples.remove(&(p.bits().to_vec(), x.syms().to_vec(), y.syms().to_vec()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Program, FinStr, FinStr)> + '_ {
        self.triples.iter().map(|(p, x, y)| {
            (
                Program::from_bits_unchecked(p.clone()),
                FinStr::new(self.alphabet, x.clone()).expect("stored condition"),
                FinStr::new(self.alphabet, y.clone()).expect("stored output"),
            )
        })
    }

    /// `C_E(y|x) = min{ℓ(p) : ⟨p,x,y⟩ ∈ E}` for every `(x, y)` present.
    pub fn complexities(&self) -> BTreeMap<(FinStr, FinStr), usize> {
        let mut out: BTreeMap<(FinStr, FinStr), usize> = BTreeMap::new();
        for (p, x, y) in self.iter() {
            let e = out.entry((x, y)).or_insert(usize::MAX);
            *e = (*e).min(p.len());
        }
        out
    }

    pub fn c_e(&self, y: &FinStr, x: &FinStr) -> Option<usize> {
        self.triples
            .iter()
            .filter(|(_, tx, ty)| tx == x.syms() && ty == y.syms())
            .map(|(p, _, _)| p.len())
            .min()
    }

    /// Exhaustive check of the three requirements.
    pub fn validate(&self) -> CorrectnessReport {
        let mut rep = CorrectnessReport { triples: self.triples.len(), ..Default::default() };
        let fmt = |v: &[u8]| FinStr::new(self.alphabet, v.to_vec()).expect("stored").to_string();
        let fmt_p = |v: &[u8]| Program::from_bits_unchecked(v.to_vec()).to_string();

        let mut prev: Option<&Triple> = None;
        for t in &self.triples {
            if let Some(q) = prev {
                if q.0 == t.0 && q.1 == t.1 {
                    rep.push(1, format!("p={} x={} maps to both {} and {}", fmt_p(&t.0), fmt(&t.1), fmt(&q.2), fmt(&t.2)));
                }
            }
            prev = Some(t);
        }

        for (p, x, y) in &self.triples {
            if p.len() < self.max_len {
                for b in [0u8, 1] {
                    let q = [p.as_slice(), &[b]].concat();
                    if !self.triples.contains(&(q.clone(), x.clone(), y.clone())) {
                        rep.push(2, format!("missing prolongation p={} x={} y={}", fmt_p(&q), fmt(x), fmt(y)));
                    }
                }
            }
            if x.len() < self.depth {
                for a in self.alphabet.symbols() {
                    let z = [x.as_slice(), &[a]].concat();
                    if !self.triples.contains(&(p.clone(), z.clone(), y.clone())) {
                        rep.push(2, format!("missing prolongation p={} x={} y={}", fmt_p(p), fmt(&z), fmt(y)));
                    }
                }
            }
        }

        let mut by_xy: BTreeMap<(&[u8], &[u8]), BTreeSet<&[u8]>> = BTreeMap::new();
        for (p, x, y) in &self.triples {
            by_xy.entry((x.as_slice(), y.as_slice())).or_default().insert(p.as_slice());
        }
        for (p, xl, y) in &self.triples {
            for k in 0..xl.len() {
                let x = &xl[..k];
                let Some(progs) = by_xy.get(&(x, y.as_slice())) else { continue };
                if progs.contains(p.as_slice()) {
                    continue;
                }
                let extended = progs.range(p.as_slice()..).next().is_some_and(|q| q.starts_with(p));
                if extended {
                    rep.push(3, format!("p={} x={} y={} absent though implied", fmt_p(p), fmt(x), fmt(y)));
                }
            }
        }
        rep
    }
}

fn all_strings(base: usize, len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|s| (0..base as u8).map(move |a| [s.as_slice(), &[a]].concat()))
            .collect();
    }
    out
}

const EXAMPLES_KEPT: usize = 8;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorrectnessReport {
    pub triples: usize,
    /// Violation counts for requirements 1, 2, 3.
    pub violations: [u64; 3],
    /// First few violations per requirement.
    pub examples: [Vec<String>; 3],
}

impl CorrectnessReport {
    fn push(&mut self, req: usize, msg: String) {
        self.violations[req - 1] += 1;
        if self.examples[req - 1].len() < EXAMPLES_KEPT {
            self.examples[req - 1].push(msg);
        }
    }

    pub fn is_correct(&self) -> bool {
        self.violations.iter().all(|&v| v == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::coding::{gamma, nat_code};
    use crate::machines::enumerate::enum_kstar;

    fn b3_only() -> MachineRegistry {
        MachineRegistry::canonical(Alphabet::BINARY).restrict(&["zero-counter"])
    }

    #[test]
    fn zero_counter_set_contains_prolongations() {
        let h = Horizon::new(6, 128);
        let e = CorrectSet::induce(&b3_only(), Entry::Universal, h, 5).unwrap();
        let y = nat_code(3, Alphabet::BINARY);
        for s in ["", "0", "1", "101"] {
            for t in ["", "0", "1"] {
                let p = Program::from_bits_unchecked(gamma(3)).then(Program::parse(s).unwrap().bits());
                let x = FinStr::bin(&format!("0001{t}"));
                assert!(e.contains(&p, &x, &y), "p={p} x={x}");
            }
        }
        assert!(e.validate().is_correct());
    }

    #[test]
    fn empty_registry_gives_empty_set() {
        let e = CorrectSet::induce(&MachineRegistry::empty(Alphabet::BINARY), Entry::Universal, Horizon::new(6, 64), 4)
            .unwrap();
        assert!(e.is_empty());
        assert!(e.validate().is_correct());
    }

    #[test]
    fn c_e_matches_kstar() {
        let reg = MachineRegistry::canonical(Alphabet::BINARY);
        let h = Horizon::new(7, 128);
        let e = CorrectSet::induce(&reg, Entry::Universal, h, 3).unwrap();
        for ((x, y), c) in e.complexities() {
            assert_eq!(enum_kstar(&reg, &y, &x, h).unwrap().value, Some(c), "x={x} y={y}");
        }
    }

    #[test]
    fn negative_controls() {
        let h = Horizon::new(6, 128);
        let base = CorrectSet::induce(&b3_only(), Entry::Universal, h, 4).unwrap();
        let roots = CorrectSet::roots(&b3_only(), Entry::Universal, h, 4).unwrap();
        let r = roots.iter().find(|r| r.condition.len() < 4 && r.program.len() < 6).unwrap();

        let mut conflict = base.clone();
        conflict.insert(&r.program, &r.condition, &r.output.pushed(1));
        assert!(conflict.validate().violations[0] > 0);

        let mut hole = base.clone();
        hole.remove(&r.program.clone().then(&[0]), &r.condition, &r.output);
        assert!(hole.validate().violations[1] > 0);

        let mut rootless = base.clone();
        rootless.remove(&r.program, &r.condition, &r.output);
        let v = rootless.validate();
        assert!(v.violations[2] > 0, "{v:?}");
    }
}
