//! Exhaustive program enumeration and the prefix-family estimators `K_L`, `K_L(y|x)`, `K*_L`.
//!
//! Programs are explored depth-first; a node is extended only when its run
//! stalled asking for another program bit, so the explored tree is exactly the
//! set of programs whose behavior can still change. Subtrees below a fixed
//! frontier run in parallel and are merged with order-independent reductions.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use super::coding::Program;
use super::registry::{Entry, MachineRegistry};
use super::run::{Limits, Mode, RunOutcome, RunStatus, Stall};
use crate::error::Result;
use crate::measures::FinStr;
use crate::rational::{DyadicSum, MeasureValue};

/// Enumeration horizon: program length bound `L` and run limits (`S` steps).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Horizon {
    #[serde(rename = "L")]
    pub max_len: usize,
    #[serde(flatten)]
    pub limits: Limits,
}

impl Horizon {
    pub fn new(max_len: usize, max_steps: u64) -> Self {
        Horizon { max_len, limits: Limits { max_steps, ..Limits::default() } }
    }

    pub fn with_output(mut self, max_output: usize) -> Self {
        self.limits.max_output = max_output;
        self
    }

    pub fn steps(&self) -> u64 {
        self.limits.max_steps
    }
}

const FRONTIER_DEPTH: usize = 8;

/// Visits every explored node. The callback sees the node's bits, its run and
/// the output length of its parent run (`None` at the root).
pub(crate) fn explore<P, V, N, M>(
    reg: &MachineRegistry,
    entry: Entry,
    mode: Mode,
    cond: &[u8],
    h: Horizon,
    visit: V,
    new: N,
    merge: M,
) -> Result<P>
where
    P: Send,
    V: Fn(&[u8], &RunOutcome, Option<usize>, &mut P) + Sync,
    N: Fn() -> P + Sync,
    M: Fn(P, P) -> P + Sync + Send,
{
    crate::ensure_budget(2u64.saturating_pow(h.max_len as u32 + 1))?;
    let mut acc = new();
    let mut frontier = Vec::new();
    walk(reg, entry, mode, cond, h, Vec::new(), None, Some(FRONTIER_DEPTH), &visit, &mut acc, &mut frontier);
    let rest = frontier
        .into_par_iter()
        .map(|(bits, parent)| {
            let mut part = new();
            let mut none = Vec::new();
            walk(reg, entry, mode, cond, h, bits, parent, None, &visit, &mut part, &mut none);
            part
        })
        .reduce(&new, &merge);
    Ok(merge(acc, rest))
}

#[allow(clippy::too_many_arguments)]
fn walk<P, V>(
    reg: &MachineRegistry,
    entry: Entry,
    mode: Mode,
    cond: &[u8],
    h: Horizon,
    mut bits: Vec<u8>,
    parent: Option<usize>,
    stop_at: Option<usize>,
    visit: &V,
    acc: &mut P,
    frontier: &mut Vec<(Vec<u8>, Option<usize>)>,
) where
    V: Fn(&[u8], &RunOutcome, Option<usize>, &mut P),
{
    if stop_at == Some(bits.len()) {
        frontier.push((bits, parent));
        return;
    }
    let run = reg.run_bits(entry, mode, &bits, cond, h.limits);
    visit(&bits, &run, parent, acc);
    if run.stall == Some(Stall::ProgramExhausted) && bits.len() < h.max_len {
        let out_len = run.output.len();
        bits.push(0);
        walk(reg, entry, mode, cond, h, bits.clone(), Some(out_len), stop_at, visit, acc, frontier);
        *bits.last_mut().expect("just pushed") = 1;
        walk(reg, entry, mode, cond, h, bits, Some(out_len), stop_at, visit, acc, frontier);
    }
}

/// Shortest halting program found for one output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub program: Program,
    /// Condition symbols read (`k` for twice-prefix runs).
    pub condition_used: usize,
    pub steps: u64,
}

impl Witness {
    pub fn len(&self) -> usize {
        self.program.len()
    }

    pub fn is_empty(&self) -> bool {
        self.program.is_empty()
    }

    /// Ordering used to break ties: length, then lexicographic bits.
    fn better_than(&self, other: &Witness) -> bool {
        (self.program.len(), self.program.bits()) < (other.program.len(), other.program.bits())
    }
}

#[derive(Clone, Debug)]
struct Partial {
    best: BTreeMap<FinStr, Witness>,
    kraft: DyadicSum,
    halting: u64,
    nodes: u64,
}

impl Partial {
    fn new(scale: usize) -> Self {
        Partial { best: BTreeMap::new(), kraft: DyadicSum::new(scale), halting: 0, nodes: 0 }
    }

    fn offer(&mut self, y: FinStr, w: Witness) {
        match self.best.get(&y) {
            Some(old) if !w.better_than(old) => {}
            _ => {
                self.best.insert(y, w);
            }
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        self.kraft.merge(&other.kraft);
        self.halting += other.halting;
        self.nodes += other.nodes;
        for (y, w) in other.best {
            self.offer(y, w);
        }
        self
    }
}

/// All halting programs within a horizon for a fixed condition, reduced to
/// the shortest witness per output.
#[derive(Clone, Debug)]
pub struct ComplexityTable {
    pub mode: Mode,
    pub entry: Entry,
    pub condition: FinStr,
    pub horizon: Horizon,
    best: BTreeMap<FinStr, Witness>,
    kraft: MeasureValue,
    halting: u64,
    nodes: u64,
}

impl ComplexityTable {
    pub fn build(reg: &MachineRegistry, entry: Entry, mode: Mode, cond: &FinStr, h: Horizon) -> Result<Self> {
        cond.check_alphabet(reg.alphabet())?;
        let scale = h.max_len;
        let part = explore(
            reg,
            entry,
            mode,
            cond.syms(),
            h,
            |bits, run, _, acc: &mut Partial| {
                acc.nodes += 1;
                if run.status == RunStatus::Halted {
                    acc.halting += 1;
                    acc.kraft.add_pow2_neg(bits.len());
                    let w = Witness {
                        program: Program::from_bits_unchecked(bits.to_vec()),
                        condition_used: run.condition_symbols_consumed,
                        steps: run.steps_used,
                    };
                    acc.offer(run.output.clone(), w);
                }
            },
            || Partial::new(scale),
            Partial::merge,
        )?;
        Ok(ComplexityTable {
            mode,
            entry,
            condition: cond.clone(),
            horizon: h,
            best: part.best,
            kraft: part.kraft.value(),
            halting: part.halting,
            nodes: part.nodes,
        })
    }

    pub fn get(&self, y: &FinStr) -> Option<&Witness> {
        self.best.get(y)
    }

    pub fn value(&self, y: &FinStr) -> Option<usize> {
        self.best.get(y).map(Witness::len)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&FinStr, &Witness)> {
        self.best.iter()
    }

    /// `Σ 2^{-ℓ(p)}` over halting programs.
    pub fn kraft_sum(&self) -> &MeasureValue {
        &self.kraft
    }

    /// `Σ_y 2^{-value(y)}`.
    pub fn complexity_kraft_sum(&self) -> MeasureValue {
        let mut s = DyadicSum::new(self.horizon.max_len);
        for w in self.best.values() {
            s.add_pow2_neg(w.len());
        }
        s.value()
    }

    pub fn halting_programs(&self) -> u64 {
        self.halting
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }
}

/// Tables keyed by condition, built on demand and shared.
pub struct TableCache {
    reg: Arc<MachineRegistry>,
    entry: Entry,
    mode: Mode,
    horizon: Horizon,
    tables: Mutex<HashMap<FinStr, Arc<ComplexityTable>>>,
}

impl TableCache {
    pub fn new(reg: Arc<MachineRegistry>, entry: Entry, mode: Mode, horizon: Horizon) -> Self {
        TableCache { reg, entry, mode, horizon, tables: Mutex::new(HashMap::new()) }
    }

    /// `K_L(·|x)` tables.
    pub fn prefix(reg: Arc<MachineRegistry>, horizon: Horizon) -> Self {
        TableCache::new(reg, Entry::Universal, Mode::Prefix, horizon)
    }

    /// `K*_L(·|x*)` tables.
    pub fn kstar(reg: Arc<MachineRegistry>, horizon: Horizon) -> Self {
        TableCache::new(reg, Entry::Universal, Mode::TwicePrefix, horizon)
    }

    pub fn registry(&self) -> &MachineRegistry {
        &self.reg
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn table(&self, cond: &FinStr) -> Result<Arc<ComplexityTable>> {
        if let Some(t) = self.tables.lock().expect("cache lock").get(cond) {
            return Ok(Arc::clone(t));
        }
        let t = Arc::new(ComplexityTable::build(&self.reg, self.entry, self.mode, cond, self.horizon)?);
        self.tables.lock().expect("cache lock").insert(cond.clone(), Arc::clone(&t));
        Ok(t)
    }

    pub fn value(&self, y: &FinStr, cond: &FinStr) -> Result<Option<usize>> {
        Ok(self.table(cond)?.value(y))
    }
}

/// Exported complexity query result.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexityRecord {
    pub quantity: &'static str,
    pub target: FinStr,
    pub condition: FinStr,
    #[serde(rename = "L")]
    pub max_len: usize,
    #[serde(rename = "S")]
    pub max_steps: u64,
    /// `None` when no program within the horizon produces the target.
    pub value: Option<usize>,
    pub witness_bits: Option<Program>,
    /// Condition symbols the witness read.
    pub k: Option<usize>,
}

impl ComplexityRecord {
    fn from_table(quantity: &'static str, t: &ComplexityTable, y: &FinStr) -> Self {
        let w = t.get(y);
        ComplexityRecord {
            quantity,
            target: y.clone(),
            condition: t.condition.clone(),
            max_len: t.horizon.max_len,
            max_steps: t.horizon.steps(),
            value: w.map(Witness::len),
            witness_bits: w.map(|w| w.program.clone()),
            k: w.map(|w| w.condition_used),
        }
    }
}

/// `K_L(y)`: shortest universal prefix program printing `y` within the horizon.
pub fn enum_k(reg: &MachineRegistry, y: &FinStr, h: Horizon) -> Result<ComplexityRecord> {
    enum_k_cond(reg, y, &FinStr::empty(reg.alphabet()), h)
}

/// `K_L(y|x)` with the condition given whole.
pub fn enum_k_cond(reg: &MachineRegistry, y: &FinStr, x: &FinStr, h: Horizon) -> Result<ComplexityRecord> {
    y.check_alphabet(reg.alphabet())?;
    let t = ComplexityTable::build(reg, Entry::Universal, Mode::Prefix, x, h)?;
    Ok(ComplexityRecord::from_table("K", &t, y))
}

/// `K*_L(y|x*)`: minimum over programs and `k ≤ ℓ(x)` with the run on `x_{1:k}`
/// halting after reading exactly `k` symbols. A twice-prefix run on `x` reads
/// some prefix `x_{1:k}` and behaves identically on it, so one run per program
/// covers every `k`.
pub fn enum_kstar(reg: &MachineRegistry, y: &FinStr, x: &FinStr, h: Horizon) -> Result<ComplexityRecord> {
    y.check_alphabet(reg.alphabet())?;
    let t = ComplexityTable::build(reg, Entry::Universal, Mode::TwicePrefix, x, h)?;
    Ok(ComplexityRecord::from_table("K*", &t, y))
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::*;

    /// Brute force over every program of length ≤ L.
    pub fn brute_force(
        reg: &MachineRegistry,
        entry: Entry,
        mode: Mode,
        cond: &FinStr,
        h: Horizon,
    ) -> (BTreeMap<FinStr, usize>, MeasureValue) {
        let mut best: BTreeMap<FinStr, usize> = BTreeMap::new();
        let mut kraft = DyadicSum::new(h.max_len);
        for len in 0..=h.max_len {
            for n in 0..(1u64 << len) {
                let bits: Vec<u8> = (0..len).rev().map(|i| ((n >> i) & 1) as u8).collect();
                let r = reg.run_bits(entry, mode, &bits, cond.syms(), h.limits);
                if r.status == RunStatus::Halted {
                    kraft.add_pow2_neg(len);
                    best.entry(r.output).or_insert(len);
                }
            }
        }
        (best, kraft.value())
    }
}
