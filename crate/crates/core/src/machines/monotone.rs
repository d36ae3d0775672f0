//! Monotone enumeration: `M_L`, `Km_L` and the machine semimeasure.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::coding::{gamma_decode, Program};
use super::enumerate::{explore, Horizon};
use super::registry::{Entry, MachineRegistry};
use super::run::Mode;
use crate::error::{input, Result};
use crate::measures::{Alphabet, Cursor, Evaluate, FinStr, StringCursor};
use crate::rational::{DyadicSum, MeasureValue};

/// A program whose output grew relative to its parent (plus the root).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Record {
    out: Vec<u8>,
    bits: Vec<u8>,
    parent_len: Option<usize>,
}

impl Record {
    fn base(&self) -> Option<usize> {
        gamma_decode(&self.bits).map(|(i, _)| i as usize)
    }

    /// Minimal for `x`: output extends `x`, the parent's output does not.
    fn minimal_for(&self, len: usize) -> bool {
        self.parent_len.is_none_or(|p| p < len)
    }
}

/// Every output-growing node of the monotone program tree within a horizon.
#[derive(Clone, Debug)]
pub struct MonotoneTable {
    alphabet: Alphabet,
    horizon: Horizon,
    records: Vec<Record>,
    nodes: u64,
}

/// `Km_L(x)` with its witness.
#[derive(Clone, Debug, Serialize)]
pub struct KmWitness {
    pub value: usize,
    pub program: Program,
    pub output: FinStr,
}

impl MonotoneTable {
    pub fn build(reg: &MachineRegistry, h: Horizon) -> Result<Self> {
        let empty: [u8; 0] = [];
        let (mut records, nodes) = explore(
            reg,
            Entry::Universal,
            Mode::Monotone,
            &empty,
            h,
            |bits, run, parent, acc: &mut (Vec<Record>, u64)| {
                acc.1 += 1;
                let out = run.output.syms();
                if parent.is_none_or(|p| out.len() > p) {
                    acc.0.push(Record { out: out.to_vec(), bits: bits.to_vec(), parent_len: parent });
                }
            },
            || (Vec::new(), 0u64),
            |mut a, b| {
                a.0.extend(b.0);
                a.1 += b.1;
                a
            },
        )?;
        records.sort();
        Ok(MonotoneTable { alphabet: reg.alphabet(), horizon: h, records, nodes })
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    /// Records whose output extends `x`: a contiguous range in sorted order.
    fn extending<'a>(&'a self, x: &'a FinStr) -> impl Iterator<Item = &'a Record> + 'a {
        let start = self.records.partition_point(|r| r.out.as_slice() < x.syms());
        self.records[start..].iter().take_while(move |r| r.out.starts_with(x.syms()))
    }

    /// `M_L(x) = Σ 2^{-ℓ(p)}` over minimal programs whose output extends `x`.
    pub fn m_l(&self, x: &FinStr) -> Result<MeasureValue> {
        x.check_alphabet(self.alphabet)?;
        let mut s = DyadicSum::new(self.horizon.max_len);
        for r in self.extending(x).filter(|r| r.minimal_for(x.len())) {
            s.add_pow2_neg(r.bits.len());
        }
        Ok(s.value())
    }

    /// `M_L(x)` split by the base index each minimal program selects.
    pub fn m_l_by_base(&self, x: &FinStr) -> Result<BTreeMap<usize, MeasureValue>> {
        x.check_alphabet(self.alphabet)?;
        let mut parts: BTreeMap<usize, DyadicSum> = BTreeMap::new();
        for r in self.extending(x).filter(|r| r.minimal_for(x.len())) {
            let base = r.base().unwrap_or(0);
            parts.entry(base).or_insert_with(|| DyadicSum::new(self.horizon.max_len)).add_pow2_neg(r.bits.len());
        }
        Ok(parts.into_iter().map(|(k, v)| (k, v.value())).collect())
    }

    /// `Km_L(x)`: shortest program whose output extends `x`.
    pub fn km_l(&self, x: &FinStr) -> Result<Option<KmWitness>> {
        x.check_alphabet(self.alphabet)?;
        let best = self.extending(x).min_by(|a, b| (a.bits.len(), &a.bits).cmp(&(b.bits.len(), &b.bits)));
        Ok(best.map(|r| KmWitness {
            value: r.bits.len(),
            program: Program::from_bits_unchecked(r.bits.clone()),
            output: FinStr::new(self.alphabet, r.out.clone()).expect("recorded output"),
        }))
    }
}

/// `M_L` over a registry as a semimeasure.
#[derive(Debug)]
pub struct MachineSemimeasure {
    registry: Arc<MachineRegistry>,
    table: MonotoneTable,
}

impl MachineSemimeasure {
    pub fn new(registry: Arc<MachineRegistry>, h: Horizon) -> Result<Self> {
        let table = MonotoneTable::build(&registry, h)?;
        Ok(MachineSemimeasure { registry, table })
    }

    /// Canonical registry, parameters `L=..,S=..` plus optional `A=` (alphabet) and `O=` (output cap).
    pub fn from_params(params: &str) -> Result<Self> {
        let mut len = None;
        let mut steps = None;
        let mut alphabet = Alphabet::BINARY;
        let mut out = None;
        for kv in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let Some((k, v)) = kv.split_once('=') else {
                return input(format!("expected KEY=VALUE in machine spec, got {kv:?}"));
            };
            let n: u64 = v.trim().parse().map_err(|_| crate::Error::Input(format!("bad number {v:?}")))?;
            match k.trim() {
                "L" => len = Some(n as usize),
                "S" => steps = Some(n),
                "A" => alphabet = Alphabet::new(n as usize)?,
                "O" => out = Some(n as usize),
                other => return input(format!("unknown machine parameter {other:?}")),
            }
        }
        let (Some(len), Some(steps)) = (len, steps) else {
            return input("machine spec needs L= and S=");
        };
        let mut h = Horizon::new(len, steps);
        if let Some(o) = out {
            h = h.with_output(o);
        }
        MachineSemimeasure::new(Arc::new(MachineRegistry::canonical(alphabet)), h)
    }

    pub fn canonical(&self) -> String {
        let h = self.table.horizon;
        let mut s = format!("machine:L={},S={}", h.max_len, h.steps());
        if self.registry.alphabet() != Alphabet::BINARY {
            s.push_str(&format!(",A={}", self.registry.alphabet().size()));
        }
        if h.limits.max_output != Horizon::new(0, 0).limits.max_output {
            s.push_str(&format!(",O={}", h.limits.max_output));
        }
        s
    }

    pub fn registry(&self) -> &MachineRegistry {
        &self.registry
    }

    pub fn table(&self) -> &MonotoneTable {
        &self.table
    }
}

impl Evaluate for MachineSemimeasure {
    fn alphabet(&self) -> Alphabet {
        self.registry.alphabet()
    }

    fn eval(&self, x: &FinStr) -> Result<MeasureValue> {
        self.table.m_l(x)
    }

    fn label(&self) -> String {
        self.canonical()
    }

    fn cursor<'a>(&'a self, x: &FinStr) -> Result<Box<dyn Cursor<'a> + 'a>> {
        StringCursor::boxed(self, x)
    }
}
