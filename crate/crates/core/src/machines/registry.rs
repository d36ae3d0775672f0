//! The registry of base machines and the universal machine built from it.
//!
//! A universal program is `γ(i) ++ payload`: the gamma code of a 1-based base
//! index followed by whatever that base reads. Base lineup of the canonical
//! registry, over alphabet `X`:
//!
//! | index | name | modes | behavior |
//! |---|---|---|---|
//! | 1 | `literal` | all | reads `γ(n+1)` then `n` symbols of `⌈log2|X|⌉` bits, emitting each; halts |
//! | 2 | `unary` | monotone | reads `γ(n)`, emits `0^{n-1}1` then `1` forever |
//! | 3 | `zero-counter` | prefix, twice-prefix | reads the condition up to its first nonzero symbol, emits `⟨zeros⟩` |
//! | 4 | `copy-condition` | prefix | emits the whole condition |
//! | 5 | `condition-length` | prefix | emits `⟨ℓ(condition)⟩` |
//!
//! `⟨n⟩` is [`nat_code`]. Unknown indices and disabled bases diverge.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::coding::{gamma, gamma_len, nat_code, Program};
use super::run::{Limits, Mode, RunOutcome, Stall, Step, Tapes};
use crate::error::{Error, Result};
use crate::measures::{Alphabet, FinStr};

/// Version tag mixed into the registry hash.
pub const REGISTRY_VERSION: &str = "unipred-registry/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    Literal,
    Unary,
    ZeroCounter,
    CopyCondition,
    ConditionLength,
    /// Skips `0^n 1`, reads `0^m 1`, then copies the next `m` condition symbols.
    TailDecoder,
    /// Prefix machine that runs the preceding universal machine in twice-prefix mode.
    Simulator,
    /// Twice-prefix machine: reads `γ(l+1)`, then `l` condition symbols, then runs
    /// the preceding universal machine as a prefix machine with those symbols as condition.
    Combiner,
}

impl BaseKind {
    pub fn name(self) -> &'static str {
        match self {
            BaseKind::Literal => "literal",
            BaseKind::Unary => "unary",
            BaseKind::ZeroCounter => "zero-counter",
            BaseKind::CopyCondition => "copy-condition",
            BaseKind::ConditionLength => "condition-length",
            BaseKind::TailDecoder => "tail-decoder",
            BaseKind::Simulator => "simulator",
            BaseKind::Combiner => "combiner",
        }
    }

    pub fn modes(self) -> &'static [Mode] {
        match self {
            BaseKind::Literal => &[Mode::Prefix, Mode::Monotone, Mode::TwicePrefix],
            BaseKind::Unary => &[Mode::Monotone],
            BaseKind::ZeroCounter | BaseKind::TailDecoder => &[Mode::Prefix, Mode::TwicePrefix],
            BaseKind::CopyCondition | BaseKind::ConditionLength | BaseKind::Simulator => &[Mode::Prefix],
            BaseKind::Combiner => &[Mode::TwicePrefix],
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        [
            BaseKind::Literal,
            BaseKind::Unary,
            BaseKind::ZeroCounter,
            BaseKind::CopyCondition,
            BaseKind::ConditionLength,
            BaseKind::TailDecoder,
            BaseKind::Simulator,
            BaseKind::Combiner,
        ]
        .into_iter()
        .find(|k| k.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseMachine {
    pub kind: BaseKind,
    pub enabled: bool,
}

impl BaseMachine {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn supports(&self, mode: Mode) -> bool {
        self.enabled && self.kind.modes().contains(&mode)
    }
}

/// Where a run starts: the universal machine, or one base directly (no index code).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entry {
    Universal,
    Base(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineRegistry {
    alphabet: Alphabet,
    bases: Vec<BaseMachine>,
}

impl MachineRegistry {
    /// The five-base canonical registry.
    pub fn canonical(alphabet: Alphabet) -> Self {
        let kinds = [
            BaseKind::Literal,
            BaseKind::Unary,
            BaseKind::ZeroCounter,
            BaseKind::CopyCondition,
            BaseKind::ConditionLength,
        ];
        MachineRegistry::from_kinds(alphabet, &kinds)
    }

    pub fn from_kinds(alphabet: Alphabet, kinds: &[BaseKind]) -> Self {
        let bases = kinds.iter().map(|&kind| BaseMachine { kind, enabled: true }).collect();
        MachineRegistry { alphabet, bases }
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        MachineRegistry { alphabet, bases: Vec::new() }
    }

    /// Keeps index positions but disables every base not named.
    pub fn restrict(&self, names: &[&str]) -> Self {
        let mut r = self.clone();
        for b in &mut r.bases {
            b.enabled = names.contains(&b.name());
        }
        r
    }

    pub fn push(&mut self, kind: BaseKind) -> usize {
        self.bases.push(BaseMachine { kind, enabled: true });
        self.bases.len()
    }

    /// Canonical registry plus the tail decoder at index 6.
    pub fn with_tail_decoder(alphabet: Alphabet) -> Self {
        let mut r = MachineRegistry::canonical(alphabet);
        r.push(BaseKind::TailDecoder);
        r
    }

    /// Appends the combining machine; returns the extended registry and its index.
    pub fn build_min_l_machine(&self) -> (Self, usize) {
        let mut r = self.clone();
        let idx = r.push(BaseKind::Combiner);
        (r, idx)
    }

    /// Appends the sequential simulator; returns the extended registry and its index.
    pub fn with_simulator(&self) -> (Self, usize) {
        let mut r = self.clone();
        let idx = r.push(BaseKind::Simulator);
        (r, idx)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn bases(&self) -> &[BaseMachine] {
        &self.bases
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    /// 1-based index of the first base of this kind.
    pub fn index_of(&self, kind: BaseKind) -> Option<usize> {
        self.bases.iter().position(|b| b.kind == kind).map(|i| i + 1)
    }

    /// `ℓ(γ(index))`.
    pub fn index_cost(index: usize) -> usize {
        gamma_len(index as u64)
    }

    /// `γ(index) ++ payload`.
    pub fn program(index: usize, payload: &[u8]) -> Program {
        Program::from_bits_unchecked(gamma(index as u64)).then(payload)
    }

    pub fn supports(&self, mode: Mode) -> bool {
        self.bases.iter().any(|b| b.supports(mode))
    }

    /// Hex SHA-256 over version, alphabet and the ordered base list.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(REGISTRY_VERSION.as_bytes());
        h.update([0, self.alphabet.size() as u8]);
        for b in &self.bases {
            h.update([0]);
            h.update(b.name().as_bytes());
            h.update([b.enabled as u8]);
        }
        hex::encode(h.finalize())
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            version: REGISTRY_VERSION.to_string(),
            alphabet: self.alphabet.size(),
            hash: self.hash(),
            bases: self
                .bases
                .iter()
                .enumerate()
                .map(|(i, b)| ManifestBase {
                    index: i + 1,
                    name: b.name().to_string(),
                    enabled: b.enabled,
                    modes: b.kind.modes().iter().map(|m| m.name().to_string()).collect(),
                })
                .collect(),
        }
    }

    /// Rebuilds a registry from a manifest, refusing it if the recorded hash differs.
    pub fn from_manifest(m: &Manifest) -> Result<Self> {
        if m.version != REGISTRY_VERSION {
            return Err(Error::Config(format!("registry version {:?} is not {REGISTRY_VERSION:?}", m.version)));
        }
        let alphabet = Alphabet::new(m.alphabet)?;
        let mut bases = Vec::new();
        for (i, b) in m.bases.iter().enumerate() {
            if b.index != i + 1 {
                return Err(Error::Config(format!("base {:?} listed at position {} with index {}", b.name, i + 1, b.index)));
            }
            let kind = BaseKind::from_name(&b.name).ok_or_else(|| Error::Config(format!("unknown base {:?}", b.name)))?;
            bases.push(BaseMachine { kind, enabled: b.enabled });
        }
        let reg = MachineRegistry { alphabet, bases };
        if reg.hash() != m.hash {
            return Err(Error::Config(format!("registry hash mismatch: manifest {}, built {}", m.hash, reg.hash())));
        }
        Ok(reg)
    }

    /// Runs `p` on the universal machine.
    pub fn run(&self, mode: Mode, p: &Program, cond: &FinStr, limits: Limits) -> Result<RunOutcome> {
        self.run_entry(Entry::Universal, mode, p, cond, limits)
    }

    pub fn run_entry(&self, entry: Entry, mode: Mode, p: &Program, cond: &FinStr, limits: Limits) -> Result<RunOutcome> {
        cond.check_alphabet(self.alphabet)?;
        if let Entry::Base(i) = entry {
            if i == 0 || i > self.bases.len() {
                return Err(Error::Input(format!("base index {i} out of range 1..={}", self.bases.len())));
            }
        }
        Ok(self.run_bits(entry, mode, p.bits(), cond.syms(), limits))
    }

    pub(crate) fn run_bits(&self, entry: Entry, mode: Mode, p: &[u8], cond: &[u8], limits: Limits) -> RunOutcome {
        let mut t = Tapes::new(mode, self.alphabet, p, cond, limits);
        let r = match entry {
            Entry::Universal => run_universal(&self.bases, &mut t),
            Entry::Base(i) => run_base(&self.bases, i - 1, &mut t),
        };
        t.finish(r)
    }
}

/// Serializable registry identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub alphabet: usize,
    pub hash: String,
    pub bases: Vec<ManifestBase>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestBase {
    pub index: usize,
    pub name: String,
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default)]
    pub modes: Vec<String>,
}

fn yes() -> bool {
    true
}

fn run_universal(bases: &[BaseMachine], t: &mut Tapes) -> Step<()> {
    let idx = t.read_gamma()? as usize;
    match bases.get(idx - 1) {
        Some(b) if b.supports(t.mode) => run_base(bases, idx - 1, t),
        Some(b) if b.enabled => Err(Stall::Unsupported),
        _ => Err(t.diverge()),
    }
}

fn emit_nat(t: &mut Tapes, n: u64) -> Step<()> {
    let code = nat_code(n, t.alphabet());
    t.emit_all(&code)
}

/// Counts zero symbols up to and including the first nonzero one.
fn count_zeros(t: &mut Tapes) -> Step<u64> {
    let mut n = 0;
    while t.read_cond()? == 0 {
        n += 1;
    }
    Ok(n)
}

fn run_base(bases: &[BaseMachine], i: usize, t: &mut Tapes) -> Step<()> {
    let b = &bases[i];
    if !b.supports(t.mode) {
        return Err(if b.enabled { Stall::Unsupported } else { t.diverge() });
    }
    match b.kind {
        BaseKind::Literal => {
            let n = t.read_gamma()? - 1;
            for _ in 0..n {
                let s = t.read_symbol()?;
                t.emit(s)?;
            }
            Ok(())
        }
        BaseKind::Unary => {
            let n = t.read_gamma()?;
            for _ in 1..n {
                t.emit(0)?;
            }
            loop {
                t.emit(1)?;
            }
        }
        BaseKind::ZeroCounter => {
            let n = count_zeros(t)?;
            emit_nat(t, n)
        }
        BaseKind::CopyCondition => {
            let n = t.cond_len()?;
            for _ in 0..n {
                let s = t.read_cond()?;
                t.emit(s)?;
            }
            Ok(())
        }
        BaseKind::ConditionLength => {
            let n = t.cond_len()?;
            emit_nat(t, n as u64)
        }
        BaseKind::TailDecoder => {
            count_zeros(t)?;
            let m = count_zeros(t)?;
            for _ in 0..m {
                let s = t.read_cond()?;
                t.emit(s)?;
            }
            Ok(())
        }
        BaseKind::Simulator => {
            t.mode = Mode::TwicePrefix;
            run_universal(&bases[..i], t)
        }
        BaseKind::Combiner => {
            let l = t.read_gamma()? - 1;
            let mut head = Vec::with_capacity(l as usize);
            for _ in 0..l {
                head.push(t.read_cond()?);
            }
            t.enter_prefix_with(head);
            run_universal(&bases[..i], t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::coding::literal_payload;
    use crate::machines::run::RunStatus;

    fn bin() -> MachineRegistry {
        MachineRegistry::canonical(Alphabet::BINARY)
    }

    #[test]
    fn literal_example() {
        let p = MachineRegistry::program(1, &literal_payload(&FinStr::bin("101")));
        assert_eq!(p.to_string(), "100100101");
        let r = bin().run(Mode::Prefix, &p, &FinStr::bin(""), Limits::default()).unwrap();
        assert_eq!(r.status, RunStatus::Halted);
        assert_eq!(r.output, FinStr::bin("101"));
        assert_eq!(r.program_bits_consumed, 9);
    }

    #[test]
    fn unary_example() {
        let p = MachineRegistry::program(2, &gamma(3));
        let r = bin().run(Mode::Monotone, &p, &FinStr::bin(""), Limits::new(100, 6)).unwrap();
        assert_eq!(r.stall, Some(Stall::OutputLimit));
        assert_eq!(r.output, FinStr::bin("001111"));
        let r = bin().run(Mode::Prefix, &p, &FinStr::bin(""), Limits::default()).unwrap();
        assert_eq!(r.status, RunStatus::OutOfFuel);
    }

    #[test]
    fn zero_counter_example() {
        let p = MachineRegistry::program(3, &[]);
        for mode in [Mode::Prefix, Mode::TwicePrefix] {
            let r = bin().run(mode, &p, &FinStr::bin("00011"), Limits::default()).unwrap();
            assert_eq!(r.status, RunStatus::Halted);
            assert_eq!(r.output, nat_code(3, Alphabet::BINARY));
            assert_eq!(r.condition_symbols_consumed, 4);
        }
        let r = bin().run(Mode::TwicePrefix, &p, &FinStr::bin("000"), Limits::default()).unwrap();
        assert_eq!(r.stall, Some(Stall::ConditionExhausted));
    }

    #[test]
    fn copy_and_length_need_the_whole_condition() {
        let x = FinStr::bin("0110");
        let copy = MachineRegistry::program(4, &[]);
        let r = bin().run(Mode::Prefix, &copy, &x, Limits::default()).unwrap();
        assert_eq!(r.output, x);
        let r = bin().run(Mode::TwicePrefix, &copy, &x, Limits::default()).unwrap();
        assert_eq!(r.stall, Some(Stall::Unsupported));
        let len = MachineRegistry::program(5, &[]);
        let r = bin().run(Mode::Prefix, &len, &x, Limits::default()).unwrap();
        assert_eq!(r.output, nat_code(4, Alphabet::BINARY));
    }

    #[test]
    fn short_halt_and_fuel() {
        let p = MachineRegistry::program(1, &[1, 0]);
        let r = bin().run(Mode::Prefix, &p, &FinStr::bin(""), Limits::default()).unwrap();
        assert_eq!(r.status, RunStatus::HaltedShort);
        let long = MachineRegistry::program(1, &literal_payload(&FinStr::bin("1111")));
        let r = bin().run(Mode::Prefix, &long, &FinStr::bin(""), Limits::new(5, 64)).unwrap();
        assert_eq!((r.status, r.steps_used), (RunStatus::OutOfFuel, 5));
    }

    #[test]
    fn unknown_index_and_unterminated_gamma() {
        let p = MachineRegistry::program(9, &[]);
        let r = bin().run(Mode::Prefix, &p, &FinStr::bin(""), Limits::new(40, 8)).unwrap();
        assert_eq!((r.stall, r.steps_used), (Some(Stall::StepLimit), 40));
        let zeros = Program::parse("0000").unwrap();
        let r = bin().run(Mode::Prefix, &zeros, &FinStr::bin(""), Limits::default()).unwrap();
        assert_eq!((r.stall, r.program_bits_consumed), (Some(Stall::ProgramExhausted), 4));
    }

    #[test]
    fn combiner_reads_head_of_condition() {
        let (ext, c) = bin().build_min_l_machine();
        assert_eq!(c, 6);
        // l = 2, then copy-condition on the first two symbols
        let mut payload = gamma(3);
        payload.extend(gamma(4));
        let p = MachineRegistry::program(c, &payload);
        let r = ext.run(Mode::TwicePrefix, &p, &FinStr::bin("10111"), Limits::default()).unwrap();
        assert_eq!(r.status, RunStatus::Halted);
        assert_eq!(r.output, FinStr::bin("10"));
        assert_eq!(r.condition_symbols_consumed, 2);
        let standalone = Program::from_bits_unchecked(payload);
        let r = ext.run_entry(Entry::Base(c), Mode::TwicePrefix, &standalone, &FinStr::bin("10111"), Limits::default());
        assert_eq!(r.unwrap().output, FinStr::bin("10"));
    }

    #[test]
    fn manifest_round_trip_and_pin() {
        let reg = MachineRegistry::with_tail_decoder(Alphabet::TERNARY);
        let text = toml::to_string(&reg.manifest()).unwrap();
        let back: Manifest = toml::from_str(&text).unwrap();
        assert_eq!(MachineRegistry::from_manifest(&back).unwrap(), reg);
        let mut bad = back.clone();
        bad.hash = "00".into();
        assert!(MachineRegistry::from_manifest(&bad).is_err());
        assert_ne!(bin().hash(), bin().restrict(&["zero-counter"]).hash());
    }
}
