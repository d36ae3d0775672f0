//! Execution model: a program tape, a condition tape and an output stream.
//!
//! Every tape action costs one step. A run that asks for more program bits than
//! it was given stalls with [`Stall::ProgramExhausted`]; only such runs can be
//! changed by extending the program, which is what the enumerators rely on.

use std::borrow::Cow;

use serde::Serialize;

use crate::measures::{Alphabet, FinStr};

/// Machine type, fixing which tape semantics apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Halting machine with a self-delimiting program; the condition is given whole.
    Prefix,
    /// Output stream, no halting required.
    Monotone,
    /// Self-delimiting on both program and condition; the condition is read sequentially.
    TwicePrefix,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Prefix => "prefix",
            Mode::Monotone => "monotone",
            Mode::TwicePrefix => "twice-prefix",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Limits {
    pub max_steps: u64,
    pub max_output: usize,
}

impl Limits {
    pub fn new(max_steps: u64, max_output: usize) -> Self {
        Limits { max_steps, max_output }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_steps: 256, max_output: 64 }
    }
}

/// Why a run stopped without halting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stall {
    ProgramExhausted,
    ConditionExhausted,
    StepLimit,
    OutputLimit,
    /// The selected base does not support the run mode.
    Unsupported,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    /// Halted after reading exactly the whole program.
    Halted,
    /// Halted before reading all program bits: a proper prefix is the real program.
    HaltedShort,
    OutOfFuel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub stall: Option<Stall>,
    pub output: FinStr,
    pub program_bits_consumed: usize,
    pub condition_symbols_consumed: usize,
    pub steps_used: u64,
}

impl RunOutcome {
    pub fn halted(&self) -> bool {
        self.status == RunStatus::Halted
    }
}

pub(crate) type Step<T> = std::result::Result<T, Stall>;

pub(crate) struct Tapes<'a> {
    pub(crate) mode: Mode,
    alphabet: Alphabet,
    program: &'a [u8],
    pos: usize,
    cond: Cow<'a, [u8]>,
    cond_pos: usize,
    outer_cond: Option<usize>,
    out: Vec<u8>,
    steps: u64,
    limits: Limits,
}

impl<'a> Tapes<'a> {
    pub(crate) fn new(mode: Mode, alphabet: Alphabet, program: &'a [u8], cond: &'a [u8], limits: Limits) -> Self {
        Tapes {
            mode,
            alphabet,
            program,
            pos: 0,
            cond: Cow::Borrowed(cond),
            cond_pos: 0,
            outer_cond: None,
            out: Vec::new(),
            steps: 0,
            limits,
        }
    }

    pub(crate) fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn spend(&mut self) -> Step<()> {
        if self.steps >= self.limits.max_steps {
            return Err(Stall::StepLimit);
        }
        self.steps += 1;
        Ok(())
    }

    /// Burns the remaining fuel: divergence is indistinguishable from running out.
    pub(crate) fn diverge(&mut self) -> Stall {
        self.steps = self.limits.max_steps;
        Stall::StepLimit
    }

    pub(crate) fn read_bit(&mut self) -> Step<u8> {
        self.spend()?;
        let b = *self.program.get(self.pos).ok_or(Stall::ProgramExhausted)?;
        self.pos += 1;
        Ok(b)
    }

    pub(crate) fn read_cond(&mut self) -> Step<u8> {
        self.spend()?;
        let s = *self.cond.get(self.cond_pos).ok_or(Stall::ConditionExhausted)?;
        self.cond_pos += 1;
        Ok(s)
    }

    /// Length of the condition; only prefix machines see the condition whole.
    pub(crate) fn cond_len(&mut self) -> Step<usize> {
        self.spend()?;
        if self.mode != Mode::Prefix {
            return Err(Stall::Unsupported);
        }
        Ok(self.cond.len())
    }

    pub(crate) fn emit(&mut self, s: u8) -> Step<()> {
        self.spend()?;
        if self.out.len() >= self.limits.max_output {
            return Err(Stall::OutputLimit);
        }
        self.out.push(s);
        Ok(())
    }

    pub(crate) fn emit_all(&mut self, x: &FinStr) -> Step<()> {
        x.syms().iter().try_for_each(|&s| self.emit(s))
    }

    /// Reads `γ(n)`. Codes wider than 63 zeros diverge.
    pub(crate) fn read_gamma(&mut self) -> Step<u64> {
        let mut zeros = 0u32;
        while self.read_bit()? == 0 {
            zeros += 1;
            if zeros > 62 {
                return Err(self.diverge());
            }
        }
        let mut n = 1u64;
        for _ in 0..zeros {
            n = (n << 1) | self.read_bit()? as u64;
        }
        Ok(n)
    }

    /// Reads one literal symbol of `⌈log2|X|⌉` bits; an out-of-range code diverges.
    pub(crate) fn read_symbol(&mut self) -> Step<u8> {
        let width = super::coding::symbol_width(self.alphabet);
        let mut v = 0usize;
        for _ in 0..width {
            v = (v << 1) | self.read_bit()? as usize;
        }
        if v >= self.alphabet.size() {
            return Err(self.diverge());
        }
        Ok(v as u8)
    }

    /// Replaces the condition by `cond` and continues as a prefix machine,
    /// keeping the count of symbols read from the original tape.
    pub(crate) fn enter_prefix_with(&mut self, cond: Vec<u8>) {
        self.outer_cond = Some(self.outer_cond.unwrap_or(self.cond_pos));
        self.cond = Cow::Owned(cond);
        self.cond_pos = 0;
        self.mode = Mode::Prefix;
    }

    pub(crate) fn finish(self, result: Step<()>) -> RunOutcome {
        let (status, stall) = match result {
            Ok(()) if self.pos == self.program.len() => (RunStatus::Halted, None),
            Ok(()) => (RunStatus::HaltedShort, None),
            Err(s) => (RunStatus::OutOfFuel, Some(s)),
        };
        RunOutcome {
            status,
            stall,
            output: FinStr::new(self.alphabet, self.out).expect("emitted symbols are in the alphabet"),
            program_bits_consumed: self.pos,
            condition_symbols_consumed: self.outer_cond.unwrap_or(self.cond_pos),
            steps_used: self.steps,
        }
    }
}
