use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

const DIGITS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// Finite alphabet `{0, .., size-1}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Alphabet(u8);

impl Alphabet {
    pub const BINARY: Alphabet = Alphabet(2);
    pub const TERNARY: Alphabet = Alphabet(3);

    pub fn new(size: usize) -> Result<Self> {
        if !(2..=36).contains(&size) {
            return input(format!("alphabet size must be in 2..=36, got {size}"));
        }
        Ok(Alphabet(size as u8))
    }

    pub fn size(self) -> usize {
        self.0 as usize
    }

    pub fn symbols(self) -> impl DoubleEndedIterator<Item = u8> + ExactSizeIterator {
        0..self.0
    }

    /// Number of strings of length `len`, saturating.
    pub fn count(self, len: usize) -> u64 {
        (self.0 as u64).saturating_pow(len as u32)
    }

    /// All strings of length exactly `len`, in lexicographic order.
    pub fn strings(self, len: usize) -> impl Iterator<Item = FinStr> {
        let total = self.count(len);
        let base = self.0 as u64;
        (0..total).map(move |mut idx| {
            let mut syms = vec![0u8; len];
            for slot in syms.iter_mut().rev() {
                *slot = (idx % base) as u8;
                idx /= base;
            }
            FinStr { alphabet: self, syms }
        })
    }

    /// All strings of length `0..=depth`, shortest first.
    pub fn strings_up_to(self, depth: usize) -> impl Iterator<Item = FinStr> {
        (0..=depth).flat_map(move |len| self.strings(len))
    }

    /// Number of strings of length `0..=depth`, saturating.
    pub fn count_up_to(self, depth: usize) -> u64 {
        (0..=depth).fold(0u64, |acc, l| acc.saturating_add(self.count(l)))
    }
}

impl TryFrom<u8> for Alphabet {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        Alphabet::new(v as usize)
    }
}

impl From<Alphabet> for u8 {
    fn from(a: Alphabet) -> u8 {
        a.0
    }
}

/// Finite string over an [`Alphabet`]. The empty string is allowed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinStr {
    alphabet: Alphabet,
    syms: Vec<u8>,
}

impl FinStr {
    pub fn empty(alphabet: Alphabet) -> Self {
        FinStr { alphabet, syms: Vec::new() }
    }

    pub fn new(alphabet: Alphabet, syms: Vec<u8>) -> Result<Self> {
        if let Some(&s) = syms.iter().find(|&&s| s as usize >= alphabet.size()) {
            return input(format!("symbol {s} outside alphabet of size {}", alphabet.size()));
        }
        Ok(FinStr { alphabet, syms })
    }

    /// Parses digit text (`0-9a-z`). An empty string or `"ε"` gives the empty string.
    pub fn parse(alphabet: Alphabet, text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "ε" || text == "-" {
            return Ok(FinStr::empty(alphabet));
        }
        let syms = text
            .bytes()
            .map(|b| {
                DIGITS
                    .iter()
                    .position(|&d| d == b.to_ascii_lowercase())
                    .map(|p| p as u8)
                    .ok_or_else(|| Error::Input(format!("bad symbol {:?} in {text:?}", b as char)))
            })
            .collect::<Result<Vec<u8>>>()?;
        FinStr::new(alphabet, syms)
    }

    /// Binary string shorthand; panics on non-binary text. Intended for literals.
    pub fn bin(text: &str) -> Self {
        FinStr::parse(Alphabet::BINARY, text).expect("binary literal")
    }

    pub fn repeat(alphabet: Alphabet, sym: u8, n: usize) -> Self {
        FinStr::new(alphabet, vec![sym; n]).expect("symbol in alphabet")
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn syms(&self) -> &[u8] {
        &self.syms
    }

    pub fn into_syms(self) -> Vec<u8> {
        self.syms
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    /// `x_{1:k}`.
    pub fn prefix(&self, k: usize) -> FinStr {
        FinStr { alphabet: self.alphabet, syms: self.syms[..k.min(self.len())].to_vec() }
    }

    /// `x_{k+1:ℓ(x)}`, the part after the first `k` symbols.
    pub fn suffix_from(&self, k: usize) -> FinStr {
        FinStr { alphabet: self.alphabet, syms: self.syms[k.min(self.len())..].to_vec() }
    }

    pub fn concat(&self, other: &FinStr) -> FinStr {
        debug_assert_eq!(self.alphabet, other.alphabet);
        let mut syms = self.syms.clone();
        syms.extend_from_slice(&other.syms);
        FinStr { alphabet: self.alphabet, syms }
    }

    pub fn pushed(&self, sym: u8) -> FinStr {
        debug_assert!((sym as usize) < self.alphabet.size());
        let mut syms = Vec::with_capacity(self.len() + 1);
        syms.extend_from_slice(&self.syms);
        syms.push(sym);
        FinStr { alphabet: self.alphabet, syms }
    }

    pub fn is_prefix_of(&self, other: &FinStr) -> bool {
        other.syms.starts_with(&self.syms)
    }

    pub fn check_alphabet(&self, expected: Alphabet) -> Result<()> {
        if self.alphabet != expected {
            return Err(Error::AlphabetMismatch {
                expected: expected.size(),
                got: self.alphabet.size(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for FinStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.syms {
            write!(f, "{}", DIGITS[s as usize] as char)?;
        }
        Ok(())
    }
}

impl Serialize for FinStr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
