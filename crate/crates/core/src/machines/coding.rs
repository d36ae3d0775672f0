//! Elias gamma and the number/string codes used by registry programs.

use std::fmt;

use serde::Serialize;

use crate::error::{input, Result};
use crate::measures::{Alphabet, FinStr};

/// A binary program: a sequence of bits, each 0 or 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Program {
    bits: Vec<u8>,
}

impl Program {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return input("program bits must be 0 or 1");
        }
        Ok(Program { bits })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bits = text
            .bytes()
            .filter(|b| !b.is_ascii_whitespace() && *b != b'.')
            .map(|b| match b {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => input(format!("bad program bit {:?}", b as char)),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Program { bits })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn then(mut self, more: &[u8]) -> Self {
        self.bits.extend_from_slice(more);
        self
    }

    pub(crate) fn from_bits_unchecked(bits: Vec<u8>) -> Self {
        Program { bits }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for Program {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `γ(n)`: `⌊log2 n⌋` zeros, then `n` in binary. Requires `n ≥ 1`.
pub fn gamma(n: u64) -> Vec<u8> {
    assert!(n >= 1, "gamma code is defined for n >= 1");
    let width = 64 - n.leading_zeros() as usize;
    let mut out = vec![0u8; width - 1];
    out.extend((0..width).rev().map(|i| ((n >> i) & 1) as u8));
    out
}

/// `ℓ(γ(n)) = 2⌊log2 n⌋ + 1`.
pub fn gamma_len(n: u64) -> usize {
    assert!(n >= 1, "gamma code is defined for n >= 1");
    2 * (63 - n.leading_zeros() as usize) + 1
}

/// Decodes one gamma code from the front of `bits`: `(n, bits used)`, or `None` if incomplete.
pub fn gamma_decode(bits: &[u8]) -> Option<(u64, usize)> {
    let zeros = bits.iter().position(|&b| b == 1)?;
    if zeros >= 64 || bits.len() < 2 * zeros + 1 {
        return None;
    }
    let n = bits[zeros..=2 * zeros].iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
    Some((n, 2 * zeros + 1))
}

/// Bits per literal symbol, `⌈log2 |X|⌉`.
pub fn symbol_width(alphabet: Alphabet) -> usize {
    let s = alphabet.size() as u64;
    (64 - (s - 1).leading_zeros()) as usize
}

/// Literal program payload for `x`: `γ(ℓ(x)+1)` then each symbol in `⌈log2|X|⌉` bits.
pub fn literal_payload(x: &FinStr) -> Vec<u8> {
    let w = symbol_width(x.alphabet());
    let mut out = gamma(x.len() as u64 + 1);
    for &s in x.syms() {
        out.extend((0..w).rev().map(|i| (s >> i) & 1));
    }
    out
}

/// `⟨n⟩`: the `n`-th string of `X*` in length-lexicographic order.
/// Over binary this is `n+1` in binary without its leading one.
pub fn nat_code(n: u64, alphabet: Alphabet) -> FinStr {
    let b = alphabet.size() as u128;
    let mut rest = n as u128;
    let mut len = 0usize;
    let mut block = 1u128;
    while rest >= block {
        rest -= block;
        block *= b;
        len += 1;
    }
    let mut syms = vec![0u8; len];
    for slot in syms.iter_mut().rev() {
        *slot = (rest % b) as u8;
        rest /= b;
    }
    FinStr::new(alphabet, syms).expect("digits below alphabet size")
}

/// Inverse of [`nat_code`]; `None` on overflow.
pub fn nat_decode(x: &FinStr) -> Option<u64> {
    let b = x.alphabet().size() as u128;
    let mut offset = 0u128;
    let mut block = 1u128;
    for _ in 0..x.len() {
        offset = offset.checked_add(block)?;
        block = block.checked_mul(b)?;
    }
    let digits = x.syms().iter().try_fold(0u128, |acc, &s| acc.checked_mul(b)?.checked_add(s as u128))?;
    u64::try_from(offset.checked_add(digits)?).ok()
}

/// Zigzag map `0,-1,1,-2,… → 0,1,2,3,…`, then [`nat_code`].
pub fn int_code(v: i64, alphabet: Alphabet) -> FinStr {
    let z = ((v << 1) ^ (v >> 63)) as u64;
    nat_code(z, alphabet)
}
