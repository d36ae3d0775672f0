//! Exact rational helpers and the few places where rationals meet floats.
//!
//! Everything in the exact path is a [`BigRational`]. Logarithms are taken
//! only at reporting time, one per exact ratio.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{input, Result};

/// Exact nonnegative probability value.
pub type MeasureValue = BigRational;

pub fn q(num: i64, den: i64) -> MeasureValue {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> MeasureValue {
    BigRational::zero()
}

pub fn one() -> MeasureValue {
    BigRational::one()
}

/// `2^-k` as an exact dyadic rational.
pub fn pow2_neg(k: usize) -> MeasureValue {
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

/// `|X|^-k`.
pub fn uniform_mass(alphabet_size: usize, k: usize) -> MeasureValue {
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(alphabet_size), k))
}

/// Parses `"num/den"`, `"num"` or a short decimal such as `"0.25"`.
pub fn parse_q(s: &str) -> Result<MeasureValue> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad(s))?;
        let d: BigInt = d.trim().parse().map_err(|_| bad(s))?;
        if d.is_zero() {
            return input(format!("zero denominator in {s:?}"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        let n: BigInt = digits.parse().map_err(|_| bad(s))?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(n, d));
    }
    let n: BigInt = s.parse().map_err(|_| bad(s))?;
    Ok(BigRational::from_integer(n))
}

fn bad(s: &str) -> crate::Error {
    crate::Error::Input(format!("not a rational: {s:?}"))
}

/// Canonical `"num/den"` text, always with a denominator.
pub fn fmt_q(v: &MeasureValue) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

fn bits(n: &BigInt) -> u64 {
    n.bits()
}

/// Natural log of a positive big integer without overflowing `f64`.
fn ln_int(n: &BigInt) -> f64 {
    debug_assert!(n.sign() == Sign::Plus);
    let b = bits(n);
    if b <= 1000 {
        let f: f64 = num_traits::ToPrimitive::to_f64(n).unwrap_or(f64::INFINITY);
        if f.is_finite() {
            return f.ln();
        }
    }
    let shift = b.saturating_sub(64);
    let top: f64 = num_traits::ToPrimitive::to_f64(&(n >> shift)).unwrap_or(0.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln v` for `v > 0`; `-inf` for `v == 0`.
pub fn ln_q(v: &MeasureValue) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    assert!(v.is_positive(), "ln of a negative rational");
    ln_int(v.numer()) - ln_int(v.denom())
}

/// `log2 v` for `v > 0`; `-inf` for `v == 0`.
pub fn log2_q(v: &MeasureValue) -> f64 {
    ln_q(v) / std::f64::consts::LN_2
}

pub fn to_f64(v: &MeasureValue) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let sign = if v.is_negative() { -1.0 } else { 1.0 };
    sign * ln_q(&v.abs()).exp()
}

/// `⌈log2 v⌉` computed exactly by integer comparison. `v` must be positive.
pub fn ceil_log2_q(v: &MeasureValue) -> i64 {
    assert!(v.is_positive(), "ceil_log2 of a nonpositive rational");
    let (n, d) = (v.numer(), v.denom());
    let guess = bits(n) as i64 - bits(d) as i64;
    // v <= 2^k  <=>  n * 2^-k <= d
    let le_pow2 = |k: i64| -> bool {
        if k >= 0 {
            n <= &(d << (k as usize))
        } else {
            (n << ((-k) as usize)) <= *d
        }
    };
    let mut k = guess - 1;
    while !le_pow2(k) {
        k += 1;
    }
    while le_pow2(k - 1) {
        k -= 1;
    }
    k
}

/// Rational bracket `lo < ln 2 < hi` from `terms` terms of `Σ 1/(k 2^k)`.
pub fn ln2_bracket(terms: usize) -> (MeasureValue, MeasureValue) {
    let mut lo = zero();
    for k in 1..=terms {
        lo += BigRational::new(BigInt::one(), BigInt::from(k) << k);
    }
    let tail = BigRational::new(BigInt::one(), BigInt::from(terms + 1) << terms);
    let hi = &lo + tail;
    (lo, hi)
}

/// Decides `v * ln 2 > threshold` exactly by refining a rational bracket of
/// `ln 2`. `ln 2` is irrational, so the loop terminates for rational input.
pub fn times_ln2_exceeds(v: &MeasureValue, threshold: &MeasureValue) -> bool {
    if !v.is_positive() {
        return threshold.is_negative();
    }
    let mut terms = 16;
    loop {
        let (lo, hi) = ln2_bracket(terms);
        if &(v * &lo) > threshold {
            return true;
        }
        if &(v * &hi) <= threshold {
            return false;
        }
        terms *= 2;
    }
}

/// Exact dyadic accumulator: sums of `2^-len` kept as an integer over `2^scale`.
#[derive(Clone, Debug)]
pub struct DyadicSum {
    scale: usize,
    numer: BigUint,
}

impl DyadicSum {
    pub fn new(scale: usize) -> Self {
        DyadicSum { scale, numer: BigUint::zero() }
    }

    pub fn add_pow2_neg(&mut self, len: usize) {
        assert!(len <= self.scale, "dyadic term finer than the accumulator scale");
        self.numer += BigUint::one() << (self.scale - len);
    }

    pub fn merge(&mut self, other: &DyadicSum) {
        assert_eq!(self.scale, other.scale);
        self.numer += &other.numer;
    }

    pub fn value(&self) -> MeasureValue {
        BigRational::new(BigInt::from(self.numer.clone()), BigInt::one() << self.scale)
    }
}

/// Neumaier-compensated float summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `a / b`, or `None` when `b == 0`.
pub fn ratio(a: &MeasureValue, b: &MeasureValue) -> Option<MeasureValue> {
    if b.is_zero() {
        None
    } else {
        Some(a / b)
    }
}

/// True when the reduced denominator is a power of two.
pub fn is_dyadic(v: &MeasureValue) -> bool {
    let d = v.denom();
    d.trailing_zeros() == Some(d.bits() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("3/5").unwrap(), q(3, 5));
        assert_eq!(parse_q("2").unwrap(), q(2, 1));
        assert_eq!(parse_q("0.25").unwrap(), q(1, 4));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert_eq!(fmt_q(&q(2, 4)), "1/2");
    }

    #[test]
    fn ceil_log2_exact_on_powers_and_between() {
        assert_eq!(ceil_log2_q(&q(1, 1)), 0);
        assert_eq!(ceil_log2_q(&q(8, 1)), 3);
        assert_eq!(ceil_log2_q(&q(9, 1)), 4);
        assert_eq!(ceil_log2_q(&q(1, 8)), -3);
        assert_eq!(ceil_log2_q(&q(1, 9)), -3);
        assert_eq!(ceil_log2_q(&q(3, 4)), 0);
        assert_eq!(ceil_log2_q(&q(1, 3)), -1);
        for n in 1..200i64 {
            for d in 1..40i64 {
                let f = (n as f64 / d as f64).log2().ceil() as i64;
                let exact = ceil_log2_q(&q(n, d));
                // floats only disagree on exact powers of two, where ceil is exact anyway
                assert!((f - exact).abs() <= 1);
                let v = q(n, d);
                assert!(v <= BigRational::from_integer(BigInt::from(2)).pow(exact as i32));
                assert!(v > BigRational::from_integer(BigInt::from(2)).pow(exact as i32 - 1));
            }
        }
    }

    #[test]
    fn ln_of_huge_ratios() {
        let big = BigRational::new(BigInt::one() << 5000, BigInt::from(3));
        let expect = 5000.0 * std::f64::consts::LN_2 - 3f64.ln();
        assert!((ln_q(&big) - expect).abs() < 1e-9);
        assert!((ln_q(&q(1, 3)) + 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ln2_bracket_contains_ln2() {
        let (lo, hi) = ln2_bracket(20);
        assert!(to_f64(&lo) < std::f64::consts::LN_2);
        assert!(to_f64(&hi) > std::f64::consts::LN_2);
        // 3 ln2 * 3/5 > 1, 3 ln2 * 2/5 < 1
        assert!(times_ln2_exceeds(&q(9, 5), &one()));
        assert!(!times_ln2_exceeds(&q(6, 5), &one()));
    }

    #[test]
    fn dyadic_sum_is_exact() {
        let mut s = DyadicSum::new(10);
        s.add_pow2_neg(1);
        s.add_pow2_neg(2);
        s.add_pow2_neg(2);
        assert_eq!(s.value(), one());
        assert!(is_dyadic(&q(3, 8)));
        assert!(!is_dyadic(&q(1, 3)));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }
}
