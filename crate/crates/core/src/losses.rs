//! Per-step distances between predictive distributions and the cumulative divergence `D_{l:n}`.

use std::fmt;
use std::io::Write;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::measures::{Cursor, Evaluate, FinStr};
use crate::mixture::csv_err;
use crate::rational::{fmt_q, ln_q, parse_q, to_f64, uniform_mass, zero, CompensatedSum, MeasureValue};
use crate::report::{fmt_f64, ser_f64, ser_q};

/// Loss matrix: rows are symbols, columns are actions, entries in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LossMatrix {
    rows: Vec<Vec<MeasureValue>>,
}

impl LossMatrix {
    pub fn new(rows: Vec<Vec<MeasureValue>>) -> Result<Self> {
        let actions = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || actions == 0 {
            return input("loss matrix must have at least one symbol and one action");
        }
        if rows.iter().any(|r| r.len() != actions) {
            return input("loss matrix rows have different lengths");
        }
        if rows.iter().flatten().any(|v| v.is_negative() || *v > MeasureValue::from_integer(1.into())) {
            return input("loss entries must lie in [0, 1]");
        }
        Ok(LossMatrix { rows })
    }

    /// Error loss: 0 when the action names the symbol, 1 otherwise.
    pub fn zero_one(symbols: usize) -> Self {
        let rows = (0..symbols)
            .map(|x| (0..symbols).map(|y| if x == y { zero() } else { MeasureValue::from_integer(1.into()) }).collect())
            .collect();
        LossMatrix { rows }
    }

    /// Parses rows separated by `;`, entries by `,`.
    pub fn parse(text: &str) -> Result<Self> {
        let rows = text
            .split(';')
            .map(|r| r.split(',').map(|v| parse_q(v.trim())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        LossMatrix::new(rows)
    }

    pub fn symbols(&self) -> usize {
        self.rows.len()
    }

    pub fn actions(&self) -> usize {
        self.rows[0].len()
    }

    pub fn get(&self, symbol: usize, action: usize) -> &MeasureValue {
        &self.rows[symbol][action]
    }
}

impl fmt::Display for LossMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows.iter().map(|r| r.iter().map(fmt_q).collect::<Vec<_>>().join(",")).collect();
        f.write_str(&rows.join(";"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistanceKind {
    SquaredEuclid,
    SquaredAbs,
    Hellinger,
    Kl,
    SquaredRegret(LossMatrix),
}

impl DistanceKind {
    /// The five kinds, the regret kind with error loss.
    pub fn all(symbols: usize) -> Vec<DistanceKind> {
        vec![
            DistanceKind::SquaredEuclid,
            DistanceKind::SquaredAbs,
            DistanceKind::Hellinger,
            DistanceKind::Kl,
            DistanceKind::SquaredRegret(LossMatrix::zero_one(symbols)),
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistanceKind::SquaredEuclid => "squared-euclid",
            DistanceKind::SquaredAbs => "squared-abs",
            DistanceKind::Hellinger => "hellinger",
            DistanceKind::Kl => "kl",
            DistanceKind::SquaredRegret(_) => "squared-regret",
        }
    }

    /// Accepts the names above; `squared-regret` uses error loss over `symbols`.
    pub fn parse(name: &str, symbols: usize) -> Result<Self> {
        Ok(match name.trim() {
            "squared-euclid" | "euclid" => DistanceKind::SquaredEuclid,
            "squared-abs" | "abs" => DistanceKind::SquaredAbs,
            "hellinger" => DistanceKind::Hellinger,
            "kl" => DistanceKind::Kl,
            "squared-regret" | "regret" => DistanceKind::SquaredRegret(LossMatrix::zero_one(symbols)),
            other => return input(format!("unknown distance kind {other:?}")),
        })
    }

    /// Every kind but KL is at most 2 per step.
    pub fn is_bounded(&self) -> bool {
        !matches!(self, DistanceKind::Kl)
    }
}

/// `(action, l^ρ)` with `l^ρ = min_y Σ_x Loss(x, y) ρ(x)`; ties go to the lowest action.
pub fn bayes_action(rho: &[MeasureValue], loss: &LossMatrix) -> Result<(usize, MeasureValue)> {
    if rho.len() != loss.symbols() {
        return input(format!("distribution over {} symbols, loss matrix over {}", rho.len(), loss.symbols()));
    }
    let mut best: Option<(usize, MeasureValue)> = None;
    for y in 0..loss.actions() {
        let l: MeasureValue = rho.iter().enumerate().map(|(x, p)| loss.get(x, y) * p).sum();
        if best.as_ref().is_none_or(|(_, b)| l < *b) {
            best = Some((y, l));
        }
    }
    best.ok_or_else(|| Error::Input("loss matrix has no actions".into()))
}

/// `s_t` for one pair of next-symbol vectors. `ρ` is used as given (no renormalization).
/// KL returns `+inf` when `μ_a > 0 = ρ_a`.
pub fn step_distance(mu: &[MeasureValue], rho: &[MeasureValue], kind: &DistanceKind) -> Result<f64> {
    if mu.len() != rho.len() {
        return input(format!("distributions of length {} and {}", mu.len(), rho.len()));
    }
    Ok(match kind {
        DistanceKind::SquaredEuclid => {
            let s: MeasureValue = mu.iter().zip(rho).map(|(m, r)| (r - m) * (r - m)).sum();
            to_f64(&s)
        }
        DistanceKind::SquaredAbs => {
            let s: MeasureValue = mu.iter().zip(rho).map(|(m, r)| (r - m).abs()).sum();
            to_f64(&(&s * &s)) / 2.0
        }
        DistanceKind::Hellinger => {
            let mut acc = CompensatedSum::default();
            for (m, r) in mu.iter().zip(rho) {
                // (√ρ−√μ)² = (ρ−μ)²/(√ρ+√μ)², no cancellation
                let d = to_f64(&(r - m));
                let s = to_f64(r).sqrt() + to_f64(m).sqrt();
                if s > 0.0 {
                    acc.add(d * d / (s * s));
                }
            }
            acc.value()
        }
        DistanceKind::Kl => {
            let mut acc = CompensatedSum::default();
            for (m, r) in mu.iter().zip(rho) {
                if m.is_zero() {
                    continue;
                }
                if r.is_zero() {
                    return Ok(f64::INFINITY);
                }
                acc.add(to_f64(m) * ln_q(&(m / r)));
            }
            acc.value()
        }
        DistanceKind::SquaredRegret(loss) => {
            let (_, lr) = bayes_action(rho, loss)?;
            let (_, lm) = bayes_action(mu, loss)?;
            let d = lr - lm;
            to_f64(&(&d * &d)) / 2.0
        }
    })
}

/// Next-symbol vector at a cursor: children over parent, uniform if the parent is 0.
fn next_of<'a>(node: &dyn Cursor<'a>, kids: &[Box<dyn Cursor<'a> + 'a>]) -> Vec<MeasureValue> {
    let m = node.mass();
    if m.is_zero() {
        return vec![uniform_mass(kids.len(), 1); kids.len()];
    }
    kids.iter().map(|k| k.mass() / m).collect()
}

/// Per-kind expected distances and cumulative sums.
#[derive(Clone, Debug, Serialize)]
pub struct KindLedger {
    pub kind: String,
    /// `E[s_t | ω_{<l}]` for `t = l..=n`.
    #[serde(serialize_with = "ser_f64_vec")]
    pub per_step: Vec<f64>,
    /// `Σ_{t=l}^{m} E[s_t]` for `m = l..=n`.
    #[serde(serialize_with = "ser_f64_vec")]
    pub lhs: Vec<f64>,
}

fn ser_f64_vec<S: serde::Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        if x.is_finite() {
            seq.serialize_element(x)?;
        } else {
            seq.serialize_element(&fmt_f64(*x))?;
        }
    }
    seq.end()
}

/// Exhaustive expectation over all continuations of a history.
#[derive(Clone, Debug, Serialize)]
pub struct DivergenceLedger {
    pub mu: String,
    pub rho: String,
    pub history: FinStr,
    pub l: usize,
    pub n: usize,
    pub kinds: Vec<KindLedger>,
    /// `D_{l:m}` for `m = l..=n`; `inf` when `ρ` misses a `μ`-positive continuation.
    #[serde(serialize_with = "ser_f64_vec")]
    pub rhs: Vec<f64>,
    /// Exact totals `Σ_paths μ(path|ω_{<l})` per level (1 for measures).
    #[serde(serialize_with = "crate::report::ser_q_vec")]
    pub mass: Vec<MeasureValue>,
    pub chain_holds: bool,
    pub nondecreasing: bool,
}

/// Tolerance for float comparisons of accumulated logs.
pub const TOLERANCE: f64 = 1e-9;

impl DivergenceLedger {
    pub fn rhs_at(&self, n: usize) -> f64 {
        self.rhs[n - self.l]
    }

    pub fn lhs_at(&self, kind: usize, n: usize) -> f64 {
        self.kinds[kind].lhs[n - self.l]
    }

    pub fn rhs_infinite(&self) -> bool {
        self.rhs.iter().any(|v| v.is_infinite())
    }

    /// Long-format rows `(kind, l, n, lhs, rhs, slack)`.
    pub fn rows(&self) -> Vec<(String, usize, usize, f64, f64, f64)> {
        let mut out = Vec::new();
        for k in &self.kinds {
            for (i, (&lhs, &rhs)) in k.lhs.iter().zip(&self.rhs).enumerate() {
                out.push((k.kind.clone(), self.l, self.l + i, lhs, rhs, rhs - lhs));
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_ledger_csv(std::slice::from_ref(self), out)
    }
}

pub fn write_ledger_csv<W: Write>(ledgers: &[DivergenceLedger], out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["kind", "l", "n", "lhs", "rhs", "slack"]).map_err(csv_err)?;
    for led in ledgers {
        for (kind, l, n, lhs, rhs, slack) in led.rows() {
            wr.write_record([kind, l.to_string(), n.to_string(), fmt_f64(lhs), fmt_f64(rhs), fmt_f64(slack)])
                .map_err(csv_err)?;
        }
    }
    wr.flush()?;
    Ok(())
}

struct Accum {
    steps: Vec<Vec<CompensatedSum>>,
    logs: Vec<CompensatedSum>,
    infinite: Vec<bool>,
    mass: Vec<MeasureValue>,
}

/// `D_{l:n}(ω_{<l})` and `Σ_t E[s_t|ω_{<l}]` for each kind by exhaustive expectation,
/// with `l = ℓ(history) + 1`.
pub fn cumulative_divergence(
    mu: &dyn Evaluate,
    rho: &dyn Evaluate,
    history: &FinStr,
    n: usize,
    kinds: &[DistanceKind],
) -> Result<DivergenceLedger> {
    let alphabet = mu.alphabet();
    if rho.alphabet() != alphabet {
        return Err(Error::AlphabetMismatch { expected: alphabet.size(), got: rho.alphabet().size() });
    }
    history.check_alphabet(alphabet)?;
    let l = history.len() + 1;
    if n < l {
        return input(format!("n = {n} is before l = {l}"));
    }
    let m = n - l + 1;
    crate::ensure_budget(alphabet.count_up_to(m + 1))?;
    let mu_root = mu.cursor(history)?;
    if mu_root.mass().is_zero() {
        return Err(Error::DegenerateHistory(format!("μ({history}) = 0")));
    }
    let rho_root = rho.cursor(history)?;
    let rho_head = rho_root.mass().clone();
    let mu_head = mu_root.mass().clone();
    let mut acc = Accum {
        steps: vec![vec![CompensatedSum::default(); m]; kinds.len()],
        logs: vec![CompensatedSum::default(); m],
        infinite: vec![false; m],
        mass: vec![zero(); m],
    };
    descend(mu_root.as_ref(), rho_root.as_ref(), &mu_head, &rho_head, 0, m, kinds, &mut acc)?;

    let rhs: Vec<f64> =
        acc.logs.iter().zip(&acc.infinite).map(|(s, &inf)| if inf { f64::INFINITY } else { s.value() }).collect();
    let kinds_out: Vec<KindLedger> = kinds
        .iter()
        .zip(&acc.steps)
        .map(|(k, steps)| {
            let per_step: Vec<f64> = steps.iter().map(CompensatedSum::value).collect();
            let mut run = CompensatedSum::default();
            let lhs = per_step
                .iter()
                .map(|&v| {
                    run.add(v);
                    run.value()
                })
                .collect();
            KindLedger { kind: k.name().to_string(), per_step, lhs }
        })
        .collect();
    let chain_holds = kinds_out.iter().all(|k| {
        k.lhs.iter().zip(&rhs).all(|(&lhs, &r)| lhs >= -TOLERANCE && (r.is_infinite() || lhs <= r + TOLERANCE))
    });
    let nondecreasing = rhs.windows(2).all(|w| w[1] >= w[0] - TOLERANCE);
    Ok(DivergenceLedger {
        mu: mu.label(),
        rho: rho.label(),
        history: history.clone(),
        l,
        n,
        kinds: kinds_out,
        rhs,
        mass: acc.mass,
        chain_holds,
        nondecreasing,
    })
}

#[allow(clippy::too_many_arguments)]
fn descend<'a, 'b>(
    mu: &dyn Cursor<'a>,
    rho: &dyn Cursor<'b>,
    mu_head: &MeasureValue,
    rho_head: &MeasureValue,
    depth: usize,
    m: usize,
    kinds: &[DistanceKind],
    acc: &mut Accum,
) -> Result<()> {
    let weight = mu.mass() / mu_head;
    let mu_kids = mu.children();
    let rho_kids = rho.children();
    let mu_next = next_of(mu, &mu_kids);
    let rho_next = next_of(rho, &rho_kids);
    let w = to_f64(&weight);
    for (k, kind) in kinds.iter().enumerate() {
        let s = step_distance(&mu_next, &rho_next, kind)?;
        // KL may be infinite on a μ-null node only through w = 0
        if w > 0.0 {
            acc.steps[k][depth].add(w * s);
        }
    }
    for (mk, rk) in mu_kids.iter().zip(&rho_kids) {
        if mk.mass().is_zero() {
            continue;
        }
        let path_mu = mk.mass() / mu_head;
        acc.mass[depth] += &path_mu;
        if rk.mass().is_zero() || rho_head.is_zero() {
            acc.infinite[depth] = true;
        } else {
            let path_rho = rk.mass() / rho_head;
            acc.logs[depth].add(to_f64(&path_mu) * ln_q(&(&path_mu / &path_rho)));
        }
        if depth + 1 < m {
            descend(mk.as_ref(), rk.as_ref(), mu_head, rho_head, depth + 1, m, kinds, acc)?;
        }
    }
    Ok(())
}

/// Monte Carlo estimate: mean and standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    #[serde(serialize_with = "ser_f64")]
    pub mean: f64,
    #[serde(serialize_with = "ser_f64")]
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloLedger {
    pub l: usize,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// `Σ_{t=l}^n s_t` per kind.
    pub lhs: Vec<(String, Estimate)>,
    /// `ln μ(ω_{l:n}|ω_{<l}) / ρ(ω_{l:n}|ω_{<l})`.
    pub rhs: Estimate,
    /// Samples on which `ρ` gave a sampled continuation probability 0.
    pub infinite_samples: u64,
}

pub(crate) const CHUNK: u64 = 256;

#[derive(Clone, Default)]
pub(crate) struct Moments {
    count: u64,
    sum: CompensatedSum,
    sq: CompensatedSum,
}

impl Moments {
    pub(crate) fn add(&mut self, x: f64) {
        self.count += 1;
        self.sum.add(x);
        self.sq.add(x * x);
    }

    pub(crate) fn merge(&mut self, o: &Moments) {
        self.count += o.count;
        self.sum.add(o.sum.value());
        self.sq.add(o.sq.value());
    }

    pub(crate) fn estimate(&self) -> Estimate {
        if self.count == 0 {
            return Estimate { mean: 0.0, stderr: 0.0 };
        }
        let n = self.count as f64;
        let mean = self.sum.value() / n;
        let var = if self.count > 1 { ((self.sq.value() - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        Estimate { mean, stderr: (var / n).sqrt() }
    }
}

/// Seeded sampling of continuations from `μ(·|ω_{<l})`. Samples are split into
/// fixed chunks, each with its own ChaCha stream, so the result does not depend
/// on the number of worker threads.
pub fn monte_carlo_divergence(
    mu: &dyn Evaluate,
    rho: &dyn Evaluate,
    history: &FinStr,
    n: usize,
    kinds: &[DistanceKind],
    samples: u64,
    seed: u64,
) -> Result<MonteCarloLedger> {
    history.check_alphabet(mu.alphabet())?;
    let l = history.len() + 1;
    if n < l {
        return input(format!("n = {n} is before l = {l}"));
    }
    let chunks = samples.div_ceil(CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut lhs = vec![Moments::default(); kinds.len()];
            let mut rhs = Moments::default();
            let mut inf = 0u64;
            for _ in 0..count {
                let (s, d) = sample_path(mu, rho, history, n, kinds, &mut rng)?;
                for (m, v) in lhs.iter_mut().zip(s) {
                    m.add(v);
                }
                match d {
                    Some(d) => rhs.add(d),
                    None => inf += 1,
                }
            }
            Ok((lhs, rhs, inf))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut lhs = vec![Moments::default(); kinds.len()];
    let mut rhs = Moments::default();
    let mut infinite_samples = 0;
    for (pl, pr, pi) in &parts {
        for (a, b) in lhs.iter_mut().zip(pl) {
            a.merge(b);
        }
        rhs.merge(pr);
        infinite_samples += pi;
    }
    Ok(MonteCarloLedger {
        l,
        n,
        samples,
        seed,
        lhs: kinds.iter().zip(&lhs).map(|(k, m)| (k.name().to_string(), m.estimate())).collect(),
        rhs: if infinite_samples > 0 { Estimate { mean: f64::INFINITY, stderr: f64::NAN } } else { rhs.estimate() },
        infinite_samples,
    })
}

/// Draws an index from a next-symbol vector; zero entries are never drawn.
pub(crate) fn sample_index(probs: &[MeasureValue], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    for (a, p) in probs.iter().enumerate() {
        cum += to_f64(p);
        if u < cum && !p.is_zero() {
            return a;
        }
    }
    probs.iter().rposition(|p| !p.is_zero()).unwrap_or(0)
}

type PathSample = (Vec<f64>, Option<f64>);

fn sample_path(
    mu: &dyn Evaluate,
    rho: &dyn Evaluate,
    history: &FinStr,
    n: usize,
    kinds: &[DistanceKind],
    rng: &mut ChaCha8Rng,
) -> Result<PathSample> {
    let mut mu_c = mu.cursor(history)?;
    let mut rho_c = rho.cursor(history)?;
    let mut sums = vec![0.0; kinds.len()];
    let mut log_ratio = CompensatedSum::default();
    let mut finite = true;
    for _ in history.len() + 1..=n {
        let mk = mu_c.children();
        let rk = rho_c.children();
        let mu_next = next_of(mu_c.as_ref(), &mk);
        let rho_next = next_of(rho_c.as_ref(), &rk);
        for (s, k) in sums.iter_mut().zip(kinds) {
            *s += step_distance(&mu_next, &rho_next, k)?;
        }
        let pick = sample_index(&mu_next, rng);
        if rho_next[pick].is_zero() {
            finite = false;
        } else if finite {
            log_ratio.add(ln_q(&(&mu_next[pick] / &rho_next[pick])));
        }
        let (Some(m), Some(r)) = (mk.into_iter().nth(pick), rk.into_iter().nth(pick)) else {
            unreachable!("children cover the alphabet")
        };
        mu_c = m;
        rho_c = r;
    }
    Ok((sums, finite.then(|| log_ratio.value())))
}

/// Exact `(1 − ρ(α_t|α_{<t}))` summed over `t ≤ n` and `−ln ρ(α_{1:n})`.
#[derive(Clone, Debug, Serialize)]
pub struct DeterministicLoss {
    #[serde(serialize_with = "ser_q")]
    pub error_sum: MeasureValue,
    #[serde(serialize_with = "ser_q")]
    pub target_mass: MeasureValue,
    #[serde(serialize_with = "ser_f64")]
    pub neg_ln_mass: f64,
}

pub fn deterministic_loss(rho: &dyn Evaluate, target: &FinStr) -> Result<DeterministicLoss> {
    let mut error_sum = zero();
    let mut prev = rho.eval(&FinStr::empty(rho.alphabet()))?;
    for t in 1..=target.len() {
        let cur = rho.eval(&target.prefix(t))?;
        let cond = if prev.is_zero() { uniform_mass(rho.alphabet().size(), 1) } else { &cur / &prev };
        error_sum += MeasureValue::from_integer(1.into()) - cond;
        prev = cur;
    }
    let neg_ln_mass = if prev.is_zero() { f64::INFINITY } else { -ln_q(&prev) };
    Ok(DeterministicLoss { error_sum, target_mass: prev, neg_ln_mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Semimeasure;
    use crate::mixture::WeightedClass;
    use crate::rational::q;

    #[test]
    fn kl_closed_form() {
        let mu = [q(2, 3), q(1, 3)];
        let rho = [q(1, 3), q(2, 3)];
        let v = step_distance(&mu, &rho, &DistanceKind::Kl).unwrap();
        assert!((v - std::f64::consts::LN_2 / 3.0).abs() < 1e-12);
        assert_eq!(step_distance(&mu, &[q(1, 1), zero()], &DistanceKind::Kl).unwrap(), f64::INFINITY);
    }

    #[test]
    fn identical_distributions_are_at_distance_zero() {
        let d = [q(1, 5), q(3, 5), q(1, 5)];
        for k in DistanceKind::all(3) {
            assert_eq!(step_distance(&d, &d, &k).unwrap(), 0.0, "{}", k.name());
        }
    }

    #[test]
    fn bayes_action_examples() {
        let l = LossMatrix::zero_one(2);
        assert_eq!(bayes_action(&[q(7, 10), q(3, 10)], &l).unwrap(), (0, q(3, 10)));
        assert_eq!(bayes_action(&[q(1, 2), q(1, 2)], &l).unwrap(), (0, q(1, 2)));
        assert!(LossMatrix::parse("0,2;1,0").is_err());
    }

    #[test]
    fn equal_models_give_zero_ledger() {
        let m = Semimeasure::bernoulli(q(1, 3)).unwrap();
        let led = cumulative_divergence(&m, &m, &FinStr::bin(""), 6, &DistanceKind::all(2)).unwrap();
        assert!(led.rhs.iter().all(|&v| v.abs() < 1e-15));
        assert!(led.kinds.iter().all(|k| k.lhs.iter().all(|&v| v.abs() < 1e-15)));
    }

    #[test]
    fn one_step_kl_equals_d() {
        let mu = Semimeasure::bernoulli(q(2, 3)).unwrap();
        let rho = Semimeasure::bernoulli(q(1, 4)).unwrap();
        let led = cumulative_divergence(&mu, &rho, &FinStr::bin("10"), 3, &[DistanceKind::Kl]).unwrap();
        assert!((led.lhs_at(0, 3) - led.rhs_at(3)).abs() < 1e-15);
    }

    #[test]
    fn mixture_divergence_below_ln2() {
        let mu = Semimeasure::bernoulli(q(2, 3)).unwrap();
        let class = WeightedClass::uniform(vec![Semimeasure::bernoulli(q(1, 3)).unwrap(), mu.clone()]).unwrap();
        let led = cumulative_divergence(&mu, &class, &FinStr::bin(""), 8, &DistanceKind::all(2)).unwrap();
        assert!(led.chain_holds && led.nondecreasing);
        assert!(led.rhs_at(8) <= std::f64::consts::LN_2 + TOLERANCE);
        assert_eq!(led.mass.last().unwrap(), &q(1, 1));
    }

    #[test]
    fn monte_carlo_is_reproducible_and_close() {
        let mu = Semimeasure::bernoulli(q(2, 3)).unwrap();
        let class = WeightedClass::uniform(vec![Semimeasure::bernoulli(q(1, 3)).unwrap(), mu.clone()]).unwrap();
        let kinds = DistanceKind::all(2);
        let a = monte_carlo_divergence(&mu, &class, &FinStr::bin("1"), 6, &kinds, 2000, 7).unwrap();
        let b = monte_carlo_divergence(&mu, &class, &FinStr::bin("1"), 6, &kinds, 2000, 7).unwrap();
        assert_eq!(a, b);
        let exact = cumulative_divergence(&mu, &class, &FinStr::bin("1"), 6, &kinds).unwrap();
        assert!((a.rhs.mean - exact.rhs_at(6)).abs() <= 3.0 * a.rhs.stderr + 1e-12);
        let same = monte_carlo_divergence(&mu, &mu, &FinStr::bin(""), 5, &kinds, 500, 1).unwrap();
        assert_eq!(same.rhs.mean, 0.0);
    }

    #[test]
    fn deterministic_loss_of_exact_predictor() {
        let alpha = Semimeasure::periodic(&FinStr::bin("0"), &FinStr::bin("1")).unwrap();
        let d = deterministic_loss(&alpha, &FinStr::bin("01111")).unwrap();
        assert_eq!(d.error_sum, zero());
        assert_eq!(d.neg_ln_mass, 0.0);
    }
}
