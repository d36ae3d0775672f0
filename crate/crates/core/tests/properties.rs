use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;

use unipred::bounds::{
    aggregate, lemma1_adversarial, telescoping_check, thm1_report, BoundReport, HorizonMeta, Verdict,
};
use unipred::catalog;
use unipred::losses::{cumulative_divergence, step_distance, DistanceKind, LossMatrix};
use unipred::machines::{
    coding::gamma_decode, enum_k_cond, enum_kstar, gamma, gamma_len, ComplexityTable, Entry, Horizon, Limits,
    MachineRegistry, Mode, Program, RunStatus,
};
use unipred::measures::{conditional, Alphabet, Evaluate, FinStr, Semimeasure};
use unipred::mixture::{posterior_weights, MixtureState, WeightedClass};
use unipred::rational::{ceil_log2_q, q, MeasureValue};

fn catalog_measure() -> impl Strategy<Value = Semimeasure> {
    let ms: Vec<Semimeasure> = catalog::measures().unwrap().into_iter().map(|(_, m)| m).collect();
    (0..ms.len()).prop_map(move |i| ms[i].clone())
}

fn syms(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, 0..=max)
}

fn over(a: Alphabet, raw: &[u8]) -> FinStr {
    FinStr::new(a, raw.iter().map(|s| s % a.size() as u8).collect()).unwrap()
}

fn binary_class() -> impl Strategy<Value = WeightedClass> {
    let ms: Vec<Semimeasure> = catalog::measures()
        .unwrap()
        .into_iter()
        .map(|(_, m)| m)
        .filter(|m| m.alphabet() == Alphabet::BINARY)
        .collect();
    prop::collection::vec((0..ms.len(), 1i64..8), 1..4).prop_map(move |picks| {
        let total: i64 = picks.iter().map(|p| p.1).sum();
        let models = picks.iter().map(|p| ms[p.0].clone()).collect();
        let weights = picks.iter().map(|p| q(p.1, total)).collect();
        WeightedClass::new(models, weights).unwrap()
    })
}

fn distribution(size: usize) -> impl Strategy<Value = Vec<MeasureValue>> {
    prop::collection::vec(0i64..10, size).prop_map(|v| {
        let total: i64 = v.iter().sum::<i64>().max(1);
        if v.iter().all(|&x| x == 0) {
            let mut u = vec![q(0, 1); v.len()];
            u[0] = q(1, 1);
            return u;
        }
        v.iter().map(|&x| q(x, total)).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn conditionals_compose(m in catalog_measure(), x in syms(3), y in syms(3), z in syms(2)) {
        let a = m.alphabet();
        let (x, y, z) = (over(a, &x), over(a, &y), over(a, &z));
        let xy = x.concat(&y);
        prop_assume!(!m.eval(&x).unwrap().is_zero() && !m.eval(&xy).unwrap().is_zero());
        let whole = conditional(&m, &x, &y.concat(&z)).unwrap();
        prop_assert_eq!(whole, conditional(&m, &x, &y).unwrap() * conditional(&m, &xy, &z).unwrap());
    }

    #[test]
    fn deterministic_mass_sits_on_the_sequence(u in syms(3), v in prop::collection::vec(0u8..2, 1..4), x in syms(8)) {
        let a = Alphabet::BINARY;
        let m = Semimeasure::periodic(&over(a, &u), &over(a, &v)).unwrap();
        let alpha = m.as_periodic().unwrap().clone();
        let x = over(a, &x);
        let on = alpha.head(x.len()) == x;
        prop_assert_eq!(m.eval(&alpha.head(x.len())).unwrap(), q(1, 1));
        prop_assert_eq!(m.eval(&x).unwrap().is_one(), on);
        prop_assert_eq!(m.eval(&x).unwrap().is_zero(), !on);
    }

    #[test]
    fn canonical_text_round_trips(m in catalog_measure()) {
        let again = Semimeasure::parse(&m.canonical()).unwrap();
        prop_assert_eq!(again.canonical(), m.canonical());
    }

    #[test]
    fn mixture_chain_rule(c in binary_class(), x in syms(4), y in syms(3)) {
        let a = Alphabet::BINARY;
        let (x, y) = (over(a, &x), over(a, &y));
        prop_assume!(!c.eval(&x).unwrap().is_zero());
        let w = posterior_weights(&c, &x).unwrap();
        let mut by_parts = q(0, 1);
        for (wi, m) in w.iter().zip(c.models()) {
            if !wi.is_zero() {
                by_parts += wi * conditional(m, &x, &y).unwrap();
            }
        }
        prop_assert_eq!(conditional(&c, &x, &y).unwrap(), by_parts);
        prop_assert!(w.iter().fold(q(0, 1), |s, v| s + v).is_one());
    }

    #[test]
    fn incremental_posterior_matches_from_scratch(c in binary_class(), x in syms(6)) {
        let x = over(Alphabet::BINARY, &x);
        prop_assume!(!c.eval(&x).unwrap().is_zero());
        let c = Arc::new(c);
        let mut s = MixtureState::new(Arc::clone(&c)).unwrap();
        for &a in x.syms() {
            s = s.observe(a).unwrap();
        }
        let direct = MixtureState::from_history(Arc::clone(&c), &x).unwrap();
        prop_assert_eq!(s.posterior(), direct.posterior());
        prop_assert_eq!(s.posterior().to_vec(), posterior_weights(&c, &x).unwrap());
    }

    #[test]
    fn dominance_of_random_classes(c in binary_class(), x in syms(7)) {
        let x = over(Alphabet::BINARY, &x);
        let xi = c.eval(&x).unwrap();
        for (w, m) in c.weights().iter().zip(c.models()) {
            prop_assert!(xi >= w * m.eval(&x).unwrap());
        }
    }

    #[test]
    fn telescoping_is_exact(m in catalog_measure(), r in catalog_measure(), x in syms(3), y in syms(3)) {
        prop_assume!(m.alphabet() == r.alphabet());
        let a = m.alphabet();
        match telescoping_check(&r, &m, &over(a, &x), &over(a, &y)) {
            Ok(rep) => prop_assert_eq!(rep.verdict, Verdict::Verified),
            Err(unipred::Error::DegenerateHistory(_)) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn finite_class_thm1(c in binary_class(), i in 0usize..3, x in syms(3), y in syms(3)) {
        let i = i % c.len();
        let a = Alphabet::BINARY;
        let (x, y) = (over(a, &x), over(a, &y));
        prop_assume!(!c.models()[i].eval(&x.concat(&y)).unwrap().is_zero());
        let rep = thm1_report(&Arc::new(c), i, &x, &y).unwrap();
        prop_assert_eq!(rep.verdict, Verdict::Verified);
    }

    #[test]
    fn distances_are_nonnegative(mu in distribution(3), rho in distribution(3)) {
        for k in DistanceKind::all(3) {
            let d = step_distance(&mu, &rho, &k).unwrap();
            prop_assert!(d >= -1e-12, "{} = {d}", k.name());
        }
    }

    #[test]
    fn zero_one_regret_is_at_most_half(mu in distribution(2), rho in distribution(2)) {
        let k = DistanceKind::SquaredRegret(LossMatrix::zero_one(2));
        prop_assert!(step_distance(&mu, &rho, &k).unwrap() <= 0.5 + 1e-12);
    }

    #[test]
    fn chain_and_monotone_divergence(c in binary_class(), i in 0usize..3, h in syms(2)) {
        let i = i % c.len();
        let h = over(Alphabet::BINARY, &h);
        let mu = c.models()[i].clone();
        prop_assume!(!mu.eval(&h).unwrap().is_zero());
        let led = cumulative_divergence(&mu, &c, &h, h.len() + 6, &DistanceKind::all(2)).unwrap();
        prop_assert!(led.chain_holds);
        prop_assert!(led.nondecreasing);
    }

    #[test]
    fn adversary_is_deterministic(num in 1i64..10) {
        let mu = Semimeasure::bernoulli(q(num, 10)).unwrap();
        let a = lemma1_adversarial(&mu, 12).unwrap();
        let b = lemma1_adversarial(&mu, 12).unwrap();
        prop_assert_eq!(&a.alpha, &b.alpha);
        prop_assert!(a.certificates.iter().all(|c| c.exceeds && a.alpha.syms()[c.l - 1] == 1 - c.b));
    }

    #[test]
    fn ceil_log2_is_exact(num in 1i64..5000, den in 1i64..5000) {
        let v = q(num, den);
        let c = ceil_log2_q(&v);
        let pow = |k: i64| if k >= 0 { q(1i64 << k, 1) } else { q(1, 1i64 << -k) };
        prop_assert!(pow(c) >= v);
        prop_assert!(pow(c - 1) < v);
    }

    #[test]
    fn gamma_round_trip(n in 1u64..1 << 40, tail in prop::collection::vec(0u8..2, 0..5)) {
        let mut bits = gamma(n);
        prop_assert_eq!(bits.len(), gamma_len(n));
        bits.extend(&tail);
        prop_assert_eq!(gamma_decode(&bits), Some((n, gamma_len(n))));
    }

    #[test]
    fn registry_reports_are_never_violated(lhs in -5.0f64..5.0, rhs in -5.0f64..5.0) {
        let h = HorizonMeta { max_len: 8, max_steps: 64, depth: None };
        let r = BoundReport::registry("t", "c", lhs, rhs, "both sides are horizon values", h);
        prop_assert_eq!(r.verdict, Verdict::Inconclusive);
        prop_assert!(!r.direction.is_empty());
        let agg = aggregate("t", "g", &[r]).unwrap();
        prop_assert_eq!(agg.verdict, Verdict::Inconclusive);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn halting_programs_are_prefix_free(cond in prop::collection::vec(0u8..2, 0..5), twice in any::<bool>()) {
        let reg = MachineRegistry::canonical(Alphabet::BINARY);
        let cond = over(Alphabet::BINARY, &cond);
        let mode = if twice { Mode::TwicePrefix } else { Mode::Prefix };
        let mut halting: Vec<Vec<u8>> = Vec::new();
        for len in 1..=10usize {
            for bits in 0u32..1 << len {
                let p: Vec<u8> = (0..len).rev().map(|i| ((bits >> i) & 1) as u8).collect();
                let out = reg.run(mode, &Program::new(p.clone()).unwrap(), &cond, Limits::new(256, 64)).unwrap();
                if out.status == RunStatus::Halted {
                    halting.push(p);
                }
            }
        }
        for a in &halting {
            for b in &halting {
                prop_assert!(a == b || !b.starts_with(a), "{a:?} is a prefix of {b:?}");
            }
        }
        let t = ComplexityTable::build(&reg, Entry::Universal, mode, &cond, Horizon::new(10, 256)).unwrap();
        prop_assert_eq!(t.halting_programs(), halting.len() as u64);
        prop_assert!(*t.kraft_sum() <= q(1, 1));
    }

    #[test]
    fn prefix_complexity_is_bounded_by_kstar_plus_the_simulator(
        y in prop::collection::vec(0u8..2, 0..4),
        x in prop::collection::vec(0u8..2, 0..4),
    ) {
        let base = MachineRegistry::canonical(Alphabet::BINARY);
        let (ext, idx) = base.with_simulator();
        let (y, x) = (over(Alphabet::BINARY, &y), over(Alphabet::BINARY, &x));
        let h = Horizon::new(9, 128);
        let cost = gamma_len(idx as u64);
        let wide = Horizon::new(9 + cost, 128 + 2 * cost as u64);
        let star = enum_kstar(&base, &y, &x, h).unwrap();
        let k = enum_k_cond(&ext, &y, &x, wide).unwrap();
        if let Some(s) = star.value {
            prop_assert!(k.value.is_some_and(|k| k <= s + cost), "K = {:?}, K* = {s}, cost {cost}", k.value);
        }
    }
}

#[test]
fn runs_are_reproducible() {
    let reg = MachineRegistry::canonical(Alphabet::BINARY);
    let cond = FinStr::bin("0010");
    for bits in 0u32..1 << 9 {
        let p = Program::new((0..9).rev().map(|i| ((bits >> i) & 1) as u8).collect()).unwrap();
        for mode in [Mode::Prefix, Mode::Monotone, Mode::TwicePrefix] {
            let a = reg.run(mode, &p, &cond, Limits::new(64, 16)).unwrap();
            let b = reg.run(mode, &p, &cond, Limits::new(64, 16)).unwrap();
            assert_eq!(a, b);
        }
    }
}
