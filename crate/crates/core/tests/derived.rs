//! Worked values checked against hand arithmetic or a second, independent computation.

use std::sync::Arc;

use unipred::bounds::{
    deficiency, expected_posterior_loss, lemma1_adversarial, lemma1_certificates, lemma2_instance,
    posterior_bound_trace, thm1_report, Verdict,
};
use unipred::losses::{
    bayes_action, cumulative_divergence, monte_carlo_divergence, step_distance, DistanceKind, LossMatrix,
};
use unipred::machines::{
    gamma, gamma_len, enum_k, enum_kstar, nat_code, Horizon, Limits, MachineRegistry, MachineSemimeasure, Mode,
    MonotoneTable, Program, RunStatus, Stall,
};
use unipred::measures::{check_semimeasure, conditional, Alphabet, Evaluate, FinStr, Semimeasure};
use unipred::mixture::{dominance_check, posterior_bound, posterior_weights, WeightedClass};
use unipred::rational::{ln_q, pow2_neg, q, zero, MeasureValue};

fn ber(num: i64, den: i64) -> Semimeasure {
    Semimeasure::bernoulli(q(num, den)).unwrap()
}

fn pair() -> WeightedClass {
    WeightedClass::uniform(vec![ber(1, 3), ber(2, 3)]).unwrap()
}

fn bin(s: &str) -> FinStr {
    FinStr::bin(s)
}

#[test]
fn bernoulli_product() {
    // p(1) = 1/3 twice
    assert_eq!(ber(1, 3).eval(&bin("11")).unwrap(), q(1, 3) * q(1, 3));
    assert_eq!(ber(1, 3).eval(&bin("011")).unwrap(), q(2, 27));
}

#[test]
fn mixture_of_two_coins() {
    let c = pair();
    let by_hand = q(1, 2) * (q(1, 9) + q(4, 9));
    assert_eq!(c.eval(&bin("11")).unwrap(), by_hand);
    assert_eq!(by_hand, q(5, 18));
    let d = dominance_check(&c, 0, 2).unwrap();
    assert_eq!(d.violations, 0);
    // slack at "11" for μ = Ber(1/3): 5/18 - 1/2·1/9
    assert_eq!(c.eval(&bin("11")).unwrap() - q(1, 2) * q(1, 9), q(2, 9));
}

#[test]
fn posterior_by_bayes_rule() {
    let w = posterior_weights(&pair(), &bin("1")).unwrap();
    let evidence = q(1, 2) * q(1, 3) + q(1, 2) * q(2, 3);
    assert_eq!(w, vec![q(1, 2) * q(1, 3) / &evidence, q(1, 2) * q(2, 3) / &evidence]);
    assert_eq!(w, vec![q(1, 3), q(2, 3)]);
    let b = posterior_bound(&pair(), 1, &bin("1")).unwrap();
    assert!((b.ln_inverse - (1.5f64).ln()).abs() < 1e-15);
}

#[test]
fn kl_closed_form() {
    let d = step_distance(&[q(2, 3), q(1, 3)], &[q(1, 3), q(2, 3)], &DistanceKind::Kl).unwrap();
    let by_hand = 2.0 / 3.0 * 2f64.ln() + 1.0 / 3.0 * 0.5f64.ln();
    assert!((d - by_hand).abs() < 1e-15);
    assert!((d - 0.231_049_060_186_648_4).abs() < 1e-12);
}

#[test]
fn dominated_action_is_never_chosen() {
    // column 2 is dominated by column 0 on every symbol
    let loss = LossMatrix::parse("0,1,1/2;1,0,1;1/2,1/2,1").unwrap();
    let mut chosen = [0usize; 3];
    for a in 0..=12i64 {
        for b in 0..=12 - a {
            let rho = vec![q(a, 12), q(b, 12), q(12 - a - b, 12)];
            let (act, value) = bayes_action(&rho, &loss).unwrap();
            chosen[act] += 1;
            let best = (0..3)
                .map(|j| (0..3).map(|i| &rho[i] * loss.get(i, j)).fold(zero(), |s, v| s + v))
                .min()
                .unwrap();
            assert_eq!(value, best);
        }
    }
    assert_eq!(chosen[2], 0);
}

#[test]
fn divergence_from_the_pair_is_at_most_ln_two() {
    let mu = ber(2, 3);
    let xi = pair();
    let led = cumulative_divergence(&mu, &xi, &FinStr::empty(Alphabet::BINARY), 8, &[]).unwrap();
    assert!(led.nondecreasing);
    for n in 1..=8 {
        assert!(led.rhs_at(n) <= 2f64.ln() + 1e-12);
    }
    // first step by hand: KL((1/3, 2/3) || (1/2, 1/2))
    let first = 1.0 / 3.0 * (2.0f64 / 3.0).ln() + 2.0 / 3.0 * (4.0f64 / 3.0).ln();
    assert!((led.rhs_at(1) - first).abs() < 1e-14);
}

#[test]
fn monte_carlo_agrees_with_exhaustive() {
    let mu = ber(2, 3);
    let xi = pair();
    let h = bin("1");
    let kinds = DistanceKind::all(2);
    let exact = cumulative_divergence(&mu, &xi, &h, 7, &kinds).unwrap();
    let mc = monte_carlo_divergence(&mu, &xi, &h, 7, &kinds, 4000, 11).unwrap();
    assert!((mc.rhs.mean - exact.rhs_at(7)).abs() <= 3.0 * mc.rhs.stderr + 1e-9);
    for (k, (name, est)) in mc.lhs.iter().enumerate() {
        let want = exact.lhs_at(k, 7);
        assert!((est.mean - want).abs() <= 3.0 * est.stderr + 1e-9, "{name}: {} vs {want}", est.mean);
    }
}

#[test]
fn half_weight_caps_negative_deficiency() {
    let c = pair();
    let mu = ber(2, 3);
    for x in Alphabet::BINARY.strings_up_to(6) {
        let d = deficiency(&c, &mu, &x).unwrap();
        assert!(d.value >= -1.0 - 1e-12, "{x}: {}", d.value);
    }
}

#[test]
fn thm1_pair_after_one_symbol() {
    let c = Arc::new(pair());
    let cap = (1.5f64).ln() / 2f64.ln();
    for y in Alphabet::BINARY.strings_up_to(5).filter(|y| !y.is_empty()) {
        let r = thm1_report(&c, 1, &bin("1"), &y).unwrap();
        assert_eq!(r.verdict, Verdict::Verified);
        assert!(r.lhs <= cap + 1e-12);
    }
}

#[test]
fn adversary_for_three_fifths() {
    let mu = ber(3, 5);
    let adv = lemma1_adversarial(&mu, 16).unwrap();
    assert_eq!(adv.alpha.to_string(), "0000000000000000");
    // 2/5 < 1/(3 ln 2) < 3/5
    let c = 1.0 / (3.0 * 2f64.ln());
    assert!(0.4 < c && c < 0.6);
    let class = WeightedClass::uniform(vec![ber(3, 5), ber(1, 5)]).unwrap();
    for r in lemma1_certificates(&adv, &mu, &class).unwrap() {
        assert_eq!(r.verdict, Verdict::Verified);
    }
}

#[test]
fn one_switch_against_the_pair() {
    // ξ(1|0^5) = (32/3 + 2/3) / 33 = 34/99
    let inst = lemma2_instance(5, &pair()).unwrap();
    assert!((inst.formula - (99.0f64 / 34.0).ln()).abs() < 1e-14);
    assert!((inst.one_step - inst.formula).abs() < 1e-12);
    let x1 = bin("000001");
    let lhs = (inst.mass_x1.clone() / &inst.mass_x) / conditional(&pair(), &bin("00000"), &bin("1")).unwrap();
    assert_eq!(lhs, q(99, 34));
    assert_eq!(Semimeasure::suffix_deterministic(5).eval(&x1).unwrap(), q(1, 1));
}

#[test]
fn one_switch_divergence_grows_under_the_machine() {
    let m = MachineSemimeasure::new(Arc::new(MachineRegistry::canonical(Alphabet::BINARY)), Horizon::new(12, 256)).unwrap();
    let first = lemma2_instance(1, &m).unwrap().one_step;
    let last = lemma2_instance(10, &m).unwrap().one_step;
    assert!(last > first, "{first} -> {last}");
}

#[test]
fn literal_program_by_hand() {
    let reg = MachineRegistry::canonical(Alphabet::BINARY);
    let mut bits = gamma(1);
    bits.extend(gamma(4));
    bits.extend([1, 0, 1]);
    let p = Program::new(bits).unwrap();
    let r = reg.run(Mode::Prefix, &p, &FinStr::empty(Alphabet::BINARY), Limits::default()).unwrap();
    assert_eq!((r.status, r.output.to_string(), r.program_bits_consumed), (RunStatus::Halted, "101".into(), 9));
}

#[test]
fn unary_program_by_hand() {
    let reg = MachineRegistry::canonical(Alphabet::BINARY);
    let mut bits = gamma(2);
    bits.extend(gamma(3));
    let p = Program::new(bits).unwrap();
    let r = reg.run(Mode::Monotone, &p, &FinStr::empty(Alphabet::BINARY), Limits::new(256, 6)).unwrap();
    assert_eq!(r.output.to_string(), "001111");
    assert_eq!(r.stall, Some(Stall::OutputLimit));
}

#[test]
fn k_of_101() {
    let r = enum_k(&MachineRegistry::canonical(Alphabet::BINARY), &bin("101"), Horizon::new(12, 256)).unwrap();
    // γ(1) + γ(4) + three literal bits
    assert_eq!(r.value, Some(gamma_len(1) + gamma_len(4) + 3));
}

#[test]
fn unary_mass_of_00_by_gamma_lengths() {
    let reg = MachineRegistry::canonical(Alphabet::BINARY).restrict(&["unary"]);
    let l = 12;
    let t = MonotoneTable::build(&reg, Horizon::new(l, 256)).unwrap();
    let mut want: MeasureValue = zero();
    for n in 3u64..1 << 12 {
        let len = gamma_len(2) + gamma_len(n);
        if len <= l {
            want += pow2_neg(len);
        }
    }
    assert_eq!(want, q(11, 256));
    assert_eq!(t.m_l(&bin("00")).unwrap(), want);
}

#[test]
fn machine_semimeasure_to_depth_4() {
    let m = MachineSemimeasure::new(Arc::new(MachineRegistry::canonical(Alphabet::BINARY)), Horizon::new(12, 256)).unwrap();
    let c = check_semimeasure(&m, 4).unwrap();
    assert!(c.is_semimeasure);
    assert_eq!(c.max_violation(), zero());
}

#[test]
fn kstar_of_the_zero_counter() {
    let reg = MachineRegistry::canonical(Alphabet::BINARY);
    let r = enum_kstar(&reg, &nat_code(3, Alphabet::BINARY), &bin("0001"), Horizon::new(12, 256)).unwrap();
    assert_eq!(r.value, Some(gamma_len(3)));
    assert_eq!(r.value, Some(3));
}

#[test]
fn repeat_first_symbol_is_learned_after_one_symbol() {
    let class = Arc::new(
        WeightedClass::new(
            vec![
                Semimeasure::parse("markov:1:1/2,1/2;1,0;0,1").unwrap(),
                Semimeasure::parse("det:(0)").unwrap(),
                Semimeasure::parse("det:(1)").unwrap(),
            ],
            vec![q(1, 2), q(1, 4), q(1, 4)],
        )
        .unwrap(),
    );
    for y in ["1", "11", "1111"] {
        let r = thm1_report(&class, 0, &bin("1"), &bin(y)).unwrap();
        assert!(r.lhs.abs() < 1e-12, "{y}: {}", r.lhs);
    }
}

#[test]
fn expected_posterior_bound_shrinks() {
    let class = Arc::new(pair());
    let exact: Vec<f64> = (0..=6).map(|l| expected_posterior_loss(&class, 1, l).unwrap()).collect();
    assert!(exact.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{exact:?}");
    let (mc, skipped) = posterior_bound_trace(&class, 1, 6, 4000, 5).unwrap();
    assert_eq!(skipped, 0);
    for (l, e) in mc.iter().enumerate() {
        assert!((e.mean - exact[l]).abs() <= 4.0 * e.stderr + 1e-9, "l={l}: {} vs {}", e.mean, exact[l]);
    }
    assert!((exact[0] - ln_q(&q(2, 1))).abs() < 1e-15);
}
