//! Verification harness: named report families in the exact and registry regimes.
//!
//! Families run in parallel and the aggregated output is sorted by report
//! name and case, so the JSON and CSV files are byte-identical for a given
//! configuration whatever the worker count.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{
    aggregate, corollary_registry_report, corollary_reports, det_bound_report, lemma1_adversarial, lemma1_certificates,
    lemma2_instance, period_example, posterior_bound_trace, psi_dominance, sort_reports, telescoping_check,
    thm1_registry_report, thm1_report, thm2_report, thm3_report, BoundReport, DetComparator, HorizonMeta, Psi,
    PsiWeights, SuffixMode, Verdict,
};
use crate::catalog::{self, NamedClass};
use crate::config::{ExperimentConfig, Format, Suite};
use crate::error::{input, Error, Result};
use crate::losses::{cumulative_divergence, sample_index, DistanceKind, TOLERANCE};
use crate::machines::{
    gamma_len, nat_code, ComplexityTable, CorrectSet, Entry, Horizon, MachineRegistry, MachineSemimeasure, Mode,
    TableCache,
};
use crate::measures::{check_semimeasure, next_distribution, Alphabet, Evaluate, FinStr, Semimeasure};
use crate::mixture::{dominance_check, posterior_bound, WeightedClass};
use crate::rational::{fmt_q, one, q, times_ln2_exceeds, to_f64, zero};
use crate::report::fmt_f64;

/// Families whose reports are finite-object theorems.
pub const EXACT_FAMILIES: &[&str] = &[
    "chain",
    "combiner",
    "corollary",
    "correct-sets",
    "dominance",
    "eq5",
    "eq6",
    "k-monotone",
    "kraft",
    "kstar",
    "lemma1",
    "lemma2",
    "machine-semimeasure",
    "posterior",
    "psi",
    "telescoping",
    "thm1",
];

/// Families comparing horizon approximations; always inconclusive.
pub const REGISTRY_FAMILIES: &[&str] =
    &["cor2-mc", "cor2-registry", "lemma2-sweep", "period", "psi-registry", "thm1-registry", "thm2", "thm3"];

#[derive(Debug)]
pub struct FailedFamily {
    pub family: String,
    pub error: Error,
}

#[derive(Debug)]
pub struct PartialRun {
    pub reports: Vec<BoundReport>,
    pub failed: Vec<FailedFamily>,
}

#[derive(Clone, Debug)]
pub struct Harness {
    pub suite: Suite,
    pub depth: usize,
    pub n: usize,
    pub horizon: Horizon,
    pub seed: u64,
    pub fuzz_cases: usize,
    pub classes: Vec<NamedClass>,
    pub registry: Arc<MachineRegistry>,
    pub select: Option<Vec<String>>,
}

impl Harness {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Harness {
            suite: cfg.reports.suite,
            depth: cfg.horizon.depth,
            n: cfg.horizon.n,
            horizon: cfg.machine_horizon(),
            seed: cfg.seed,
            fuzz_cases: cfg.reports.fuzz_cases,
            classes: cfg.named_classes()?,
            registry: cfg.registry()?,
            select: cfg.reports.select.clone(),
        })
    }

    pub fn families(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.suite.exact() {
            out.extend_from_slice(EXACT_FAMILIES);
        }
        if self.suite.registry() {
            out.extend_from_slice(REGISTRY_FAMILIES);
        }
        if let Some(sel) = &self.select {
            out.retain(|f| sel.iter().any(|s| s == f));
        }
        out
    }

    /// Runs the selected families on a pool of `workers` threads.
    pub fn run_with_workers(&self, workers: usize) -> Result<Vec<BoundReport>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| self.run())
    }

    pub fn run(&self) -> Result<Vec<BoundReport>> {
        let out = self.run_partial()?;
        match out.failed.into_iter().next() {
            Some(f) => Err(f.error),
            None => Ok(out.reports),
        }
    }

    /// Runs every family, keeping the reports of those that finish.
    pub fn run_partial(&self) -> Result<PartialRun> {
        if let Some(sel) = &self.select {
            let known: Vec<&str> = EXACT_FAMILIES.iter().chain(REGISTRY_FAMILIES).copied().collect();
            if let Some(bad) = sel.iter().find(|s| !known.contains(&s.as_str())) {
                return Err(Error::Config(format!("unknown report family {bad:?}")));
            }
        }
        let parts: Vec<(&str, Result<Vec<BoundReport>>)> =
            self.families().into_par_iter().map(|f| (f, self.family(f))).collect();
        let mut reports = Vec::new();
        let mut failed = Vec::new();
        for (family, r) in parts {
            match r {
                Ok(rs) => reports.extend(rs),
                Err(error) => failed.push(FailedFamily { family: family.to_string(), error }),
            }
        }
        sort_reports(&mut reports);
        Ok(PartialRun { reports, failed })
    }

    pub fn run_partial_with_workers(&self, workers: usize) -> Result<PartialRun> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| self.run_partial())
    }

    pub fn family(&self, name: &str) -> Result<Vec<BoundReport>> {
        match name {
            "dominance" => dominance_reports(&self.classes, self.depth),
            "chain" => chain_reports(&self.classes, &[1, 3], 8),
            "eq6" => eq6_reports(&self.classes, self.n),
            "posterior" => posterior_reports(&self.classes, 4, self.n),
            "telescoping" => self.telescoping(),
            "thm1" => thm1_reports(&self.classes, self.depth),
            "eq5" => self.eq5(),
            "psi" => psi_reports(&self.classes, self.depth),
            "lemma1" => lemma1_reports(),
            "lemma2" => self.lemma2(),
            "corollary" => corollary_family(&self.classes),
            "kraft" => kraft_reports(&self.registry, self.horizon),
            "machine-semimeasure" => self.machine_semimeasure(),
            "k-monotone" => k_monotone_reports(&self.registry, self.horizon),
            "correct-sets" => correct_set_reports(&self.registry),
            "kstar" => kstar_reports(&self.registry, self.horizon),
            "combiner" => combiner_reports(&self.registry, 8, self.horizon.steps()),
            "thm1-registry" => self.thm1_registry(),
            "thm2" | "thm3" => self.deficiency_bounds(name),
            "period" => self.period(),
            "cor2-registry" => self.cor2_registry(),
            "cor2-mc" => self.cor2_mc(),
            "lemma2-sweep" => self.lemma2_sweep(),
            "psi-registry" => self.psi_registry(),
            other => input(format!("unknown report family {other:?}")),
        }
    }

    fn machine(&self) -> Result<MachineSemimeasure> {
        MachineSemimeasure::new(Arc::clone(&self.registry), self.horizon)
    }

    fn machine_classes(&self) -> impl Iterator<Item = &NamedClass> {
        let a = self.registry.alphabet();
        self.classes.iter().filter(move |c| c.class.alphabet() == a)
    }

    fn telescoping(&self) -> Result<Vec<BoundReport>> {
        let machine = self.machine()?;
        let catalog: Vec<Semimeasure> = catalog::measures()?.into_iter().map(|(_, m)| m).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut groups: BTreeMap<&'static str, Vec<BoundReport>> = BTreeMap::new();
        let mut tries = 0usize;
        let mut done = 0usize;
        while done < self.fuzz_cases {
            tries += 1;
            if tries > 20 * self.fuzz_cases + 1000 {
                return Err(Error::Input("telescoping fuzz could not find enough positive-mass cases".into()));
            }
            let c = &self.classes[rng.gen_range(0..self.classes.len())];
            let mi = rng.gen_range(0..c.class.len());
            let mu = c.class.model(mi)?;
            let a = c.class.alphabet();
            let total = rng.gen_range(0..=self.depth);
            let lx = rng.gen_range(0..=total);
            let path = sample_path(mu, total, &mut rng)?;
            let (x, y) = (path.prefix(lx), path.suffix_from(lx));
            let pick = rng.gen_range(0..4);
            let (kind, rho): (&'static str, &dyn Evaluate) = match pick {
                0 => ("mixture", c.class.as_ref()),
                1 if a == self.registry.alphabet() => ("machine", &machine),
                2 => ("member", c.class.model(rng.gen_range(0..c.class.len()))?),
                _ => {
                    let same: Vec<&Semimeasure> = catalog.iter().filter(|m| m.alphabet() == a).collect();
                    ("catalog", same[rng.gen_range(0..same.len())])
                }
            };
            match telescoping_check(rho, mu, &x, &y) {
                Ok(r) => {
                    groups.entry(kind).or_default().push(r);
                    done += 1;
                }
                Err(Error::DegenerateHistory(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(groups
            .into_iter()
            .filter_map(|(k, rs)| aggregate("telescoping", &format!("surrogate={k} seed={}", self.seed), &rs))
            .collect())
    }

    fn eq5(&self) -> Result<Vec<BoundReport>> {
        let machine = self.machine()?;
        let table = machine.table();
        let mut out = Vec::new();
        let n = self.n;
        for (name, i, alpha) in targets(&self.classes) {
            let c = self.classes.iter().find(|c| c.name == name).expect("target class");
            let w = c.class.weight(i)?.clone();
            out.extend(det_bound_report(c.class.as_ref(), &alpha, n, &DetComparator::Weight(w))?);
            if alpha.head(0).alphabet() == self.registry.alphabet() {
                let cmp = match table.km_l(&alpha.head(n))? {
                    Some(w) => DetComparator::Witness(w.program),
                    None => DetComparator::None,
                };
                out.extend(det_bound_report(&machine, &alpha, n, &cmp)?);
            }
        }
        // 0^{k-1} 1^∞ through the unary base
        if self.registry.alphabet() == Alphabet::BINARY {
            for k in 2..=n.min(8) {
                let mut head = "0".repeat(k - 1);
                head.insert_str(0, "det:");
                let alpha = Semimeasure::parse(&format!("{head}(1)"))?;
                let p = alpha.as_periodic().expect("periodic").clone();
                let budget = gamma_len(2) + gamma_len(k as u64);
                let floor = crate::rational::pow2_neg(budget);
                let mass = machine.eval(&p.head(k))?;
                out.push(
                    BoundReport::exact(
                        "eq5-unary",
                        format!("alpha={alpha} k={k}"),
                        if mass.is_zero() { f64::INFINITY } else { -crate::rational::ln_q(&mass) },
                        budget as f64 * std::f64::consts::LN_2,
                    )
                    .with_exact(mass >= floor, &mass, &floor)
                    .with_direction("exact comparison M_L(alpha_1:k) >= 2^-(l(gamma(2)) + l(gamma(k)))")
                    .at(None, Some(k)),
                );
            }
        }
        Ok(out)
    }

    fn lemma2(&self) -> Result<Vec<BoundReport>> {
        let machine = self.machine()?;
        let pair = catalog::class("bernoulli-pair")?;
        let mut out = Vec::new();
        for (label, rho) in [("machine", &machine as &dyn Evaluate), ("bernoulli-pair", pair.class.as_ref())] {
            if rho.alphabet() != Alphabet::BINARY {
                continue;
            }
            let mut steps = Vec::new();
            let mut values = Vec::new();
            let mut defs = Vec::new();
            for l in 1..=10 {
                let inst = lemma2_instance(l, rho)?;
                steps.push(inst.report.clone());
                let ok = inst.mass_x == one() && inst.mass_x0.is_zero() && inst.mass_x1 == one();
                values.push(
                    BoundReport::exact("lemma2-values", format!("l={l}"), 0.0, 0.0)
                        .with_holds(ok)
                        .with_direction("mu^l(0^l) = 1, mu^l(0^l 0) = 0, mu^l(0^l 1) = 1 exactly"),
                );
                let s = rho.eval(&inst.x)?;
                let same = inst.deficiency.ratio.as_ref() == Some(&s);
                defs.push(
                    BoundReport::exact("lemma2-deficiency", format!("l={l}"), inst.deficiency.value, inst.deficiency.value)
                        .with_holds(same)
                        .with_direction("d(0^l) equals log2 rho(0^l) as an exact ratio"),
                );
            }
            let case = format!("rho={label} l=1..10");
            out.extend(aggregate("lemma2-step", &case, &steps));
            out.extend(aggregate("lemma2-values", &case, &values));
            out.extend(aggregate("lemma2-deficiency", &case, &defs));
        }
        Ok(out)
    }

    fn machine_semimeasure(&self) -> Result<Vec<BoundReport>> {
        let machine = self.machine()?;
        let chk = check_semimeasure(&machine, 4)?;
        let excess = chk.max_violation();
        Ok(vec![BoundReport::exact("machine-semimeasure", format!("registry={}", self.registry.hash()), to_f64(&excess), 0.0)
            .with_exact(chk.is_semimeasure, &excess, &zero())
            .with_direction("largest excess of sum_a M_L(xa) over M_L(x), and of M_L(empty) over 1, to depth 4")
            .with_horizon(HorizonMeta::new(self.horizon, Some(4)))])
    }

    fn thm1_registry(&self) -> Result<Vec<BoundReport>> {
        let machine = self.machine()?;
        let cache = TableCache::prefix(Arc::clone(&self.registry), self.horizon);
        let mut out = Vec::new();
        for c in self.machine_classes() {
            for (i, mu) in c.class.models().iter().enumerate() {
                let code = nat_code(i as u64, c.class.alphabet());
                let mut rs = Vec::new();
                for x in c.class.alphabet().strings_up_to(3) {
                    for y in c.class.alphabet().strings_up_to(2).filter(|y| !y.is_empty()) {
                        match thm1_registry_report(&machine, &cache, mu, &code, &x, &y) {
                            Ok(r) => rs.push(r),
                            Err(Error::DegenerateHistory(_)) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
                out.extend(aggregate("thm1-registry", &format!("class={} mu={i}", c.name), &rs));
            }
        }
        Ok(out)
    }

    fn deficiency_bounds(&self, name: &str) -> Result<Vec<BoundReport>> {
        let machine = self.machine()?;
        let prefix = TableCache::prefix(Arc::clone(&self.registry), self.horizon);
        let star = TableCache::kstar(Arc::clone(&self.registry), self.horizon);
        let a = self.registry.alphabet();
        let mut out = Vec::new();
        for (cname, i, alpha) in targets(&self.classes) {
            if alpha.head(0).alphabet() != a {
                continue;
            }
            let mu = Semimeasure::Deterministic(alpha.clone());
            let code = nat_code(i as u64, a);
            let mut tele = Vec::new();
            let mut rs = Vec::new();
            for lx in 0..=4 {
                let x = alpha.head(lx);
                for ly in 1..=3 {
                    let y = alpha.head(lx + ly).suffix_from(lx);
                    let head = if name == "thm2" { prefix.value(&code, &FinStr::empty(a))? } else { star.value(&code, &x)? };
                    let got = if name == "thm2" {
                        thm2_report(&machine, &mu, &x, &y, head, &prefix)
                    } else {
                        thm3_report(&machine, &mu, &x, &y, head, &prefix)
                    };
                    match got {
                        Ok(mut v) => {
                            rs.push(v.pop().expect("bound report"));
                            tele.push(v.pop().expect("identity report"));
                        }
                        Err(Error::DegenerateHistory(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
            let case = format!("class={cname} mu={i} alpha={mu}");
            out.extend(aggregate(name, &case, &rs));
            out.extend(aggregate(&format!("{name}-telescoping"), &case, &tele));
        }
        Ok(out)
    }

    fn period(&self) -> Result<Vec<BoundReport>> {
        if self.registry.alphabet() != Alphabet::BINARY {
            return Ok(Vec::new());
        }
        let machine = self.machine()?;
        let prefix = TableCache::prefix(Arc::clone(&self.registry), self.horizon);
        let star = TableCache::kstar(Arc::clone(&self.registry), self.horizon);
        let mut out = Vec::new();
        let meta = HorizonMeta::new(self.horizon, None);
        let first = gamma_len(3) as f64;
        for n in 1..=8 {
            let e = period_example(n, &machine, &prefix, &star)?;
            let case = format!("n={n} x={}", e.x);
            let k = e.kstar.map_or(f64::INFINITY, |v| v as f64);
            out.push(
                BoundReport::exact("period-kstar", case.clone(), k, first)
                    .with_holds(k <= first)
                    .with_direction("K*_L(<n>|x*) against the zero-counter program gamma(3); exact within the registry")
                    .with_horizon(meta)
                    .at(None, Some(n)),
            );
            out.push(
                BoundReport::registry(
                    "period-rhs",
                    format!("{case} kstar={:?} k_cond={:?} k_len={:?} ceil_d={:?} k_ceil_d={:?}", e.kstar, e.k_cond, e.k_len, e.ceil_d, e.k_ceil_d),
                    e.thm3_rhs,
                    e.thm1_rhs,
                    "lhs is K*_L(<n>|x*) + K_L(ceil d), rhs is K_L(<n>|x) + K_L(<l(x)>); both are horizon upper bounds \
                     and the comparison is about growth in n, which a desk-scale horizon cannot settle",
                    meta,
                )
                .at(None, Some(n)),
            );
        }
        Ok(out)
    }

    fn cor2_registry(&self) -> Result<Vec<BoundReport>> {
        let machine = self.machine()?;
        let cache = TableCache::prefix(Arc::clone(&self.registry), self.horizon);
        let a = self.registry.alphabet();
        let mut out = Vec::new();
        for (cname, i, alpha) in targets(&self.classes) {
            if alpha.head(0).alphabet() != a {
                continue;
            }
            let mu = Semimeasure::Deterministic(alpha.clone());
            let code = nat_code(i as u64, a);
            let mut rs = Vec::new();
            for l in 0..=3 {
                match corollary_registry_report(&machine, &cache, &mu, &code, &alpha.head(l), l + 4) {
                    Ok(r) => rs.push(r),
                    Err(Error::DegenerateHistory(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            out.extend(aggregate("cor2-registry", &format!("class={cname} mu={i}"), &rs));
        }
        Ok(out)
    }

    fn cor2_mc(&self) -> Result<Vec<BoundReport>> {
        let mut out = Vec::new();
        let meta = HorizonMeta { max_len: 0, max_steps: 0, depth: Some(self.n) };
        for c in &self.classes {
            for i in 0..c.class.len() {
                let (est, skipped) = posterior_bound_trace(&c.class, i, self.n, 2048, self.seed)?;
                let rs: Vec<BoundReport> = est
                    .windows(2)
                    .enumerate()
                    .map(|(l, w)| {
                        BoundReport::registry(
                            "cor2-mc",
                            format!("class={} mu={i} l={}", c.name, l + 1),
                            w[1].mean,
                            w[0].mean + 2.0 * (w[0].stderr + w[1].stderr),
                            "Monte Carlo means of ln 1/w_mu(omega_1:l) with two standard errors of slack; \
                             statistical, not exact",
                            meta,
                        )
                        .at(Some(l + 1), None)
                    })
                    .collect();
                out.extend(aggregate("cor2-mc", &format!("class={} mu={i} skipped={skipped}", c.name), &rs));
            }
        }
        Ok(out)
    }

    fn lemma2_sweep(&self) -> Result<Vec<BoundReport>> {
        if self.registry.alphabet() != Alphabet::BINARY {
            return Ok(Vec::new());
        }
        let machine = self.machine()?;
        let vals =
            (1..=10).map(|l| lemma2_instance(l, &machine).map(|i| i.one_step)).collect::<Result<Vec<f64>>>()?;
        let trace = vals.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(",");
        Ok(vec![BoundReport::registry(
            "lemma2-sweep",
            format!("one-step divergences l=1..10: {trace}"),
            vals[0],
            vals[9],
            "lhs is the one-step divergence at l = 1, rhs at l = 10, against M_L; growth in l is asymptotic and \
             the sequence is not monotone at this horizon",
            HorizonMeta::new(self.horizon, None),
        )])
    }

    fn psi_registry(&self) -> Result<Vec<BoundReport>> {
        let cache = Arc::new(TableCache::prefix(Arc::clone(&self.registry), self.horizon));
        let mut out = Vec::new();
        for c in self.machine_classes() {
            let a = c.class.alphabet();
            let codes: Vec<FinStr> = (0..c.class.len()).map(|i| nat_code(i as u64, a)).collect();
            let weights = PsiWeights::Registry { cache: Arc::clone(&cache), codes };
            let head = Semimeasure::Mixture(Arc::clone(&c.class));
            let psi = Psi::new(Arc::clone(&c.class), head, 2, weights, SuffixMode::Unconditional)?;
            let d = psi_dominance(&psi, c.class.as_ref(), 0, self.depth.min(6))?;
            let need = d.needed_c.map_or(f64::INFINITY, |v| v as f64);
            out.push(BoundReport::registry(
                "psi-registry",
                format!("class={} l=2 argmax={:?} max_ratio={:?}", c.name, d.argmax.map(|z| z.to_string()), d.max_ratio.map(|r| fmt_q(&r))),
                need,
                0.0,
                "lhs is the smallest c with xi >= 2^-c psi^l on the scan, rhs the zero cost a finite class can offer; \
                 a finite mixture is not universal, so no constant is promised",
                HorizonMeta::new(self.horizon, Some(self.depth.min(6))),
            ));
        }
        Ok(out)
    }
}

fn sample_path(mu: &dyn Evaluate, len: usize, rng: &mut ChaCha8Rng) -> Result<FinStr> {
    let mut x = FinStr::empty(mu.alphabet());
    for _ in 0..len {
        let a = sample_index(&next_distribution(mu, &x)?, rng);
        x = x.pushed(a as u8);
    }
    Ok(x)
}

fn targets(classes: &[NamedClass]) -> Vec<(String, usize, crate::measures::Periodic)> {
    let mut out = Vec::new();
    for c in classes {
        for (i, m) in c.class.models().iter().enumerate() {
            if let Some(p) = m.as_periodic() {
                out.push((c.name.clone(), i, p.clone()));
            }
        }
    }
    out
}

fn members(classes: &[NamedClass]) -> Vec<(&NamedClass, usize)> {
    classes.iter().flat_map(|c| (0..c.class.len()).map(move |i| (c, i))).collect()
}

/// `ξ(x) ≥ w_μ μ(x)` for every member and every `ℓ(x) ≤ depth`.
pub fn dominance_reports(classes: &[NamedClass], depth: usize) -> Result<Vec<BoundReport>> {
    members(classes)
        .into_par_iter()
        .map(|(c, i)| {
            let d = dominance_check(&c.class, i, depth)?;
            let mut r = BoundReport::exact("dominance", format!("class={} mu={i}", c.name), 0.0, to_f64(&d.min_slack))
                .with_exact(d.violations == 0, &zero(), &d.min_slack)
                .with_direction("least value of xi(x) - w_mu mu(x) over the scan, exact")
                .at(None, Some(depth));
            r.cases = d.strings_checked;
            r.failures = d.violations;
            r.worst_case = Some(format!("x={}", d.argmin));
            Ok(r)
        })
        .collect()
}

/// `0 ≤ Σ E[s_t] ≤ D_{l:n}` for all five kinds with `ρ = ξ`, and `D_{l:n}` nondecreasing in `n`.
pub fn chain_reports(classes: &[NamedClass], ls: &[usize], window: usize) -> Result<Vec<BoundReport>> {
    let jobs: Vec<(&NamedClass, usize, usize)> =
        members(classes).into_iter().flat_map(|(c, i)| ls.iter().map(move |&l| (c, i, l))).collect();
    let parts = jobs
        .into_par_iter()
        .map(|(c, i, l)| {
            let mu = c.class.model(i)?;
            let kinds = DistanceKind::all(c.class.alphabet().size());
            let mut per_kind: Vec<Vec<BoundReport>> = vec![Vec::new(); kinds.len()];
            let mut mono = Vec::new();
            for h in c.class.alphabet().strings(l - 1) {
                if mu.eval(&h)?.is_zero() {
                    continue;
                }
                let led = cumulative_divergence(mu, c.class.as_ref(), &h, l + window, &kinds)?;
                for (k, kind) in kinds.iter().enumerate() {
                    for n in l..=l + window {
                        let (lhs, rhs) = (led.lhs_at(k, n), led.rhs_at(n));
                        let ok = lhs >= -TOLERANCE && (rhs.is_infinite() || lhs <= rhs + TOLERANCE);
                        per_kind[k].push(
                            BoundReport::exact("chain", format!("h={h} kind={} n={n}", kind.name()), lhs, rhs)
                                .with_holds(ok)
                                .at(Some(l), Some(n)),
                        );
                    }
                }
                mono.push(
                    BoundReport::exact("chain-monotone", format!("h={h}"), 0.0, 0.0)
                        .with_holds(led.nondecreasing)
                        .with_direction("D_{l:n} nondecreasing in n within tolerance"),
                );
            }
            let mut out = Vec::new();
            for (k, rs) in kinds.iter().zip(&per_kind) {
                let case = format!("class={} mu={i} l={l} kind={}", c.name, k.name());
                out.extend(aggregate("chain", &case, rs).map(|r| {
                    r.with_direction("0 <= sum of expected distances <= D_{l:n}, float tolerance 1e-9 after exact inner products")
                }));
            }
            out.extend(aggregate("chain-monotone", &format!("class={} mu={i} l={l}", c.name), &mono));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// `D_{1:n} ≤ ln w_μ^{-1}` for every `n ≤ n_max`.
pub fn eq6_reports(classes: &[NamedClass], n_max: usize) -> Result<Vec<BoundReport>> {
    members(classes)
        .into_par_iter()
        .map(|(c, i)| {
            let mu = c.class.model(i)?;
            let w = c.class.weight(i)?;
            let bound = -crate::rational::ln_q(w);
            let led = cumulative_divergence(mu, c.class.as_ref(), &FinStr::empty(c.class.alphabet()), n_max, &[])?;
            let rs: Vec<BoundReport> = (1..=n_max)
                .map(|n| BoundReport::exact("eq6", format!("n={n}"), led.rhs_at(n), bound).at(Some(1), Some(n)))
                .collect();
            Ok(aggregate("eq6", &format!("class={} mu={i}", c.name), &rs)
                .expect("n_max >= 1")
                .with_direction("D_{1:n} against ln of the inverse prior weight; float tolerance 1e-9"))
        })
        .collect()
}

/// `D_{l:n}(ω_{<l}) ≤ ln w_μ(ω_{<l})^{-1}` for every history with `ℓ(ω) < l ≤ l_max` and `n ≤ n_max`.
pub fn posterior_reports(classes: &[NamedClass], l_max: usize, n_max: usize) -> Result<Vec<BoundReport>> {
    members(classes)
        .into_par_iter()
        .map(|(c, i)| {
            let mu = c.class.model(i)?;
            let mut rs = Vec::new();
            for h in c.class.alphabet().strings_up_to(l_max - 1) {
                if mu.eval(&h)?.is_zero() {
                    continue;
                }
                let b = posterior_bound(&c.class, i, &h)?;
                let led = cumulative_divergence(mu, c.class.as_ref(), &h, n_max, &[])?;
                for n in h.len() + 1..=n_max {
                    rs.push(
                        BoundReport::exact("posterior", format!("h={h} n={n}"), led.rhs_at(n), b.ln_inverse)
                            .at(Some(h.len() + 1), Some(n)),
                    );
                }
            }
            Ok(aggregate("posterior", &format!("class={} mu={i}", c.name), &rs)
                .expect("the empty history has positive mass")
                .with_direction("D_{l:n}(h) against ln of the inverse posterior weight; float tolerance 1e-9"))
        })
        .collect()
}

/// `w_μ(x) μ(y|x) ≤ ξ(y|x)` for all `ℓ(x) + ℓ(y) ≤ depth` with `μ(xy) > 0`.
pub fn thm1_reports(classes: &[NamedClass], depth: usize) -> Result<Vec<BoundReport>> {
    members(classes)
        .into_par_iter()
        .map(|(c, i)| {
            let mu = c.class.model(i)?;
            let a = c.class.alphabet();
            let mut rs = Vec::new();
            for xy in a.strings_up_to(depth) {
                if mu.eval(&xy)?.is_zero() {
                    continue;
                }
                for k in 0..=xy.len() {
                    rs.push(thm1_report(&c.class, i, &xy.prefix(k), &xy.suffix_from(k))?);
                }
            }
            Ok(aggregate("thm1", &format!("class={} mu={i}", c.name), &rs).expect("nonempty scan"))
        })
        .collect()
}

/// `ψ^l` is a semimeasure, and with posterior weights it is dominated by `ξ` at no cost.
pub fn psi_reports(classes: &[NamedClass], depth: usize) -> Result<Vec<BoundReport>> {
    let jobs: Vec<(&NamedClass, usize)> = classes.iter().flat_map(|c| [1usize, 2].map(|l| (c, l))).collect();
    let parts = jobs
        .into_par_iter()
        .map(|(c, l)| {
            let ks = (0..c.class.len()).map(|i| Some(gamma_len(i as u64 + 1))).collect();
            let psi = Psi::standard(Arc::clone(&c.class), l, ks)?;
            let chk = check_semimeasure(&psi, depth)?;
            let excess = chk.max_violation();
            let semi = BoundReport::exact("psi-semimeasure", format!("class={} l={l}", c.name), to_f64(&excess), 0.0)
                .with_exact(chk.is_semimeasure, &excess, &zero())
                .with_direction("weights 2^-l(gamma(i+1)); largest excess over the exhaustive scan")
                .at(Some(l), Some(depth));
            let head = Semimeasure::Mixture(Arc::clone(&c.class));
            let post = Psi::new(Arc::clone(&c.class), head, l, PsiWeights::Posterior, SuffixMode::Conditional)?;
            let d = psi_dominance(&post, c.class.as_ref(), 0, depth)?;
            let ratio = d.max_ratio.clone().unwrap_or_else(zero);
            let mut dom = BoundReport::exact("psi-dominance", format!("class={} l={l}", c.name), to_f64(&ratio), 1.0)
                .with_exact(d.violations == 0, &ratio, &one())
                .with_direction("largest psi^l(z)/xi(z) with posterior weights and conditional suffixes, against 2^0")
                .at(Some(l), Some(depth));
            dom.cases = d.strings_checked;
            dom.failures = d.violations;
            dom.worst_case = d.argmax.map(|z| format!("z={z}"));
            Ok(vec![semi, dom])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Adversarial sequences: expected outputs, exact certificates, one-step bounds against a mixture.
pub fn lemma1_reports() -> Result<Vec<BoundReport>> {
    let grid = catalog::class("bernoulli-grid")?;
    let markov = catalog::class("markov-mix")?;
    let cases: Vec<(&str, Option<&str>, &WeightedClass)> = vec![
        ("ber:3/5", Some("0000000000000000"), grid.class.as_ref()),
        ("ber:1/2", Some("1111111111111111"), grid.class.as_ref()),
        ("ber:1/5", None, grid.class.as_ref()),
        ("markov:1:1/2,1/2;3/4,1/4;1/4,3/4", None, markov.class.as_ref()),
    ];
    let three = q(3, 1);
    let mut out = Vec::new();
    for (spec, expected, class) in cases {
        let mu = Semimeasure::parse(spec)?;
        let adv = lemma1_adversarial(&mu, 16)?;
        if let Some(e) = expected {
            out.push(
                BoundReport::exact("lemma1-sequence", format!("mu={spec} alpha={}", adv.alpha), 0.0, 0.0)
                    .with_holds(adv.alpha.to_string() == e)
                    .with_direction(&format!("expected alpha = {e}"))
                    .at(None, Some(16)),
            );
        }
        let mut certs = Vec::new();
        for c in &adv.certificates {
            let h = adv.alpha.prefix(c.l - 1);
            let next = next_distribution(&mu, &h)?;
            let first = next.iter().position(|p| times_ln2_exceeds(&(&three * p), &one()));
            let ok = first == Some(c.b as usize) && next[c.b as usize] == c.mu_b && adv.alpha.syms()[c.l - 1] == 1 - c.b;
            certs.push(
                BoundReport::exact("lemma1-certificate", format!("l={} b={} mu_b={}", c.l, c.b, fmt_q(&c.mu_b)), 0.0, 0.0)
                    .with_holds(ok)
                    .with_direction("3 ln 2 mu(b|alpha_<l) > 1 decided with a refined rational bracket of ln 2"),
            );
        }
        out.extend(aggregate("lemma1-certificate", &format!("mu={spec}"), &certs));
        let steps = lemma1_certificates(&adv, &mu, class)?;
        out.extend(aggregate("lemma1-step", &format!("mu={spec} xi={}", class.label()), &steps));
    }
    Ok(out)
}

/// Posterior-loss chain, total bound and expected-posterior monotonicity over the catalog.
pub fn corollary_family(classes: &[NamedClass]) -> Result<Vec<BoundReport>> {
    let parts = members(classes)
        .into_par_iter()
        .map(|(c, i)| {
            let a = c.class.alphabet();
            let (l, n) = if a.size() == 2 { (4, 10) } else { (2, 6) };
            let rs = corollary_reports(&c.class, i, l, n, &DistanceKind::all(a.size()))?;
            let mut by: BTreeMap<(String, String), Vec<BoundReport>> = BTreeMap::new();
            for r in rs {
                let kind = r.case.split_whitespace().find(|t| t.starts_with("kind=")).unwrap_or("").to_string();
                by.entry((r.name.clone(), kind)).or_default().push(r);
            }
            Ok(by
                .into_iter()
                .filter_map(|((name, kind), rs)| {
                    let case = format!("class={} mu={i} l={l} n={n} {kind}", c.name);
                    aggregate(&name, case.trim(), &rs)
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// `Σ 2^{-ℓ(p)} ≤ 1` over halting programs for every `L` up to the horizon.
pub fn kraft_reports(reg: &MachineRegistry, h: Horizon) -> Result<Vec<BoundReport>> {
    let a = reg.alphabet();
    let conds: Vec<FinStr> = ["", "0", "01", "0001", "1101"]
        .iter()
        .map(|s| FinStr::parse(a, s))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for mode in [Mode::Prefix, Mode::TwicePrefix] {
        let mut rs = Vec::new();
        for len in 1..=h.max_len {
            for cond in &conds {
                let t = ComplexityTable::build(reg, Entry::Universal, mode, cond, Horizon::new(len, h.steps()))?;
                let k = t.kraft_sum().clone();
                rs.push(
                    BoundReport::exact("kraft", format!("L={len} cond={cond}"), to_f64(&k), 1.0)
                        .with_exact(k <= one(), &k, &one()),
                );
            }
        }
        out.extend(aggregate("kraft", &format!("mode={}", mode.name()), &rs).map(|r| {
            r.with_direction("exact dyadic sum over halting programs").with_horizon(HorizonMeta::new(h, None))
        }));
    }
    Ok(out)
}

/// `K_L(y|x)` does not increase when `L` or `S` grows.
pub fn k_monotone_reports(reg: &MachineRegistry, h: Horizon) -> Result<Vec<BoundReport>> {
    let a = reg.alphabet();
    let steps: Vec<u64> = [16u64, 32, 64, 128, 256].into_iter().filter(|&s| s <= h.steps().max(16)).collect();
    let lens: Vec<usize> = (1..=h.max_len).collect();
    let mut out = Vec::new();
    for cond in [FinStr::empty(a), FinStr::parse(a, "0110")?] {
        let tables: BTreeMap<(usize, u64), ComplexityTable> = lens
            .iter()
            .flat_map(|&l| steps.iter().map(move |&s| (l, s)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(l, s)| Ok(((l, s), ComplexityTable::build(reg, Entry::Universal, Mode::Prefix, &cond, Horizon::new(l, s))?)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .collect();
        let value = |l: usize, s: u64, y: &FinStr| tables[&(l, s)].value(y).map_or(f64::INFINITY, |v| v as f64);
        let mut in_l = Vec::new();
        let mut in_s = Vec::new();
        for y in a.strings_up_to(4) {
            for &s in &steps {
                for w in lens.windows(2) {
                    let (big, small) = (value(w[1], s, &y), value(w[0], s, &y));
                    in_l.push(BoundReport::exact("k-monotone", format!("y={y} S={s} L={}", w[1]), big, small).with_holds(big <= small));
                }
            }
            for &l in &lens {
                for w in steps.windows(2) {
                    let (big, small) = (value(l, w[1], &y), value(l, w[0], &y));
                    in_s.push(BoundReport::exact("k-monotone", format!("y={y} L={l} S={}", w[1]), big, small).with_holds(big <= small));
                }
            }
        }
        let meta = HorizonMeta::new(h, Some(4));
        out.extend(aggregate("k-monotone", &format!("cond={cond} in=L"), &in_l).map(|r| r.with_horizon(meta)));
        out.extend(aggregate("k-monotone", &format!("cond={cond} in=S"), &in_s).map(|r| r.with_horizon(meta)));
    }
    Ok(out)
}

/// Induced correct sets: `C_E` agrees with `K*_L`, validation passes, and three corruptions are caught.
pub fn correct_set_reports(reg: &MachineRegistry) -> Result<Vec<BoundReport>> {
    let h = Horizon::new(7, 128);
    let depth = 3;
    let meta = HorizonMeta::new(h, Some(depth));
    let set = CorrectSet::induce(reg, Entry::Universal, h, depth)?;
    let star = TableCache::kstar(Arc::new(reg.clone()), h);
    let mut agree = Vec::new();
    for x in reg.alphabet().strings_up_to(depth) {
        let t = star.table(&x)?;
        for (y, w) in t.entries() {
            let c = set.c_e(y, &x);
            agree.push(
                BoundReport::exact("kstar-correct", format!("x={x} y={y}"), w.len() as f64, c.map_or(f64::INFINITY, |v| v as f64))
                    .with_holds(c == Some(w.len())),
            );
        }
    }
    for ((x, y), c) in set.complexities() {
        let v = star.value(&y, &x)?;
        agree.push(
            BoundReport::exact("kstar-correct", format!("x={x} y={y}"), c as f64, v.map_or(f64::INFINITY, |v| v as f64))
                .with_holds(v == Some(c)),
        );
    }
    let mut out = Vec::new();
    out.extend(aggregate("kstar-correct", "registry", &agree).map(|r| {
        r.with_direction("C_E of the induced set equals the enumerated K*_L in both directions").with_horizon(meta)
    }));
    let v = set.validate();
    out.push(
        BoundReport::exact("correct-valid", format!("triples={}", v.triples), v.violations.iter().sum::<u64>() as f64, 0.0)
            .with_holds(v.is_correct())
            .with_direction("functionality, prolongation closure and prefix consistency")
            .with_horizon(meta),
    );

    let b3 = reg.restrict(&["zero-counter"]);
    let h = Horizon::new(6, 128);
    let base = CorrectSet::induce(&b3, Entry::Universal, h, 4)?;
    let roots = CorrectSet::roots(&b3, Entry::Universal, h, 4)?;
    let r = roots
        .iter()
        .find(|r| r.condition.len() < 4 && r.program.len() < 6)
        .ok_or_else(|| Error::Input("no root small enough for the negative controls".into()))?;
    let mut conflict = base.clone();
    conflict.insert(&r.program, &r.condition, &r.output.pushed(1));
    let mut hole = base.clone();
    hole.remove(&r.program.clone().then(&[0]), &r.condition, &r.output);
    let mut rootless = base.clone();
    rootless.remove(&r.program, &r.condition, &r.output);
    for (k, (label, set)) in [("conflict", conflict), ("hole", hole), ("rootless", rootless)].into_iter().enumerate() {
        let v = set.validate();
        out.push(
            BoundReport::exact("correct-control", format!("control={label} requirement={}", k + 1), 0.0, v.violations[k] as f64)
                .with_holds(v.violations[k] > 0)
                .with_direction("a corrupted set must be flagged under the matching requirement")
                .with_horizon(HorizonMeta::new(h, Some(4))),
        );
    }
    Ok(out)
}

/// `K*_L ≥ 0`, monotone in the condition, and Kraft over outputs for every condition.
pub fn kstar_reports(reg: &MachineRegistry, h: Horizon) -> Result<Vec<BoundReport>> {
    let h = Horizon::new(h.max_len.min(10), h.steps());
    let a = reg.alphabet();
    let star = TableCache::kstar(Arc::new(reg.clone()), h);
    let conds: Vec<FinStr> = a.strings_up_to(5).collect();
    conds.par_iter().map(|x| star.table(x).map(|_| ())).collect::<Result<Vec<()>>>()?;
    let meta = HorizonMeta::new(h, Some(5));
    let mut nonneg = Vec::new();
    let mut kraft = Vec::new();
    for x in &conds {
        let t = star.table(x)?;
        let s = t.complexity_kraft_sum();
        kraft.push(BoundReport::exact("kstar-kraft", format!("x={x}"), to_f64(&s), 1.0).with_exact(s <= one(), &s, &one()));
        let least = t.entries().map(|(_, w)| w.len()).min().unwrap_or(0);
        nonneg.push(BoundReport::exact("kstar-nonnegative", format!("x={x}"), 0.0, least as f64));
    }
    let mut mono = Vec::new();
    for x in a.strings_up_to(3) {
        for z in a.strings_up_to(2).filter(|z| !z.is_empty()) {
            let xz = x.concat(&z);
            for y in a.strings_up_to(3) {
                let longer = star.value(&y, &xz)?.map_or(f64::INFINITY, |v| v as f64);
                let shorter = star.value(&y, &x)?.map_or(f64::INFINITY, |v| v as f64);
                mono.push(
                    BoundReport::exact("kstar-monotone", format!("y={y} x={x} z={z}"), longer, shorter)
                        .with_holds(longer <= shorter),
                );
            }
        }
    }
    let mut out = Vec::new();
    out.extend(aggregate("kstar-nonnegative", "x up to depth 5", &nonneg).map(|r| r.with_horizon(meta)));
    out.extend(aggregate("kstar-kraft", "x up to depth 5", &kraft).map(|r| {
        r.with_direction("exact sum over outputs y of 2^-K*_L(y|x*)").with_horizon(meta)
    }));
    out.extend(aggregate("kstar-monotone", "x up to depth 3, z up to 2, y up to 3", &mono).map(|r| {
        r.with_direction("K*_L(y|xz*) <= K*_L(y|x*), unfound values as inf").with_horizon(meta)
    }));
    Ok(out)
}

/// Combining machine: `C(x|y) ≤ min_{l ≤ ℓ(y)} {K_L(x|y_{1:l}) + ℓ(γ(l+1))}` on all `ℓ(x) ≤ 3`, `ℓ(y) ≤ 5`.
pub fn combiner_reports(reg: &MachineRegistry, max_len: usize, max_steps: u64) -> Result<Vec<BoundReport>> {
    let a = reg.alphabet();
    let (ext, idx) = reg.build_min_l_machine();
    let prefix = TableCache::prefix(Arc::new(reg.clone()), Horizon::new(max_len, max_steps));
    let ys: Vec<FinStr> = a.strings_up_to(5).collect();
    let parts = ys
        .par_iter()
        .map(|y| {
            let extra = gamma_len(y.len() as u64 + 1);
            let hc = Horizon::new(max_len + extra, max_steps + (extra + y.len()) as u64);
            let c = ComplexityTable::build(&ext, Entry::Base(idx), Mode::TwicePrefix, y, hc)?;
            let mut rs = Vec::new();
            for x in a.strings_up_to(3) {
                let mut best = f64::INFINITY;
                for l in 0..=y.len() {
                    if let Some(k) = prefix.value(&x, &y.prefix(l))? {
                        best = best.min((k + gamma_len(l as u64 + 1)) as f64);
                    }
                }
                let lhs = c.value(&x).map_or(f64::INFINITY, |v| v as f64);
                rs.push(
                    BoundReport::exact("combiner", format!("x={x} y={y}"), lhs, best)
                        .with_holds(lhs <= best || best.is_infinite()),
                );
            }
            Ok(rs)
        })
        .collect::<Result<Vec<_>>>()?;
    let rs: Vec<BoundReport> = parts.into_iter().flatten().collect();
    let meta = HorizonMeta::new(Horizon::new(max_len, max_steps), Some(5));
    Ok(aggregate("combiner", &format!("pairs={}", rs.len()), &rs)
        .map(|r| {
            r.with_direction("combiner run at L + l(gamma(l(y)+1)) and S + l(gamma(l(y)+1)) + l(y) against prefix tables at (L, S)")
                .with_horizon(meta)
        })
        .into_iter()
        .collect())
}

pub fn exact_violations(reports: &[BoundReport]) -> usize {
    reports.iter().filter(|r| r.verdict == Verdict::Violated).count()
}

/// `reports.json` (or nothing for CSV) plus `summary.csv`; returns the paths written.
pub fn write_reports(reports: &[BoundReport], dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if format == Format::Json {
        let path = dir.join("reports.json");
        let mut f = std::fs::File::create(&path)?;
        serde_json::to_writer_pretty(&mut f, reports).map_err(|e| Error::Input(e.to_string()))?;
        f.write_all(b"\n")?;
        written.push(path);
    }
    let path = dir.join("summary.csv");
    write_summary_csv(reports, std::fs::File::create(&path)?)?;
    written.push(path);
    Ok(written)
}

pub fn write_summary_csv<W: Write>(reports: &[BoundReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["name", "regime", "case", "l", "n", "lhs", "rhs", "slack", "cases", "failures", "verdict"])
        .map_err(crate::mixture::csv_err)?;
    for r in reports {
        let opt = |v: Option<usize>| v.map_or(String::new(), |v| v.to_string());
        w.write_record([
            r.name.clone(),
            format!("{:?}", r.regime).to_lowercase(),
            r.case.clone(),
            opt(r.l),
            opt(r.n),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.slack),
            r.cases.to_string(),
            r.failures.to_string(),
            format!("{:?}", r.verdict).to_lowercase(),
        ])
        .map_err(crate::mixture::csv_err)?;
    }
    w.flush()?;
    Ok(())
}
