//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use unipred::bounds::{BoundReport, Regime, Verdict};
use unipred::config::{ExperimentConfig, Format, Suite};
use unipred::harness::{write_reports, Harness};
use unipred::measures::Evaluate;

struct Run {
    by_family: BTreeMap<&'static str, Vec<BoundReport>>,
    elapsed: BTreeMap<&'static str, Duration>,
}

impl Run {
    fn family(&self, f: &str) -> &[BoundReport] {
        self.by_family.get(f).map(Vec::as_slice).unwrap_or(&[])
    }

    fn named<'a>(&'a self, f: &str, name: &'a str) -> impl Iterator<Item = &'a BoundReport> + 'a {
        self.family(f).iter().filter(move |r| r.name == name)
    }
}

fn all_verified<'a>(rs: impl IntoIterator<Item = &'a BoundReport>) -> (bool, u64, u64) {
    let mut ok = true;
    let mut cases = 0;
    let mut failures = 0;
    let mut any = false;
    for r in rs {
        any = true;
        ok &= r.verdict == Verdict::Verified && r.regime == Regime::Exact;
        cases += r.cases;
        failures += r.failures;
    }
    (ok && any && failures == 0, cases, failures)
}

fn harness() -> Harness {
    let mut cfg = ExperimentConfig::default();
    cfg.reports.suite = Suite::Exact;
    cfg.horizon.depth = 6;
    Harness::from_config(&cfg).expect("default configuration")
}

fn run_in_process(h: &Harness) -> Run {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| {
        let mut by_family = BTreeMap::new();
        let mut elapsed = BTreeMap::new();
        for f in h.families() {
            let t = Instant::now();
            let rs = h.family(f).unwrap_or_else(|e| panic!("family {f}: {e}"));
            elapsed.insert(f, t.elapsed());
            by_family.insert(f, rs);
        }
        Run { by_family, elapsed }
    })
}

fn verify_cli(dir: &Path, workers: usize) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_unipred"))
        .args(["verify", "--suite", "exact", "--depth", "6", "--workers", &workers.to_string(), "--out"])
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    std::fs::read(dir.join("reports.json")).map_err(|e| e.to_string())
}

fn main() {
    let h = harness();
    let run = run_in_process(&h);
    let mut results: Vec<(usize, bool, String)> = Vec::new();
    let secs = |f: &str| run.elapsed[f].as_secs_f64();

    let alphabets: Vec<usize> = h.classes.iter().map(|c| c.class.alphabet().size()).collect();
    let (ok, cases, fails) = all_verified(run.family("dominance"));
    let shape = h.classes.len() >= 5 && alphabets.contains(&2) && alphabets.contains(&3);
    results.push((
        1,
        ok && shape && secs("dominance") <= 10.0,
        format!("dominance: {} classes, {cases} strings, {fails} violations, {:.2}s", h.classes.len(), secs("dominance")),
    ));

    let (ok, cases, fails) = all_verified(run.family("chain"));
    let kinds = run
        .named("chain", "chain")
        .filter_map(|r| r.case.split_whitespace().find(|t| t.starts_with("kind=")))
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    results.push((
        2,
        ok && kinds == 5 && secs("chain") <= 60.0,
        format!("chain: {kinds} kinds, {cases} comparisons, {fails} failures, monotone included, {:.2}s", secs("chain")),
    ));

    let (ok6, c6, _) = all_verified(run.family("eq6"));
    let (okp, cp, _) = all_verified(run.family("posterior"));
    results.push((3, ok6 && okp, format!("total bound {c6} cases, posterior bound {cp} cases")));

    let (ok, cases, fails) = all_verified(run.family("telescoping"));
    results.push((4, ok && cases >= 10_000, format!("telescoping: {cases} fuzz cases, {fails} failures")));

    let (ok, cases, _) = all_verified(run.family("eq5"));
    let machine = run.named("eq5", "eq5-loss").any(|r| r.case.contains("rho=machine"));
    let mixture = run.named("eq5", "eq5-loss").any(|r| r.case.contains("rho=mix("));
    let witness = run.named("eq5", "eq5-witness").count();
    results.push((
        5,
        ok && machine && mixture && witness > 0,
        format!("deterministic bound: {cases} reports, both surrogates, {witness} witness checks"),
    ));

    let parts = ["kraft", "machine-semimeasure", "k-monotone", "correct-sets"];
    let (ok, cases, _) = all_verified(parts.iter().flat_map(|f| run.family(f)));
    let controls = run.named("correct-sets", "correct-control").count();
    results.push((6, ok && controls == 3, format!("machine suite: {cases} checks, {controls} negative controls flagged")));

    let (ok, _, _) = all_verified(run.family("kstar"));
    let triples: u64 = run.named("kstar", "kstar-monotone").map(|r| r.cases).sum();
    results.push((7, ok && triples >= 1000, format!("K* properties: {triples} monotonicity triples")));

    let (ok, cases, fails) = all_verified(run.family("combiner"));
    results.push((8, ok && cases >= 500, format!("combining machine: {cases} pairs, {fails} failures")));

    let (ok1, _, _) = all_verified(run.family("lemma1"));
    let seqs = run.named("lemma1", "lemma1-sequence").count();
    let (ok2, _, _) = all_verified(run.family("lemma2"));
    results.push((9, ok1 && ok2 && seqs == 2, "constructions: adversarial sequences, certificates, one-switch values".into()));

    let tmp = tempfile::tempdir().expect("tempdir");
    let mut reference: Vec<BoundReport> = run.by_family.values().flatten().cloned().collect();
    unipred::bounds::sort_reports(&mut reference);
    write_reports(&reference, &tmp.path().join("lib"), Format::Json).expect("write reports");
    let lib = std::fs::read(tmp.path().join("lib/reports.json")).expect("read reports");
    let mut detail = Vec::new();
    let mut same = true;
    for w in [1usize, 4, 8] {
        match verify_cli(&tmp.path().join(format!("w{w}")), w) {
            Ok(bytes) => {
                let eq = bytes == lib;
                same &= eq;
                detail.push(format!("workers={w} {}", if eq { "identical" } else { "differs" }));
            }
            Err(e) => {
                same = false;
                detail.push(format!("workers={w} failed: {e}"));
            }
        }
    }
    results.push((10, same, format!("determinism: {}", detail.join(", "))));

    let mut failed = 0;
    for (n, ok, what) in &results {
        println!("criterion {n}: {} {what}", if *ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
