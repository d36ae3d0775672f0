//! Command-line front end.
//!
//! Every subcommand prints its result to stdout (JSON or CSV) and, with
//! `--out DIR`, also writes it to a file there. Exit codes: 0 success,
//! 1 an exact-regime report was violated, 2 usage or configuration error,
//! 3 enumeration budget exceeded (set `UNIPRED_BUDGET` to raise it).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{lemma1_adversarial, lemma1_certificates, lemma2_instance, Verdict};
use crate::catalog::{self, NamedClass};
use crate::config::{ExperimentConfig, Format, Suite};
use crate::error::{Error, Result};
use crate::harness::{exact_violations, write_reports, write_summary_csv, Harness};
use crate::losses::{cumulative_divergence, monte_carlo_divergence, DistanceKind};
use crate::machines::{enum_k, enum_k_cond, enum_kstar, Horizon, MonotoneTable};
use crate::measures::{check_semimeasure, conditional, Evaluate, FinStr, Semimeasure};
use crate::mixture::{dominance_check, posterior_trace, write_trace_csv};
use crate::rational::{fmt_q, ln_q, to_f64};
use crate::report::fmt_f64;

#[derive(Parser, Debug)]
#[command(name = "unipred", version, about = "Exact mixture prediction, bounded complexity and bound verification")]
pub struct Cli {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for output files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// rho(x), optionally rho(y|x) and an exhaustive semimeasure check.
    Eval(EvalArgs),
    /// Posterior trace of a class along a sequence.
    Mixture(MixtureArgs),
    /// Cumulative divergence ledger, exhaustive or Monte Carlo.
    Divergence(DivergenceArgs),
    /// K_L, Km_L or M_L of a target.
    Complexity(ComplexityArgs),
    /// K*_L(y|x*) with its witness.
    Kstar(KstarArgs),
    /// Adversarial sequence with certificates, or the one-switch instance.
    Adversarial(AdversarialArgs),
    /// Runs the bound harness and writes reports.json and summary.csv.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub measure: String,
    #[arg(long, default_value = "")]
    pub x: String,
    /// Continuation for the conditional rho(y|x).
    #[arg(long)]
    pub y: Option<String>,
    /// Depth of an exhaustive semimeasure check.
    #[arg(long)]
    pub check: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MixtureArgs {
    /// Class name from the config or the built-in catalog.
    #[arg(long, default_value = "bernoulli-pair")]
    pub class: String,
    #[arg(long, default_value = "")]
    pub seq: String,
    /// Also run the dominance check to this depth.
    #[arg(long)]
    pub dominance: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DivergenceArgs {
    #[arg(long)]
    pub mu: String,
    /// Predictor spec; defaults to the class mixture.
    #[arg(long)]
    pub rho: Option<String>,
    #[arg(long, default_value = "bernoulli-pair")]
    pub class: String,
    #[arg(long, default_value = "")]
    pub history: String,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Comma-separated kinds; all five when absent.
    #[arg(long, value_delimiter = ',')]
    pub kinds: Option<Vec<String>>,
    /// Monte Carlo samples instead of the exhaustive expectation.
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Args, Debug)]
pub struct ComplexityArgs {
    #[arg(long)]
    pub target: String,
    #[arg(long)]
    pub cond: Option<String>,
    #[arg(long = "L")]
    pub max_len: Option<usize>,
    #[arg(long = "S")]
    pub max_steps: Option<u64>,
    /// k, km or m.
    #[arg(long, default_value = "k")]
    pub quantity: String,
}

#[derive(Args, Debug)]
pub struct KstarArgs {
    #[arg(long)]
    pub target: String,
    #[arg(long, default_value = "")]
    pub cond: String,
    #[arg(long = "L")]
    pub max_len: Option<usize>,
    #[arg(long = "S")]
    pub max_steps: Option<u64>,
}

#[derive(Args, Debug)]
pub struct AdversarialArgs {
    #[arg(long, default_value = "ber:3/5")]
    pub mu: String,
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// Class whose mixture the one-step certificates are checked against.
    #[arg(long)]
    pub against: Option<String>,
    /// Build the one-switch instance 0^l 1^inf against the class mixture instead.
    #[arg(long)]
    pub lemma2: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: Option<Suite>,
    #[arg(long)]
    pub depth: Option<usize>,
    /// Comma-separated report families.
    #[arg(long, value_delimiter = ',')]
    pub select: Option<Vec<String>>,
}

/// Parses the process arguments and runs; returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli, &mut std::io::stdout().lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget { .. } => 3,
        _ => 2,
    }
}

struct Ctx {
    cfg: ExperimentConfig,
    out: Option<PathBuf>,
    format: Format,
    workers: Option<usize>,
}

impl Ctx {
    fn horizon(&self, l: Option<usize>, s: Option<u64>) -> Horizon {
        let h = self.cfg.machine_horizon();
        Horizon::new(l.unwrap_or(h.max_len), s.unwrap_or(h.steps()))
    }

    fn class(&self, name: &str) -> Result<NamedClass> {
        let configured = self.cfg.named_classes()?;
        match configured.into_iter().find(|c| c.name == name) {
            Some(c) => Ok(c),
            None => catalog::class(name).map_err(|_| Error::Config(format!("unknown class {name:?}"))),
        }
    }
}

/// Runs a parsed command line, writing the primary output to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let ctx = Ctx {
        out: cli.out.clone().or_else(|| cfg.output.dir.clone()),
        format: cli.format.unwrap_or(cfg.output.format),
        workers: cli.workers,
        cfg,
    };
    match &cli.command {
        Command::Eval(a) => cmd_eval(&ctx, a, stdout),
        Command::Mixture(a) => cmd_mixture(&ctx, a, stdout),
        Command::Divergence(a) => cmd_divergence(&ctx, a, stdout),
        Command::Complexity(a) => cmd_complexity(&ctx, a, stdout),
        Command::Kstar(a) => cmd_kstar(&ctx, a, stdout),
        Command::Adversarial(a) => cmd_adversarial(&ctx, a, stdout),
        Command::Verify(a) => cmd_verify(&ctx, a, stdout),
    }
}

/// A result in both output shapes.
struct Output {
    stem: &'static str,
    json: Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Output {
    fn record(stem: &'static str, json: Value) -> Self {
        let (header, row) = match &json {
            Value::Object(m) => m.iter().map(|(k, v)| (k.clone(), cell(v))).unzip(),
            other => (vec!["value".into()], vec![cell(other)]),
        };
        Output { stem, json, header, rows: vec![row] }
    }

    fn emit(&self, ctx: &Ctx, stdout: &mut dyn Write) -> Result<()> {
        let mut text = Vec::new();
        match ctx.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut text, &self.json).map_err(|e| Error::Input(e.to_string()))?;
                text.push(b'\n');
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut text);
                w.write_record(&self.header).map_err(crate::mixture::csv_err)?;
                for r in &self.rows {
                    w.write_record(r).map_err(crate::mixture::csv_err)?;
                }
                w.flush()?;
            }
        }
        stdout.write_all(&text)?;
        if let Some(dir) = &ctx.out {
            std::fs::create_dir_all(dir)?;
            let ext = if ctx.format == Format::Json { "json" } else { "csv" };
            std::fs::write(dir.join(format!("{}.{ext}", self.stem)), &text)?;
        }
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Input(e.to_string()))
}

fn parse_str(m: &dyn Evaluate, s: &str) -> Result<FinStr> {
    FinStr::parse(m.alphabet(), s)
}

fn cmd_eval(ctx: &Ctx, a: &EvalArgs, stdout: &mut dyn Write) -> Result<i32> {
    let m = Semimeasure::parse(&a.measure)?;
    let x = parse_str(&m, &a.x)?;
    let v = m.eval(&x)?;
    let mut rec = json!({
        "measure": m.canonical(),
        "x": x.to_string(),
        "value": fmt_q(&v),
        "value_f64": fmt_f64(to_f64(&v)),
    });
    if let Some(y) = &a.y {
        let y = parse_str(&m, y)?;
        rec["y"] = json!(y.to_string());
        rec["conditional"] = json!(fmt_q(&conditional(&m, &x, &y)?));
    }
    if let Some(d) = a.check {
        let c = check_semimeasure(&m, d)?;
        rec["check_depth"] = json!(d);
        rec["is_semimeasure"] = json!(c.is_semimeasure);
        rec["is_measure_up_to_depth"] = json!(c.is_measure_up_to_depth);
        rec["max_violation"] = json!(fmt_q(&c.max_violation()));
    }
    Output::record("eval", rec).emit(ctx, stdout)?;
    Ok(0)
}

fn cmd_mixture(ctx: &Ctx, a: &MixtureArgs, stdout: &mut dyn Write) -> Result<i32> {
    let c = ctx.class(&a.class)?;
    let seq = FinStr::parse(c.class.alphabet(), &a.seq)?;
    let rows = posterior_trace(Arc::clone(&c.class), &seq)?;
    let dominance = match a.dominance {
        Some(d) => (0..c.class.len()).map(|i| dominance_check(&c.class, i, d).and_then(|r| to_value(&r))).collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let json = json!({
        "class": c.name,
        "mixture": c.class.label(),
        "seq": seq.to_string(),
        "trace": rows.iter().map(|r| json!({
            "t": r.t,
            "symbol": r.symbol,
            "predictive": r.predictive.iter().map(fmt_q).collect::<Vec<_>>(),
            "posterior": r.posterior.iter().map(fmt_q).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "dominance": dominance,
    });
    let mut text = Vec::new();
    write_trace_csv(&rows, c.class.len(), c.class.alphabet(), &mut text)?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_slice());
    let header = rdr.headers().map_err(crate::mixture::csv_err)?.iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()).map_err(crate::mixture::csv_err))
        .collect::<Result<Vec<_>>>()?;
    Output { stem: "mixture", json, header, rows }.emit(ctx, stdout)?;
    Ok(0)
}

fn cmd_divergence(ctx: &Ctx, a: &DivergenceArgs, stdout: &mut dyn Write) -> Result<i32> {
    let mu = Semimeasure::parse(&a.mu)?;
    let rho = match &a.rho {
        Some(s) => Semimeasure::parse(s)?,
        None => Semimeasure::Mixture(ctx.class(&a.class)?.class),
    };
    let h = parse_str(&mu, &a.history)?;
    let size = mu.alphabet().size();
    let kinds = match &a.kinds {
        Some(ks) => ks.iter().map(|k| DistanceKind::parse(k.trim(), size)).collect::<Result<Vec<_>>>()?,
        None => DistanceKind::all(size),
    };
    let out = match a.samples {
        Some(samples) => {
            let led = monte_carlo_divergence(&mu, &rho, &h, a.n, &kinds, samples, ctx.cfg.seed)?;
            let header = vec!["quantity".to_string(), "mean".into(), "stderr".into()];
            let mut rows: Vec<Vec<String>> =
                led.lhs.iter().map(|(k, e)| vec![k.clone(), fmt_f64(e.mean), fmt_f64(e.stderr)]).collect();
            rows.push(vec!["D".into(), fmt_f64(led.rhs.mean), fmt_f64(led.rhs.stderr)]);
            Output { stem: "divergence", json: to_value(&led)?, header, rows }
        }
        None => {
            let led = cumulative_divergence(&mu, &rho, &h, a.n, &kinds)?;
            let mut text = Vec::new();
            led.write_csv(&mut text)?;
            let mut rdr = csv::Reader::from_reader(text.as_slice());
            let header = rdr.headers().map_err(crate::mixture::csv_err)?.iter().map(String::from).collect();
            let rows = rdr
                .records()
                .map(|r| r.map(|r| r.iter().map(String::from).collect()).map_err(crate::mixture::csv_err))
                .collect::<Result<Vec<_>>>()?;
            Output { stem: "divergence", json: to_value(&led)?, header, rows }
        }
    };
    out.emit(ctx, stdout)?;
    Ok(0)
}

fn cmd_complexity(ctx: &Ctx, a: &ComplexityArgs, stdout: &mut dyn Write) -> Result<i32> {
    let reg = ctx.cfg.registry()?;
    let h = ctx.horizon(a.max_len, a.max_steps);
    let target = FinStr::parse(reg.alphabet(), &a.target)?;
    let rec = match a.quantity.to_ascii_lowercase().as_str() {
        "k" => {
            let r = match &a.cond {
                Some(c) => enum_k_cond(&reg, &target, &FinStr::parse(reg.alphabet(), c)?, h)?,
                None => enum_k(&reg, &target, h)?,
            };
            to_value(&r)?
        }
        q @ ("km" | "m") => {
            if a.cond.is_some() {
                return Err(Error::Config(format!("--quantity {q} takes no condition")));
            }
            let t = MonotoneTable::build(&reg, h)?;
            let m = t.m_l(&target)?;
            let km = t.km_l(&target)?;
            json!({
                "quantity": if q == "km" { "Km_L" } else { "M_L" },
                "target": target.to_string(),
                "L": h.max_len,
                "S": h.steps(),
                "M_L": fmt_q(&m),
                "neg_log2_M_L": fmt_f64(-ln_q(&m) / std::f64::consts::LN_2),
                "Km_L": km.as_ref().map(|w| w.value),
                "witness_bits": km.as_ref().map(|w| w.program.to_string()),
            })
        }
        other => return Err(Error::Config(format!("unknown quantity {other:?}; expected k, km or m"))),
    };
    Output::record("complexity", rec).emit(ctx, stdout)?;
    Ok(0)
}

fn cmd_kstar(ctx: &Ctx, a: &KstarArgs, stdout: &mut dyn Write) -> Result<i32> {
    let reg = ctx.cfg.registry()?;
    let h = ctx.horizon(a.max_len, a.max_steps);
    let y = FinStr::parse(reg.alphabet(), &a.target)?;
    let x = FinStr::parse(reg.alphabet(), &a.cond)?;
    let r = enum_kstar(&reg, &y, &x, h)?;
    Output::record("kstar", to_value(&r)?).emit(ctx, stdout)?;
    Ok(0)
}

fn cmd_adversarial(ctx: &Ctx, a: &AdversarialArgs, stdout: &mut dyn Write) -> Result<i32> {
    if let Some(l) = a.lemma2 {
        let rho = match &a.against {
            Some(name) => Semimeasure::Mixture(ctx.class(name)?.class),
            None => Semimeasure::Mixture(ctx.class("bernoulli-pair")?.class),
        };
        let inst = lemma2_instance(l, &rho)?;
        let json = to_value(&inst)?;
        let rec = json!({
            "l": inst.l,
            "mu": inst.mu,
            "x": inst.x.to_string(),
            "mass_x": fmt_q(&inst.mass_x),
            "mass_x0": fmt_q(&inst.mass_x0),
            "mass_x1": fmt_q(&inst.mass_x1),
            "one_step": fmt_f64(inst.one_step),
            "formula": fmt_f64(inst.formula),
        });
        let mut out = Output::record("adversarial", rec);
        out.json = json;
        out.emit(ctx, stdout)?;
        return Ok(0);
    }
    let mu = Semimeasure::parse(&a.mu)?;
    let adv = lemma1_adversarial(&mu, a.n)?;
    let steps = match &a.against {
        Some(name) => lemma1_certificates(&adv, &mu, ctx.class(name)?.class.as_ref())?,
        None => Vec::new(),
    };
    let json = json!({
        "mu": adv.mu,
        "alpha": adv.alpha.to_string(),
        "certificates": to_value(&adv.certificates)?,
        "steps": to_value(&steps)?,
    });
    let header = vec!["l".into(), "b".into(), "mu_b".into(), "exceeds".into(), "alpha_l".into()];
    let rows = adv
        .certificates
        .iter()
        .map(|c| {
            vec![c.l.to_string(), c.b.to_string(), fmt_q(&c.mu_b), c.exceeds.to_string(), adv.alpha.syms()[c.l - 1].to_string()]
        })
        .collect();
    Output { stem: "adversarial", json, header, rows }.emit(ctx, stdout)?;
    let bad = steps.iter().any(|r| r.verdict == Verdict::Violated);
    Ok(i32::from(bad))
}

fn cmd_verify(ctx: &Ctx, a: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32> {
    let mut cfg = ctx.cfg.clone();
    if let Some(s) = a.suite {
        cfg.reports.suite = s;
    }
    if let Some(d) = a.depth {
        cfg.horizon.depth = d;
    }
    if let Some(sel) = &a.select {
        cfg.reports.select = Some(sel.clone());
    }
    let harness = Harness::from_config(&cfg)?;
    let run = match ctx.workers {
        Some(w) => harness.run_partial_with_workers(w)?,
        None => harness.run_partial()?,
    };
    let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("unipred-out"));
    write_reports(&run.reports, &dir, ctx.format)?;
    let violated = exact_violations(&run.reports);
    if !run.failed.is_empty() {
        write_partial(&dir, &run.failed)?;
    }
    if ctx.format == Format::Csv {
        write_summary_csv(&run.reports, &mut *stdout)?;
    } else {
        summary(&run.reports, stdout)?;
    }
    for f in &run.failed {
        eprintln!("family {} did not finish: {}", f.family, f.error);
    }
    if let Some(f) = run.failed.iter().find(|f| !matches!(f.error, Error::Budget { .. })) {
        return Err(Error::Input(format!("family {}: {}", f.family, f.error)));
    }
    Ok(if violated > 0 {
        1
    } else if !run.failed.is_empty() {
        3
    } else {
        0
    })
}

fn write_partial(dir: &Path, failed: &[crate::harness::FailedFamily]) -> Result<()> {
    let v: Vec<Value> = failed.iter().map(|f| json!({ "family": f.family, "error": f.error.to_string() })).collect();
    let text = serde_json::to_string_pretty(&json!({ "partial": true, "incomplete_families": v }))
        .map_err(|e| Error::Input(e.to_string()))?;
    std::fs::write(dir.join("partial.json"), text + "\n")?;
    Ok(())
}

fn summary(reports: &[crate::bounds::BoundReport], out: &mut dyn Write) -> Result<()> {
    let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
    writeln!(
        out,
        "{} reports: {} verified, {} violated, {} inconclusive",
        reports.len(),
        count(Verdict::Verified),
        count(Verdict::Violated),
        count(Verdict::Inconclusive)
    )?;
    for r in reports.iter().filter(|r| r.verdict == Verdict::Violated) {
        writeln!(out, "violated: {} [{}] lhs={} rhs={}", r.name, r.case, fmt_f64(r.lhs), fmt_f64(r.rhs))?;
    }
    Ok(())
}
