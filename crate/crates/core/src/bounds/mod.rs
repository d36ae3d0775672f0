//! Bound evaluators in two regimes.
//!
//! In the exact regime the inequality is a theorem about the finite objects at
//! hand (a finite mixture, an enumerated table) and a failed comparison is a
//! violation. In the registry regime both sides are enumeration-horizon
//! approximations of incomputable quantities; such reports carry direction
//! notes and are never marked violated.

mod constructions;
mod deficiency;
mod theorems;

use serde::Serialize;

pub use constructions::{
    lemma1_adversarial, lemma1_certificates, lemma2_instance, period_example, Adversarial, Certificate,
    Lemma2Instance, PeriodExample,
};
pub use deficiency::{deficiency, DeficiencyRecord, DeficiencyStatus};
pub use theorems::{
    corollary_registry_report, corollary_reports, det_bound_report, expected_posterior_loss, posterior_bound_trace, psi_dominance, telescoping_check,
    thm1_registry_report, thm1_report, thm2_report, thm3_report, DetComparator, Psi, PsiDominance, PsiWeights, SuffixMode,
};

use crate::losses::TOLERANCE;
use crate::machines::Horizon;
use crate::rational::{fmt_q, MeasureValue};
use crate::report::ser_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Exact,
    Registry,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Violated,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HorizonMeta {
    #[serde(rename = "L")]
    pub max_len: usize,
    #[serde(rename = "S")]
    pub max_steps: u64,
    pub depth: Option<usize>,
}

impl HorizonMeta {
    pub fn new(h: Horizon, depth: Option<usize>) -> Self {
        HorizonMeta { max_len: h.max_len, max_steps: h.steps(), depth }
    }
}

/// One evaluated inequality `lhs ≤ rhs`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub regime: Regime,
    /// Instance description: models, strings, kind.
    pub case: String,
    #[serde(serialize_with = "ser_f64")]
    pub lhs: f64,
    #[serde(serialize_with = "ser_f64")]
    pub rhs: f64,
    #[serde(serialize_with = "ser_f64")]
    pub slack: f64,
    /// Exact rational forms of the compared quantities, when the comparison is exact.
    pub lhs_exact: Option<String>,
    pub rhs_exact: Option<String>,
    pub exact_holds: Option<bool>,
    pub direction: String,
    pub horizon: Option<HorizonMeta>,
    pub l: Option<usize>,
    pub n: Option<usize>,
    /// Whether `lhs ≤ rhs` at the horizon; the verdict of a registry report stays inconclusive.
    pub holds_at_horizon: bool,
    pub verdict: Verdict,
    /// Instances folded into this report and how many of them fail the comparison.
    pub cases: u64,
    pub failures: u64,
    /// Case of the worst instance when several were folded.
    pub worst_case: Option<String>,
}

impl BoundReport {
    pub fn exact(name: &str, case: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let mut r = BoundReport::raw(name, Regime::Exact, case.into(), lhs, rhs);
        r.settle();
        r
    }

    /// Registry-regime report; `direction` must say which way each side errs.
    pub fn registry(name: &str, case: impl Into<String>, lhs: f64, rhs: f64, direction: &str, horizon: HorizonMeta) -> Self {
        assert!(!direction.trim().is_empty(), "registry reports need direction notes");
        let mut r = BoundReport::raw(name, Regime::Registry, case.into(), lhs, rhs);
        r.direction = direction.to_string();
        r.horizon = Some(horizon);
        r.settle();
        r
    }

    fn raw(name: &str, regime: Regime, case: String, lhs: f64, rhs: f64) -> Self {
        BoundReport {
            name: name.to_string(),
            regime,
            case,
            lhs,
            rhs,
            slack: rhs - lhs,
            lhs_exact: None,
            rhs_exact: None,
            exact_holds: None,
            direction: String::new(),
            horizon: None,
            l: None,
            n: None,
            holds_at_horizon: false,
            verdict: Verdict::Inconclusive,
            cases: 1,
            failures: 0,
            worst_case: None,
        }
    }

    /// Attaches an exact comparison, which then decides the verdict.
    pub fn with_exact(mut self, holds: bool, lhs: &MeasureValue, rhs: &MeasureValue) -> Self {
        self.exact_holds = Some(holds);
        self.lhs_exact = Some(fmt_q(lhs));
        self.rhs_exact = Some(fmt_q(rhs));
        self.settle();
        self
    }

    /// Decides the verdict from an exact check without rational forms.
    pub fn with_holds(mut self, holds: bool) -> Self {
        self.exact_holds = Some(holds);
        self.settle();
        self
    }

    pub fn with_direction(mut self, notes: &str) -> Self {
        self.direction = notes.to_string();
        self
    }

    pub fn with_horizon(mut self, h: HorizonMeta) -> Self {
        self.horizon = Some(h);
        self
    }

    pub fn at(mut self, l: Option<usize>, n: Option<usize>) -> Self {
        self.l = l;
        self.n = n;
        self
    }

    fn settle(&mut self) {
        let float_holds = if self.lhs == f64::INFINITY && self.rhs == f64::INFINITY {
            None
        } else {
            Some(self.slack >= -TOLERANCE || self.rhs == f64::INFINITY)
        };
        let holds = self.exact_holds.or(float_holds);
        self.holds_at_horizon = holds.unwrap_or(false);
        self.failures = u64::from(!self.holds_at_horizon);
        self.verdict = match (self.regime, holds) {
            (Regime::Registry, _) | (Regime::Exact, None) => Verdict::Inconclusive,
            (Regime::Exact, Some(true)) => Verdict::Verified,
            (Regime::Exact, Some(false)) => Verdict::Violated,
        };
    }
}

/// Folds instances into one report carrying the worst instance: the first
/// failing one, else the one with least slack.
pub fn aggregate(name: &str, case: &str, reports: &[BoundReport]) -> Option<BoundReport> {
    let worst = reports
        .iter()
        .find(|r| r.failures > 0)
        .or_else(|| reports.iter().min_by(|a, b| a.slack.total_cmp(&b.slack)))?;
    let mut out = worst.clone();
    out.worst_case = Some(worst.worst_case.clone().unwrap_or_else(|| worst.case.clone()));
    out.name = name.to_string();
    out.case = case.to_string();
    out.cases = reports.iter().map(|r| r.cases).sum();
    out.failures = reports.iter().map(|r| r.failures).sum();
    out.holds_at_horizon = out.failures == 0;
    out.verdict = if reports.iter().any(|r| r.verdict == Verdict::Violated) {
        Verdict::Violated
    } else if reports.iter().all(|r| r.verdict == Verdict::Verified) {
        Verdict::Verified
    } else {
        Verdict::Inconclusive
    };
    if reports.iter().any(|r| r.l != out.l) {
        out.l = None;
    }
    if reports.iter().any(|r| r.n != out.n) {
        out.n = None;
    }
    Some(out)
}

/// Deterministic order for aggregated reports: name, then case.
pub fn sort_reports(reports: &mut [BoundReport]) {
    reports.sort_by(|a, b| (&a.name, &a.case, a.l, a.n).cmp(&(&b.name, &b.case, b.l, b.n)));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn verdict_rules() {
        assert_eq!(BoundReport::exact("t", "", 1.0, 1.0 - 1e-12).verdict, Verdict::Verified);
        assert_eq!(BoundReport::exact("t", "", 1.0, 0.5).verdict, Verdict::Violated);
        assert_eq!(BoundReport::exact("t", "", 1.0, f64::INFINITY).verdict, Verdict::Verified);
        assert_eq!(BoundReport::exact("t", "", f64::INFINITY, f64::INFINITY).verdict, Verdict::Inconclusive);
        let exact = BoundReport::exact("t", "", 0.0, 0.0).with_exact(false, &q(1, 2), &q(1, 3));
        assert_eq!(exact.verdict, Verdict::Violated);
        let h = HorizonMeta { max_len: 8, max_steps: 64, depth: None };
        let reg = BoundReport::registry("t", "", 5.0, 1.0, "both sides approximate", h);
        assert_eq!(reg.verdict, Verdict::Inconclusive);
        assert!(!reg.holds_at_horizon);
    }

    #[test]
    fn aggregation_keeps_the_worst() {
        let rs = vec![
            BoundReport::exact("t", "a", 0.0, 2.0),
            BoundReport::exact("t", "b", 0.0, 1.0),
            BoundReport::exact("t", "c", 0.0, 3.0),
        ];
        let agg = aggregate("all", "g", &rs).unwrap();
        assert_eq!((agg.cases, agg.failures, agg.slack), (3, 0, 1.0));
        assert_eq!(agg.worst_case.as_deref(), Some("b"));
        assert_eq!(agg.verdict, Verdict::Verified);
        let mut rs = rs;
        rs.push(BoundReport::exact("t", "d", 2.0, 1.0));
        let agg = aggregate("all", "g", &rs).unwrap();
        assert_eq!((agg.failures, agg.verdict), (1, Verdict::Violated));
        assert!(aggregate("x", "y", &[]).is_none());
    }
}
