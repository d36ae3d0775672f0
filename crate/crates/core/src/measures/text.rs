//! Canonical one-line text forms for catalog measures.

use super::{Alphabet, Evaluate, FinStr, Semimeasure};
use crate::error::{input, Result};
use crate::machines::MachineSemimeasure;
use crate::mixture::WeightedClass;
use crate::rational::{fmt_q, parse_q, MeasureValue};

fn list(v: &[MeasureValue]) -> String {
    v.iter().map(fmt_q).collect::<Vec<_>>().join(",")
}

pub(super) fn render(m: &Semimeasure) -> String {
    match m {
        Semimeasure::Bernoulli(iid) if iid.alphabet() == Alphabet::BINARY && iid.is_measure() => {
            format!("ber:{}", fmt_q(&iid.probs()[1]))
        }
        Semimeasure::Bernoulli(iid) => format!("cat:{}", list(iid.probs())),
        Semimeasure::Markov(mk) => {
            let rows: Vec<String> = mk.table().iter().map(|r| list(r)).collect();
            format!("markov:{}:{};{}", mk.order(), list(mk.initial()), rows.join(";"))
        }
        Semimeasure::Deterministic(p) => {
            let a = Evaluate::alphabet(p);
            let u = FinStr::new(a, p.prefix().to_vec()).expect("valid prefix");
            let v = FinStr::new(a, p.period().to_vec()).expect("valid period");
            let suffix = if a == Alphabet::BINARY { String::new() } else { format!("@{}", a.size()) };
            format!("det:{u}({v}){suffix}")
        }
        Semimeasure::SuffixDeterministic { l, .. } => format!("lemma2:{l}"),
        Semimeasure::Conditionalized { base, prefix } => format!("cond[{prefix}]:{}", render(base)),
        Semimeasure::Mixture(c) => {
            let terms: Vec<String> =
                c.weights().iter().zip(c.models()).map(|(w, m)| format!("{}*{}", fmt_q(w), render(m))).collect();
            format!("mix({})", terms.join("|"))
        }
        Semimeasure::Machine(m) => m.canonical(),
    }
}

fn probs(s: &str) -> Result<Vec<MeasureValue>> {
    s.split(',').map(|t| parse_q(t.trim())).collect()
}

/// Splits on `sep` at parenthesis/bracket depth 0.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

pub(super) fn parse(spec: &str) -> Result<Semimeasure> {
    let spec = spec.trim();
    if let Some(body) = spec.strip_prefix("mix(").and_then(|b| b.strip_suffix(')')) {
        let mut weights = Vec::new();
        let mut models = Vec::new();
        for term in split_top(body, '|') {
            let Some((w, m)) = term.split_once('*') else {
                return input(format!("mixture term {term:?} is not WEIGHT*SPEC"));
            };
            weights.push(parse_q(w.trim())?);
            models.push(parse(m)?);
        }
        return Ok(Semimeasure::mixture(WeightedClass::new(models, weights)?));
    }
    if let Some(rest) = spec.strip_prefix("cond[") {
        let Some((prefix, base)) = rest.split_once("]:") else {
            return input(format!("expected cond[PREFIX]:SPEC, got {spec:?}"));
        };
        let base = parse(base)?;
        let prefix = FinStr::parse(base.alphabet(), prefix)?;
        return Semimeasure::conditionalized(base, prefix);
    }
    let Some((kind, body)) = spec.split_once(':') else {
        return input(format!("measure spec {spec:?} has no KIND: prefix"));
    };
    match kind {
        "ber" => Semimeasure::bernoulli(parse_q(body)?),
        "cat" => Semimeasure::categorical(probs(body)?),
        "markov" => {
            let Some((order, rest)) = body.split_once(':') else {
                return input("expected markov:K:INIT;ROW;...");
            };
            let order: usize = order.trim().parse().map_err(|_| crate::Error::Input(format!("bad order {order:?}")))?;
            let mut parts = rest.split(';');
            let initial = probs(parts.next().unwrap_or(""))?;
            let table = parts.map(probs).collect::<Result<Vec<_>>>()?;
            Semimeasure::markov(order, initial, table)
        }
        "det" => {
            let (pattern, alphabet) = match body.rsplit_once('@') {
                Some((p, a)) => {
                    let size = a.parse().map_err(|_| crate::Error::Input(format!("bad alphabet size {a:?}")))?;
                    (p, Alphabet::new(size)?)
                }
                None => (body, Alphabet::BINARY),
            };
            let Some((u, v)) = pattern.strip_suffix(')').and_then(|p| p.split_once('(')) else {
                return input(format!("expected det:U(V), got {spec:?}"));
            };
            Semimeasure::periodic(&FinStr::parse(alphabet, u)?, &FinStr::parse(alphabet, v)?)
        }
        "lemma2" => {
            let l = body.trim().parse().map_err(|_| crate::Error::Input(format!("bad l {body:?}")))?;
            Ok(Semimeasure::suffix_deterministic(l))
        }
        "machine" => Ok(Semimeasure::Machine(std::sync::Arc::new(MachineSemimeasure::from_params(body)?))),
        _ => input(format!("unknown measure kind {kind:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for s in [
            "ber:1/3",
            "cat:1/2,1/4,1/4",
            "cat:1/3,1/3",
            "markov:1:1/2,1/2;3/4,1/4;1/4,3/4",
            "det:0(01)",
            "det:(0)",
            "det:2(01)@3",
            "lemma2:5",
            "cond[01]:ber:2/3",
            "mix(1/2*ber:1/3|1/2*ber:2/3)",
            "mix(1/2*det:(0)|1/4*mix(1/1*ber:1/2))",
        ] {
            let m = Semimeasure::parse(s).unwrap();
            assert_eq!(m.canonical(), s);
        }
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "ber", "ber:2", "det:01", "mix(1/2ber:1/3)", "cat:1/2,1/2,1/2", "zzz:1"] {
            assert!(Semimeasure::parse(s).is_err(), "{s}");
        }
    }
}
