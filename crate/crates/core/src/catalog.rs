//! Built-in measures and model classes used by the harness and the examples.

use std::sync::Arc;

use crate::error::{input, Result};
use crate::measures::{Periodic, Semimeasure};
use crate::mixture::WeightedClass;
use crate::rational::parse_q;

/// Named measure specs, over alphabets of size 2, 3 and 4.
pub const MEASURES: &[(&str, &str)] = &[
    ("ber-third", "ber:1/3"),
    ("ber-two-thirds", "ber:2/3"),
    ("ber-half", "ber:1/2"),
    ("ber-three-fifths", "ber:3/5"),
    ("sticky", "markov:1:1/2,1/2;3/4,1/4;1/4,3/4"),
    ("repeat-first", "markov:1:1/2,1/2;1,0;0,1"),
    ("order2", "markov:2:1/2,1/2;1/2,1/2;1/3,2/3;2/3,1/3;1/5,4/5"),
    ("zeros", "det:(0)"),
    ("ones", "det:(1)"),
    ("alternate", "det:(01)"),
    ("switch-once", "det:00(1)"),
    ("one-switch", "lemma2:4"),
    ("cat-skewed", "cat:1/2,1/4,1/4"),
    ("cat-uniform3", "cat:1/3,1/3,1/3"),
    ("cycle3", "det:(012)@3"),
    ("ternary-markov", "markov:1:1/3,1/3,1/3;1/2,1/4,1/4;1/4,1/2,1/4;1/4,1/4,1/2"),
    ("cat-four", "cat:1/8,1/8,1/4,1/2"),
];

pub type ClassRow = (&'static str, &'static [&'static str], Option<&'static [&'static str]>);

/// Class definitions: name, members, prior weights (`None` for uniform).
pub const CLASSES: &[ClassRow] = &[
    ("bernoulli-pair", &["ber:1/3", "ber:2/3"], None),
    ("bernoulli-grid", &["ber:1/5", "ber:2/5", "ber:1/2", "ber:3/5", "ber:4/5"], Some(&["1/4", "1/8", "1/4", "1/8", "1/4"])),
    (
        "markov-mix",
        &["markov:1:1/2,1/2;3/4,1/4;1/4,3/4", "markov:1:1/2,1/2;1,0;0,1", "ber:1/2"],
        Some(&["1/2", "1/4", "1/8"]),
    ),
    ("deterministic", &["det:(0)", "det:(1)", "det:(01)", "det:00(1)", "lemma2:4"], None),
    ("ternary-iid", &["cat:1/2,1/4,1/4", "cat:1/4,1/2,1/4", "cat:1/3,1/3,1/3"], None),
    ("ternary-mixed", &["cat:1/3,1/3,1/3", "det:(012)@3", "markov:1:1/3,1/3,1/3;1/2,1/4,1/4;1/4,1/2,1/4;1/4,1/4,1/2"], None),
];

pub fn measures() -> Result<Vec<(&'static str, Semimeasure)>> {
    MEASURES.iter().map(|&(name, spec)| Ok((name, Semimeasure::parse(spec)?))).collect()
}

#[derive(Clone, Debug)]
pub struct NamedClass {
    pub name: String,
    pub class: Arc<WeightedClass>,
}

pub fn build_class(name: &str, models: &[&str], weights: Option<&[&str]>) -> Result<NamedClass> {
    let ms = models.iter().map(|s| Semimeasure::parse(s)).collect::<Result<Vec<_>>>()?;
    let class = match weights {
        Some(ws) => WeightedClass::new(ms, ws.iter().map(|w| parse_q(w)).collect::<Result<Vec<_>>>()?)?,
        None => WeightedClass::uniform(ms)?,
    };
    Ok(NamedClass { name: name.to_string(), class: Arc::new(class) })
}

pub fn classes() -> Result<Vec<NamedClass>> {
    CLASSES.iter().map(|&(name, models, weights)| build_class(name, models, weights)).collect()
}

pub fn class(name: &str) -> Result<NamedClass> {
    match CLASSES.iter().find(|c| c.0 == name) {
        Some(&(name, models, weights)) => build_class(name, models, weights),
        None => input(format!("unknown class {name:?}")),
    }
}

/// Deterministic targets with the class and member index they belong to.
pub fn deterministic_targets() -> Result<Vec<(String, usize, Periodic)>> {
    let mut out = Vec::new();
    for c in classes()? {
        for (i, m) in c.class.models().iter().enumerate() {
            if let Some(p) = m.as_periodic() {
                out.push((c.name.clone(), i, p.clone()));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{check_semimeasure, Evaluate};

    #[test]
    fn every_family_is_a_measure_to_depth_8() {
        for (name, m) in measures().unwrap() {
            let c = check_semimeasure(&m, 8).unwrap();
            assert!(c.is_measure_up_to_depth, "{name}: {:?}", c.worst);
        }
    }

    #[test]
    fn class_shapes() {
        let cs = classes().unwrap();
        assert!(cs.len() >= 5);
        assert!(cs.iter().any(|c| c.class.alphabet().size() == 3));
        assert!(deterministic_targets().unwrap().len() >= 6);
        assert!(class("nope").is_err());
    }
}
