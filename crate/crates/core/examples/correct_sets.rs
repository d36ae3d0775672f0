//! Correct sets induced by twice-prefix runs, and what breaks when one is tampered with.

use unipred::machines::{CorrectSet, Entry, Horizon, MachineRegistry};
use unipred::measures::{Alphabet, FinStr};

fn main() -> unipred::Result<()> {
    let reg = MachineRegistry::canonical(Alphabet::BINARY);
    let mut set = CorrectSet::induce(&reg, Entry::Universal, Horizon::new(9, 128), 3)?;
    let report = set.validate();
    println!("{} triples, violations per condition {:?}, correct: {}", report.triples, report.violations, report.is_correct());

    for (y, x) in [("", ""), ("0", "01"), ("01", "01"), ("110", "")] {
        let (y, x) = (FinStr::bin(y), FinStr::bin(x));
        println!("c_E({y}|{x}) = {:?}", set.c_e(&y, &x));
    }

    // Adding a one-bit program that is a prefix of an existing entry breaks prefix-freeness.
    let (p, x, _) = set.iter().next().expect("non-empty set");
    let short = unipred::machines::Program::new(p.bits()[..1].to_vec())?;
    set.insert(&short, &x, &FinStr::bin("1"));
    let broken = set.validate();
    println!("\nafter inserting {short:?}: violations {:?}", broken.violations);
    for (i, ex) in broken.examples.iter().enumerate() {
        if let Some(e) = ex.first() {
            println!("  condition {}: {e}", i + 1);
        }
    }
    Ok(())
}
