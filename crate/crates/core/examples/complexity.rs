//! Horizon-bounded prefix, conditional and twice-prefix complexities over the canonical registry.

use unipred::machines::{enum_k, enum_k_cond, enum_kstar, ComplexityTable, Entry, Horizon, MachineRegistry, Mode};
use unipred::measures::{Alphabet, FinStr};

fn main() -> unipred::Result<()> {
    let reg = MachineRegistry::canonical(Alphabet::BINARY);
    for b in reg.bases() {
        println!("base {}", b.name());
    }
    let h = Horizon::new(12, 256);

    println!("\n{:<8} {:>4} {:>8} {:>8}", "y", "K", "K(y|01)", "K*(y|01)");
    let x = FinStr::bin("01");
    for y in ["", "0", "01", "0000", "0101", "1101"] {
        let y = FinStr::bin(y);
        let show = |v: Option<usize>| v.map_or("-".into(), |v| v.to_string());
        println!("{:<8} {:>4} {:>8} {:>8}",
            if y.is_empty() { "-".to_string() } else { y.to_string() },
            show(enum_k(&reg, &y, h)?.value),
            show(enum_k_cond(&reg, &y, &x, h)?.value),
            show(enum_kstar(&reg, &y, &x, h)?.value));
    }

    let t = ComplexityTable::build(&reg, Entry::Universal, Mode::Prefix, &FinStr::empty(Alphabet::BINARY), h)?;
    println!("\n{} halting programs up to length 12, Kraft sum {}", t.halting_programs(), t.kraft_sum());
    Ok(())
}
