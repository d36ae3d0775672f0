//! A machine that picks how much of its condition to use, against the best prefix conditional.

use unipred::machines::{gamma_len, ComplexityTable, Entry, Horizon, MachineRegistry, Mode};
use unipred::measures::{Alphabet, FinStr};

fn main() -> unipred::Result<()> {
    let reg = MachineRegistry::canonical(Alphabet::BINARY);
    let (ext, idx) = reg.build_min_l_machine();
    let h = Horizon::new(10, 128);
    let y = FinStr::bin("0110");
    let extra = gamma_len(y.len() as u64 + 1);
    let wide = Horizon::new(h.max_len + extra, h.steps() + (extra + y.len()) as u64);
    let c = ComplexityTable::build(&ext, Entry::Base(idx), Mode::TwicePrefix, &y, wide)?;

    println!("condition y = {y}, combiner at base index {idx}");
    println!("{:<5} {:>4} {:>28}", "x", "C", "min_l K(x|y_1:l) + l(gamma(l+1))");
    for x in Alphabet::BINARY.strings_up_to(3) {
        let mut best: Option<usize> = None;
        for l in 0..=y.len() {
            let t = ComplexityTable::build(&reg, Entry::Universal, Mode::Prefix, &y.prefix(l), h)?;
            if let Some(k) = t.value(&x) {
                let v = k + gamma_len(l as u64 + 1);
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        let show = |v: Option<usize>| v.map_or("-".into(), |v| v.to_string());
        let name = if x.is_empty() { "-".to_string() } else { x.to_string() };
        println!("{name:<5} {:>4} {:>28}", show(c.value(&x)), show(best));
    }
    Ok(())
}
