//! Exact evaluation of the built-in measure families and their conditionals.

use unipred::measures::{check_semimeasure, conditional, next_distribution, Evaluate, FinStr, Semimeasure};
use unipred::rational::q;

fn main() -> unipred::Result<()> {
    let specs = ["ber:1/3", "cat:1/2,1/4,1/4", "markov:1:1/2,1/2;3/4,1/4;1/4,3/4", "det:0(01)", "cat:1/3,1/3,1/3"];
    for spec in specs {
        let m = Semimeasure::parse(spec)?;
        let a = m.alphabet();
        let x = FinStr::parse(a, "01")?;
        let check = check_semimeasure(&m, 6)?;
        println!("{:<24} m(01) = {:<8} next = {:?}  max violation to depth 6: {}",
            m.canonical(),
            m.eval(&x)?.to_string(),
            next_distribution(&m, &x)?.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            check.max_violation());
    }

    // Conditionals multiply along a split of the continuation.
    let m = Semimeasure::bernoulli(q(2, 5))?;
    let x = FinStr::bin("1");
    let (y, z) = (FinStr::bin("10"), FinStr::bin("011"));
    let whole = conditional(&m, &x, &y.concat(&z))?;
    let parts = conditional(&m, &x, &y)? * conditional(&m, &x.concat(&y), &z)?;
    println!("\nm(yz|x) = {whole}, m(y|x) m(z|xy) = {parts}");

    // A zero-mass history falls back to the uniform conditional.
    let det = Semimeasure::parse("det:(0)")?;
    let next: Vec<String> = next_distribution(&det, &FinStr::bin("1"))?.iter().map(|v| v.to_string()).collect();
    println!("det:(0) next after 1: {next:?}");
    Ok(())
}
