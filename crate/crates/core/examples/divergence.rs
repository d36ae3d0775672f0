//! Cumulative expected distances between a true measure and a mixture, exactly and by sampling.

use unipred::catalog;
use unipred::losses::{cumulative_divergence, monte_carlo_divergence, DistanceKind};
use unipred::measures::FinStr;

fn main() -> unipred::Result<()> {
    let named = catalog::class("bernoulli-pair")?;
    let mu = named.class.model(0)?;
    let h = FinStr::bin("01");
    let kinds = DistanceKind::all(2);

    let led = cumulative_divergence(mu, named.class.as_ref(), &h, 10, &kinds)?;
    println!("mu = {}, rho = mixture, history {h}", led.mu);
    print!("{:>3} {:>12}", "n", "rhs");
    for k in &led.kinds {
        print!(" {:>14}", k.kind);
    }
    println!();
    for n in led.l..=led.n {
        print!("{n:>3} {:>12.6}", led.rhs_at(n));
        for k in 0..led.kinds.len() {
            print!(" {:>14.6}", led.lhs_at(k, n));
        }
        println!();
    }
    println!("chain holds: {}, nondecreasing: {}", led.chain_holds, led.nondecreasing);

    let mc = monte_carlo_divergence(mu, named.class.as_ref(), &h, 40, &kinds, 20_000, 7)?;
    println!("\nMonte Carlo to n = 40 ({} samples):", mc.samples);
    for (name, e) in &mc.lhs {
        println!("  {name:<16} {:.5} +- {:.5}", e.mean, e.stderr);
    }
    println!("  {:<16} {:.5} +- {:.5}", "rhs", mc.rhs.mean, mc.rhs.stderr);
    Ok(())
}
