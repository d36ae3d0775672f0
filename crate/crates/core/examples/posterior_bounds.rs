//! Posterior-weight bounds: exact expected loss and its sampled counterpart.

use unipred::bounds::{expected_posterior_loss, posterior_bound_trace};
use unipred::catalog;

fn main() -> unipred::Result<()> {
    let named = catalog::class("markov-mix")?;
    for i in 0..named.class.len() {
        let (mc, skipped) = posterior_bound_trace(&named.class, i, 8, 4000, 11)?;
        println!("mu = {}", named.class.model(i)?.canonical());
        for l in [0, 2, 4, 6] {
            let exact = expected_posterior_loss(&named.class, i, l)?;
            println!("  l={l}  E ln 1/w = {exact:.6}   sampled {:.6} +- {:.6}", mc[l].mean, mc[l].stderr);
        }
        if skipped > 0 {
            println!("  {skipped} paths with zero weight skipped");
        }
    }
    Ok(())
}
