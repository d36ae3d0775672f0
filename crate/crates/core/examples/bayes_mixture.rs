//! Bayes mixture over a small class: dominance, predictive and posterior trace.

use std::sync::Arc;

use unipred::catalog;
use unipred::measures::FinStr;
use unipred::mixture::{dominance_check, posterior_bound, posterior_trace, write_trace_csv};

fn main() -> unipred::Result<()> {
    let named = catalog::class("bernoulli-grid")?;
    let class = Arc::clone(&named.class);

    for i in 0..class.len() {
        let d = dominance_check(&class, i, 10)?;
        println!("{:<8} w = {:<4} strings {:>5} violations {} min slack {} at {:?}",
            class.model(i)?.canonical(), class.weight(i)?.to_string(),
            d.strings_checked, d.violations, d.min_slack, d.argmin.to_string());
    }

    let seq = FinStr::bin("1101110111");
    let rows = posterior_trace(Arc::clone(&class), &seq)?;
    println!("\nposterior trace along {seq}:");
    write_trace_csv(&rows, class.len(), seq.alphabet(), std::io::stdout())?;

    let pb = posterior_bound(&class, 3, &seq)?;
    println!("\nln 1/w(ber:3/5 | {seq}) = {:.6}", pb.ln_inverse);
    Ok(())
}
