//! Sequences built to defeat a predictor, and the one-switch deficiency family.

use unipred::bounds::{lemma1_adversarial, lemma1_certificates, lemma2_instance};
use unipred::catalog;
use unipred::measures::Semimeasure;
use unipred::rational::q;

fn main() -> unipred::Result<()> {
    for mu in [Semimeasure::bernoulli(q(1, 3))?, Semimeasure::parse("markov:1:1/2,1/2;3/4,1/4;1/4,3/4")?] {
        let adv = lemma1_adversarial(&mu, 16)?;
        println!("{:<36} alpha = {}", mu.canonical(), adv.alpha);
        for c in adv.certificates.iter().take(3) {
            println!("  l={} dropped b={} with mu(b|.) = {} exceeds: {}", c.l, c.b, c.mu_b, c.exceeds);
        }
    }

    let pair = catalog::class("bernoulli-pair")?;
    let mu = Semimeasure::bernoulli(q(1, 3))?;
    let adv = lemma1_adversarial(&mu, 12)?;
    let certs = lemma1_certificates(&adv, &mu, pair.class.as_ref())?;
    println!("\n{} certificate checks against the pair mixture, all hold: {}", certs.len(),
        certs.iter().all(|r| r.exact_holds != Some(false)));

    println!("\none-switch family against the pair mixture:");
    for l in [1, 2, 4, 6, 8] {
        let inst = lemma2_instance(l, pair.class.as_ref())?;
        println!("  l={l:<2} x={:<9} deficiency {:>8.4} one-step {:.4}", inst.x.to_string(), inst.deficiency.value, inst.one_step);
    }
    Ok(())
}
