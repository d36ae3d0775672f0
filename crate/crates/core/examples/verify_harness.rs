//! Run a few verification families and summarise their verdicts.

use unipred::config::{ExperimentConfig, Suite};
use unipred::harness::{exact_violations, Harness};

fn main() -> unipred::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.reports.suite = Suite::All;
    cfg.horizon.depth = 5;
    let h = Harness::from_config(&cfg)?;

    let mut all = Vec::new();
    for f in ["dominance", "kraft", "combiner", "period", "thm2"] {
        let rs = h.family(f)?;
        println!("{f}:");
        for r in rs.iter().take(6) {
            println!("  {:<18} {:<13?} {:<40} lhs {:>10.4} rhs {:>10.4}", r.name, r.verdict, r.case, r.lhs, r.rhs);
        }
        if rs.len() > 6 {
            println!("  ... {} more", rs.len() - 6);
        }
        all.extend(rs);
    }
    println!("\n{} reports, {} violated", all.len(), exact_violations(&all));
    Ok(())
}
