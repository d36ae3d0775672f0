//! Desk-scale universal sequence prediction.
//!
//! Exact Bayes mixtures over finite model classes, enumeration-bounded
//! complexity estimators over an explicit Elias-gamma indexed registry of
//! small machines, and checkers for the classical regret and deficiency
//! bounds at finite horizons.
//!
//! ```
//! use unipred::measures::{Evaluate, FinStr, Semimeasure};
//! use unipred::mixture::WeightedClass;
//! use unipred::rational::q;
//!
//! let class = WeightedClass::uniform(vec![
//!     Semimeasure::bernoulli(q(1, 3)).unwrap(),
//!     Semimeasure::bernoulli(q(2, 3)).unwrap(),
//! ])
//! .unwrap();
//! assert_eq!(class.eval(&FinStr::bin("11")).unwrap(), q(5, 18));
//! ```

pub mod bounds;
pub mod catalog;
pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod losses;
pub mod machines;
pub mod measures;
pub mod mixture;
pub mod rational;
pub mod report;

pub use error::{Error, Result};

/// Environment variable overriding the enumeration budget (number of nodes).
pub const BUDGET_ENV: &str = "UNIPRED_BUDGET";

/// Default cap on exhaustively enumerated nodes.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// Current enumeration budget.
pub fn budget() -> u64 {
    std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

pub(crate) fn ensure_budget(needed: u64) -> Result<()> {
    let limit = budget();
    if needed > limit {
        Err(Error::Budget { needed, limit })
    } else {
        Ok(())
    }
}
