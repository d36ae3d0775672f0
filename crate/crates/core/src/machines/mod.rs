//! Universal prefix, monotone and twice-prefix machines over an explicit registry,
//! with enumeration-bounded complexity estimators and `K*`-correct sets.

pub mod coding;
pub mod correct;
pub mod enumerate;
pub mod monotone;
pub mod registry;
pub mod run;

pub use coding::{gamma, gamma_len, int_code, literal_payload, nat_code, nat_decode, Program};
pub use correct::{CorrectSet, CorrectnessReport, Root};
pub use enumerate::{enum_k, enum_k_cond, enum_kstar, ComplexityRecord, ComplexityTable, Horizon, TableCache, Witness};
pub use monotone::{KmWitness, MachineSemimeasure, MonotoneTable};
pub use registry::{BaseKind, BaseMachine, Entry, MachineRegistry, Manifest, REGISTRY_VERSION};
pub use run::{Limits, Mode, RunOutcome, RunStatus, Stall};
