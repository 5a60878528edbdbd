//! Seeded instance generation and exact verification of the gcd, unit
//! equation and d-th power statements implemented in `ffgcd-core`.

pub mod error;
pub mod gen;
pub mod report;
pub mod spec;
pub mod suite;
pub mod verdict;
pub mod verify;

pub use error::{HResult, HarnessError};
pub use verdict::{Branch, Outcome, Summary, Verdict};
pub use report::Report;
pub use spec::InstanceSpec;
pub use suite::{run_suite, Instance, SUITES};
