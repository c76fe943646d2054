//! Command-line plumbing for the `sdg` solvers: file formats, JSON reports,
//! deterministic instance generators, automatic algorithm selection and a
//! cross-algorithm benchmark harness.

#![warn(missing_docs)]

pub mod bench;
pub mod formats;
pub mod generators;
pub mod report;
pub mod run;

/// Process exit codes.
pub mod exit {
    /// Success.
    pub const OK: i32 = 0;
    /// Any error: parse failure, unsupported combination, exhausted budget, usage.
    pub const ERROR: i32 = 1;
    /// No Nash stable outcome exists.
    pub const NO_STABLE_OUTCOME: i32 = 2;
    /// Algorithms disagreed during `bench`.
    pub const DISAGREEMENT: i32 = 3;
}
