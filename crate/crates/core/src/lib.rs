//! Entanglement measures and Mermin-inequality analysis for three-qubit pure
//! states.
//!
//! The crate computes bipartite concurrences, concurrences of assistance, the
//! three-tangle and the σ measure of a state, evaluates and maximizes the
//! Mermin operator over measurement directions, and reproduces the violation
//! thresholds of several state families. Batch experiments (scans, random-state
//! searches) run data-parallel when the `parallel` feature is enabled.

// `!(x < tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiments;
pub mod measures;
pub mod mermin;
pub mod par;
pub mod qmath;
pub mod simplex;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
pub use measures::{pairwise_measures, MeasureReport};
pub use mermin::{optimize_mermin, MerminResult, MerminSettings, OptimizationConfig};
pub use par::Execution;
pub use states::{family_state, FamilySpec, PureState3, SamplingMode, SchmidtParams, StateSpec};
