//! Unitary subgroup orders of modular group algebras of finite 2-groups.
//!
//! This crate constructs finite 2-groups whose derived subgroup has order at
//! most 2 (central and direct products of D8, Q8, the modular groups
//! M2(u,v), the almost-extraspecial groups M2(n,m,1) and cyclic 2-groups),
//! builds their group algebras over GF(2^k), and computes the order of the
//! unitary subgroup V_*(FG) of normalized units fixed by the canonical
//! involution. Three independent pipelines are provided: exhaustive
//! enumeration, a quotient recursion driven by the theta invariant of the
//! S-subgroup, and closed-form evaluation, so each result can be
//! cross-validated against the others.

pub mod algebra;
pub mod formulas;
pub mod gf2k;
pub mod group;
pub mod order;
pub mod report;
pub mod unitary;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (field degree out of range, bad CLI value, ...).
    #[error("config error: {0}")]
    Config(String),
    /// Mathematically invalid input (zero inverse, non-power-of-two order, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Structurally valid input outside the supported class (|G'| > 2, ...).
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An enumeration would exceed the evaluation budget.
    #[error("capacity exceeded: requires 2^{required_log2} work units, budget {given}")]
    Capacity { required_log2: u32, given: u128 },
    /// A group specification violates a constructor constraint.
    #[error("spec error: {0}")]
    Spec(String),
    /// A specification string failed to parse.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    /// No closed-form lemma rule applies to the given group shape.
    #[error("no lemma rule applies: {0}")]
    NoRule(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
