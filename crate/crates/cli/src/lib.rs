//! Counting experiments for systems of integral forms.
//!
//! Companion crate to `formcount-core`: brute-force lattice counts of
//! N(P), p-adic and real local densities, circle-method exponential sums,
//! the JSON system-description format and the report machinery behind the
//! `formcount` binary.

pub mod compiled;
pub mod counting;
pub mod densities;
pub mod doc;
pub mod error;
pub mod expsums;
pub mod harness;
pub mod report;

pub use error::CliError;
