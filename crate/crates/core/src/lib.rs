//! Simulation of hash-based quantum algorithms for string matching and
//! lexicographic string comparison.
//!
//! The crate is organised bottom-up:
//!
//! * [`strings`] holds binary strings and the exact classical reference
//!   algorithms every quantum result is checked against.
//! * [`fingerprint`] implements the rolling hash, prime universes sized by
//!   an error budget, prefix hashes and the classical LCP comparator.
//! * [`sim`] provides two interchangeable state backends: an exact dense
//!   statevector and a structured backend that stores amplitudes over an
//!   index register only, with data registers bound as functions of the
//!   index.
//! * [`grover`] contains the search primitives: fixed-iteration Grover,
//!   the doubling schedule for unknown target counts, the majority-vote
//!   wrapper for bounded-error oracles and Dürr-Høyer minimum finding.
//! * [`qmatch`] and [`qcompare`] are the string algorithms themselves.
//! * [`resources`] is the qubit / gate-unit ledger and the sweep harness.
//! * [`crosscheck`] runs the dense-vs-structured equivalence battery.

pub mod crosscheck;
pub mod error;
pub mod fingerprint;
pub mod grover;
pub mod math;
pub mod montecarlo;
pub mod qcompare;
pub mod qmatch;
pub mod resources;
pub mod sim;
pub mod strings;

pub use error::{Error, Result};
pub use fingerprint::{HashParams, HashValue};
pub use resources::ResourceLedger;
pub use sim::Backend;
pub use strings::{BitString, MatchInstance};
