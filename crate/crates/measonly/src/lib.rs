//! Measurement-only stabilizer dynamics on qubit rings.
//!
//! The crate simulates chains of qubits evolving purely under random
//! multi-site Pauli measurements and provides the analysis stack that goes
//! with that: entanglement observables computed from GF(2) ranks, the
//! ensemble non-commutativity index (the probability that two independent
//! draws anticommute) with exact and closed-form evaluators, frustration
//! graphs over ensemble supports, phase-boundary laws, and finite-size
//! scaling collapse.
//!
//! Entry points:
//! - [`stabilizer::StabilizerState`] — sign-free tableau with measurement
//!   updates and rank-based entropies,
//! - [`ensemble::EnsembleSpec`] — measurement-operator distributions,
//! - [`index`] — the non-commutativity index,
//! - [`dynamics`] — trajectory runs, ensemble averages, and parameter sweeps,
//! - [`scaling`] — boundary laws, crossings, and collapse fits,
//! - [`dense`] — a brute-force state-vector oracle for cross-checks,
//! - [`cli`] — the `measonly` command-line front end.
//!
//! Runnable demonstrations of each capability live in `examples/`.

pub mod cli;
pub mod dense;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod index;
pub mod optimize;
pub mod pauli;
pub mod scaling;
pub mod stabilizer;

pub use error::{Error, ErrorCategory, Result};
pub use pauli::{Pauli, PauliString};
pub use stabilizer::{MeasureOutcome, Region, StabilizerState};
