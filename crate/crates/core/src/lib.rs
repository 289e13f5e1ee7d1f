//! Exact state-vector simulation of the Faraday-rotator QKD protocol, its
//! adversary models, and the closed-form security analysis.
//!
//! Register convention: little-endian, amplitude index bit `k` is register
//! qubit `k`, with `|↑⟩` the 0 state. Scenario layouts are documented next
//! to their builders ([`protocol::layout`], [`adversary::pns`], ...).

pub mod adversary;
pub mod analysis;
pub mod error;
pub mod harness;
pub mod protocol;
pub mod qstate;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use qstate::{DensityMatrix, EquatorAngle, Outcome, StateVector};
