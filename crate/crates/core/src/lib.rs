//! Finite-time trace-distance witnesses for open quantum systems.
//!
//! The reduced trace distance `D(t)` of two initial states obeys, for any
//! later time `t + t'`,
//! `B − F − D(t) ≤ D(t + t') − D(t) ≤ B + F − D(t)`, where `F` propagates the
//! product of the reduced difference with environment state 1 and `B`
//! measures everything else. The crate evaluates these witnesses for
//! arbitrary dense scenarios, for a pure-dephasing qubit with closed forms,
//! and for a spin coupled to an XX chain.

pub mod blp;
pub mod cli;
pub mod dephasing;
pub mod error;
pub mod qla;
pub mod sampling;
pub mod spinchain;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
