//! Radon versions of cylindrical Lévy processes on truncated sequence-space models.
//!
//! A cylindrical process `X_t(φ) = Σ_j φ_j β_j(t)` is driven by independent
//! real Lévy processes. Composing with a Hilbert–Schmidt operator `S` and
//! expanding against a `q`-orthonormal system gives the vector-valued path
//! `Y_t = Σ_j X_t(S φ_j) f_j` whose pairings reproduce `X_t(S φ)`. The
//! [`verify`] module checks the resulting statistical properties by Monte Carlo.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod space;
pub mod operators;
pub mod cylindrical;
pub mod stats;
pub mod regularize;
pub mod verify;
pub mod cli;

pub use error::{Error, Result};
