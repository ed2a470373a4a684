//! Finite time-frequency analysis on `Z_N x Z_N`.
//!
//! Localization operators, multi-window Gabor frames over lattices of phase
//! space, and the weighted mixed norms that compare them. Every operator is an
//! exact dense `N x N` matrix, so norm equivalences and duality relations can be
//! checked as matrix identities.

pub mod cli;
pub mod error;
pub mod gabor;
pub mod lattice;
pub mod linalg;
pub mod locop;
pub mod modnorm;
pub mod phase_space;

pub use error::{Result, TfError};
pub use phase_space::{Operator, PhasePoint, Signal, TFMatrix, Window};
