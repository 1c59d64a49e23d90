//! Simulation and certification toolkit for compiled nonlocal games.
//!
//! Two-player games are compiled into single-prover protocols by encrypting
//! the first player's question under an idealised homomorphic scheme. The
//! crate evaluates such protocols exactly, samples transcripts, and computes
//! the operator-level certificates that bound what a prover can achieve.

pub mod bits;
pub mod certificates;
pub mod compiler;
pub mod error;
pub mod games;
pub mod qhe;
pub mod quantum;
pub mod verifier;

pub use bits::Bits;
pub use error::{Error, Result};
