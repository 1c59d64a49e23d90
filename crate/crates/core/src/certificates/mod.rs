//! Operator-level certificates for compiled CHSH and commutation provers.
//!
//! Everything here is computed from a [`CompiledProverStrategy`]'s first-round
//! branches `A^x_α|ψ>` and its second-round observables `B^0, B^1`.

pub mod audit;
pub mod block_encoding;
pub mod gamma;
pub mod macroscopic;
pub mod provers;
pub mod report;
pub mod rigidity;
pub mod spectral;

pub use audit::{block_encoding_audit, BlockEncodingAudit};
pub use block_encoding::{
    commutator_block_encoding, shifted_block_encoding, squared_block_encoding, sum_block_encoding,
    BlockEncoding,
};
pub use gamma::{
    gamma_matrix, gamma_slack, gamma_slack_signed, mu_expectation, pseudo_expectation, q1, q2,
    sos_identity_residual, sos_identity_symbolic_residual, win_decomposition_residual,
    win_probability_from_gamma, GammaMatrix, Generator, Polynomial,
};
pub use macroscopic::{macroscopic_diagnostics, MacroscopicDiagnostics};
pub use report::{certify, CertificateReport, Check, GameKind};
pub use rigidity::{anticommutator_residual, commutator_residual, distinguisher_advantage};
pub use spectral::{spectral_measure, SpectralDistribution};

use crate::bits::Bits;
use crate::compiler::CompiledProverStrategy;
use crate::error::{Error, Result};
use crate::quantum::{BinaryObservable, ComplexMatrix, StateVector};

/// `cos²(π/8)`, the optimal quantum winning probability of CHSH.
pub fn chsh_quantum_value() -> f64 {
    0.5 + 2f64.sqrt() / 4.0
}

/// A first-round branch: decrypted answer sign and sub-normalised state.
#[derive(Clone, Debug)]
pub struct SignedBranch {
    pub sign: f64,
    pub state: StateVector,
}

/// Branches of a prover with one-bit first questions and answers, together
/// with its two second-round observables.
#[derive(Clone, Debug)]
pub struct ChshView {
    /// Indexed by the first question `x`.
    pub branches: [Vec<SignedBranch>; 2],
    pub b0: ComplexMatrix,
    pub b1: ComplexMatrix,
}

impl ChshView {
    pub fn new(prover: &CompiledProverStrategy) -> Result<Self> {
        Self::with_input_bits(prover, 1)
    }

    /// For the commutation game the first question is a dummy with no bits;
    /// both entries of `branches` then hold the same class.
    pub fn with_input_bits(prover: &CompiledProverStrategy, input_bits: usize) -> Result<Self> {
        if prover.second_round.len() != 2 {
            return Err(Error::UnsupportedStrategy("expected two second-round measurements".into()));
        }
        let b0 = BinaryObservable::from_pvm(&prover.second_round[0])?.operator().clone();
        let b1 = BinaryObservable::from_pvm(&prover.second_round[1])?.operator().clone();
        let class = |x: u64| -> Result<Vec<SignedBranch>> {
            let input = if input_bits == 0 { Bits::empty() } else { Bits::new(input_bits, x)? };
            Ok(prover
                .branches(&input)?
                .into_iter()
                .filter(|b| b.probability > 0.0)
                .map(|b| SignedBranch { sign: if b.label.parity() { -1.0 } else { 1.0 }, state: b.state })
                .collect())
        };
        let branches = if input_bits == 0 { [class(0)?, class(0)?] } else { [class(0)?, class(1)?] };
        Ok(Self { branches, b0, b1 })
    }

    /// `Σ_α <ψ^x_α| M |ψ^x_α>`.
    pub fn sum_expectation(&self, x: usize, m: &ComplexMatrix) -> Result<f64> {
        let mut acc = 0.0;
        for b in &self.branches[x] {
            acc += b.state.expectation(m)?.re;
        }
        Ok(acc)
    }

    /// `Σ_α (-1)^{Dec α} <ψ^x_α| M |ψ^x_α>`.
    pub fn signed_expectation(&self, x: usize, m: &ComplexMatrix) -> Result<f64> {
        let mut acc = 0.0;
        for b in &self.branches[x] {
            acc += b.sign * b.state.expectation(m)?.re;
        }
        Ok(acc)
    }

    /// `Σ_α ‖M ψ^x_α‖²`.
    pub fn sum_norm_sq(&self, x: usize, m: &ComplexMatrix) -> Result<f64> {
        let mut acc = 0.0;
        for b in &self.branches[x] {
            acc += b.state.apply(m)?.norm_sqr();
        }
        Ok(acc)
    }

    /// `B^0 + s B^1` for `s = ±1`.
    pub fn b_combination(&self, sign: f64) -> ComplexMatrix {
        &self.b0 + &self.b1.scale_real(sign)
    }

    /// Exact CHSH winning probability `½ + ⅛ Σ (-1)^{xy} <A_x, B_y>`.
    pub fn win_probability(&self) -> Result<f64> {
        let c00 = self.signed_expectation(0, &self.b0)?;
        let c01 = self.signed_expectation(0, &self.b1)?;
        let c10 = self.signed_expectation(1, &self.b0)?;
        let c11 = self.signed_expectation(1, &self.b1)?;
        Ok(0.5 + (c00 + c01 + c10 - c11) / 8.0)
    }
}
