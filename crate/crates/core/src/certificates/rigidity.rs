//! Residuals measuring how far Bob's observables are from anticommuting
//! (CHSH) or commuting (commutation game) on the post-measurement states.

use super::ChshView;
use crate::bits::Bits;
use crate::compiler::CompiledProverStrategy;
use crate::error::{Error, Result};
use crate::quantum::ComplexMatrix;

/// `Σ_α ‖{B0, B1} ψ^0_α‖²`, on the branches of first question `x = 0`.
pub fn anticommutator_residual(view: &ChshView) -> Result<f64> {
    view.sum_norm_sq(0, &view.b0.anticommutator(&view.b1))
}

/// `96√2 ε + 12 δ` for CHSH success `ω* - ε` and crypto slack `δ`.
pub fn anticommutator_bound(epsilon: f64, slack: f64) -> f64 {
    96.0 * 2f64.sqrt() * epsilon + 12.0 * slack
}

/// `Σ_α ‖[B0, B1] ψ_α‖²` on the branches of the commutation game's single
/// first-round class.
pub fn commutator_residual(view: &ChshView) -> Result<f64> {
    view.sum_norm_sq(0, &view.b0.commutator(&view.b1))
}

/// `128 ε` for commutation-game success `1 - ε`.
pub fn commutator_bound(epsilon: f64) -> f64 {
    128.0 * epsilon
}

/// `|E_{x~D1} Σ_α <ψ^x_α|M|ψ^x_α> - E_{x~D2} Σ_α <ψ^x_α|M|ψ^x_α>|` for
/// `0 ≤ M ≤ I`: how well the post-measurement state distinguishes the two
/// plaintext distributions through `M`.
pub fn distinguisher_advantage(
    prover: &CompiledProverStrategy,
    d1: &[(Bits, f64)],
    d2: &[(Bits, f64)],
    m: &ComplexMatrix,
) -> Result<f64> {
    let eig = m.hermitian_eigen()?;
    let (lo, hi) = (eig.values[0], *eig.values.last().expect("non-empty"));
    if lo < -1e-9 || hi > 1.0 + 1e-9 {
        return Err(Error::InvalidOperator(format!(
            "distinguisher spectrum [{lo}, {hi}] is not inside [0, 1]"
        )));
    }
    let mean = |d: &[(Bits, f64)]| -> Result<f64> {
        let total: f64 = d.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::DegenerateDistribution(format!("weights sum to {total}")));
        }
        let mut acc = 0.0;
        for (x, p) in d {
            if *p == 0.0 {
                continue;
            }
            for b in prover.branches(x)? {
                acc += p * b.state.expectation(m)?.re;
            }
        }
        Ok(acc)
    };
    Ok((mean(d1)? - mean(d2)?).abs())
}
