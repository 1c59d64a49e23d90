//! Protocol parameters and the completeness/soundness gap bookkeeping.

use serde::{Deserialize, Serialize};

use crate::certificates::chsh_quantum_value;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub n: usize,
    pub lambda: usize,
    /// Probability of the teleport subtest.
    pub kappa: f64,
    pub kappa_overridden: bool,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
}

/// `min(½, (β-α)²/64)`.
pub fn default_kappa(alpha: f64, beta: f64) -> f64 {
    (0.5f64).min((beta - alpha).powi(2) / 64.0)
}

fn check_thresholds(alpha: f64, beta: f64) -> Result<()> {
    for v in [alpha, beta] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!("threshold {v} outside [-1, 1]")));
        }
    }
    if beta <= alpha {
        return Err(Error::InvalidArgument(format!("need β > α, got α = {alpha}, β = {beta}")));
    }
    Ok(())
}

impl ProtocolConfig {
    pub fn new(n: usize, alpha: f64, beta: f64, kappa: Option<f64>, seed: u64) -> Result<Self> {
        check_thresholds(alpha, beta)?;
        let k = kappa.unwrap_or_else(|| default_kappa(alpha, beta));
        if !(k > 0.0 && k <= 1.0) {
            return Err(Error::InvalidArgument(format!("κ = {k} outside (0, 1]")));
        }
        Ok(Self { n, lambda: n, kappa: k, kappa_overridden: kappa.is_some(), alpha, beta, seed })
    }

    /// `(CHSH, commutation, teleport)` subtest probabilities.
    pub fn subtest_weights(&self) -> [f64; 3] {
        let side = 0.5 * (1.0 - self.kappa);
        [side, side, self.kappa]
    }
}

/// Rigidity constant `½(128 + 96√2)`: `δ_phase(ε) = C ε` without crypto slack.
pub fn phase_constant() -> f64 {
    0.5 * (128.0 + 96.0 * 2f64.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThmMainParameters {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub nu: f64,
    pub gap: f64,
    /// `κ / (2(1-κ))`, the subtest shortfall forced on a prover that beats
    /// the soundness threshold.
    pub epsilon: f64,
    /// `sqrt(δ_phase(ε))` with no crypto slack.
    pub delta_teleport: f64,
    /// `4 δ_teleport`, which must be below `4ν/κ = (β-α)/2`.
    pub chain_lhs: f64,
    pub chain_rhs: f64,
    pub chain_closes: bool,
    /// Largest `κ` for which the chain closes.
    pub kappa_closing_max: f64,
}

pub fn thm_main_parameters(alpha: f64, beta: f64, kappa: Option<f64>) -> Result<ThmMainParameters> {
    check_thresholds(alpha, beta)?;
    let kappa = kappa.unwrap_or_else(|| default_kappa(alpha, beta));
    let d = beta - alpha;
    let nu = kappa * d / 8.0;
    let epsilon = if kappa < 1.0 { kappa / (2.0 * (1.0 - kappa)) } else { f64::INFINITY };
    let delta_teleport = (phase_constant() * epsilon).sqrt();
    let chain_lhs = 4.0 * delta_teleport;
    let chain_rhs = d / 2.0;
    let eps_max = d * d / (64.0 * phase_constant());
    Ok(ThmMainParameters {
        alpha,
        beta,
        kappa,
        nu,
        gap: nu,
        epsilon,
        delta_teleport,
        chain_lhs,
        chain_rhs,
        chain_closes: chain_lhs < chain_rhs,
        kappa_closing_max: 2.0 * eps_max / (1.0 + 2.0 * eps_max),
    })
}

/// `½(1-κ)(p_CHSH + 1) + κ(¾ - ¼E)`: acceptance of the honest prover with
/// witness energy `E` as obtained by simulating the protocol.
pub fn completeness_simulated(kappa: f64, p_chsh: f64, energy: f64) -> f64 {
    0.5 * (1.0 - kappa) * (p_chsh + 1.0) + kappa * (0.75 - 0.25 * energy)
}

/// `½(1-κ)(1 + ω*) + κ(1 - ¼α)`, the lower bound as stated for the
/// protocol. It disagrees with [`completeness_simulated`] in the teleport
/// term and is reported alongside it.
pub fn completeness_stated(kappa: f64, alpha: f64) -> f64 {
    0.5 * (1.0 - kappa) * (1.0 + chsh_quantum_value()) + kappa * (1.0 - 0.25 * alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_rule_for_tenth_gap() {
        let p = thm_main_parameters(-0.5, -0.4, None).unwrap();
        assert!((p.kappa - 1.5625e-4).abs() < 1e-15);
        assert!((p.gap - 1.5625e-4 * 0.1 / 8.0).abs() < 1e-15);
        assert_eq!(p.nu, p.gap);
    }

    #[test]
    fn equal_thresholds_rejected() {
        assert!(thm_main_parameters(0.2, 0.2, None).is_err());
    }

    #[test]
    fn closing_kappa_is_the_boundary() {
        let p = thm_main_parameters(-1.0, 1.0, None).unwrap();
        let at = thm_main_parameters(-1.0, 1.0, Some(p.kappa_closing_max)).unwrap();
        assert!((at.chain_lhs - at.chain_rhs).abs() < 1e-12);
        let below = thm_main_parameters(-1.0, 1.0, Some(0.99 * p.kappa_closing_max)).unwrap();
        assert!(below.chain_closes);
    }
}
