//! End-to-end run of the protocol on an honest prover.

use serde::{Deserialize, Serialize};
use std::str::FromStr;

use super::hamiltonian::XxzzHamiltonian;
use super::params::{thm_main_parameters, ProtocolConfig, ThmMainParameters};
use super::protocol::{honest_completeness, monte_carlo, CompletenessReport, ProtocolMonteCarlo};
use super::prover::{honest_verifier_prover, Witness};
use super::questions::{AliceQuestion, QuestionDistributions};
use super::soundness::{soundness_report, teleport_estimates, SoundnessReport, TeleportEstimates};
use crate::certificates::Check;
use crate::error::{Error, Result};
use crate::quantum::{ComplexMatrix, StateVector};

/// How the honest prover's witness is chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSpec {
    Ground,
    MaximallyMixed,
    Basis(usize),
}

impl FromStr for WitnessSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ground" => Ok(Self::Ground),
            "maximally-mixed" | "mixed" => Ok(Self::MaximallyMixed),
            _ => {
                let bits = s
                    .strip_prefix("basis:")
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown witness '{s}'")))?;
                let k = usize::from_str_radix(bits, 2)
                    .map_err(|_| Error::InvalidArgument(format!("witness basis '{bits}' is not a bit string")))?;
                Ok(Self::Basis(k))
            }
        }
    }
}

impl WitnessSpec {
    pub fn build(&self, h: &XxzzHamiltonian) -> Result<Witness> {
        Ok(match self {
            Self::Ground => Witness::Pure(h.ground_state()?.1),
            Self::MaximallyMixed => {
                let d = 1usize << h.n;
                Witness::Mixed(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
            }
            Self::Basis(k) => Witness::Pure(StateVector::basis(h.n, *k)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub hamiltonian: XxzzHamiltonian,
    pub witness: WitnessSpec,
    pub theorem: ThmMainParameters,
    pub completeness: CompletenessReport,
    pub monte_carlo: ProtocolMonteCarlo,
    pub estimates: TeleportEstimates,
    /// Absent when the Hamiltonian has no `X` terms: the CHSH and
    /// commutation subtests are then undefined.
    pub soundness: Option<SoundnessReport>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.soundness.as_ref().is_none_or(|r| r.all_passed())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn mean_check(name: &str, mean: Option<f64>, count: u64, exact: f64) -> Check {
    match mean {
        Some(m) => {
            let sigma = ((1.0 - exact * exact).max(0.0) / count as f64).sqrt();
            Check::at_most(name, (m - exact).abs(), 4.0 * sigma + 1e-12)
        }
        None => Check::not_applicable(name, 0.0, 0.0),
    }
}

/// Exact completeness, a seeded Monte Carlo run and the honest prover's
/// soundness diagnostics.
pub fn verify_honest(
    h: &XxzzHamiltonian,
    witness_spec: &WitnessSpec,
    config: &ProtocolConfig,
    trials: u64,
) -> Result<VerificationReport> {
    if config.n != h.n {
        return Err(Error::DimensionMismatch { expected: h.n, found: config.n });
    }
    let kappa = if config.kappa_overridden { Some(config.kappa) } else { None };
    let theorem = thm_main_parameters(config.alpha, config.beta, kappa)?;
    let witness = witness_spec.build(h)?;
    let completeness = honest_completeness(h, &witness, config)?;
    let prover = honest_verifier_prover(&witness)?;
    let mc = monte_carlo(&prover, h, config, trials)?;
    let dists = QuestionDistributions::build(h)?;
    let estimates = teleport_estimates(&prover, h, &dists, &prover.branches(&AliceQuestion::Teleport)?)?;
    let soundness = if dists.d_x.is_empty() { None } else { Some(soundness_report(&prover, h, config)?) };

    let checks = vec![
        Check::at_most(
            "completeness_formula",
            (completeness.values.total - completeness.simulated_formula).abs(),
            1e-6,
        ),
        Check::at_most(
            "extracted_energy",
            (estimates.extracted.energy - completeness.witness_energy).abs(),
            1e-7,
        ),
        Check::at_most(
            "monte_carlo_3sigma",
            (mc.overall.mean - mc.overall.exact).abs(),
            3.0 * mc.overall.std_error + 1e-12,
        ),
        mean_check("monte_carlo_energy_x", mc.teleport_x_mean, mc.teleport_x_checks, estimates.energy_x),
        mean_check("monte_carlo_energy_z", mc.teleport_z_mean, mc.teleport_z_checks, estimates.energy_z),
    ];
    Ok(VerificationReport {
        hamiltonian: h.clone(),
        witness: witness_spec.clone(),
        theorem,
        completeness,
        monte_carlo: mc,
        estimates,
        soundness,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_spec_parsing() {
        assert_eq!("ground".parse::<WitnessSpec>().unwrap(), WitnessSpec::Ground);
        assert_eq!("basis:01".parse::<WitnessSpec>().unwrap(), WitnessSpec::Basis(1));
        assert!("basis:2".parse::<WitnessSpec>().is_err());
        assert!("nope".parse::<WitnessSpec>().is_err());
    }
}
