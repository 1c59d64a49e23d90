//! Diagnostics reports with pass/fail checks, serialisable to JSON and CSV.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::gamma::{gamma_slack_signed, q1, q2, win_decomposition_residual};
use super::macroscopic::MacroscopicDiagnostics;
use super::rigidity::{anticommutator_bound, commutator_bound};
use super::{
    anticommutator_residual, chsh_quantum_value, commutator_residual, gamma_matrix, macroscopic_diagnostics,
    mu_expectation, win_probability_from_gamma, ChshView, GammaMatrix,
};
use crate::compiler::{CompiledProtocol, CompiledProverStrategy, DEFAULT_LAMBDA};
use crate::error::{Error, Result};
use crate::games::NonlocalGame;
use crate::qhe::IdealQhe;

/// Tolerance for identities that hold exactly up to rounding.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
    /// False when the check's hypothesis does not hold; such checks pass.
    pub applicable: bool,
}

impl Check {
    /// Passes when `value ≤ bound`.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, passed: value <= bound, applicable: true }
    }

    pub fn not_applicable(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, passed: true, applicable: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    Chsh,
    Commutation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshCertificate {
    pub gamma: GammaMatrix,
    pub gamma_min_eigenvalue: f64,
    /// `[q_1†Γq_1, q_2†Γq_2]`.
    pub q_forms: [f64; 2],
    /// `[E_{μ_1}(a-b)², E_{μ_2}(a-b)²]`.
    pub mu: [f64; 2],
    /// Signed gaps `q_j†Γq_j - E_{μ_j}(a-b)²`.
    pub slack: [f64; 2],
    pub macroscopic: MacroscopicDiagnostics,
    pub anticommutator_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationCertificate {
    pub commutator_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub prover: String,
    pub game: GameKind,
    pub win_probability: f64,
    /// Shortfall from the game's optimal quantum value; negative for
    /// provers that exceed it.
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chsh: Option<ChshCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commutation: Option<CommutationCertificate>,
    pub checks: Vec<Check>,
}

impl CertificateReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per check.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("prover,check,value,bound,applicable,passed\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{:.12e},{:.12e},{},{}\n",
                self.prover, c.name, c.value, c.bound, c.applicable, c.passed
            ));
        }
        out
    }
}

fn exact_value(game: NonlocalGame, prover: &CompiledProverStrategy) -> Result<f64> {
    let protocol = CompiledProtocol::compile(game, Arc::new(IdealQhe::new(DEFAULT_LAMBDA)?))?;
    protocol.compiled_value_exact(prover)
}

/// Computes all certificates for a prover of the given game.
pub fn certify(prover: &CompiledProverStrategy, game: GameKind) -> Result<CertificateReport> {
    match game {
        GameKind::Chsh => certify_chsh(prover),
        GameKind::Commutation => certify_commutation(prover),
    }
}

fn certify_chsh(prover: &CompiledProverStrategy) -> Result<CertificateReport> {
    let view = ChshView::new(prover)?;
    let p = exact_value(NonlocalGame::chsh(), prover)?;
    let epsilon = chsh_quantum_value() - p;
    let gamma = gamma_matrix(&view)?;
    let q_forms = [gamma.quadratic_form(&q1()).re, gamma.quadratic_form(&q2()).re];
    let mu = [mu_expectation(&view, 1)?, mu_expectation(&view, 2)?];
    let slack = [gamma_slack_signed(&view, 1)?, gamma_slack_signed(&view, 2)?];
    let macroscopic = macroscopic_diagnostics(&view)?;
    let anticom = anticommutator_residual(&view)?;

    let mut checks = vec![
        Check::at_most("gamma_diagonal", gamma.max_diagonal_defect(), 1e-10),
        Check::at_most("gamma_win_probability", (win_probability_from_gamma(&gamma) - p).abs(), IDENTITY_TOL),
        Check::at_most("win_decomposition", win_decomposition_residual(&gamma), IDENTITY_TOL),
    ];
    for j in 0..2 {
        let name = format!("claim_q{}", j + 1);
        checks.push(Check::at_most(&name, (q_forms[j] - mu[j] - slack[j]).abs(), IDENTITY_TOL));
        checks.push(Check::at_most(
            &format!("{name}_within_slack"),
            (q_forms[j] - mu[j]).abs(),
            slack[j].abs() + IDENTITY_TOL,
        ));
    }
    checks.push(Check::at_most("tight_chsh_0", macroscopic.cauchy_schwarz_violation, IDENTITY_TOL));
    checks.push(Check::at_most("tight_chsh_1", macroscopic.sum_rule_defect, IDENTITY_TOL));
    let excess_bound = 16.0 * macroscopic.excess;
    let excess_margin = excess_bound - macroscopic.signalling_gap.min(macroscopic.cross_sum_excess);
    if macroscopic.excess > 0.0 {
        checks.push(Check::at_most("tight_chsh_2", excess_margin, IDENTITY_TOL));
    } else {
        checks.push(Check::not_applicable("tight_chsh_2", excess_margin, IDENTITY_TOL));
    }
    let crypto_slack = slack[0].abs() + slack[1].abs();
    let bound = anticommutator_bound(epsilon.max(0.0), crypto_slack);
    if epsilon >= -IDENTITY_TOL {
        checks.push(Check::at_most("anticommutator", anticom, bound + 1e-8));
    } else {
        checks.push(Check::not_applicable("anticommutator", anticom, bound));
    }

    Ok(CertificateReport {
        prover: prover.id.clone(),
        game: GameKind::Chsh,
        win_probability: p,
        epsilon,
        chsh: Some(ChshCertificate {
            gamma_min_eigenvalue: gamma.min_eigenvalue()?,
            gamma,
            q_forms,
            mu,
            slack,
            macroscopic,
            anticommutator_residual: anticom,
        }),
        commutation: None,
        checks,
    })
}

fn certify_commutation(prover: &CompiledProverStrategy) -> Result<CertificateReport> {
    let view = ChshView::with_input_bits(prover, 0)?;
    let p = exact_value(NonlocalGame::commutation(), prover)?;
    let epsilon = 1.0 - p;
    let residual = commutator_residual(&view)?;
    if epsilon < -IDENTITY_TOL {
        return Err(Error::InvalidArgument(format!("commutation value {p} exceeds 1")));
    }
    let checks = vec![Check::at_most("commutator", residual, commutator_bound(epsilon.max(0.0)) + 1e-8)];
    Ok(CertificateReport {
        prover: prover.id.clone(),
        game: GameKind::Commutation,
        win_probability: p,
        epsilon,
        chsh: None,
        commutation: Some(CommutationCertificate { commutator_residual: residual }),
        checks,
    })
}
