//! Macroscopic locality diagnostics for compiled CHSH provers.
//!
//! `Δ_x(B0 ± B1) = Σ_α <ψ^x_α|(B0 ± B1)²|ψ^x_α>` and the correlators
//! `<A_x, B0 ± B1> = Σ_α (-1)^{Dec α} <ψ^x_α|B0 ± B1|ψ^x_α>`.

use serde::{Deserialize, Serialize};

use super::{chsh_quantum_value, ChshView};
use crate::error::Result;

/// Values indexed `[x][s]` with `s = 0` for `B0 + B1` and `s = 1` for `B0 - B1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacroscopicDiagnostics {
    pub delta: [[f64; 2]; 2],
    pub correlator: [[f64; 2]; 2],
    pub win_probability: f64,
    /// `Pr[win] - ω*`; positive only for provers that beat the quantum bound.
    pub excess: f64,
    /// Largest `|<A_x, X>|² - Δ_x(X)` over the four combinations.
    pub cauchy_schwarz_violation: f64,
    /// Largest `|Δ_x(B0+B1) + Δ_x(B0-B1) - 4|`.
    pub sum_rule_defect: f64,
    /// `Δ_0(B0+B1) + Δ_1(B0-B1) - 4`.
    pub cross_sum_excess: f64,
    /// `Δ_0(B0+B1) - Δ_1(B0+B1)`.
    pub signalling_gap: f64,
}

impl MacroscopicDiagnostics {
    /// `|<A_x, X>|² ≤ Δ_x(X)` for all four combinations.
    pub fn cauchy_schwarz_holds(&self, tol: f64) -> bool {
        self.cauchy_schwarz_violation <= tol
    }

    /// `Δ_x(B0+B1) + Δ_x(B0-B1) = 4` for both `x`.
    pub fn sum_rule_holds(&self, tol: f64) -> bool {
        self.sum_rule_defect <= tol
    }

    /// When `excess = ε > 0`: `Δ_0(+) + Δ_1(-) ≥ 4 + 16ε` and
    /// `Δ_0(+) - Δ_1(+) ≥ 16ε`. Vacuous otherwise.
    pub fn excess_bounds_hold(&self, tol: f64) -> bool {
        if self.excess <= 0.0 {
            return true;
        }
        let need = 16.0 * self.excess;
        self.cross_sum_excess >= need - tol && self.signalling_gap >= need - tol
    }
}

pub fn macroscopic_diagnostics(view: &ChshView) -> Result<MacroscopicDiagnostics> {
    let mut delta = [[0.0; 2]; 2];
    let mut correlator = [[0.0; 2]; 2];
    let mut cs = f64::NEG_INFINITY;
    for x in 0..2 {
        for (s, sign) in [1.0, -1.0].into_iter().enumerate() {
            let m = view.b_combination(sign);
            delta[x][s] = view.sum_expectation(x, &(&m * &m))?;
            correlator[x][s] = view.signed_expectation(x, &m)?;
            cs = cs.max(correlator[x][s].powi(2) - delta[x][s]);
        }
    }
    let win_probability = 0.5 + (correlator[0][0] + correlator[1][1]) / 8.0;
    let sum_rule_defect = (0..2).map(|x| (delta[x][0] + delta[x][1] - 4.0).abs()).fold(0.0, f64::max);
    Ok(MacroscopicDiagnostics {
        delta,
        correlator,
        win_probability,
        excess: win_probability - chsh_quantum_value(),
        cauchy_schwarz_violation: cs,
        sum_rule_defect,
        cross_sum_excess: delta[0][0] + delta[1][1] - 4.0,
        signalling_gap: delta[0][0] - delta[1][0],
    })
}
