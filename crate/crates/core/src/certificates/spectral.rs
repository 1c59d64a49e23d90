//! Exact spectral measurement, used as an oracle for phase-estimation style
//! measurements of Hermitian operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{is_density_matrix, ComplexMatrix};

/// Eigenvalues closer than this are reported as one outcome.
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralOutcome {
    pub value: f64,
    pub probability: f64,
}

/// Distribution of the outcome of measuring a Hermitian operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDistribution {
    pub outcomes: Vec<SpectralOutcome>,
    /// Nominal precision of the simulated estimate; the exact oracle
    /// reports eigenvalues, so this is bookkeeping only.
    pub precision: f64,
}

impl SpectralDistribution {
    pub fn mean(&self) -> f64 {
        self.outcomes.iter().map(|o| o.value * o.probability).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.outcomes.iter().map(|o| o.value * o.value * o.probability).sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

pub(crate) fn is_hermitian_input(b: &ComplexMatrix) -> Result<()> {
    if !b.is_hermitian(1e-9 * b.max_abs().max(1.0)) {
        return Err(Error::InvalidOperator("operator is not Hermitian".into()));
    }
    Ok(())
}

/// Outcome distribution of measuring `b` on `rho` via its eigen-decomposition.
pub fn spectral_measure(b: &ComplexMatrix, rho: &ComplexMatrix, precision: f64) -> Result<SpectralDistribution> {
    is_hermitian_input(b)?;
    if b.rows() != rho.rows() {
        return Err(Error::DimensionMismatch { expected: b.rows(), found: rho.rows() });
    }
    if !is_density_matrix(rho, 1e-9) {
        return Err(Error::InvalidState("spectral measurement needs a density matrix".into()));
    }
    if !(precision > 0.0) {
        return Err(Error::InvalidArgument(format!("precision must be positive, got {precision}")));
    }
    let eig = b.hermitian_eigen()?;
    let dim = b.rows();
    let mut outcomes: Vec<SpectralOutcome> = Vec::new();
    for (k, &value) in eig.values.iter().enumerate() {
        // <v_k| ρ |v_k>
        let mut p = 0.0;
        for i in 0..dim {
            let vi = eig.vectors.get(i, k).conj();
            for j in 0..dim {
                p += (vi * rho.get(i, j) * eig.vectors.get(j, k)).re;
            }
        }
        match outcomes.last_mut() {
            Some(last) if (value - last.value).abs() <= DEGENERACY_TOL => last.probability += p,
            _ => outcomes.push(SpectralOutcome { value, probability: p }),
        }
    }
    Ok(SpectralDistribution { outcomes, precision })
}
