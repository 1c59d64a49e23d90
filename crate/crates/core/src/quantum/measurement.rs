//! Projective measurements and binary observables.

use rand::Rng;

use super::matrix::{re, sum_matrices, ComplexMatrix};
use super::state::StateVector;
use crate::error::{Error, Result};

/// A PVM with integer outcome labels.
#[derive(Clone, Debug)]
pub struct ProjectiveMeasurement {
    outcomes: Vec<(u64, ComplexMatrix)>,
}

/// One outcome of a measurement: label, probability and the sub-normalised
/// post-measurement vector `Π|ψ>`.
#[derive(Clone, Debug)]
pub struct Branch {
    pub outcome: u64,
    pub probability: f64,
    pub state: StateVector,
}

impl ProjectiveMeasurement {
    /// Validates projectors, pairwise orthogonality and completeness.
    pub fn new(outcomes: Vec<(u64, ComplexMatrix)>) -> Result<Self> {
        let first = outcomes
            .first()
            .ok_or_else(|| Error::InvalidMeasurement("no outcomes".into()))?;
        let dim = first.1.rows();
        let mut labels = Vec::with_capacity(outcomes.len());
        for (label, p) in &outcomes {
            if p.rows() != dim || !p.is_square() {
                return Err(Error::DimensionMismatch { expected: dim, found: p.rows() });
            }
            if !p.is_projector(1e-9) {
                return Err(Error::InvalidMeasurement(format!("outcome {label} is not a projector")));
            }
            if labels.contains(label) {
                return Err(Error::InvalidMeasurement(format!("duplicate outcome {label}")));
            }
            labels.push(*label);
        }
        let total = sum_matrices(dim, outcomes.iter().map(|(_, p)| p));
        if !total.approx_eq(&ComplexMatrix::identity(dim), 1e-9) {
            return Err(Error::InvalidMeasurement("projectors do not sum to identity".into()));
        }
        Ok(Self { outcomes })
    }

    /// Measurement in the computational basis of `n` qubits.
    pub fn computational(n: usize) -> Result<Self> {
        let dim = 1usize << n;
        let outcomes = (0..dim)
            .map(|k| {
                let mut d = vec![0.0; dim];
                d[k] = 1.0;
                (k as u64, ComplexMatrix::real_diagonal(&d))
            })
            .collect();
        Self::new(outcomes)
    }

    /// Applies `U† (·) U` to every projector.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        let ud = u.adjoint();
        let outcomes = self
            .outcomes
            .iter()
            .map(|(l, p)| Ok((*l, ud.try_mul(&p.try_mul(u)?)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { outcomes })
    }

    /// Extends each projector to `P ⊗ I_other` or `I_other ⊗ P`.
    pub fn extended(&self, other_dim: usize, on_left: bool) -> Result<Self> {
        let id = ComplexMatrix::identity(other_dim);
        let outcomes = self
            .outcomes
            .iter()
            .map(|(l, p)| {
                let m = if on_left { p.kron(&id)? } else { id.kron(p)? };
                Ok((*l, m))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { outcomes })
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].1.rows()
    }

    pub fn outcomes(&self) -> &[(u64, ComplexMatrix)] {
        &self.outcomes
    }

    pub fn projector(&self, label: u64) -> Option<&ComplexMatrix> {
        self.outcomes.iter().find(|(l, _)| *l == label).map(|(_, p)| p)
    }

    /// All branches of the measurement on `psi`.
    pub fn branches(&self, psi: &StateVector) -> Result<Vec<Branch>> {
        self.outcomes
            .iter()
            .map(|(label, p)| {
                let state = psi.apply(p)?;
                Ok(Branch { outcome: *label, probability: state.norm_sqr(), state })
            })
            .collect()
    }
}

/// Samples an outcome and returns it with the sub-normalised post-state.
pub fn measure<R: Rng + ?Sized>(
    pvm: &ProjectiveMeasurement,
    psi: &StateVector,
    rng: &mut R,
) -> Result<(u64, StateVector)> {
    let branches = pvm.branches(psi)?;
    let probs: Vec<f64> = branches.iter().map(|b| b.probability).collect();
    let idx = sample_index(&probs, rng)?;
    let b = branches.into_iter().nth(idx).expect("index in range");
    Ok((b.outcome, b.state))
}

/// Samples an index proportionally to non-negative weights.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateDistribution("weights sum to zero".into()));
    }
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        last = i;
        if u < w {
            return Ok(i);
        }
        u -= w;
    }
    Ok(last)
}

/// A Hermitian unitary observable, with outcome bit 0 for eigenvalue +1.
#[derive(Clone, Debug)]
pub struct BinaryObservable {
    op: ComplexMatrix,
}

impl BinaryObservable {
    pub fn new(op: ComplexMatrix) -> Result<Self> {
        if !op.is_binary_observable(1e-9) {
            return Err(Error::InvalidOperator("not a Hermitian unitary".into()));
        }
        Ok(Self { op })
    }

    /// `P_0 - P_1` for a two-outcome PVM with labels 0 and 1.
    pub fn from_pvm(pvm: &ProjectiveMeasurement) -> Result<Self> {
        let (p0, p1) = match (pvm.projector(0), pvm.projector(1)) {
            (Some(a), Some(b)) if pvm.outcomes().len() == 2 => (a, b),
            _ => return Err(Error::InvalidMeasurement("expected outcomes {0, 1}".into())),
        };
        Self::new(p0 - p1)
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.rows()
    }

    /// `(I + (-1)^bit O) / 2`.
    pub fn projector(&self, bit: u64) -> ComplexMatrix {
        let id = ComplexMatrix::identity(self.dim());
        let sign = if bit == 0 { 1.0 } else { -1.0 };
        (&id + &self.op.scale_real(sign)).scale(re(0.5))
    }

    pub fn to_pvm(&self) -> ProjectiveMeasurement {
        ProjectiveMeasurement { outcomes: vec![(0, self.projector(0)), (1, self.projector(1))] }
    }
}

/// `Σ_b (-1)^b P_b` for a PVM with labels 0/1, without the unitarity check.
pub fn pvm_observable(pvm: &ProjectiveMeasurement) -> ComplexMatrix {
    let dim = pvm.dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for (l, p) in pvm.outcomes() {
        let s = if l % 2 == 0 { 1.0 } else { -1.0 };
        acc = &acc + &p.scale_real(s);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::matrix::TOLERANCE;
    use crate::quantum::pauli::{pauli_x, pauli_z};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn rejects_incomplete_pvm() {
        let p = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
        assert!(ProjectiveMeasurement::new(vec![(0, p)]).is_err());
    }

    #[test]
    fn rejects_non_projector() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(ProjectiveMeasurement::new(vec![(0, half.clone()), (1, half)]).is_err());
    }

    #[test]
    fn binary_observable_roundtrip() {
        let o = BinaryObservable::new(pauli_x()).unwrap();
        let back = BinaryObservable::from_pvm(&o.to_pvm()).unwrap();
        assert!(back.operator().approx_eq(&pauli_x(), TOLERANCE));
    }

    #[test]
    fn measure_plus_state_in_z_basis() {
        let psi = StateVector::from_unnormalized(vec![re(1.0), re(1.0)]).unwrap();
        let pvm = BinaryObservable::new(pauli_z()).unwrap().to_pvm();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let mut ones = 0;
        for _ in 0..2000 {
            let (b, post) = measure(&pvm, &psi, &mut rng).unwrap();
            assert!(post.is_subnormalized());
            assert!((post.norm_sqr() - 0.5).abs() < TOLERANCE);
            ones += b;
        }
        assert!((ones as f64 / 2000.0 - 0.5).abs() < 0.05);
    }

    #[test]
    fn sample_index_rejects_zero_weights() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert!(sample_index(&[0.0, 0.0], &mut rng).is_err());
    }
}
