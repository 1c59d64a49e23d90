//! Instruments with classical outcomes: `{A_α}` with `Σ A_α† A_α = I`.

use super::matrix::{sum_matrices, ComplexMatrix};
use super::state::{embed, StateVector};
use crate::bits::Bits;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct KrausOperator {
    /// Classical outcome reported for this branch. Labels may repeat.
    pub label: Bits,
    pub op: ComplexMatrix,
}

/// An instrument whose branches are `A_α = U_α Π_α` for a PVM `{Π_α}` and
/// unitaries `U_α`.
///
/// Operators are stored on their local support and embedded into the full
/// register only on demand.
#[derive(Clone, Debug)]
pub struct KrausFamily {
    ops: Vec<KrausOperator>,
    targets: Vec<usize>,
    total_qubits: usize,
}

/// A branch of an instrument applied to a state.
#[derive(Clone, Debug)]
pub struct KrausBranch {
    pub index: usize,
    pub label: Bits,
    pub probability: f64,
    /// Sub-normalised `A_α |ψ>`.
    pub state: StateVector,
}

impl KrausFamily {
    /// Checks completeness and that each `A_α† A_α` is a projector.
    pub fn new(ops: Vec<KrausOperator>) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::InvalidMeasurement("no Kraus operators".into()))?;
        let dim = first.op.cols();
        for k in &ops {
            if k.op.rows() != dim || k.op.cols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.op.rows() });
            }
            if !k.op.abs_sq().is_projector(1e-9) {
                return Err(Error::InvalidMeasurement(format!(
                    "Kraus operator for outcome {} is not a partial isometry",
                    k.label
                )));
            }
        }
        if !gram_sum(&ops, dim).approx_eq(&ComplexMatrix::identity(dim), 1e-9) {
            return Err(Error::InvalidMeasurement("Kraus operators are not complete".into()));
        }
        let total_qubits = crate::quantum::matrix::qubits_for_dim(dim)?;
        Ok(Self { ops, targets: (0..total_qubits).collect(), total_qubits })
    }

    /// `{U_α Π_α}` from a PVM and per-outcome unitaries.
    pub fn from_pvm_with_unitaries(
        pvm: &[(Bits, ComplexMatrix)],
        unitaries: &[ComplexMatrix],
    ) -> Result<Self> {
        if pvm.len() != unitaries.len() {
            return Err(Error::DimensionMismatch { expected: pvm.len(), found: unitaries.len() });
        }
        let ops = pvm
            .iter()
            .zip(unitaries)
            .map(|((label, p), u)| {
                if !u.is_unitary(1e-9) {
                    return Err(Error::InvalidOperator("post-measurement map is not unitary".into()));
                }
                Ok(KrausOperator { label: *label, op: u.try_mul(p)? })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }

    pub fn from_pvm(pvm: &[(Bits, ComplexMatrix)]) -> Result<Self> {
        Self::new(pvm.iter().map(|(l, p)| KrausOperator { label: *l, op: p.clone() }).collect())
    }

    /// Dimension of the full register.
    pub fn dim(&self) -> usize {
        1 << self.total_qubits
    }

    pub fn num_qubits(&self) -> usize {
        self.total_qubits
    }

    /// Operators on their local support; see [`Self::targets`].
    pub fn local_ops(&self) -> &[KrausOperator] {
        &self.ops
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn labels(&self) -> impl Iterator<Item = Bits> + '_ {
        self.ops.iter().map(|k| k.label)
    }

    /// Operator `i` on the full register.
    pub fn full_op(&self, i: usize) -> Result<ComplexMatrix> {
        if self.targets.len() == self.total_qubits && self.targets.iter().enumerate().all(|(a, &b)| a == b) {
            return Ok(self.ops[i].op.clone());
        }
        embed(&self.ops[i].op, &self.targets, self.total_qubits)
    }

    /// `A_i |ψ>`.
    pub fn apply(&self, i: usize, psi: &StateVector) -> Result<StateVector> {
        if psi.num_qubits() != self.total_qubits {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        psi.apply_on(&self.ops[i].op, &self.targets)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Every branch `A_α|ψ>`, including zero-probability ones.
    pub fn branches(&self, psi: &StateVector) -> Result<Vec<KrausBranch>> {
        (0..self.ops.len())
            .map(|index| {
                let state = self.apply(index, psi)?;
                let label = self.ops[index].label;
                Ok(KrausBranch { index, label, probability: state.norm_sqr(), state })
            })
            .collect()
    }

    /// The same instrument acting on `targets` of an `n`-qubit register.
    pub fn embedded(&self, targets: &[usize], n: usize) -> Result<Self> {
        if targets.len() != self.total_qubits {
            return Err(Error::DimensionMismatch { expected: self.total_qubits, found: targets.len() });
        }
        crate::quantum::state::QubitSplit::new(n, targets)?;
        crate::quantum::matrix::check_dim(1 << n)?;
        let mapped = self.targets.iter().map(|&t| targets[t]).collect();
        Ok(Self { ops: self.ops.clone(), targets: mapped, total_qubits: n })
    }

    /// Deviation of `Σ A_α† A_α` from the identity.
    pub fn completeness_defect(&self) -> f64 {
        let dim = 1 << self.targets.len();
        gram_sum(&self.ops, dim).max_abs_diff(&ComplexMatrix::identity(dim))
    }
}

fn gram_sum(ops: &[KrausOperator], dim: usize) -> ComplexMatrix {
    let grams: Vec<ComplexMatrix> = ops.iter().map(|k| k.op.abs_sq()).collect();
    sum_matrices(dim, &grams)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::matrix::TOLERANCE;
    use crate::quantum::pauli::{hadamard, pauli_x};

    fn z_pvm() -> Vec<(Bits, ComplexMatrix)> {
        vec![
            (Bits::new(1, 0).unwrap(), ComplexMatrix::real_diagonal(&[1.0, 0.0])),
            (Bits::new(1, 1).unwrap(), ComplexMatrix::real_diagonal(&[0.0, 1.0])),
        ]
    }

    #[test]
    fn post_measurement_unitaries_preserve_completeness() {
        let k = KrausFamily::from_pvm_with_unitaries(&z_pvm(), &[pauli_x(), hadamard()]).unwrap();
        assert!(k.completeness_defect() < TOLERANCE);
    }

    #[test]
    fn incomplete_family_is_rejected() {
        let one = KrausOperator { label: Bits::zero(1), op: ComplexMatrix::real_diagonal(&[1.0, 0.0]) };
        assert!(KrausFamily::new(vec![one]).is_err());
    }

    #[test]
    fn branch_probabilities_sum_to_one() {
        let k = KrausFamily::from_pvm(&z_pvm()).unwrap();
        let psi = StateVector::from_unnormalized(vec![super::super::re(1.0), super::super::re(2.0)]).unwrap();
        let total: f64 = k.branches(&psi).unwrap().iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < TOLERANCE);
    }
}
