//! Block encodings of combinations of two binary observables.
//!
//! Ancilla qubits come first; the encoded block is the one with every
//! ancilla in `|0>`.

use super::spectral::is_hermitian_input;
use crate::error::{Error, Result};
use crate::quantum::{embed, ComplexMatrix};

#[derive(Clone, Debug)]
pub struct BlockEncoding {
    pub unitary: ComplexMatrix,
    pub ancillas: usize,
    /// The top-left block equals `scale · target`.
    pub scale: f64,
    pub target: ComplexMatrix,
}

impl BlockEncoding {
    /// A unitary encodes itself with no ancillas.
    pub fn trivial(u: ComplexMatrix) -> Result<Self> {
        if !u.is_unitary(1e-9) {
            return Err(Error::InvalidOperator("trivial block encoding needs a unitary".into()));
        }
        Ok(Self { target: u.clone(), unitary: u, ancillas: 0, scale: 1.0 })
    }

    pub fn system_dim(&self) -> usize {
        self.target.rows()
    }

    /// Top-left block of the unitary.
    pub fn block(&self) -> ComplexMatrix {
        let d = self.system_dim();
        self.unitary.block(0, 0, d, d)
    }

    pub fn block_error(&self) -> f64 {
        self.block().max_abs_diff(&self.target.scale_real(self.scale))
    }

    pub fn unitarity_error(&self) -> f64 {
        let d = self.unitary.rows();
        self.unitary.abs_sq().max_abs_diff(&ComplexMatrix::identity(d))
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol && self.block_error() <= tol
    }
}

fn check_pair(b0: &ComplexMatrix, b1: &ComplexMatrix) -> Result<()> {
    if b0.rows() != b1.rows() {
        return Err(Error::DimensionMismatch { expected: b0.rows(), found: b1.rows() });
    }
    for b in [b0, b1] {
        if !b.is_binary_observable(1e-9) {
            return Err(Error::InvalidOperator("block encodings need binary observables".into()));
        }
    }
    Ok(())
}

fn check_sign(sign: f64) -> Result<()> {
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::InvalidArgument(format!("sign must be ±1, got {sign}")));
    }
    Ok(())
}

/// `|+><+| ⊗ P + |-><-| ⊗ Q` for unitaries `P`, `Q`.
fn controlled_pair(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<ComplexMatrix> {
    let plus = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5])?;
    let minus = ComplexMatrix::from_real(2, 2, &[0.5, -0.5, -0.5, 0.5])?;
    Ok(&plus.kron(p)? + &minus.kron(q)?)
}

/// `|+><+| ⊗ B0 ± |-><-| ⊗ B1`, encoding `B0 ± B1` with scale `½`.
pub fn sum_block_encoding(b0: &ComplexMatrix, b1: &ComplexMatrix, sign: f64) -> Result<BlockEncoding> {
    check_pair(b0, b1)?;
    check_sign(sign)?;
    let unitary = controlled_pair(b0, &b1.scale_real(sign))?;
    Ok(BlockEncoding { unitary, ancillas: 1, scale: 0.5, target: b0 + &b1.scale_real(sign) })
}

/// Product of two copies of a one-ancilla unitary on separate ancillas,
/// `second · first`.
fn two_ancilla_product(first: &ComplexMatrix, second: &ComplexMatrix, sys_qubits: usize) -> Result<ComplexMatrix> {
    let n = sys_qubits + 2;
    let sys: Vec<usize> = (2..n).collect();
    let mut t1 = vec![0];
    t1.extend(&sys);
    let mut t2 = vec![1];
    t2.extend(&sys);
    Ok(&embed(second, &t2, n)? * &embed(first, &t1, n)?)
}

/// `V^(2) V^(1)` with `V = |+><+| ⊗ B0 ± |-><-| ⊗ B1` on two ancillas,
/// encoding `(B0 ± B1)²` with scale `¼`.
pub fn squared_block_encoding(b0: &ComplexMatrix, b1: &ComplexMatrix, sign: f64) -> Result<BlockEncoding> {
    let v = sum_block_encoding(b0, b1, sign)?;
    let sys_qubits = crate::quantum::matrix::qubits_for_dim(b0.rows())?;
    let unitary = two_ancilla_product(&v.unitary, &v.unitary, sys_qubits)?;
    let target = &v.target * &v.target;
    Ok(BlockEncoding { unitary, ancillas: 2, scale: 0.25, target })
}

/// `(W^(2))† W^(1)` with `W = |+><+| ⊗ B0B1 ± |-><-| ⊗ B1B0`, encoding
/// `C† C` for `C = B0B1 ± B1B0` with scale `¼`: the squared anticommutator
/// for `+` and `|[B0, B1]|²` for `-`.
pub fn commutator_block_encoding(b0: &ComplexMatrix, b1: &ComplexMatrix, sign: f64) -> Result<BlockEncoding> {
    check_pair(b0, b1)?;
    check_sign(sign)?;
    let p = b0 * b1;
    let q = (b1 * b0).scale_real(sign);
    let w = controlled_pair(&p, &q)?;
    let sys_qubits = crate::quantum::matrix::qubits_for_dim(b0.rows())?;
    let unitary = two_ancilla_product(&w, &w.adjoint(), sys_qubits)?;
    let c = &p + &q;
    Ok(BlockEncoding { unitary, ancillas: 2, scale: 0.25, target: c.abs_sq() })
}

/// Given an encoding of a Hermitian `B` with `‖B‖ ≤ r` at scale `t`, builds
/// `U = R†(|0><0| ⊗ I + |1><1| ⊗ V)R` whose top-left block is
/// `t/(4rt+1) · (4rI + B)`. The result targets `H = (B + 4rI)/(6r)`, whose
/// spectrum lies in `[½, 5/6]`, with scale `6rt/(4rt+1)`.
pub fn shifted_block_encoding(inner: &BlockEncoding, r: f64) -> Result<BlockEncoding> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("norm bound must be positive, got {r}")));
    }
    is_hermitian_input(&inner.target)?;
    let norm = inner.target.operator_norm();
    if norm > r + 1e-9 {
        return Err(Error::InvalidArgument(format!("operator norm {norm} exceeds bound {r}")));
    }
    let t = inner.scale;
    let k = 4.0 * r * t + 1.0;
    let (cos, sin) = ((4.0 * r * t / k).sqrt(), 1.0 / k.sqrt());
    let rot = ComplexMatrix::from_real(2, 2, &[cos, -sin, sin, cos])?;
    let dim = inner.unitary.rows();
    let id = ComplexMatrix::identity(dim);
    let controlled = id.direct_sum(&inner.unitary);
    let rr = rot.kron(&id)?;
    let unitary = &(&rr.adjoint() * &controlled) * &rr;
    let sys = inner.system_dim();
    let target = (&inner.target + &ComplexMatrix::identity(sys).scale_real(4.0 * r)).scale_real(1.0 / (6.0 * r));
    Ok(BlockEncoding { unitary, ancillas: inner.ancillas + 1, scale: 6.0 * r * t / k, target })
}

/// The factor `t/(4rt+1)` multiplying `4rI + B` in a shifted encoding.
pub fn shift_factor(inner_scale: f64, r: f64) -> f64 {
    inner_scale / (4.0 * r * inner_scale + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::pauli::{pauli_x, pauli_z};

    #[test]
    fn sum_encoding_of_z_and_x() {
        let be = sum_block_encoding(&pauli_z(), &pauli_x(), 1.0).unwrap();
        assert!(be.is_valid(1e-12));
    }

    #[test]
    fn anticommuting_pair_has_zero_anticommutator_block() {
        let plus = commutator_block_encoding(&pauli_z(), &pauli_x(), 1.0).unwrap();
        assert!(plus.is_valid(1e-12));
        assert!(plus.block().max_abs() < 1e-12);
        // |[Z, X]|² = 4I, so the block is the identity.
        let minus = commutator_block_encoding(&pauli_z(), &pauli_x(), -1.0).unwrap();
        assert!(minus.block().approx_eq(&ComplexMatrix::identity(2), 1e-12));
    }

    #[test]
    fn shifted_encoding_of_z() {
        let inner = BlockEncoding::trivial(pauli_z()).unwrap();
        let be = shifted_block_encoding(&inner, 1.0).unwrap();
        assert!(be.is_valid(1e-12));
        let h = ComplexMatrix::real_diagonal(&[5.0 / 6.0, 0.5]);
        assert!(be.target.approx_eq(&h, 1e-12));
    }

    #[test]
    fn zero_norm_bound_is_rejected() {
        let inner = BlockEncoding::trivial(pauli_z()).unwrap();
        assert!(shifted_block_encoding(&inner, 0.0).is_err());
    }

    #[test]
    fn non_observable_is_rejected() {
        let bad = pauli_z().scale_real(2.0);
        assert!(sum_block_encoding(&bad, &pauli_x(), 1.0).is_err());
    }
}
