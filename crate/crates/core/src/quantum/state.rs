//! Pure states, register embeddings and partial traces.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::matrix::{check_dim, qubits_for_dim, re, ComplexMatrix, C64, TOLERANCE};
use crate::error::{Error, Result};

/// Whether a state vector has unit norm or is a measurement branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    Normalized,
    SubNormalized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
    normalization: Normalization,
}

impl StateVector {
    /// A unit vector; fails if the norm deviates from one.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let s = Self::subnormalized(amplitudes)?;
        let n = s.norm_sqr();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("squared norm {n} is not 1")));
        }
        Ok(Self { normalization: Normalization::Normalized, ..s })
    }

    /// Normalises arbitrary non-zero amplitudes.
    pub fn from_unnormalized(amplitudes: Vec<C64>) -> Result<Self> {
        Self::subnormalized(amplitudes)?.normalized()
    }

    /// A branch vector with norm at most one.
    pub fn subnormalized(amplitudes: Vec<C64>) -> Result<Self> {
        qubits_for_dim(amplitudes.len())?;
        check_dim(amplitudes.len())?;
        Ok(Self {
            amplitudes: DVector::from_vec(amplitudes),
            normalization: Normalization::SubNormalized,
        })
    }

    pub(crate) fn from_dvector(amplitudes: DVector<C64>, normalization: Normalization) -> Self {
        Self { amplitudes, normalization }
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} >= {dim}")));
        }
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[index] = re(1.0);
        Self::new(v)
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize) -> C64 {
        self.amplitudes[i]
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn is_subnormalized(&self) -> bool {
        self.normalization == Normalization::SubNormalized
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// Rescales to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= 1e-300 {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        Ok(Self {
            amplitudes: &self.amplitudes / re(n.sqrt()),
            normalization: Normalization::Normalized,
        })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim() * other.dim())?;
        let amplitudes = self.amplitudes.kronecker(&other.amplitudes);
        let normalization = if self.is_subnormalized() || other.is_subnormalized() {
            Normalization::SubNormalized
        } else {
            Normalization::Normalized
        };
        Ok(Self { amplitudes, normalization })
    }

    /// `A|ψ>`, flagged sub-normalised.
    pub fn apply(&self, op: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            amplitudes: op.matvec(&self.amplitudes)?,
            normalization: Normalization::SubNormalized,
        })
    }

    /// `A|ψ>` for a unitary `A`; keeps the normalisation flag.
    pub fn apply_unitary(&self, op: &ComplexMatrix) -> Result<Self> {
        Ok(Self { amplitudes: op.matvec(&self.amplitudes)?, normalization: self.normalization })
    }

    /// `<ψ|A|ψ>`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<C64> {
        Ok(self.amplitudes.dotc(&op.matvec(&self.amplitudes)?))
    }

    /// `|ψ><ψ|`.
    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// Reduced density matrix on `keep`, in the listed order.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        let n = self.num_qubits();
        let split = QubitSplit::new(n, keep)?;
        let dk = 1usize << keep.len();
        let dr = 1usize << (n - keep.len());
        let mut m = ComplexMatrix::zeros(dk, dk);
        for r in 0..dr {
            for i in 0..dk {
                let ai = self.amplitudes[split.join(i, r)];
                if ai == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..dk {
                    let aj = self.amplitudes[split.join(j, r)];
                    let cur = m.get(i, j);
                    m.set(i, j, cur + ai * aj.conj());
                }
            }
        }
        Ok(m)
    }

    /// Probability of each bitstring on `qubits`, indexed by the sub-index.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        let split = QubitSplit::new(self.num_qubits(), qubits)?;
        let mut p = vec![0.0; 1 << qubits.len()];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            p[split.kept_index(idx)] += a.norm_sqr();
        }
        Ok(p)
    }

    /// Applies an operator acting on `targets` (in order) to the full state.
    pub fn apply_on(&self, op: &ComplexMatrix, targets: &[usize]) -> Result<Self> {
        let split = QubitSplit::new(self.num_qubits(), targets)?;
        let dk = 1usize << targets.len();
        if op.rows() != dk || op.cols() != dk {
            return Err(Error::DimensionMismatch { expected: dk, found: op.rows() });
        }
        let dr = 1usize << (self.num_qubits() - targets.len());
        let mut out = DVector::from_element(self.dim(), C64::new(0.0, 0.0));
        let mut local = vec![C64::new(0.0, 0.0); dk];
        for r in 0..dr {
            for (j, slot) in local.iter_mut().enumerate() {
                *slot = self.amplitudes[split.join(j, r)];
            }
            for i in 0..dk {
                let mut acc = C64::new(0.0, 0.0);
                for (j, &a) in local.iter().enumerate() {
                    acc += op.get(i, j) * a;
                }
                out[split.join(i, r)] = acc;
            }
        }
        Ok(Self { amplitudes: out, normalization: Normalization::SubNormalized })
    }
}

/// `|φ+>^{⊗n}` with Alice's `n` qubits first and Bob's `n` qubits second.
pub fn epr_state(n: usize) -> Result<StateVector> {
    let dim_half = 1usize << n;
    check_dim(dim_half * dim_half)?;
    let mut v = vec![C64::new(0.0, 0.0); dim_half * dim_half];
    let amp = re(1.0 / (dim_half as f64).sqrt());
    for k in 0..dim_half {
        v[k * dim_half + k] = amp;
    }
    StateVector::new(v)
}

/// Maps between a full index and a (kept, rest) pair of sub-indices.
///
/// Qubit 0 is the most significant bit of the full index. Kept qubits are
/// ordered as listed; the rest keep their relative order.
#[derive(Clone, Debug)]
pub struct QubitSplit {
    n: usize,
    kept: Vec<usize>,
    rest: Vec<usize>,
}

impl QubitSplit {
    pub fn new(n: usize, kept: &[usize]) -> Result<Self> {
        let mut seen = vec![false; n];
        for &q in kept {
            if q >= n {
                return Err(Error::InvalidArgument(format!("qubit {q} out of range for {n} qubits")));
            }
            if seen[q] {
                return Err(Error::InvalidArgument(format!("qubit {q} listed twice")));
            }
            seen[q] = true;
        }
        let rest = (0..n).filter(|q| !seen[*q]).collect();
        Ok(Self { n, kept: kept.to_vec(), rest })
    }

    fn gather(&self, idx: usize, qubits: &[usize]) -> usize {
        let mut out = 0;
        for &q in qubits {
            out = (out << 1) | ((idx >> (self.n - 1 - q)) & 1);
        }
        out
    }

    pub fn kept_index(&self, idx: usize) -> usize {
        self.gather(idx, &self.kept)
    }

    pub fn rest_index(&self, idx: usize) -> usize {
        self.gather(idx, &self.rest)
    }

    pub fn join(&self, kept: usize, rest: usize) -> usize {
        let mut idx = 0;
        let k = self.kept.len();
        for (pos, &q) in self.kept.iter().enumerate() {
            idx |= ((kept >> (k - 1 - pos)) & 1) << (self.n - 1 - q);
        }
        let r = self.rest.len();
        for (pos, &q) in self.rest.iter().enumerate() {
            idx |= ((rest >> (r - 1 - pos)) & 1) << (self.n - 1 - q);
        }
        idx
    }
}

/// Full matrix of an operator acting on `targets` of an `n`-qubit register.
pub fn embed(op: &ComplexMatrix, targets: &[usize], n: usize) -> Result<ComplexMatrix> {
    let split = QubitSplit::new(n, targets)?;
    let dk = 1usize << targets.len();
    if op.rows() != dk || !op.is_square() {
        return Err(Error::DimensionMismatch { expected: dk, found: op.rows() });
    }
    let dim = 1usize << n;
    check_dim(dim)?;
    let dr = dim / dk;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for r in 0..dr {
        for i in 0..dk {
            let row = split.join(i, r);
            for j in 0..dk {
                let v = op.get(i, j);
                if v != C64::new(0.0, 0.0) {
                    m.set(row, split.join(j, r), v);
                }
            }
        }
    }
    Ok(m)
}

/// Partial trace of a density matrix, keeping `keep` in the listed order.
pub fn partial_trace(rho: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    let n = qubits_for_dim(rho.rows())?;
    let split = QubitSplit::new(n, keep)?;
    let dk = 1usize << keep.len();
    let dr = rho.rows() / dk;
    Ok(ComplexMatrix::from_fn(dk, dk, |i, j| {
        (0..dr).map(|r| rho.get(split.join(i, r), split.join(j, r))).sum()
    }))
}

/// `tr[A†A ψ]` for a pure state.
pub fn state_norm_sq(op: &ComplexMatrix, psi: &StateVector) -> Result<f64> {
    Ok(psi.apply(op)?.norm_sqr())
}

/// `tr[A†A ρ]` for a density matrix.
pub fn state_norm_sq_mixed(op: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    Ok((&op.abs_sq() * rho).trace().re)
}

/// Trace distance `½‖ρ - σ‖₁` between Hermitian matrices.
pub fn trace_distance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let diff = rho.try_sub(sigma)?;
    let eig = diff.hermitian_eigen()?;
    Ok(0.5 * eig.values.iter().map(|x| x.abs()).sum::<f64>())
}

/// Checks that `rho` is a density matrix: Hermitian, PSD, unit trace.
pub fn is_density_matrix(rho: &ComplexMatrix, tol: f64) -> bool {
    if !rho.is_hermitian(tol) || (rho.trace() - re(1.0)).norm() > tol {
        return false;
    }
    match rho.hermitian_eigen() {
        Ok(e) => e.values.iter().all(|&v| v >= -tol),
        Err(_) => false,
    }
}

/// Purifies a density matrix on `n` qubits into a `2n`-qubit state whose
/// trailing `n` qubits are the reference register.
pub fn purify(rho: &ComplexMatrix) -> Result<StateVector> {
    qubits_for_dim(rho.rows())?;
    if !is_density_matrix(rho, 1e-9) {
        return Err(Error::InvalidState("purify expects a density matrix".into()));
    }
    let eig = rho.hermitian_eigen()?;
    let d = rho.rows();
    check_dim(d * d)?;
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        let s = lam.sqrt();
        for i in 0..d {
            v[i * d + k] += eig.vectors.get(i, k) * s;
        }
    }
    StateVector::from_unnormalized(v)
}

/// Default check for pure-state normalisation.
pub fn assert_unit(psi: &StateVector) -> Result<()> {
    if (psi.norm_sqr() - 1.0).abs() > TOLERANCE * 100.0 {
        return Err(Error::InvalidState(format!("squared norm {} is not 1", psi.norm_sqr())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epr_reduced_state_is_maximally_mixed() {
        let psi = epr_state(2).unwrap();
        let rho = psi.reduced_density(&[0, 1]).unwrap();
        assert!(rho.approx_eq(&ComplexMatrix::identity(4).scale_real(0.25), TOLERANCE));
    }

    #[test]
    fn epr_pairs_alice_qubit_i_with_bob_qubit_i() {
        let psi = epr_state(2).unwrap();
        // Qubits 0 and 2 form a Bell pair.
        let rho = psi.reduced_density(&[0, 2]).unwrap();
        assert!((rho.get(0, 3) - re(0.5)).norm() < TOLERANCE);
    }

    #[test]
    fn apply_on_matches_embed() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let h = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0])
            .unwrap()
            .scale_real(1.0 / 2f64.sqrt());
        let op = x.kron(&h).unwrap();
        let psi = StateVector::from_unnormalized(
            (0..8).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect(),
        )
        .unwrap();
        let direct = psi.apply_on(&op, &[2, 0]).unwrap();
        let full = embed(&op, &[2, 0], 3).unwrap();
        let via = psi.apply(&full).unwrap();
        assert!((&direct.amplitudes - &via.amplitudes).norm() < TOLERANCE);
    }

    #[test]
    fn partial_trace_matches_pure_reduction() {
        let psi = StateVector::from_unnormalized(
            (0..8).map(|k| C64::new((k * k) as f64, k as f64)).collect(),
        )
        .unwrap();
        let a = psi.reduced_density(&[2, 0]).unwrap();
        let b = partial_trace(&psi.density(), &[2, 0]).unwrap();
        assert!(a.approx_eq(&b, TOLERANCE));
    }

    #[test]
    fn purification_reproduces_state() {
        let rho = ComplexMatrix::from_row_slice(
            2,
            2,
            &[re(0.7), C64::new(0.1, 0.2), C64::new(0.1, -0.2), re(0.3)],
        )
        .unwrap();
        let psi = purify(&rho).unwrap();
        assert!(psi.reduced_density(&[0]).unwrap().approx_eq(&rho, 1e-10));
    }

    #[test]
    fn trace_distance_of_orthogonal_states_is_one() {
        let a = StateVector::basis(1, 0).unwrap().density();
        let b = StateVector::basis(1, 1).unwrap().density();
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < TOLERANCE);
    }

    #[test]
    fn measurement_branch_is_flagged() {
        let psi = StateVector::basis(1, 0).unwrap();
        let p = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
        assert!(psi.apply(&p).unwrap().is_subnormalized());
    }
}
