//! Provers for the verification protocol: Bob's two basis measurements, the
//! honest Alice circuit and the combined prover model.

use std::fmt;
use std::sync::Arc;

use super::hamiltonian::PauliBasis;
use super::questions::{answer_bits, question_bits, AliceQuestion};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::qhe::HomomorphicCircuit;
use crate::quantum::pauli::{hadamard_all, sigma_x, sigma_z};
use crate::quantum::{
    embed, epr_state, purify, re, ComplexMatrix, KrausBranch, KrausFamily, KrausOperator, PauliMask, StateVector,
};

impl PauliBasis {
    /// Bob's question bit: `0` asks for the `Z` basis, `1` for `X`.
    pub fn for_question(y: u8) -> Self {
        if y == 0 {
            PauliBasis::Z
        } else {
            PauliBasis::X
        }
    }
}

/// Bob's measurements `{U_W† (|γ><γ| ⊗ I) U_W}` for `W ∈ {Z, X}`. Each
/// unitary acts on `targets`; the first `n` targets are then measured in
/// the computational basis.
#[derive(Clone, Debug)]
pub struct BobObservables {
    n: usize,
    total_qubits: usize,
    targets: Vec<usize>,
    u_z: ComplexMatrix,
    u_x: ComplexMatrix,
}

impl BobObservables {
    pub fn new(
        n: usize,
        targets: Vec<usize>,
        total_qubits: usize,
        u_z: ComplexMatrix,
        u_x: ComplexMatrix,
    ) -> Result<Self> {
        if targets.len() < n {
            return Err(Error::InvalidArgument(format!("{} targets cannot hold {n} measured qubits", targets.len())));
        }
        crate::quantum::QubitSplit::new(total_qubits, &targets)?;
        let dim = 1usize << targets.len();
        for u in [&u_z, &u_x] {
            if u.rows() != dim || u.cols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: u.rows() });
            }
            if !u.is_unitary(1e-9) {
                return Err(Error::InvalidOperator("Bob's basis change must be unitary".into()));
            }
        }
        Ok(Self { n, total_qubits, targets, u_z, u_x })
    }

    /// Literal `Z` and `X` basis measurements of `qubits`.
    pub fn honest(qubits: Vec<usize>, total_qubits: usize) -> Result<Self> {
        let n = qubits.len();
        Self::new(n, qubits, total_qubits, ComplexMatrix::identity(1 << n), hadamard_all(n)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total_qubits(&self) -> usize {
        self.total_qubits
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn unitary(&self, basis: PauliBasis) -> &ComplexMatrix {
        match basis {
            PauliBasis::Z => &self.u_z,
            PauliBasis::X => &self.u_x,
        }
    }

    /// `Z(a)` or `X(b)` as an operator on `targets`.
    pub fn local_observable(&self, basis: PauliBasis, mask: &PauliMask) -> Result<ComplexMatrix> {
        if mask.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: mask.num_qubits() });
        }
        let extra = self.targets.len() - self.n;
        let padded = PauliMask::new(self.targets.len(), mask.bits() << extra)?;
        let u = self.unitary(basis);
        Ok(&(&u.adjoint() * &sigma_z(&padded)?) * u)
    }

    /// `Z(a)` or `X(b)` on the full register.
    pub fn observable(&self, basis: PauliBasis, mask: &PauliMask) -> Result<ComplexMatrix> {
        embed(&self.local_observable(basis, mask)?, &self.targets, self.total_qubits)
    }

    pub fn apply(&self, basis: PauliBasis, mask: &PauliMask, psi: &StateVector) -> Result<StateVector> {
        psi.apply_on(&self.local_observable(basis, mask)?, &self.targets)
    }

    /// Unnormalised outcome distribution over `γ ∈ {0,1}^n`; sums to `‖ψ‖²`.
    pub fn outcome_weights(&self, basis: PauliBasis, psi: &StateVector) -> Result<Vec<f64>> {
        let rotated = psi.apply_on(self.unitary(basis), &self.targets)?;
        rotated.marginal(&self.targets[..self.n])
    }
}

/// The honest Alice circuit on `alice` and `witness` qubits of a
/// `total_qubits` register.
#[derive(Clone, Debug)]
pub struct HonestAlice {
    n: usize,
    alice: Vec<usize>,
    witness: Vec<usize>,
    total_qubits: usize,
}

/// Bell projector `|β_{zx}><β_{zx}|` on (witness, alice) with
/// `|β_{zx}> = (|0,x> + (-1)^z |1,1⊕x>)/√2`.
fn bell_projector(z: bool, x: bool) -> ComplexMatrix {
    let mut v = [0.0; 4];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let xi = usize::from(x);
    v[xi] = s;
    v[2 + (1 - xi)] = if z { -s } else { s };
    ComplexMatrix::from_fn(4, 4, |i, j| re(v[i] * v[j]))
}

fn answer_label(n: usize, leading: u64, len: usize) -> Result<Bits> {
    Bits::new(len, leading)?.concat(&Bits::zero(answer_bits(n) - len))
}

impl HonestAlice {
    pub fn new(n: usize, alice: Vec<usize>, witness: Vec<usize>, total_qubits: usize) -> Result<Self> {
        if alice.len() != n || witness.len() != n {
            return Err(Error::InvalidArgument("Alice and witness registers need n qubits each".into()));
        }
        let mut all = alice.clone();
        all.extend(&witness);
        crate::quantum::QubitSplit::new(total_qubits, &all)?;
        Ok(Self { n, alice, witness, total_qubits })
    }

    fn question_instrument(&self, q: &AliceQuestion) -> Result<KrausFamily> {
        let n = self.n;
        let id = ComplexMatrix::identity(1 << n);
        match q {
            AliceQuestion::Chsh { a, b, x } => {
                let sign = if *x { -1.0 } else { 1.0 };
                let obs = (&sigma_z(a)? + &sigma_x(b)?.scale_real(sign)).scale_real(std::f64::consts::FRAC_1_SQRT_2);
                let plus = (&id + &obs).scale_real(0.5);
                let minus = (&id - &obs).scale_real(0.5);
                KrausFamily::from_pvm(&[(answer_label(n, 0, 1)?, plus), (answer_label(n, 1, 1)?, minus)])?
                    .embedded(&self.alice, self.total_qubits)
            }
            AliceQuestion::Commutation { a, b } => {
                let za = sigma_z(a)?;
                let xb = sigma_x(b)?;
                let mut pvm = Vec::with_capacity(4);
                for s in 0..4u64 {
                    let sz = if s >> 1 == 1 { -1.0 } else { 1.0 };
                    let sx = if s & 1 == 1 { -1.0 } else { 1.0 };
                    let pz = (&id + &za.scale_real(sz)).scale_real(0.5);
                    let px = (&id + &xb.scale_real(sx)).scale_real(0.5);
                    pvm.push((answer_label(n, s, 2)?, &pz * &px));
                }
                KrausFamily::from_pvm(&pvm)?.embedded(&self.alice, self.total_qubits)
            }
            AliceQuestion::Teleport => {
                // Local order (w_0, a_0, w_1, a_1, ...); label z ∥ x.
                let mut targets = Vec::with_capacity(2 * n);
                for i in 0..n {
                    targets.push(self.witness[i]);
                    targets.push(self.alice[i]);
                }
                let mut ops = Vec::with_capacity(1 << (2 * n));
                for label in 0..(1u64 << (2 * n)) {
                    let bits = Bits::new(2 * n, label)?;
                    let mut op = ComplexMatrix::identity(1);
                    for i in 0..n {
                        op = op.kron(&bell_projector(bits.bit(i), bits.bit(n + i)))?;
                    }
                    ops.push(KrausOperator { label: bits, op });
                }
                KrausFamily::new(ops)?.embedded(&targets, self.total_qubits)
            }
        }
    }
}

impl HomomorphicCircuit for HonestAlice {
    fn input_bits(&self) -> usize {
        question_bits(self.n)
    }

    fn output_bits(&self) -> usize {
        answer_bits(self.n)
    }

    fn num_qubits(&self) -> usize {
        self.total_qubits
    }

    fn instrument(&self, input: &Bits) -> Result<KrausFamily> {
        self.question_instrument(&AliceQuestion::from_bits(self.n, input)?)
    }
}

/// A prover for the verification protocol: a state, a homomorphically
/// evaluated first-round circuit and Bob's two measurements.
#[derive(Clone)]
pub struct VerifierProver {
    pub id: String,
    pub n: usize,
    pub state: StateVector,
    pub alice: Arc<dyn HomomorphicCircuit>,
    pub bob: BobObservables,
}

impl fmt::Debug for VerifierProver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VerifierProver")
            .field("id", &self.id)
            .field("n", &self.n)
            .field("qubits", &self.state.num_qubits())
            .finish_non_exhaustive()
    }
}

impl VerifierProver {
    pub fn new(
        id: impl Into<String>,
        n: usize,
        state: StateVector,
        alice: Arc<dyn HomomorphicCircuit>,
        bob: BobObservables,
    ) -> Result<Self> {
        let qubits = state.num_qubits();
        if alice.input_bits() != question_bits(n) || alice.output_bits() != answer_bits(n) {
            return Err(Error::InvalidArgument("Alice circuit has the wrong question or answer width".into()));
        }
        if alice.num_qubits() != qubits || bob.total_qubits() != qubits {
            return Err(Error::DimensionMismatch { expected: qubits, found: alice.num_qubits() });
        }
        if bob.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: bob.n() });
        }
        Ok(Self { id: id.into(), n, state, alice, bob })
    }

    pub fn num_qubits(&self) -> usize {
        self.state.num_qubits()
    }

    /// Every first-round branch for a plaintext question.
    pub fn branches(&self, q: &AliceQuestion) -> Result<Vec<KrausBranch>> {
        self.alice.instrument(&q.to_bits(self.n)?)?.branches(&self.state)
    }
}

/// The witness handed to the honest prover.
#[derive(Clone, Debug)]
pub enum Witness {
    Pure(StateVector),
    Mixed(ComplexMatrix),
}

impl Witness {
    pub fn num_qubits(&self) -> Result<usize> {
        match self {
            Witness::Pure(s) => Ok(s.num_qubits()),
            Witness::Mixed(rho) => crate::quantum::matrix::qubits_for_dim(rho.rows()),
        }
    }

    pub fn density(&self) -> ComplexMatrix {
        match self {
            Witness::Pure(s) => s.density(),
            Witness::Mixed(rho) => rho.clone(),
        }
    }
}

/// The honest prover: `n` EPR pairs (Alice qubits `0..n`, Bob qubits
/// `n..2n`), the witness on `2n..3n` and, for a mixed witness, a
/// purifying reference on `3n..4n`.
pub fn honest_verifier_prover(witness: &Witness) -> Result<VerifierProver> {
    let n = witness.num_qubits()?;
    let witness_state = match witness {
        Witness::Pure(s) => s.normalized()?,
        Witness::Mixed(rho) => purify(rho)?,
    };
    let state = epr_state(n)?.kron(&witness_state)?;
    let total = state.num_qubits();
    let alice = HonestAlice::new(n, (0..n).collect(), (2 * n..3 * n).collect(), total)?;
    let bob = BobObservables::honest((n..2 * n).collect(), total)?;
    VerifierProver::new("honest", n, state, Arc::new(alice), bob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::random_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn chsh_observable_is_binary() {
        let n = 2;
        let a = PauliMask::new(n, 0b10).unwrap();
        let b = PauliMask::new(n, 0b11).unwrap();
        let obs = (&sigma_z(&a).unwrap() + &sigma_x(&b).unwrap()).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        assert!(obs.is_binary_observable(1e-12));
    }

    #[test]
    fn teleport_then_correct_recovers_witness() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let phi = random_state(2, &mut rng).unwrap();
        let p = honest_verifier_prover(&Witness::Pure(phi.clone())).unwrap();
        let bob_qubits = [2usize, 3];
        for br in p.branches(&AliceQuestion::Teleport).unwrap() {
            assert!((br.probability - 1.0 / 16.0).abs() < 1e-12);
            let z = PauliMask::new(2, br.label.value() >> 2).unwrap();
            let x = PauliMask::new(2, br.label.value() & 0b11).unwrap();
            let fix = &sigma_z(&z).unwrap() * &sigma_x(&x).unwrap();
            let corrected = br.state.apply_on(&fix, &bob_qubits).unwrap();
            let rho = corrected.reduced_density(&bob_qubits).unwrap().scale_real(16.0);
            assert!(rho.approx_eq(&phi.density(), 1e-10));
        }
    }

    #[test]
    fn z_basis_of_basis_state_is_deterministic() {
        let bob = BobObservables::honest(vec![0, 1], 2).unwrap();
        let w = bob.outcome_weights(PauliBasis::Z, &StateVector::basis(2, 0).unwrap()).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12);
        let plus = StateVector::new(vec![re(0.5); 4]).unwrap();
        let w = bob.outcome_weights(PauliBasis::X, &plus).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bob_observables_are_exactly_linear() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let u = crate::quantum::random::random_unitary(8, &mut rng).unwrap();
        let bob = BobObservables::new(2, vec![0, 1, 2], 3, u.clone(), u).unwrap();
        for a in PauliMask::all(2) {
            for b in PauliMask::all(2) {
                let lhs = &bob.observable(PauliBasis::Z, &a).unwrap() * &bob.observable(PauliBasis::Z, &b).unwrap();
                assert!(lhs.approx_eq(&bob.observable(PauliBasis::Z, &a.xor(&b)).unwrap(), 1e-10));
            }
        }
    }
}
