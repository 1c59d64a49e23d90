use super::NonlocalGame;
use crate::error::{Error, Result};
use crate::quantum::pauli::{pauli_x, pauli_z};
use crate::quantum::{
    epr_state, sigma_x, sigma_z, BinaryObservable, ComplexMatrix, PauliMask, ProjectiveMeasurement,
    StateVector,
};

/// Shared state on `alice_qubits + bob_qubits` qubits with one PVM per
/// question for each player.
#[derive(Clone, Debug)]
pub struct QuantumStrategy {
    pub state: StateVector,
    pub alice_qubits: usize,
    pub bob_qubits: usize,
    /// Indexed by Alice's question.
    pub alice: Vec<ProjectiveMeasurement>,
    /// Indexed by Bob's question.
    pub bob: Vec<ProjectiveMeasurement>,
}

impl QuantumStrategy {
    pub fn new(
        state: StateVector,
        alice_qubits: usize,
        bob_qubits: usize,
        alice: Vec<ProjectiveMeasurement>,
        bob: Vec<ProjectiveMeasurement>,
    ) -> Result<Self> {
        if state.num_qubits() != alice_qubits + bob_qubits {
            return Err(Error::DimensionMismatch {
                expected: alice_qubits + bob_qubits,
                found: state.num_qubits(),
            });
        }
        for m in &alice {
            if m.dim() != 1 << alice_qubits {
                return Err(Error::DimensionMismatch { expected: 1 << alice_qubits, found: m.dim() });
            }
        }
        for m in &bob {
            if m.dim() != 1 << bob_qubits {
                return Err(Error::DimensionMismatch { expected: 1 << bob_qubits, found: m.dim() });
            }
        }
        Ok(Self { state, alice_qubits, bob_qubits, alice, bob })
    }

    /// Checks question counts and answer ranges against a game.
    pub fn check_against(&self, game: &NonlocalGame) -> Result<()> {
        if self.alice.len() as u64 != game.num_alice_questions()
            || self.bob.len() as u64 != game.num_bob_questions()
        {
            return Err(Error::InvalidGame("strategy question count differs from game".into()));
        }
        let alice_ok = self
            .alice
            .iter()
            .all(|m| m.outcomes().iter().all(|(l, _)| *l < game.num_alice_answers()));
        let bob_ok = self
            .bob
            .iter()
            .all(|m| m.outcomes().iter().all(|(l, _)| *l < game.num_bob_answers()));
        if !alice_ok || !bob_ok {
            return Err(Error::InvalidGame("answer label out of range".into()));
        }
        Ok(())
    }

    pub fn alice_targets(&self) -> Vec<usize> {
        (0..self.alice_qubits).collect()
    }

    pub fn bob_targets(&self) -> Vec<usize> {
        (self.alice_qubits..self.alice_qubits + self.bob_qubits).collect()
    }
}

/// `Σ_{x,y} q(x,y) Σ_{a,b} V(x,y,a,b) ‖(A^x_a ⊗ B^y_b) ψ‖²`.
pub fn quantum_value_exact(game: &NonlocalGame, s: &QuantumStrategy) -> Result<f64> {
    s.check_against(game)?;
    let (at, bt) = (s.alice_targets(), s.bob_targets());
    let mut total = 0.0;
    for q in &game.questions {
        if q.p == 0.0 {
            continue;
        }
        for (a, pa) in s.alice[q.x as usize].outcomes() {
            let phi = s.state.apply_on(pa, &at)?;
            if phi.norm_sqr() == 0.0 {
                continue;
            }
            for (b, pb) in s.bob[q.y as usize].outcomes() {
                let v = game.value(q.x, q.y, *a, *b);
                if v != 0.0 {
                    total += q.p * v * phi.apply_on(pb, &bt)?.norm_sqr();
                }
            }
        }
    }
    Ok(total)
}

/// `⟨A_x ⊗ B_y⟩` for a strategy with single-bit answers, indexed `[x][y]`.
pub fn chsh_correlators(s: &QuantumStrategy) -> Result<[[f64; 2]; 2]> {
    let mut out = [[0.0; 2]; 2];
    let (at, bt) = (s.alice_targets(), s.bob_targets());
    for (x, row) in out.iter_mut().enumerate() {
        let ax = BinaryObservable::from_pvm(&s.alice[x])?;
        let phi = s.state.apply_on(ax.operator(), &at)?;
        for (y, slot) in row.iter_mut().enumerate() {
            let by = BinaryObservable::from_pvm(&s.bob[y])?;
            *slot = s.state.inner(&phi.apply_on(by.operator(), &bt)?).re;
        }
    }
    Ok(out)
}

/// Win probability of an XOR strategy: `½ + ⅛ Σ_{x,y} (-1)^{xy} C_{xy}`.
pub fn chsh_value_from_correlators(c: &[[f64; 2]; 2]) -> f64 {
    0.5 + (c[0][0] + c[0][1] + c[1][0] - c[1][1]) / 8.0
}

/// `|φ+>` with Alice measuring `σ_Z`, `σ_X` and Bob `(σ_Z ± σ_X)/√2`.
pub fn canonical_chsh_strategy() -> QuantumStrategy {
    let s = 1.0 / 2f64.sqrt();
    let b0 = (&pauli_z() + &pauli_x()).scale_real(s);
    let b1 = (&pauli_z() - &pauli_x()).scale_real(s);
    let pvm = |m: ComplexMatrix| BinaryObservable::new(m).expect("observable").to_pvm();
    QuantumStrategy::new(
        epr_state(1).expect("epr"),
        1,
        1,
        vec![pvm(pauli_z()), pvm(pauli_x())],
        vec![pvm(b0), pvm(b1)],
    )
    .expect("valid strategy")
}

/// Two EPR pairs; Alice jointly measures `Z⊗Z` and `X⊗X`, Bob measures one
/// of them.
pub fn canonical_commutation_strategy() -> QuantumStrategy {
    let all = PauliMask::new(2, 0b11).expect("mask");
    let zz = BinaryObservable::new(sigma_z(&all).expect("z")).expect("obs");
    let xx = BinaryObservable::new(sigma_x(&all).expect("x")).expect("obs");
    let joint = (0..4u64)
        .map(|a| (a, &zz.projector(a >> 1) * &xx.projector(a & 1)))
        .collect();
    QuantumStrategy::new(
        epr_state(2).expect("epr"),
        2,
        2,
        vec![ProjectiveMeasurement::new(joint).expect("pvm")],
        vec![zz.to_pvm(), xx.to_pvm()],
    )
    .expect("valid strategy")
}

/// Deterministic strategy answering `a` and `b` regardless of questions.
pub fn constant_strategy(game: &NonlocalGame, a: u64, b: u64) -> Result<QuantumStrategy> {
    let one = || ComplexMatrix::identity(1);
    let alice = (0..game.num_alice_questions())
        .map(|_| ProjectiveMeasurement::new(vec![(a, one())]))
        .collect::<Result<Vec<_>>>()?;
    let bob = (0..game.num_bob_questions())
        .map(|_| ProjectiveMeasurement::new(vec![(b, one())]))
        .collect::<Result<Vec<_>>>()?;
    let s = QuantumStrategy::new(StateVector::basis(0, 0)?, 0, 0, alice, bob)?;
    s.check_against(game)?;
    Ok(s)
}
