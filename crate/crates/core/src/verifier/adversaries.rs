//! Dishonest provers: honest Alice and state, tampered Bob measurements.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::prover::{honest_verifier_prover, BobObservables, VerifierProver, Witness};
use crate::error::Result;
use crate::quantum::random::random_unitary;
use crate::quantum::{hadamard_all, ComplexMatrix};

fn with_bob(id: &str, witness: &Witness, build: impl FnOnce(usize, usize) -> Result<BobObservables>) -> Result<VerifierProver> {
    let honest = honest_verifier_prover(witness)?;
    let n = honest.n;
    let bob = build(n, honest.num_qubits())?;
    VerifierProver::new(id, n, honest.state, honest.alice, bob)
}

/// Basis change whose `Z` measurement reads out `cos(t)σ_X + sin(t)σ_Z` on
/// every qubit; `t = 0` is the honest `X` basis and `t = π/2` is `Z`.
pub fn tilted_x_basis(n: usize, t: f64) -> Result<ComplexMatrix> {
    let half = 0.5 * (std::f64::consts::FRAC_PI_2 - t);
    let (c, s) = (half.cos(), half.sin());
    let single = ComplexMatrix::from_real(2, 2, &[c, s, -s, c])?;
    let mut u = ComplexMatrix::identity(1);
    for _ in 0..n {
        u = u.kron(&single)?;
    }
    Ok(u)
}

/// Bob's `X` measurement tilted toward `Z` by angle `t`.
pub fn tilted_bob_prover(witness: &Witness, t: f64) -> Result<VerifierProver> {
    with_bob(&format!("tilted-x-{t:.3}"), witness, |n, total| {
        BobObservables::new(n, (n..2 * n).collect(), total, ComplexMatrix::identity(1 << n), tilted_x_basis(n, t)?)
    })
}

/// Bob answers both questions with a `Z` measurement.
pub fn z_only_bob_prover(witness: &Witness) -> Result<VerifierProver> {
    with_bob("z-only", witness, |n, total| {
        BobObservables::new(n, (n..2 * n).collect(), total, ComplexMatrix::identity(1 << n), ComplexMatrix::identity(1 << n))
    })
}

/// Both of Bob's measurements replaced by Haar-random bases on his qubits
/// and the witness register.
pub fn scrambled_bob_prover(witness: &Witness, seed: u64) -> Result<VerifierProver> {
    with_bob(&format!("scrambled-{seed}"), witness, |n, total| {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let targets: Vec<usize> = (n..3 * n).collect();
        let u_z = random_unitary(1 << (2 * n), &mut rng)?;
        let u_x = random_unitary(1 << (2 * n), &mut rng)?;
        BobObservables::new(n, targets, total, u_z, u_x)
    })
}

/// Honest Bob measuring the witness register instead of his EPR halves.
pub fn witness_reading_bob_prover(witness: &Witness) -> Result<VerifierProver> {
    with_bob("witness-reader", witness, |n, total| {
        BobObservables::new(n, (2 * n..3 * n).collect(), total, ComplexMatrix::identity(1 << n), hadamard_all(n)?)
    })
}

/// The fixed adversary set used by the soundness diagnostics.
pub fn standard_adversaries(witness: &Witness) -> Result<Vec<VerifierProver>> {
    Ok(vec![
        tilted_bob_prover(witness, 0.3)?,
        z_only_bob_prover(witness)?,
        scrambled_bob_prover(witness, 17)?,
        witness_reading_bob_prover(witness)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::pauli::{pauli_x, pauli_z};
    use crate::quantum::PauliMask;
    use crate::verifier::hamiltonian::PauliBasis;

    #[test]
    fn tilt_reads_expected_observable() {
        let t = 0.4;
        let u = tilted_x_basis(1, t).unwrap();
        let obs = &(&u.adjoint() * &pauli_z()) * &u;
        let want = pauli_x().scale_real(t.cos()).try_add(&pauli_z().scale_real(t.sin())).unwrap();
        assert!(obs.approx_eq(&want, 1e-12));
        let flat = tilted_x_basis(1, 0.0).unwrap();
        assert!((&(&flat.adjoint() * &pauli_z()) * &flat).approx_eq(&pauli_x(), 1e-12));
    }

    #[test]
    fn adversaries_build() {
        let w = Witness::Pure(crate::quantum::StateVector::basis(2, 2).unwrap());
        let all = standard_adversaries(&w).unwrap();
        assert_eq!(all.len(), 4);
        let z = all[1].bob.local_observable(PauliBasis::X, &PauliMask::new(2, 1).unwrap()).unwrap();
        assert!(z.is_hermitian(1e-12));
    }
}
