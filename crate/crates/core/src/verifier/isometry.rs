//! The swap isometry built from Bob's observables, and witness extraction.
//!
//! For a prover register `P` with Bob observables `Z(u)`, `X(v)` on `n`
//! qubits, `V` maps `|φ>` to a state on `P ⊗ Q ⊗ A` (in that qubit order):
//!
//! `V|φ> = 2^{-n} Σ_{u,v} X(v)Z(u)|φ> ⊗ (σ_X(v)σ_Z(u) ⊗ I)|EPR_n>_{AQ}`
//!
//! The prover-side ordering `X(v)Z(u)` is the one under which both Pauli
//! identities below hold exactly for any exactly linear Bob.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::hamiltonian::PauliBasis;
use super::prover::BobObservables;
use crate::error::{Error, Result};
use crate::quantum::{c, ComplexMatrix, Normalization, PauliMask, StateVector, C64, MAX_QUBITS};

fn parity(x: u64) -> f64 {
    if x.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `X(v)Z(u)|φ>` for every `(u, v)`, indexed `[u][v]`.
fn frames(bob: &BobObservables, phi: &StateVector) -> Result<Vec<Vec<StateVector>>> {
    let n = bob.n();
    PauliMask::all(n)
        .map(|u| {
            let zu = bob.apply(PauliBasis::Z, &u, phi)?;
            PauliMask::all(n).map(|v| bob.apply(PauliBasis::X, &v, &zu)).collect()
        })
        .collect()
}

fn check_register(bob: &BobObservables, phi: &StateVector) -> Result<usize> {
    let p = phi.num_qubits();
    if p != bob.total_qubits() {
        return Err(Error::DimensionMismatch { expected: bob.total_qubits(), found: p });
    }
    if p + 2 * bob.n() > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!("isometry output of {} qubits", p + 2 * bob.n())));
    }
    Ok(p)
}

/// `V|φ>` on `P ⊗ Q ⊗ A`. Sub-normalised inputs stay sub-normalised.
pub fn apply_swap_isometry(bob: &BobObservables, phi: &StateVector) -> Result<StateVector> {
    let p_qubits = check_register(bob, phi)?;
    let n = bob.n();
    let d = 1usize << n;
    let f = frames(bob, phi)?;
    // (σ_X(v)σ_Z(u))[a, q] = (-1)^{u·q} when a = q ⊕ v.
    let scale = (2f64).powf(-1.5 * n as f64);
    let mut out = DVector::from_element(1usize << (p_qubits + 2 * n), C64::new(0.0, 0.0));
    for p in 0..(1usize << p_qubits) {
        for q in 0..d {
            for a in 0..d {
                let v = q ^ a;
                let mut acc = C64::new(0.0, 0.0);
                for (u, row) in f.iter().enumerate() {
                    acc += row[v].amplitude(p) * parity((u & q) as u64);
                }
                out[(p * d + q) * d + a] = acc * scale;
            }
        }
    }
    Ok(StateVector::from_dvector(out, Normalization::SubNormalized))
}

/// Dense matrix of `V`, of shape `2^{P+2n} × 2^P`.
pub fn swap_isometry(bob: &BobObservables) -> Result<ComplexMatrix> {
    let p = bob.total_qubits();
    let rows = 1usize << (p + 2 * bob.n());
    let mut m = ComplexMatrix::zeros(rows, 1 << p);
    for col in 0..(1usize << p) {
        let image = apply_swap_isometry(bob, &StateVector::basis(p, col)?)?;
        for row in 0..rows {
            m.set(row, col, image.amplitude(row));
        }
    }
    Ok(m)
}

/// `max |V†V - I|`.
pub fn isometry_defect(bob: &BobObservables) -> Result<f64> {
    let v = swap_isometry(bob)?;
    let gram = &v.adjoint() * &v;
    Ok(gram.max_abs_diff(&ComplexMatrix::identity(gram.rows())))
}

/// Reduced state of the `Q` register of `V|φ>`.
pub fn q_register_density(bob: &BobObservables, phi: &StateVector) -> Result<ComplexMatrix> {
    let out = apply_swap_isometry(bob, phi)?;
    let p = phi.num_qubits();
    let q: Vec<usize> = (p..p + bob.n()).collect();
    out.reduced_density(&q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliCheck {
    pub basis: PauliBasis,
    pub mask: PauliMask,
    /// `tr[σ_W(mask) ρ_Q]`.
    pub lhs: f64,
    /// The prover-side expression; its real part.
    pub rhs: f64,
    /// `|lhs - rhs|` including any imaginary part of the prover side.
    pub residual: f64,
}

/// Compares `tr[σ_W(mask) ρ_Q]` with
/// `E_u <Z(u)φ|Z(u+a)φ>` for `W = Z` and
/// `E_{u,v} (-1)^{u·b} <X(v+b)Z(u)φ|X(v)Z(u)φ>` for `W = X`.
pub fn isometry_pauli_check(
    bob: &BobObservables,
    phi: &StateVector,
    basis: PauliBasis,
    mask: &PauliMask,
) -> Result<PauliCheck> {
    check_register(bob, phi)?;
    let n = bob.n();
    if mask.num_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: mask.num_qubits() });
    }
    let rho = q_register_density(bob, phi)?;
    let lhs = rho.try_mul(&basis.operator(mask)?)?.trace().re;
    let f = frames(bob, phi)?;
    let d = 1usize << n;
    let m = mask.bits() as usize;
    let rhs: C64 = match basis {
        PauliBasis::Z => {
            (0..d).map(|u| f[u][0].inner(&f[u ^ m][0])).sum::<C64>() / d as f64
        }
        PauliBasis::X => {
            let mut acc = C64::new(0.0, 0.0);
            for u in 0..d {
                for v in 0..d {
                    acc += f[u][v ^ m].inner(&f[u][v]) * parity((u & m) as u64);
                }
            }
            acc / (d * d) as f64
        }
    };
    Ok(PauliCheck { basis, mask: *mask, lhs, rhs: rhs.re, residual: (c(lhs, 0.0) - rhs).norm() })
}

/// Every mask in both bases.
pub fn isometry_pauli_checks(bob: &BobObservables, phi: &StateVector) -> Result<Vec<PauliCheck>> {
    let mut out = Vec::new();
    for basis in [PauliBasis::Z, PauliBasis::X] {
        for mask in PauliMask::all(bob.n()) {
            out.push(isometry_pauli_check(bob, phi, basis, &mask)?);
        }
    }
    Ok(out)
}

/// `Σ_α σ_X(x)σ_Z(z) ρ_Q(Vψ_α) σ_Z(z)σ_X(x)` over teleport branches with
/// labels `s_A = z ∥ x`. Not renormalised.
pub fn extract_witness<'a>(
    bob: &BobObservables,
    branches: impl IntoIterator<Item = (&'a crate::bits::Bits, &'a StateVector)>,
) -> Result<ComplexMatrix> {
    let n = bob.n();
    let mut rho = ComplexMatrix::zeros(1 << n, 1 << n);
    for (label, psi) in branches {
        if label.len() != 2 * n {
            return Err(Error::InvalidArgument(format!("teleport label of {} bits", label.len())));
        }
        if psi.norm_sqr() == 0.0 {
            continue;
        }
        let z = PauliMask::new(n, label.slice(0, n)?.value())?;
        let x = PauliMask::new(n, label.slice(n, n)?.value())?;
        let frame = crate::quantum::pauli::sigma_xz(&x, &z)?;
        let rho_q = q_register_density(bob, psi)?;
        rho = rho.try_add(&(&(&frame * &rho_q) * &frame.adjoint()))?;
    }
    Ok(rho)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryRecord {
    pub bob: String,
    pub state: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryAudit {
    pub n: usize,
    pub prover_qubits: usize,
    pub seed: u64,
    /// `max |V†V - I|` per Bob model.
    pub defects: Vec<(String, f64)>,
    pub records: Vec<IsometryRecord>,
    pub checks: Vec<crate::certificates::Check>,
}

impl IsometryAudit {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Checks `V` and both Pauli identities on `states` random prover states of
/// `n + 1` qubits, for literal Paulis and for Haar-random Bob bases.
pub fn isometry_audit(n: usize, states: usize, seed: u64) -> Result<IsometryAudit> {
    use crate::certificates::Check;
    use crate::quantum::random::{random_state, random_unitary};
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let p = n + 1;
    let dim = 1usize << p;
    let bobs = vec![
        ("pauli".to_string(), BobObservables::honest((0..n).collect(), p)?),
        (
            "random".to_string(),
            BobObservables::new(n, (0..p).collect(), p, random_unitary(dim, &mut rng)?, random_unitary(dim, &mut rng)?)?,
        ),
    ];
    let mut defects = Vec::new();
    let mut records = Vec::new();
    for (name, bob) in &bobs {
        defects.push((name.clone(), isometry_defect(bob)?));
        for state in 0..states {
            let phi = random_state(p, &mut rng)?;
            let max_residual = isometry_pauli_checks(bob, &phi)?.iter().map(|c| c.residual).fold(0.0, f64::max);
            records.push(IsometryRecord { bob: name.clone(), state, max_residual });
        }
    }
    let checks = vec![
        Check::at_most("isometry", defects.iter().map(|d| d.1).fold(0.0, f64::max), 1e-9),
        Check::at_most("pauli_identities", records.iter().map(|r| r.max_residual).fold(0.0, f64::max), 1e-9),
    ];
    Ok(IsometryAudit { n, prover_qubits: p, seed, defects, records, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::{random_state, random_unitary};
    use crate::quantum::pauli::hadamard_all;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn single_qubit_zero_state_has_unit_z() {
        let bob = BobObservables::honest(vec![0], 1).unwrap();
        let phi = StateVector::basis(1, 0).unwrap();
        let chk = isometry_pauli_check(&bob, &phi, PauliBasis::Z, &PauliMask::new(1, 1).unwrap()).unwrap();
        assert!((chk.lhs - 1.0).abs() < 1e-12);
        assert!(chk.residual < 1e-12);
    }

    #[test]
    fn identity_mask_gives_one() {
        let bob = BobObservables::honest(vec![0, 1], 2).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let phi = random_state(2, &mut rng).unwrap();
        let chk = isometry_pauli_check(&bob, &phi, PauliBasis::Z, &PauliMask::zero(2)).unwrap();
        assert!((chk.rhs - 1.0).abs() < 1e-12 && chk.residual < 1e-12);
    }

    #[test]
    fn isometry_with_twisted_bob() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let u_x = random_unitary(8, &mut rng).unwrap();
        let bob = BobObservables::new(2, vec![1, 2, 0], 3, hadamard_all(3).unwrap(), u_x).unwrap();
        assert!(isometry_defect(&bob).unwrap() < 1e-9);
        let phi = random_state(3, &mut rng).unwrap();
        for chk in isometry_pauli_checks(&bob, &phi).unwrap() {
            assert!(chk.residual < 1e-9, "{chk:?}");
        }
    }

    #[test]
    fn audit_small() {
        let a = isometry_audit(1, 2, 5).unwrap();
        assert_eq!(a.records.len(), 4);
        assert!(a.all_passed());
    }

    #[test]
    fn honest_bob_swaps_state_out() {
        // With literal Paulis on the whole register, ρ_Q is the input state.
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let phi = random_state(2, &mut rng).unwrap();
        let bob = BobObservables::honest(vec![0, 1], 2).unwrap();
        let rho = q_register_density(&bob, &phi).unwrap();
        assert!(rho.approx_eq(&phi.density(), 1e-12));
    }
}
