//! Named compiled provers for the CHSH and commutation games.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bits::Bits;
use crate::compiler::{honest_compiled_prover, CompiledProverStrategy, FirstRound, InstrumentTable};
use crate::error::{Error, Result};
use crate::games::{canonical_chsh_strategy, canonical_commutation_strategy, QuantumStrategy};
use crate::quantum::pauli::{pauli_i, pauli_x, pauli_y, pauli_z};
use crate::quantum::random::{random_binary_observable, random_state, random_unitary};
use crate::quantum::{
    epr_state, re, BinaryObservable, ComplexMatrix, KrausFamily, KrausOperator, ProjectiveMeasurement, StateVector,
};

fn bit(v: u64) -> Bits {
    Bits::new(1, v).expect("one bit")
}

fn observable_pvm(m: ComplexMatrix) -> Result<ProjectiveMeasurement> {
    Ok(BinaryObservable::new(m)?.to_pvm())
}

/// Second-round measurement that always answers `b`.
fn constant_pvm(dim: usize, b: u64) -> Result<ProjectiveMeasurement> {
    ProjectiveMeasurement::new(vec![(b, ComplexMatrix::identity(dim)), (1 - b, ComplexMatrix::zeros(dim, dim))])
}

fn with_id(mut p: CompiledProverStrategy, id: String) -> CompiledProverStrategy {
    p.id = id;
    p
}

/// The canonical strategy run through the compiler.
pub fn honest_chsh() -> Result<CompiledProverStrategy> {
    Ok(with_id(honest_compiled_prover(&canonical_chsh_strategy(), 1, 1)?, "honest".into()))
}

/// Canonical measurements after a depolarizing channel of strength `eta` on
/// Bob's qubit, purified into a two-qubit environment held with Bob.
pub fn depolarized_chsh(eta: f64) -> Result<CompiledProverStrategy> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!("noise strength {eta} outside [0, 1]")));
    }
    let kraus = [
        pauli_i().scale_real((1.0 - 0.75 * eta).sqrt()),
        pauli_x().scale_real((eta / 4.0).sqrt()),
        pauli_y().scale_real((eta / 4.0).sqrt()),
        pauli_z().scale_real((eta / 4.0).sqrt()),
    ];
    let phi = epr_state(1)?;
    let mut amps = vec![re(0.0); 16];
    for (k, op) in kraus.iter().enumerate() {
        let branch = phi.apply_on(op, &[1])?;
        for i in 0..4 {
            amps[i * 4 + k] = branch.amplitude(i);
        }
    }
    let state = StateVector::new(amps)?;
    let canon = canonical_chsh_strategy();
    let bob = canon.bob.iter().map(|m| m.extended(4, true)).collect::<Result<Vec<_>>>()?;
    let s = QuantumStrategy::new(state, 1, 3, canon.alice.clone(), bob)?;
    Ok(with_id(honest_compiled_prover(&s, 1, 1)?, format!("depolarized({eta})")))
}

/// Canonical Alice with Bob measuring `cos θ Z ± sin θ X`; optimal at `θ = π/4`.
pub fn rotated_chsh(theta: f64) -> Result<CompiledProverStrategy> {
    let canon = canonical_chsh_strategy();
    let (c, s) = (theta.cos(), theta.sin());
    let b0 = &pauli_z().scale_real(c) + &pauli_x().scale_real(s);
    let b1 = &pauli_z().scale_real(c) - &pauli_x().scale_real(s);
    let strat = QuantumStrategy::new(canon.state, 1, 1, canon.alice, vec![observable_pvm(b0)?, observable_pvm(b1)?])?;
    Ok(with_id(honest_compiled_prover(&strat, 1, 1)?, format!("rotated({theta})")))
}

/// Canonical Alice with Bob measuring `σ_Z` for both questions.
pub fn equal_observables_chsh() -> Result<CompiledProverStrategy> {
    let canon = canonical_chsh_strategy();
    let z = observable_pvm(pauli_z())?;
    let strat = QuantumStrategy::new(canon.state, 1, 1, canon.alice, vec![z.clone(), z])?;
    Ok(with_id(honest_compiled_prover(&strat, 1, 1)?, "equal-z".into()))
}

/// Answers `a = 0` and `b = 0` on a one-dimensional state.
pub fn constant_chsh() -> Result<CompiledProverStrategy> {
    let fam = KrausFamily::new(vec![KrausOperator { label: bit(0), op: ComplexMatrix::identity(1) }])?;
    let table = InstrumentTable::oblivious(1, fam)?;
    CompiledProverStrategy::new(
        "constant",
        StateVector::basis(0, 0)?,
        FirstRound::ByPlaintext(Arc::new(table)),
        vec![constant_pvm(1, 0)?, constant_pvm(1, 0)?],
    )
}

/// Reads the plaintext `x`, always answers `a = 0`, and writes `x` into a
/// memory qubit with fidelity `f`. Bob answers `0` for `y = 0` and the
/// memory's `Z` outcome for `y = 1`, winning with probability `½ + f/2`.
pub fn leaking_chsh(fidelity: f64) -> Result<CompiledProverStrategy> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidArgument(format!("fidelity {fidelity} outside [0, 1]")));
    }
    let (c, s) = (fidelity.sqrt(), (1.0 - fidelity).sqrt());
    let write0 = ComplexMatrix::from_real(2, 2, &[c, -s, s, c])?;
    let write1 = &pauli_x() * &write0;
    let mut families = BTreeMap::new();
    for (x, u) in [(0, write0), (1, write1)] {
        families.insert(bit(x), KrausFamily::new(vec![KrausOperator { label: bit(0), op: u }])?);
    }
    CompiledProverStrategy::new(
        format!("leak({fidelity})"),
        StateVector::basis(1, 0)?,
        FirstRound::ByPlaintext(Arc::new(InstrumentTable::new(1, 1, families)?)),
        vec![constant_pvm(2, 0)?, observable_pvm(pauli_z())?],
    )
}

/// Random two-outcome instruments with random post-measurement unitaries
/// and random Bob observables on `qubits` qubits. With `oblivious` the same
/// instrument is used for both plaintexts.
pub fn random_chsh(seed: u64, qubits: usize, oblivious: bool) -> Result<CompiledProverStrategy> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let dim = 1usize << qubits;
    let state = random_state(qubits, &mut rng)?;
    let mut families = BTreeMap::new();
    let first = random_instrument(dim, &mut rng)?;
    for x in 0..2 {
        let fam = if oblivious || x == 0 { first.clone() } else { random_instrument(dim, &mut rng)? };
        families.insert(bit(x), fam);
    }
    let b0 = random_binary_observable(dim, &mut rng)?;
    let b1 = random_binary_observable(dim, &mut rng)?;
    let kind = if oblivious { "oblivious" } else { "random" };
    CompiledProverStrategy::new(
        format!("{kind}({seed})"),
        state,
        FirstRound::ByPlaintext(Arc::new(InstrumentTable::new(1, 1, families)?)),
        vec![observable_pvm(b0)?, observable_pvm(b1)?],
    )
}

fn random_instrument<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<KrausFamily> {
    let v = random_unitary(dim, rng)?;
    let rank = rng.random_range(1..dim.max(2));
    let diag: Vec<f64> = (0..dim).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    let p0 = &(&v * &ComplexMatrix::real_diagonal(&diag)) * &v.adjoint();
    let p1 = &ComplexMatrix::identity(dim) - &p0;
    let u0 = random_unitary(dim, rng)?;
    let u1 = random_unitary(dim, rng)?;
    KrausFamily::from_pvm_with_unitaries(&[(bit(0), p0), (bit(1), p1)], &[u0, u1])
}

fn two_bits(v: u64) -> Bits {
    Bits::new(2, v).expect("two bits")
}

/// Commutation-game prover on `|0>` answering `(0, 0)` with `B0 = σ_Z`,
/// `B1 = σ_X`. Wins with probability `¾`.
pub fn commutation_zx_example() -> Result<CompiledProverStrategy> {
    let fam = KrausFamily::new(vec![KrausOperator { label: two_bits(0), op: ComplexMatrix::identity(2) }])?;
    let mut families = BTreeMap::new();
    families.insert(Bits::empty(), fam);
    CompiledProverStrategy::new(
        "commutation-zx",
        StateVector::basis(1, 0)?,
        FirstRound::ByPlaintext(Arc::new(InstrumentTable::new(0, 2, families)?)),
        vec![observable_pvm(pauli_z())?, observable_pvm(pauli_x())?],
    )
}

/// Commutation-game prover on `|0>` that measures `σ_Z` and reports the
/// outcome twice; Bob uses `B0 = σ_Z`, `B1 = cos t σ_Z + sin t σ_X`.
/// Wins with probability `¾ + ¼ cos t`.
pub fn commutation_rotated(t: f64) -> Result<CompiledProverStrategy> {
    let p0 = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
    let p1 = ComplexMatrix::real_diagonal(&[0.0, 1.0]);
    let fam = KrausFamily::from_pvm(&[(two_bits(0b00), p0), (two_bits(0b11), p1)])?;
    let mut families = BTreeMap::new();
    families.insert(Bits::empty(), fam);
    let b1 = &pauli_z().scale_real(t.cos()) + &pauli_x().scale_real(t.sin());
    CompiledProverStrategy::new(
        format!("commutation-rotated({t})"),
        StateVector::basis(1, 0)?,
        FirstRound::ByPlaintext(Arc::new(InstrumentTable::new(0, 2, families)?)),
        vec![observable_pvm(pauli_z())?, observable_pvm(b1)?],
    )
}

/// The canonical commutation strategy run through the compiler.
pub fn honest_commutation() -> Result<CompiledProverStrategy> {
    Ok(with_id(honest_compiled_prover(&canonical_commutation_strategy(), 0, 2)?, "honest".into()))
}

/// Prover ids accepted by [`commutation_prover_by_name`].
pub const COMMUTATION_PROVER_NAMES: &[&str] = &["honest", "zx-example", "rotated"];

/// Looks up a commutation-game prover; `param` is the angle for `rotated`.
pub fn commutation_prover_by_name(name: &str, param: Option<f64>) -> Result<CompiledProverStrategy> {
    match name {
        "honest" => honest_commutation(),
        "zx-example" => commutation_zx_example(),
        "rotated" => commutation_rotated(param.unwrap_or(0.1)),
        other => Err(Error::InvalidArgument(format!(
            "unknown prover '{other}'; expected one of {}",
            COMMUTATION_PROVER_NAMES.join(", ")
        ))),
    }
}

/// Prover ids accepted by [`chsh_prover_by_name`].
pub const CHSH_PROVER_NAMES: &[&str] =
    &["honest", "constant", "equal-z", "leak", "depolarized", "rotated", "random", "oblivious"];

/// Looks up a CHSH prover by name; `param` is the noise strength, fidelity,
/// angle or seed depending on the family.
pub fn chsh_prover_by_name(name: &str, param: Option<f64>) -> Result<CompiledProverStrategy> {
    match name {
        "honest" => honest_chsh(),
        "constant" => constant_chsh(),
        "equal-z" => equal_observables_chsh(),
        "leak" => leaking_chsh(param.unwrap_or(1.0)),
        "depolarized" => depolarized_chsh(param.unwrap_or(0.1)),
        "rotated" => rotated_chsh(param.unwrap_or(std::f64::consts::FRAC_PI_4)),
        "random" => random_chsh(param.unwrap_or(0.0) as u64, 2, false),
        "oblivious" => random_chsh(param.unwrap_or(0.0) as u64, 2, true),
        other => Err(Error::InvalidArgument(format!(
            "unknown prover '{other}'; expected one of {}",
            CHSH_PROVER_NAMES.join(", ")
        ))),
    }
}
