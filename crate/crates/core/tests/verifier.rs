use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use cnl_core::certificates::chsh_quantum_value;
use cnl_core::quantum::random::{random_density, random_state};
use cnl_core::quantum::{sigma_x, sigma_z, PauliMask, StateVector};
use cnl_core::verifier::{
    honest_completeness, honest_verifier_prover, protocol_value_exact, q_register_density, run_protocol,
    soundness_report, standard_adversaries, subtest_acceptance, teleport_estimates, thm_main_parameters,
    AliceQuestion, BobObservables, HamiltonianTerm, PauliBasis, ProtocolConfig, QuestionDistributions, Subtest,
    Witness, XxzzHamiltonian,
};
use cnl_core::Bits;

type Vector = DVector<Complex64>;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn term(w: PauliBasis, i: usize, j: usize, p: f64) -> HamiltonianTerm {
    HamiltonianTerm { w, i, j, p }
}

fn mixed_h() -> XxzzHamiltonian {
    XxzzHamiltonian::new(2, vec![term(PauliBasis::X, 0, 1, 0.4), term(PauliBasis::Z, 0, 1, 0.6)]).unwrap()
}

fn z_only_h() -> XxzzHamiltonian {
    XxzzHamiltonian::new(2, vec![term(PauliBasis::Z, 0, 1, 1.0)]).unwrap()
}

/// Applies a two-qubit operator to qubits `(q1, q2)` of an `n`-qubit
/// vector, qubit 0 being the most significant bit.
fn apply_two(op: &DMatrix<Complex64>, q1: usize, q2: usize, n: usize, v: &Vector) -> Vector {
    let (s1, s2) = (n - 1 - q1, n - 1 - q2);
    let mut out = Vector::zeros(v.len());
    for k in 0..v.len() {
        let (b1, b2) = ((k >> s1) & 1, (k >> s2) & 1);
        let row = 2 * b1 + b2;
        for col in 0..4 {
            let c = op[(row, col)];
            if c == cx(0.0) {
                continue;
            }
            let src = (k & !(1 << s1) & !(1 << s2)) | ((col >> 1) << s1) | ((col & 1) << s2);
            out[k] += c * v[src];
        }
    }
    out
}

/// `(Z^z ⊗ X^x)|Φ+>` projector on (witness, alice).
fn bell(z: bool, x: bool) -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = Vector::zeros(4);
    let xi = usize::from(x);
    v[xi] = cx(s);
    v[2 + (1 - xi)] = cx(if z { -s } else { s });
    &v * v.adjoint()
}

/// Density of `keep` (in order) from a pure state.
fn reduced(v: &Vector, n: usize, keep: &[usize]) -> DMatrix<Complex64> {
    let k = keep.len();
    let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let idx = |kept: usize, other: usize| {
        let mut full = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            full |= ((kept >> (k - 1 - pos)) & 1) << (n - 1 - q);
        }
        for (pos, &q) in rest.iter().enumerate() {
            full |= ((other >> (rest.len() - 1 - pos)) & 1) << (n - 1 - q);
        }
        full
    };
    DMatrix::from_fn(1 << k, 1 << k, |r, c| (0..1 << rest.len()).map(|o| v[idx(r, o)] * v[idx(c, o)].conj()).sum())
}

/// Teleport subtest acceptance by explicit Bell measurement and
/// per-outcome Pauli-frame bookkeeping. Witness is pure on `n` qubits.
fn teleport_oracle(h: &XxzzHamiltonian, witness: &StateVector) -> f64 {
    let n = h.n;
    let total = 3 * n;
    // |Φ+>^n on (alice i, bob n+i), witness on 2n..3n.
    let mut psi = Vector::zeros(1 << total);
    let half = 1usize << n;
    for k in 0..half {
        for w in 0..half {
            psi[(k << (2 * n)) | (k << n) | w] = witness.amplitude(w) / (half as f64).sqrt();
        }
    }
    let bob: Vec<usize> = (n..2 * n).collect();
    let mut acc = 0.0;
    for zbits in 0..half {
        for xbits in 0..half {
            let bit = |v: usize, i: usize| (v >> (n - 1 - i)) & 1 == 1;
            let mut branch = psi.clone();
            for i in 0..n {
                branch = apply_two(&bell(bit(zbits, i), bit(xbits, i)), 2 * n + i, i, total, &branch);
            }
            let rho = reduced(&branch, total, &bob);
            let mut check = 0.0;
            for t in &h.terms {
                let mask = PauliMask::pair(n, t.i, t.j).unwrap();
                let (op, frame) = match t.w {
                    PauliBasis::Z => (sigma_z(&mask).unwrap(), bit(xbits, t.i) ^ bit(xbits, t.j)),
                    PauliBasis::X => (sigma_x(&mask).unwrap(), bit(zbits, t.i) ^ bit(zbits, t.j)),
                };
                let value = (op.inner() * &rho).trace().re;
                let signed = if frame { -value } else { value };
                // Accept on odd corrected parity; the branch weight is tr ρ.
                check += t.p * 0.5 * (rho.trace().re - signed);
            }
            acc += 0.5 * rho.trace().re + 0.5 * check;
        }
    }
    acc
}

#[test]
fn teleport_acceptance_matches_dense_oracle() {
    let mut rng = ChaCha20Rng::seed_from_u64(665);
    for k in 0..5 {
        let h = XxzzHamiltonian::random(2, 2 + k % 3, &mut rng).unwrap();
        let psi = random_state(2, &mut rng).unwrap();
        let prover = honest_verifier_prover(&Witness::Pure(psi.clone())).unwrap();
        let dists = QuestionDistributions::build(&h).unwrap();
        let exact = subtest_acceptance(&prover, &h, &dists, Subtest::Teleport).unwrap();
        let oracle = teleport_oracle(&h, &psi);
        let energy = h.energy(&psi.density()).unwrap();
        assert!((exact - oracle).abs() < 1e-10, "exact {exact} oracle {oracle}");
        assert!((oracle - (0.5 + 0.25 * (1.0 - energy))).abs() < 1e-10);
    }
}

#[test]
fn teleport_oracle_on_three_qubits() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let h = XxzzHamiltonian::random(3, 4, &mut rng).unwrap();
    let psi = random_state(3, &mut rng).unwrap();
    let prover = honest_verifier_prover(&Witness::Pure(psi.clone())).unwrap();
    let dists = QuestionDistributions::build(&h).unwrap();
    let exact = subtest_acceptance(&prover, &h, &dists, Subtest::Teleport).unwrap();
    assert!((exact - teleport_oracle(&h, &psi)).abs() < 1e-10);
}

#[test]
fn z_term_with_antialigned_witness_always_passes_teleport() {
    let h = z_only_h();
    let psi = StateVector::basis(2, 0b01).unwrap();
    let prover = honest_verifier_prover(&Witness::Pure(psi.clone())).unwrap();
    let config = ProtocolConfig::new(2, -1.0, -0.5, Some(1.0), 0).unwrap();
    let v = protocol_value_exact(&prover, &h, &config).unwrap();
    assert_eq!(v.chsh, None);
    assert!((v.teleport - 1.0).abs() < 1e-12);
    assert!((teleport_oracle(&h, &psi) - 1.0).abs() < 1e-12);

    let dists = QuestionDistributions::build(&h).unwrap();
    let est = teleport_estimates(&prover, &h, &dists, &prover.branches(&AliceQuestion::Teleport).unwrap()).unwrap();
    assert!((est.energy_z + 1.0).abs() < 1e-9);
    assert!((est.extracted.z_expectation + 1.0).abs() < 1e-8);
}

#[test]
fn corrected_bob_register_holds_the_witness() {
    let n = 2;
    let psi = StateVector::basis(n, 0).unwrap();
    let prover = honest_verifier_prover(&Witness::Pure(psi)).unwrap();
    let bob: Vec<usize> = (n..2 * n).collect();
    for br in prover.branches(&AliceQuestion::Teleport).unwrap() {
        if br.probability <= 0.0 {
            continue;
        }
        let z = PauliMask::new(n, br.label.slice(0, n).unwrap().value()).unwrap();
        let x = PauliMask::new(n, br.label.slice(n, n).unwrap().value()).unwrap();
        let fix = &sigma_x(&x).unwrap() * &sigma_z(&z).unwrap();
        let corrected = br.state.apply_on(&fix, &bob).unwrap();
        let rho = corrected.reduced_density(&bob).unwrap().scale_real(1.0 / br.probability);
        assert!((rho.get(0, 0).re - 1.0).abs() < 1e-10, "label {}", br.label);
    }
}

#[test]
fn anticommuting_pairs_condition_on_odd_overlap() {
    let h = XxzzHamiltonian::new(2, vec![term(PauliBasis::X, 0, 1, 1.0)]).unwrap();
    let d = QuestionDistributions::build(&h).unwrap();
    let b = PauliMask::new(2, 0b11).unwrap();
    let d1 = d.d_q1().unwrap();
    assert_eq!(d1.len(), 2);
    for ((a, bb), p) in d1 {
        assert_eq!(*bb, b);
        assert!(a.dot(&b));
        assert!((p - 0.5).abs() < 1e-15);
    }
    assert!((d.odd_fraction().unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn subtest_frequencies_follow_kappa() {
    let h = mixed_h();
    let prover = honest_verifier_prover(&Witness::Pure(h.ground_state().unwrap().1)).unwrap();
    let config = ProtocolConfig::new(2, -0.9, -0.5, Some(0.3), 17).unwrap();
    let trials = 100_000u64;
    let transcripts = run_protocol(&prover, &h, &config, trials).unwrap();
    let expected = config.subtest_weights();
    for (k, s) in Subtest::ALL.iter().enumerate() {
        let count = transcripts.iter().filter(|t| t.question.subtest() == *s).count() as f64;
        let sigma = (expected[k] * (1.0 - expected[k]) / trials as f64).sqrt();
        assert!((count / trials as f64 - expected[k]).abs() <= 3.0 * sigma, "{s:?}");
    }
}

#[test]
fn pure_z_isometry_reads_out_zero() {
    let bob = BobObservables::honest(vec![0], 1).unwrap();
    let rho = q_register_density(&bob, &StateVector::basis(1, 0).unwrap()).unwrap();
    let z = sigma_z(&PauliMask::new(1, 1).unwrap()).unwrap();
    assert!((rho.try_mul(&z).unwrap().trace().re - 1.0).abs() < 1e-12);
}

#[test]
fn honest_energy_estimates_match_witness_energy() {
    let h = mixed_h();
    let (e0, ground) = h.ground_state().unwrap();
    let config = ProtocolConfig::new(2, -0.9, -0.5, Some(0.5), 0).unwrap();
    let r = soundness_report(&honest_verifier_prover(&Witness::Pure(ground)).unwrap(), &h, &config).unwrap();
    assert!((r.energy_estimate - e0).abs() < 1e-8);
    assert!((r.extracted.energy - e0).abs() < 1e-7);

    let mut rng = ChaCha20Rng::seed_from_u64(649);
    let rho = random_density(2, &mut rng).unwrap();
    let r = soundness_report(&honest_verifier_prover(&Witness::Mixed(rho.clone())).unwrap(), &h, &config).unwrap();
    assert!((r.extracted.energy - h.energy(&rho).unwrap()).abs() < 1e-7);
    // Honest statistics do not depend on the subtest, so the split is exact.
    assert!(r.phase_slack < 1e-9);
    assert!(r.check("phase_split").unwrap().passed);
}

#[test]
fn default_kappa_arithmetic() {
    let t = thm_main_parameters(-0.6, -0.5, None).unwrap();
    assert!((t.kappa - 1.5625e-4).abs() < 1e-15);
    assert!((t.gap - 1.953125e-6).abs() < 1e-15);
    assert!(!t.chain_closes);
    assert!(thm_main_parameters(-0.5, -0.5, None).is_err());
}

// Frozen values for the two-qubit mixed Hamiltonian (0.4 XX + 0.6 ZZ), κ = 0.5.
const FROZEN_HONEST_TOTAL: f64 = 0.963_388_347_648_318_4;
const FROZEN_ADVERSARY_TOTALS: [(&str, f64); 4] = [
    ("tilted-x-0.300", 0.949_703_901_889_202_4),
    ("z-only", 0.806_694_173_824_159_5),
    ("scrambled-17", 0.676_660_022_362_214_8),
    ("witness-reader", 0.656_25),
];

#[test]
fn frozen_protocol_values() {
    let h = mixed_h();
    let w = Witness::Pure(h.ground_state().unwrap().1);
    let config = ProtocolConfig::new(2, -0.9, -0.5, Some(0.5), 0).unwrap();
    let c = honest_completeness(&h, &w, &config).unwrap();
    let expected = 0.25 * (chsh_quantum_value() + 1.0) + 0.5;
    assert!((expected - FROZEN_HONEST_TOTAL).abs() < 1e-15);
    assert!((c.values.total - FROZEN_HONEST_TOTAL).abs() < 1e-12);
    for (p, (name, value)) in standard_adversaries(&w).unwrap().iter().zip(FROZEN_ADVERSARY_TOTALS) {
        let total = protocol_value_exact(p, &h, &config).unwrap().total;
        assert_eq!(p.id, name);
        assert!((total - value).abs() < 1e-12, "{name}: {total}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn questions_roundtrip_through_bits(n in 2usize..=4, a in any::<u64>(), b in any::<u64>(), x in any::<bool>()) {
        let m = (1u64 << n) - 1;
        let (a, b) = (PauliMask::new(n, a & m).unwrap(), PauliMask::new(n, b & m).unwrap());
        let mut qs = vec![AliceQuestion::Teleport];
        if a.dot(&b) {
            qs.push(AliceQuestion::chsh(a, b, x).unwrap());
        } else {
            qs.push(AliceQuestion::commutation(a, b).unwrap());
        }
        for q in qs {
            let bits: Bits = q.to_bits(n).unwrap();
            prop_assert_eq!(AliceQuestion::from_bits(n, &bits).unwrap(), q);
        }
    }

    #[test]
    fn hamiltonian_energies_lie_in_unit_interval(seed in any::<u64>(), n in 2usize..=3, terms in 2usize..6) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let h = XxzzHamiltonian::random(n, terms, &mut rng).unwrap();
        let rho = random_density(n, &mut rng).unwrap();
        let e = h.energy(&rho).unwrap();
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&e));
        prop_assert_eq!(XxzzHamiltonian::from_json(&h.to_json().unwrap()).unwrap(), h);
    }

    #[test]
    fn honest_teleport_acceptance_is_affine_in_energy(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let h = XxzzHamiltonian::random(2, 3, &mut rng).unwrap();
        let rho = random_density(2, &mut rng).unwrap();
        let prover = honest_verifier_prover(&Witness::Mixed(rho.clone())).unwrap();
        let dists = QuestionDistributions::build(&h).unwrap();
        let t = subtest_acceptance(&prover, &h, &dists, Subtest::Teleport).unwrap();
        prop_assert!((t - (0.75 - 0.25 * h.energy(&rho).unwrap())).abs() < 1e-10);
    }
}
