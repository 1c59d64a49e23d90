use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use cnl_core::certificates::provers::{constant_chsh, honest_chsh, leaking_chsh};
use cnl_core::compiler::{read_transcripts_jsonl, write_transcripts_jsonl, CompiledProtocol, DEFAULT_LAMBDA};
use cnl_core::games::{
    canonical_chsh_strategy, canonical_commutation_strategy, chsh_correlators, classical_value_bruteforce,
    constant_strategy, quantum_value_exact, NonlocalGame,
};
use cnl_core::qhe::{correctness_audit, AliceCircuit, IdealQhe};
use cnl_core::quantum::random::random_state;
use cnl_core::quantum::{epr_state, StateVector};
use cnl_core::verifier::{question_bits, AliceQuestion, HonestAlice};
use cnl_core::Bits;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn protocol(game: NonlocalGame) -> CompiledProtocol {
    CompiledProtocol::compile(game, Arc::new(IdealQhe::new(DEFAULT_LAMBDA).unwrap())).unwrap()
}

/// CHSH value of `|Φ+>` with Alice `Z, X` and Bob `(Z ± X)/√2`, from
/// explicit 4×4 matrices.
fn chsh_oracle() -> f64 {
    let z = DMatrix::from_row_slice(2, 2, &[cx(1.0), cx(0.0), cx(0.0), cx(-1.0)]);
    let x = DMatrix::from_row_slice(2, 2, &[cx(0.0), cx(1.0), cx(1.0), cx(0.0)]);
    let alice = [z.clone(), x.clone()];
    let bob = [(&z + &x) * cx(FRAC_1_SQRT_2), (&z - &x) * cx(FRAC_1_SQRT_2)];
    let phi = DVector::from_vec(vec![cx(FRAC_1_SQRT_2), cx(0.0), cx(0.0), cx(FRAC_1_SQRT_2)]);
    let mut total = 0.5;
    for (xq, a) in alice.iter().enumerate() {
        for (yq, b) in bob.iter().enumerate() {
            let corr = (phi.adjoint() * a.kronecker(b) * &phi)[(0, 0)].re;
            total += if xq & yq == 1 { -corr } else { corr } / 8.0;
        }
    }
    total
}

#[test]
fn chsh_values_agree_with_oracles() {
    let oracle = chsh_oracle();
    assert!((oracle - FRAC_PI_8.cos().powi(2)).abs() < 1e-12);
    let q = quantum_value_exact(&NonlocalGame::chsh(), &canonical_chsh_strategy()).unwrap();
    let compiled = protocol(NonlocalGame::chsh()).compiled_value_exact(&honest_chsh().unwrap()).unwrap();
    assert!((q - oracle).abs() < 1e-12);
    assert!((compiled - oracle).abs() < 1e-12);
}

#[test]
fn canonical_correlators() {
    let c = chsh_correlators(&canonical_chsh_strategy()).unwrap();
    for (x, row) in c.iter().enumerate() {
        for (y, v) in row.iter().enumerate() {
            let sign = if x & y == 1 { -1.0 } else { 1.0 };
            assert!((v - sign * FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }
}

#[test]
fn classical_chsh_by_hand() {
    let mut best: f64 = 0.0;
    for alice in 0..4u64 {
        for bob in 0..4u64 {
            let wins = (0..4u64)
                .filter(|&q| {
                    let (x, y) = (q >> 1, q & 1);
                    let a = (alice >> x) & 1;
                    let b = (bob >> y) & 1;
                    (a ^ b) == (x & y)
                })
                .count();
            best = best.max(wins as f64 / 4.0);
        }
    }
    assert_eq!(best, 0.75);
    assert_eq!(classical_value_bruteforce(&NonlocalGame::chsh()).unwrap(), best);
    assert_eq!(classical_value_bruteforce(&NonlocalGame::commutation()).unwrap(), 1.0);
}

#[test]
fn commutation_game_is_won_by_canonical_strategy() {
    let v = quantum_value_exact(&NonlocalGame::commutation(), &canonical_commutation_strategy()).unwrap();
    assert!((v - 1.0).abs() < 1e-12);
    let zero = constant_strategy(&NonlocalGame::commutation(), 0, 0).unwrap();
    assert_eq!(quantum_value_exact(&NonlocalGame::commutation(), &zero).unwrap(), 1.0);
}

#[test]
fn constant_and_reading_provers() {
    let p = protocol(NonlocalGame::chsh());
    assert_eq!(p.compiled_value_exact(&constant_chsh().unwrap()).unwrap(), 0.75);
    assert!((p.compiled_value_exact(&leaking_chsh(1.0).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    assert!((p.compiled_value_exact(&leaking_chsh(0.6).unwrap()).unwrap() - 0.8).abs() < 1e-12);
}

#[test]
fn honest_first_round_splits_evenly() {
    let prover = honest_chsh().unwrap();
    for x in 0..2 {
        let branches = prover.branches(&Bits::new(1, x).unwrap()).unwrap();
        assert_eq!(branches.len(), 2);
        for b in branches {
            assert!((b.probability - 0.5).abs() < 1e-12);
        }
    }
}

#[test]
fn decrypted_observable_correlates_with_bob() {
    let prover = honest_chsh().unwrap();
    let a0 = prover.decrypted_observable(&Bits::new(1, 0).unwrap()).unwrap();
    let s = canonical_chsh_strategy();
    let b0 = cnl_core::quantum::measurement::pvm_observable(&s.bob[0]);
    let joint = a0.try_mul(&cnl_core::quantum::ComplexMatrix::identity(2).kron(&b0).unwrap()).unwrap();
    assert!((prover.state.expectation(&joint).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-12);
}

#[test]
fn monte_carlo_tracks_exact_value() {
    let p = protocol(NonlocalGame::chsh());
    let mc = p.monte_carlo(&honest_chsh().unwrap(), 100_000, 320).unwrap();
    assert!(mc.within_three_sigma, "{mc:?}");
    assert!((mc.exact - FRAC_PI_8.cos().powi(2)).abs() < 1e-12);
}

#[test]
fn transcripts_roundtrip_and_replay() {
    let p = protocol(NonlocalGame::chsh());
    let prover = honest_chsh().unwrap();
    let a = p.run_rounds(&prover, 200, 9).unwrap();
    // Key ids come from the scheme's key table, so replay on a fresh scheme.
    let b = protocol(NonlocalGame::chsh()).run_rounds(&prover, 200, 9).unwrap();
    assert_eq!(a, b);
    let mut buf = Vec::new();
    write_transcripts_jsonl(&a, &mut buf).unwrap();
    let back = read_transcripts_jsonl(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(a, back);
    for t in &a {
        assert_eq!(t.accepted, (t.a ^ t.b) == (t.x & t.y));
    }
}

#[test]
fn homomorphic_alice_matches_clear_evaluation() {
    let scheme = IdealQhe::new(DEFAULT_LAMBDA).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(235);
    let s = canonical_chsh_strategy();
    let circuit = Arc::new(AliceCircuit::new(s.alice.clone(), 1, 1).unwrap());
    for x in 0..2 {
        let r = correctness_audit(&scheme, circuit.clone(), &epr_state(1).unwrap(), &[0], &Bits::new(1, x).unwrap(), &mut rng)
            .unwrap();
        assert!(r.trace_distance < 1e-10);
    }
}

#[test]
fn homomorphic_teleport_matches_clear_evaluation() {
    let scheme = IdealQhe::new(DEFAULT_LAMBDA).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(244);
    // Alice half of one EPR pair and a one-qubit witness; Bob's half is the auxiliary register.
    let epr = epr_state(1).unwrap();
    let witness = random_state(1, &mut rng).unwrap();
    let psi = epr.kron(&witness).unwrap();
    let alice = Arc::new(HonestAlice::new(1, vec![0], vec![1], 2).unwrap());
    let q = AliceQuestion::Teleport.to_bits(1).unwrap();
    assert_eq!(q.len(), question_bits(1));
    let r = correctness_audit(&scheme, alice, &psi, &[0, 2], &q, &mut rng).unwrap();
    assert!(r.trace_distance < 1e-10);
    assert_eq!(r.ideal.blocks.len(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encryption_roundtrips(len in 1usize..=64, value in any::<u64>(), seed in any::<u64>()) {
        let scheme = IdealQhe::new(DEFAULT_LAMBDA).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let m = Bits::new(len, if len == 64 { value } else { value & ((1 << len) - 1) }).unwrap();
        let sk = scheme.gen(&mut rng);
        let c = scheme.enc(&sk, &m, &mut rng).unwrap();
        prop_assert_eq!(scheme.dec(&sk, &c).unwrap(), m);
        prop_assert_eq!(scheme.peek(&c).unwrap(), m);
    }

    #[test]
    fn compiled_value_equals_quantum_value(seed in any::<u64>()) {
        // Honest compilation of any strategy on a random shared state keeps its value.
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut s = canonical_chsh_strategy();
        s.state = random_state(2, &mut rng).unwrap();
        let q = quantum_value_exact(&NonlocalGame::chsh(), &s).unwrap();
        let prover = cnl_core::compiler::honest_compiled_prover(&s, 1, 1).unwrap();
        let c = protocol(NonlocalGame::chsh()).compiled_value_exact(&prover).unwrap();
        prop_assert!((q - c).abs() < 1e-10);
        prop_assert!(q <= FRAC_PI_8.cos().powi(2) + 1e-12);
    }

    #[test]
    fn games_roundtrip_through_json(k in 0usize..2) {
        let g = [NonlocalGame::chsh(), NonlocalGame::commutation()][k].clone();
        prop_assert_eq!(NonlocalGame::from_json(&g.to_json().unwrap()).unwrap(), g);
    }
}

#[test]
fn basis_state_strategy_is_classical() {
    let mut s = canonical_chsh_strategy();
    s.state = StateVector::basis(2, 0).unwrap();
    assert!(quantum_value_exact(&NonlocalGame::chsh(), &s).unwrap() <= 0.75 + 1e-12);
}
