use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use cnl_core::quantum::random::{random_binary_observable, random_density, random_state, random_unitary};
use cnl_core::quantum::{
    epr_state, is_density_matrix, partial_trace, sigma_x, sigma_z, state_norm_sq, BinaryObservable, ComplexMatrix,
    KrausFamily, PauliMask, StateVector,
};
use cnl_core::Bits;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Kronecker product of single-qubit factors, qubit 0 leftmost.
fn kron_all(factors: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    factors.iter().fold(DMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

fn oracle_pauli(n: usize, bits: u64, x: bool) -> DMatrix<Complex64> {
    let id = DMatrix::<Complex64>::identity(2, 2);
    let p = if x {
        DMatrix::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)])
    } else {
        DMatrix::from_row_slice(2, 2, &[cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(-1.0, 0.0)])
    };
    let factors: Vec<_> = (0..n).map(|i| if (bits >> (n - 1 - i)) & 1 == 1 { p.clone() } else { id.clone() }).collect();
    kron_all(&factors)
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn pauli_masks_match_tensor_products() {
    for n in 1..=3 {
        for bits in 0..(1u64 << n) {
            let m = PauliMask::new(n, bits).unwrap();
            assert!(max_diff(sigma_z(&m).unwrap().inner(), &oracle_pauli(n, bits, false)) < 1e-15);
            assert!(max_diff(sigma_x(&m).unwrap().inner(), &oracle_pauli(n, bits, true)) < 1e-15);
        }
    }
}

#[test]
fn full_weight_masks_anticommute_with_zero_trace() {
    let a = PauliMask::new(2, 0b11).unwrap();
    let z = sigma_z(&a).unwrap();
    let x = sigma_x(&a).unwrap();
    assert!((&z * &x).trace().norm() < 1e-15);
    // Weight two overlap: the pair commutes, so the anticommutator is 2 Z X.
    assert!(z.anticommutator(&x).approx_eq(&(&z * &x).scale_real(2.0), 1e-15));
    let a1 = PauliMask::new(2, 0b10).unwrap();
    assert!(sigma_z(&a1).unwrap().anticommutator(&sigma_x(&a1).unwrap()).max_abs() < 1e-15);
}

#[test]
fn epr_pairs_are_perfectly_correlated() {
    let phi = epr_state(2).unwrap();
    for bits in 0..4 {
        let a = PauliMask::new(2, bits).unwrap();
        let zz = sigma_z(&a).unwrap().kron(&sigma_z(&a).unwrap()).unwrap();
        let xx = sigma_x(&a).unwrap().kron(&sigma_x(&a).unwrap()).unwrap();
        assert!((phi.expectation(&zz).unwrap().re - 1.0).abs() < 1e-12);
        assert!((phi.expectation(&xx).unwrap().re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn diagonal_basis_on_epr_half_has_uniform_marginals() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let b = ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).unwrap();
    let pvm = BinaryObservable::new(b).unwrap().to_pvm();
    let phi = epr_state(1).unwrap();
    for br in pvm.extended(2, true).unwrap().branches(&phi).unwrap() {
        assert!((br.probability - 0.5).abs() < 1e-12);
    }
}

#[test]
fn cauchy_schwarz_on_random_pairs() {
    let mut rng = ChaCha20Rng::seed_from_u64(50);
    for _ in 0..50 {
        let psi = random_state(2, &mut rng).unwrap();
        let g = |rng: &mut ChaCha20Rng| {
            let u = random_unitary(4, rng).unwrap();
            let d = ComplexMatrix::real_diagonal(&[1.5, -0.2, 0.7, 0.0]);
            &(&u * &d) * &random_unitary(4, rng).unwrap()
        };
        let (a, b) = (g(&mut rng), g(&mut rng));
        let lhs = psi.expectation(&(&a.adjoint() * &b)).unwrap().norm();
        let rhs = (state_norm_sq(&a, &psi).unwrap() * state_norm_sq(&b, &psi).unwrap()).sqrt();
        assert!(lhs <= rhs + 1e-12);
    }
}

#[test]
fn gram_matrices_are_positive() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for _ in 0..10 {
        let a = &random_unitary(4, &mut rng).unwrap() * &ComplexMatrix::real_diagonal(&[2.0, 1.0, 0.0, -3.0]);
        let min = a.abs_sq().hermitian_eigen().unwrap().values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn z_and_x_masks_commute_up_to_overlap_sign(n in 1usize..=4, a in any::<u64>(), b in any::<u64>()) {
        let mask = (1u64 << n) - 1;
        let (a, b) = (PauliMask::new(n, a & mask).unwrap(), PauliMask::new(n, b & mask).unwrap());
        let z = sigma_z(&a).unwrap();
        let x = sigma_x(&b).unwrap();
        let sign = if a.dot(&b) { -1.0 } else { 1.0 };
        prop_assert!((&z * &x).approx_eq(&(&x * &z).scale_real(sign), 1e-14));
    }

    #[test]
    fn partial_trace_keeps_a_density_matrix(seed in any::<u64>(), keep in 0usize..3) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let rho = random_density(3, &mut rng).unwrap();
        let reduced = partial_trace(&rho, &[keep]).unwrap();
        prop_assert!(is_density_matrix(&reduced, 1e-10));
    }

    #[test]
    fn reduced_density_matches_partial_trace(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let psi = random_state(3, &mut rng).unwrap();
        let direct = psi.reduced_density(&[2, 0]).unwrap();
        let traced = partial_trace(&psi.density(), &[2, 0]).unwrap();
        prop_assert!(direct.approx_eq(&traced, 1e-12));
    }

    #[test]
    fn instrument_branches_sum_to_one(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let b = random_binary_observable(4, &mut rng).unwrap();
        let obs = BinaryObservable::new(b).unwrap();
        let pvm = [
            (Bits::new(1, 0).unwrap(), obs.projector(0)),
            (Bits::new(1, 1).unwrap(), obs.projector(1)),
        ];
        let unitaries = [random_unitary(4, &mut rng).unwrap(), random_unitary(4, &mut rng).unwrap()];
        let fam = KrausFamily::from_pvm_with_unitaries(&pvm, &unitaries).unwrap();
        prop_assert!(fam.completeness_defect() < 1e-10);
        let psi = random_state(2, &mut rng).unwrap();
        let total: f64 = fam.branches(&psi).unwrap().iter().map(|br| br.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn basis_states_are_normalized(n in 0usize..6, k in any::<usize>()) {
        let psi = StateVector::basis(n, k % (1 << n)).unwrap();
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-15);
    }
}
