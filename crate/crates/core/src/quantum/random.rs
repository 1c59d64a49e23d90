//! Seeded sampling of random unitaries, states and observables.

use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{c, check_dim, ComplexMatrix, C64};
use super::state::StateVector;
use crate::error::Result;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    c(a, b) / 2f64.sqrt()
}

/// Haar-random unitary via Gram-Schmidt on a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|x| x / norm).collect());
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |r, k| cols[k][r]))
}

/// Haar-random pure state on `n` qubits.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector> {
    let dim = 1usize << n;
    check_dim(dim)?;
    StateVector::from_unnormalized((0..dim).map(|_| gaussian(rng)).collect())
}

/// `U diag(±1) U†` with random signs, excluding the two trivial spectra
/// when `dim > 1`.
pub fn random_binary_observable<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let u = random_unitary(dim, rng)?;
    let mut signs: Vec<f64> = (0..dim).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    if dim > 1 && signs.iter().all(|&s| s == signs[0]) {
        signs[0] = -signs[0];
    }
    let d = ComplexMatrix::real_diagonal(&signs);
    Ok(&(&u * &d) * &u.adjoint())
}

/// Random density matrix `G G† / tr(G G†)` of full rank.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let dim = 1usize << n;
    check_dim(dim)?;
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    Ok(m.scale_real(1.0 / t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::matrix::TOLERANCE;
    use crate::quantum::state::is_density_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn sampled_objects_are_valid() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for dim in [2, 4, 8] {
            assert!(random_unitary(dim, &mut rng).unwrap().is_unitary(TOLERANCE));
            assert!(random_binary_observable(dim, &mut rng).unwrap().is_binary_observable(TOLERANCE));
        }
        assert!(is_density_matrix(&random_density(2, &mut rng).unwrap(), TOLERANCE));
        assert!((random_state(3, &mut rng).unwrap().norm_sqr() - 1.0).abs() < TOLERANCE);
    }
}
