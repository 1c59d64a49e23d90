//! Seeded batch audit of the block encodings and the spectral oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::block_encoding::{
    commutator_block_encoding, shifted_block_encoding, squared_block_encoding, sum_block_encoding, BlockEncoding,
};
use super::report::Check;
use super::spectral::spectral_measure;
use crate::error::Result;
use crate::quantum::random::{random_binary_observable, random_density};
use crate::quantum::ComplexMatrix;

const AUDIT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodingRecord {
    pub case: usize,
    pub kind: String,
    pub ancillas: usize,
    pub scale: f64,
    pub unitarity_error: f64,
    pub block_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftedRecord {
    pub case: usize,
    pub norm_bound: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub unitarity_error: f64,
    pub block_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralRecord {
    pub case: usize,
    pub mean: f64,
    pub expected: f64,
    pub total_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockEncodingAudit {
    pub seed: u64,
    pub qubits: usize,
    pub encodings: Vec<EncodingRecord>,
    pub shifted: Vec<ShiftedRecord>,
    pub spectral: Vec<SpectralRecord>,
    pub checks: Vec<Check>,
}

impl BlockEncodingAudit {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn record(case: usize, kind: &str, be: &BlockEncoding) -> EncodingRecord {
    EncodingRecord {
        case,
        kind: kind.into(),
        ancillas: be.ancillas,
        scale: be.scale,
        unitarity_error: be.unitarity_error(),
        block_error: be.block_error(),
    }
}

/// Builds every encoding for `pairs` random observable pairs on `qubits`
/// qubits, a shifted encoding of `B0 ± B1` for each, and compares the
/// spectral oracle's mean with `tr[Bρ]` on `spectral_cases` random inputs.
pub fn block_encoding_audit(pairs: usize, spectral_cases: usize, qubits: usize, seed: u64) -> Result<BlockEncodingAudit> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let dim = 1usize << qubits;
    let mut encodings = Vec::new();
    let mut shifted = Vec::new();
    for case in 0..pairs {
        let b0 = random_binary_observable(dim, &mut rng)?;
        let b1 = random_binary_observable(dim, &mut rng)?;
        for (sign, tag) in [(1.0, "plus"), (-1.0, "minus")] {
            let sum = sum_block_encoding(&b0, &b1, sign)?;
            encodings.push(record(case, &format!("sum_{tag}"), &sum));
            encodings.push(record(case, &format!("squared_{tag}"), &squared_block_encoding(&b0, &b1, sign)?));
            encodings.push(record(case, &format!("commutator_{tag}"), &commutator_block_encoding(&b0, &b1, sign)?));
            let r = sum.target.operator_norm().max(1e-3);
            let sh = shifted_block_encoding(&sum, r)?;
            let eig = sh.target.hermitian_eigen()?.values;
            shifted.push(ShiftedRecord {
                case,
                norm_bound: r,
                min_eigenvalue: eig.iter().cloned().fold(f64::INFINITY, f64::min),
                max_eigenvalue: eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                unitarity_error: sh.unitarity_error(),
                block_error: sh.block_error(),
            });
        }
    }
    let mut spectral = Vec::new();
    for case in 0..spectral_cases {
        let b0 = random_binary_observable(dim, &mut rng)?;
        let b1 = random_binary_observable(dim, &mut rng)?;
        let b: ComplexMatrix = (&b0 + &b1).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let rho = random_density(qubits, &mut rng)?;
        let dist = spectral_measure(&b, &rho, 1e-3)?;
        spectral.push(SpectralRecord {
            case,
            mean: dist.mean(),
            expected: b.try_mul(&rho)?.trace().re,
            total_probability: dist.total_probability(),
        });
    }

    let max = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    let checks = vec![
        Check::at_most("unitarity", max(&mut encodings.iter().map(|e| e.unitarity_error)), AUDIT_TOL),
        Check::at_most("encoded_block", max(&mut encodings.iter().map(|e| e.block_error)), AUDIT_TOL),
        Check::at_most(
            "shifted_encoding",
            max(&mut shifted.iter().map(|s| s.unitarity_error.max(s.block_error))),
            AUDIT_TOL,
        ),
        Check::at_most(
            "shifted_spectrum",
            max(&mut shifted.iter().map(|s| (0.5 - s.min_eigenvalue).max(s.max_eigenvalue - 5.0 / 6.0))),
            AUDIT_TOL,
        ),
        Check::at_most("spectral_mean", max(&mut spectral.iter().map(|s| (s.mean - s.expected).abs())), AUDIT_TOL),
    ];
    Ok(BlockEncodingAudit { seed, qubits, encodings, shifted, spectral, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_audit_passes() {
        let a = block_encoding_audit(2, 3, 1, 11).unwrap();
        assert_eq!(a.encodings.len(), 12);
        assert!(a.all_passed(), "{:?}", a.checks);
    }
}
