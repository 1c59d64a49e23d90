//! Pauli masks and tensor-product Pauli operators.

use serde::{Deserialize, Serialize};
use std::fmt;

use super::matrix::{check_dim, re, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// A subset of `n` qubits, encoded with qubit 0 as the most significant bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliMask {
    n: usize,
    bits: u64,
}

impl PauliMask {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n > 32 {
            return Err(Error::ResourceLimit(format!("{n}-qubit mask")));
        }
        if bits >> n != 0 {
            return Err(Error::InvalidArgument(format!("mask {bits:#b} exceeds {n} qubits")));
        }
        Ok(Self { n, bits })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, bits: 0 }
    }

    /// The mask with only qubit `i` set.
    pub fn unit(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::InvalidArgument(format!("qubit {i} out of range for {n} qubits")));
        }
        Self::new(n, 1 << (n - 1 - i))
    }

    /// Mask with qubits `i` and `j` set (`e_i + e_j`).
    pub fn pair(n: usize, i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::InvalidArgument(format!("pair mask needs distinct qubits, got {i}")));
        }
        Ok(Self::unit(n, i)?.xor(&Self::unit(n, j)?))
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let mut v = 0u64;
        for &b in bits {
            v = (v << 1) | u64::from(b);
        }
        Self::new(bits.len(), v)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        (self.bits >> (self.n - 1 - i)) & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Binary inner product `a·b mod 2`.
    pub fn dot(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n, other.n);
        (self.bits & other.bits).count_ones() % 2 == 1
    }

    pub fn xor(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self { n: self.n, bits: self.bits ^ other.bits }
    }

    /// Every mask on `n` qubits, in increasing order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliMask> {
        (0..(1u64 << n)).map(move |bits| PauliMask { n, bits })
    }

    /// Indices of the set qubits.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.get(i)).collect()
    }
}

impl fmt::Display for PauliMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// `σ_Z(a) = ⊗_i Z^{a_i}`.
pub fn sigma_z(mask: &PauliMask) -> Result<ComplexMatrix> {
    let dim = 1usize << mask.n;
    check_dim(dim)?;
    let d: Vec<f64> = (0..dim)
        .map(|k| if (k as u64 & mask.bits).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    Ok(ComplexMatrix::real_diagonal(&d))
}

/// `σ_X(b) = ⊗_i X^{b_i}`.
pub fn sigma_x(mask: &PauliMask) -> Result<ComplexMatrix> {
    let dim = 1usize << mask.n;
    check_dim(dim)?;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for k in 0..dim {
        m.set(k ^ mask.bits as usize, k, re(1.0));
    }
    Ok(m)
}

/// `σ_X(b) σ_Z(a)`, i.e. a Pauli with X part `b` and Z part `a`.
pub fn sigma_xz(x_part: &PauliMask, z_part: &PauliMask) -> Result<ComplexMatrix> {
    Ok(&sigma_x(x_part)? * &sigma_z(z_part)?)
}

pub fn hadamard() -> ComplexMatrix {
    let s = 1.0 / 2f64.sqrt();
    ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).expect("2x2")
}

/// `H^{⊗n}`.
pub fn hadamard_all(n: usize) -> Result<ComplexMatrix> {
    let dim = 1usize << n;
    check_dim(dim)?;
    let s = 1.0 / (dim as f64).sqrt();
    Ok(ComplexMatrix::from_fn(dim, dim, |r, c| {
        if (r & c).count_ones() % 2 == 0 {
            re(s)
        } else {
            re(-s)
        }
    }))
}

pub fn pauli_i() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn pauli_y() -> ComplexMatrix {
    let z = C64::new(0.0, 0.0);
    ComplexMatrix::from_row_slice(2, 2, &[z, C64::new(0.0, -1.0), C64::new(0.0, 1.0), z]).expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2")
}
