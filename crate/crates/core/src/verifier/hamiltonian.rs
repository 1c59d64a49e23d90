//! Two-local Hamiltonians built from `XX` and `ZZ` parity terms.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::pauli::{sigma_x, sigma_z};
use crate::quantum::{ComplexMatrix, PauliMask, StateVector, MAX_QUBITS};

/// Weights must sum to one within this tolerance.
pub const WEIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliBasis {
    X,
    Z,
}

impl PauliBasis {
    pub fn operator(self, mask: &PauliMask) -> Result<ComplexMatrix> {
        match self {
            PauliBasis::X => sigma_x(mask),
            PauliBasis::Z => sigma_z(mask),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerm {
    pub w: PauliBasis,
    pub i: usize,
    pub j: usize,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XxzzHamiltonian {
    pub n: usize,
    pub terms: Vec<HamiltonianTerm>,
}

#[derive(Deserialize)]
struct RawHamiltonian {
    n: usize,
    terms: Vec<HamiltonianTerm>,
}

impl<'de> Deserialize<'de> for XxzzHamiltonian {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawHamiltonian::deserialize(d)?;
        Self::new(raw.n, raw.terms).map_err(serde::de::Error::custom)
    }
}

impl XxzzHamiltonian {
    pub fn new(n: usize, terms: Vec<HamiltonianTerm>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("two-local terms need n ≥ 2, got {n}")));
        }
        if n > MAX_QUBITS {
            return Err(Error::ResourceLimit(format!("{n}-qubit Hamiltonian")));
        }
        if terms.is_empty() {
            return Err(Error::InvalidArgument("Hamiltonian has no terms".into()));
        }
        for t in &terms {
            if t.i >= n || t.j >= n || t.i == t.j {
                return Err(Error::InvalidArgument(format!("bad term indices ({}, {}) for n = {n}", t.i, t.j)));
            }
            if !(t.p >= 0.0) || !t.p.is_finite() {
                return Err(Error::InvalidArgument(format!("negative or non-finite weight {}", t.p)));
            }
        }
        let total: f64 = terms.iter().map(|t| t.p).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidArgument(format!("term weights sum to {total}, expected 1")));
        }
        Ok(Self { n, terms })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Random weights on randomly chosen pairs, with at least one term of
    /// each basis.
    pub fn random<R: Rng + ?Sized>(n: usize, num_terms: usize, rng: &mut R) -> Result<Self> {
        if num_terms < 2 {
            return Err(Error::InvalidArgument("need at least one X and one Z term".into()));
        }
        let mut terms = Vec::with_capacity(num_terms);
        let mut total = 0.0;
        for k in 0..num_terms {
            let w = match k {
                0 => PauliBasis::X,
                1 => PauliBasis::Z,
                _ if rng.random::<bool>() => PauliBasis::X,
                _ => PauliBasis::Z,
            };
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let p: f64 = rng.random::<f64>() + 0.05;
            total += p;
            terms.push(HamiltonianTerm { w, i, j, p });
        }
        for t in &mut terms {
            t.p /= total;
        }
        // Absorb rounding so the weights sum to one exactly enough.
        let drift: f64 = 1.0 - terms.iter().map(|t| t.p).sum::<f64>();
        terms[0].p += drift;
        Self::new(n, terms)
    }

    /// Total weight of the terms in basis `w`.
    pub fn weight(&self, w: PauliBasis) -> f64 {
        self.terms.iter().filter(|t| t.w == w).map(|t| t.p).sum()
    }

    pub fn term_mask(&self, t: &HamiltonianTerm) -> Result<PauliMask> {
        PauliMask::pair(self.n, t.i, t.j)
    }

    pub fn term_operator(&self, t: &HamiltonianTerm) -> Result<ComplexMatrix> {
        t.w.operator(&self.term_mask(t)?)
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let dim = 1usize << self.n;
        let mut h = ComplexMatrix::zeros(dim, dim);
        for t in &self.terms {
            h = &h + &self.term_operator(t)?.scale_real(t.p);
        }
        Ok(h)
    }

    /// Lowest eigenvalue and a corresponding eigenvector.
    pub fn ground_state(&self) -> Result<(f64, StateVector)> {
        let eig = self.matrix()?.hermitian_eigen()?;
        let dim = 1usize << self.n;
        let v: Vec<_> = (0..dim).map(|i| eig.vectors.get(i, 0)).collect();
        Ok((eig.values[0], StateVector::from_unnormalized(v)?))
    }

    /// `tr[H ρ]`.
    pub fn energy(&self, rho: &ComplexMatrix) -> Result<f64> {
        Ok(self.matrix()?.try_mul(rho)?.trace().re)
    }
}
