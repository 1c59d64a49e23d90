//! Dense complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default numerical tolerance for equality checks.
pub const TOLERANCE: f64 = 1e-10;

/// Largest supported register, in qubits.
pub const MAX_QUBITS: usize = 12;

pub const MAX_DIM: usize = 1 << MAX_QUBITS;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Number of qubits for a power-of-two dimension.
pub fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim > MAX_DIM {
        return Err(Error::ResourceLimit(format!(
            "dimension {dim} exceeds 2^{MAX_QUBITS}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row-major complex entries.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[C64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, data)))
    }

    /// Builds a matrix from row-major real entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        let v: Vec<C64> = data.iter().map(|&x| re(x)).collect();
        Self::from_row_slice(rows, cols, &v)
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn real_diagonal(entries: &[f64]) -> Self {
        let v: Vec<C64> = entries.iter().map(|&x| re(x)).collect();
        Self::diagonal(&v)
    }

    /// Rank-one operator `|u><v|`.
    pub fn outer(u: &DVector<C64>, v: &DVector<C64>) -> Self {
        Self(u * v.adjoint())
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Dimension of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.0[(r, c)] = v;
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(re(s))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch { expected: self.cols(), found: other.rows() });
        }
        Ok(self * other)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self - other)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows() != other.rows() {
            return Err(Error::DimensionMismatch { expected: self.rows(), found: other.rows() });
        }
        if self.cols() != other.cols() {
            return Err(Error::DimensionMismatch { expected: self.cols(), found: other.cols() });
        }
        Ok(())
    }

    /// Kronecker product `self ⊗ other`, with `self` on the leading qubits.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        check_dim(self.rows() * other.rows())?;
        check_dim(self.cols() * other.cols())?;
        Ok(Self(self.0.kronecker(&other.0)))
    }

    pub fn matvec(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        if self.cols() != v.len() {
            return Err(Error::DimensionMismatch { expected: self.cols(), found: v.len() });
        }
        Ok(&self.0 * v)
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `A B + B A`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// `A† A`.
    pub fn abs_sq(&self) -> Self {
        Self(self.0.adjoint() * &self.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.rows(), other.rows());
        assert_eq!(self.cols(), other.cols());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows() == other.rows() && self.cols() == other.cols() && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.abs_sq().approx_eq(&Self::identity(self.rows()), tol)
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && (self * self).approx_eq(self, tol)
    }

    /// Hermitian unitary, i.e. a ±1-valued observable.
    pub fn is_binary_observable(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && (self * self).approx_eq(&Self::identity(self.rows()), tol)
    }

    /// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
    pub fn hermitian_eigen(&self) -> Result<HermitianEigen> {
        if !self.is_square() {
            return Err(Error::InvalidOperator("eigen-decomposition of a non-square matrix".into()));
        }
        let scale = self.max_abs().max(1.0);
        if !self.is_hermitian(1e-9 * scale) {
            return Err(Error::InvalidOperator("matrix is not Hermitian".into()));
        }
        // Symmetrise to remove rounding noise before decomposing.
        let sym = (&self.0 + self.0.adjoint()) * re(0.5);
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let n = self.rows();
        let vectors = DMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
        Ok(HermitianEigen { values, vectors: Self(vectors) })
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let eig = self
            .abs_sq()
            .hermitian_eigen()
            .expect("A†A is Hermitian by construction");
        eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    /// Applies `f` to the spectrum of a Hermitian matrix.
    pub fn hermitian_function(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let eig = self.hermitian_eigen()?;
        let v = &eig.vectors.0;
        let d: Vec<C64> = eig.values.iter().map(|&x| re(f(x))).collect();
        let dm = DMatrix::from_diagonal(&DVector::from_column_slice(&d));
        Ok(Self(v * dm * v.adjoint()))
    }

    /// Square root of a positive semidefinite matrix.
    pub fn psd_sqrt(&self) -> Result<Self> {
        self.hermitian_function(|x| x.max(0.0).sqrt())
    }

    /// `|A| = sqrt(A† A)`.
    pub fn abs(&self) -> Result<Self> {
        self.abs_sq().psd_sqrt()
    }

    /// Sub-block with the given row and column offsets.
    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        Self(self.0.view((row, col), (rows, cols)).into_owned())
    }

    /// Direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (r1, c1) = (self.rows(), self.cols());
        let mut m = DMatrix::zeros(r1 + other.rows(), c1 + other.cols());
        m.view_mut((0, 0), (r1, c1)).copy_from(&self.0);
        m.view_mut((r1, c1), (other.rows(), other.cols())).copy_from(&other.0);
        Self(m)
    }

    /// Entries of the matrix in row-major order.
    pub fn row_major(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                v.push(self.0[(r, c)]);
            }
        }
        v
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Sum of a non-empty sequence of equally sized matrices.
pub fn sum_matrices<'a>(dim: usize, ms: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for m in ms {
        acc = &acc + m;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn kron_puts_left_factor_on_leading_qubit() {
        let zi = pauli_z().kron(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(zi.get(0, 0), re(1.0));
        assert_eq!(zi.get(1, 1), re(1.0));
        assert_eq!(zi.get(2, 2), re(-1.0));
    }

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let m = pauli_x().scale_real(2.0);
        let e = m.hermitian_eigen().unwrap();
        assert!((e.values[0] + 2.0).abs() < TOLERANCE);
        assert!((e.values[1] - 2.0).abs() < TOLERANCE);
        let back = m.hermitian_function(|x| x).unwrap();
        assert!(back.approx_eq(&m, TOLERANCE));
    }

    #[test]
    fn rejects_non_hermitian_eigen() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(m.hermitian_eigen().is_err());
    }

    #[test]
    fn commutator_of_paulis() {
        let comm = pauli_z().commutator(&pauli_x());
        // [Z, X] = 2iY
        assert!((comm.get(0, 1) - c(2.0, 0.0)).norm() < TOLERANCE);
        assert!(pauli_z().anticommutator(&pauli_x()).max_abs() < TOLERANCE);
    }

    #[test]
    fn operator_norm_of_scaled_unitary() {
        assert!((pauli_x().scale_real(3.0).operator_norm() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn checked_mul_reports_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.try_mul(&a), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn kron_beyond_limit_is_rejected() {
        let a = ComplexMatrix::identity(1 << 7);
        assert!(matches!(a.kron(&a), Err(Error::ResourceLimit(_))));
    }
}
