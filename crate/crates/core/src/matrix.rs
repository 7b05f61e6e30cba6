//! Dense complex square matrices and the numerical kernels the rest of the
//! crate is built on.
//!
//! Storage and the heavy lifting (LU, complex Schur, Hermitian eigensolver,
//! SVD) come from `nalgebra`. This module adds validation, deterministic
//! eigenvalue ordering, eigenvectors for general complex matrices, a Cholesky
//! that reports its failing pivot, and the matrix functions the Hermitization
//! code needs.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// `inverse` rejects `|det(A)| <= SINGULARITY_FLOOR * ||A||_F^n`.
pub const SINGULARITY_FLOOR: f64 = 1e-13;
/// Relative Frobenius defect `||A - A^†|| / ||A||` accepted as Hermitian.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
/// Largest eigenvector-matrix condition number accepted as diagonalizable.
pub const CONDITION_CEILING: f64 = 1e8;
/// Cholesky pivots and metric eigenvalues must exceed this times `||A||_F`.
pub const POSITIVITY_FLOOR: f64 = 1e-12;
/// Relative bound on `||A V - V diag(E)||_F / ||A||_F`.
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-10;

const SCHUR_MAX_ITER: usize = 10_000;

/// Square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix(DMatrix<C64>);

impl DenseMatrix {
    pub fn new(inner: DMatrix<C64>) -> Result<Self> {
        let (rows, cols) = inner.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        for j in 0..cols {
            for i in 0..rows {
                let z = inner[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(inner))
    }

    /// Row-major construction from complex rows.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.as_ref().len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.as_ref().len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i].as_ref()[j]))
    }

    /// Row-major construction from real rows.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self(DMatrix::zeros(n, n))
    }

    pub fn diagonal(values: &[C64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    pub fn real_diagonal(values: &[f64]) -> Result<Self> {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diagonal(&v)
    }

    /// Wraps a matrix produced by arithmetic on validated operands.
    pub(crate) fn wrap(inner: DMatrix<C64>) -> Self {
        debug_assert!(inner.is_square() && inner.nrows() > 0);
        Self(inner)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn as_inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn determinant(&self) -> C64 {
        self.0.clone().lu().determinant()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    /// `||A - A^†||_F / ||A||_F`, zero for the zero matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        (&self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
            / norm
    }

    /// `(A + A^†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `||A - B||_F / ||B||_F` (absolute when `B` is zero).
    pub fn relative_distance(&self, reference: &Self) -> f64 {
        let diff = (&self.0 - &reference.0)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let norm = reference.frobenius_norm();
        if norm == 0.0 {
            diff
        } else {
            diff / norm
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim(), "dimension mismatch");
        (self.as_inner() * DVector::from_column_slice(v))
            .iter()
            .copied()
            .collect()
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect >= HERMITICITY_TOLERANCE {
            return Err(Error::NotHermitian { defect });
        }
        Ok(())
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<'a> Mul<&'a DenseMatrix> for &'a DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: &'a DenseMatrix) -> DenseMatrix {
        DenseMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a DenseMatrix> for &'a DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &'a DenseMatrix) -> DenseMatrix {
        DenseMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a DenseMatrix> for &'a DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &'a DenseMatrix) -> DenseMatrix {
        DenseMatrix(&self.0 - &rhs.0)
    }
}

/// Eigenvalues with the matching right eigenvectors as unit-norm columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<C64>,
    pub right_vectors: DenseMatrix,
    /// 2-norm condition number of `right_vectors`.
    pub condition: f64,
}

impl EigenSystem {
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn max_imaginary(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

pub fn adjoint(a: &DenseMatrix) -> DenseMatrix {
    a.adjoint()
}

pub fn inverse(a: &DenseMatrix) -> Result<DenseMatrix> {
    let lu = a.as_inner().clone().lu();
    let det = lu.determinant().norm();
    let floor = SINGULARITY_FLOOR * a.frobenius_norm().powi(a.dim() as i32);
    if !(det > floor) {
        return Err(Error::SingularMatrix { det_estimate: det });
    }
    lu.try_inverse()
        .map(DenseMatrix::wrap)
        .ok_or(Error::SingularMatrix { det_estimate: det })
}

/// 2-norm condition number `sigma_max / sigma_min` (infinite when singular).
pub fn condition_number(a: &DenseMatrix) -> f64 {
    let sv = SVD::new(a.as_inner().clone(), false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn eigen_order(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn eigendecompose(a: &DenseMatrix) -> Result<EigenSystem> {
    eigendecompose_with_ceiling(a, CONDITION_CEILING)
}

/// General eigendecomposition through the complex Schur form `A = Q T Q^†`.
///
/// Eigenvectors of the triangular factor are found by back substitution,
/// with near-zero denominators replaced by `eps * ||T||` as LAPACK's `ztrevc`
/// does. A defective matrix then yields (nearly) parallel columns and is
/// caught by the condition ceiling.
pub fn eigendecompose_with_ceiling(a: &DenseMatrix, ceiling: f64) -> Result<EigenSystem> {
    let n = a.dim();
    let schur = Schur::try_new(a.as_inner().clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();

    // Eigenvectors are scale invariant; back-substitute on T / ||T||.
    let t_norm = t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let ts = if t_norm > 0.0 {
        &t / C64::new(t_norm, 0.0)
    } else {
        t.clone()
    };
    let small = f64::EPSILON;

    let mut y = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lambda = ts[(k, k)];
        y[(k, k)] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for m in (j + 1)..=k {
                acc += ts[(j, m)] * y[(m, k)];
            }
            let mut denom = ts[(j, j)] - lambda;
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            y[(j, k)] = -acc / denom;
        }
    }
    let mut v = &q * y;
    for mut col in v.column_iter_mut() {
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        col /= C64::new(norm, 0.0);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eigen_order(&t[(i, i)], &t[(j, j)]));
    let values: Vec<C64> = order.iter().map(|&i| t[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    let vectors = DenseMatrix::wrap(vectors);

    let condition = condition_number(&vectors);
    if !(condition <= ceiling) {
        return Err(Error::NearDefective { condition });
    }

    let a_norm = a.frobenius_norm();
    if a_norm > 0.0 {
        let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(&values));
        let res = a.as_inner() * vectors.as_inner() - vectors.as_inner() * lambda;
        let res = res.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / a_norm;
        if !(res < EIGEN_RESIDUAL_TOLERANCE) {
            return Err(Error::NearDefective { condition });
        }
    }

    Ok(EigenSystem {
        values,
        right_vectors: vectors,
        condition,
    })
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascend and the
/// eigenvectors are orthonormal.
pub fn eigendecompose_hermitian(a: &DenseMatrix) -> Result<EigenSystem> {
    a.require_hermitian()?;
    let (values, vectors) = hermitian_eigen(a);
    let values = values.into_iter().map(|x| C64::new(x, 0.0)).collect();
    Ok(EigenSystem {
        values,
        right_vectors: vectors,
        condition: 1.0,
    })
}

/// Sorted real eigenvalues and orthonormal eigenvectors of the Hermitian
/// part of `a`. Callers check Hermiticity.
pub(crate) fn hermitian_eigen(a: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let n = a.dim();
    let eig = SymmetricEigen::new(a.hermitian_part().into_inner());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, DenseMatrix::wrap(vectors))
}

/// Lower-triangular `L` with `L L^† = A` and a real positive diagonal.
pub fn cholesky(a: &DenseMatrix) -> Result<DenseMatrix> {
    a.require_hermitian()?;
    let n = a.dim();
    let m = a.as_inner();
    let floor = POSITIVITY_FLOOR * a.frobenius_norm();
    let mut l = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > floor) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let root = d.sqrt();
        l[(j, j)] = C64::new(root, 0.0);
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / root;
        }
    }
    Ok(DenseMatrix::wrap(l))
}

/// Real power of a Hermitian positive-definite matrix, `V diag(θ^p) V^†`.
///
/// `p = 0` and `p = 1` return the identity and `a` itself without rounding.
pub fn matrix_power(a: &DenseMatrix, p: f64) -> Result<DenseMatrix> {
    a.require_hermitian()?;
    let (values, vectors) = hermitian_eigen(a);
    let floor = POSITIVITY_FLOOR * a.frobenius_norm();
    if let Some((i, &v)) = values.iter().enumerate().find(|(_, &v)| !(v > floor)) {
        return Err(Error::NotPositiveDefinite { pivot: i, value: v });
    }
    if p == 0.0 {
        return Ok(DenseMatrix::identity(a.dim()));
    }
    if p == 1.0 {
        return Ok(a.clone());
    }
    let powered: Vec<C64> = values.iter().map(|&v| C64::new(v.powf(p), 0.0)).collect();
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(&powered));
    let v = vectors.as_inner();
    Ok(DenseMatrix::wrap(v * d * v.adjoint()).hermitian_part())
}

/// Matrix exponential through the eigendecomposition, `V diag(e^E) V^{-1}`.
pub fn matrix_exp(a: &DenseMatrix) -> Result<DenseMatrix> {
    let eig = eigendecompose(a)?;
    let v_inv = inverse(&eig.right_vectors).map_err(|_| Error::NearDefective {
        condition: eig.condition,
    })?;
    let exps: Vec<C64> = eig.values.iter().map(|z| z.exp()).collect();
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(&exps));
    let result = DenseMatrix::wrap(eig.right_vectors.as_inner() * d * v_inv.as_inner());

    // A and e^A commute; a bad eigenbasis shows up here first.
    let a_norm = a.frobenius_norm();
    if a_norm > 0.0 {
        let commutator = &(a * &result) - &(&result * a);
        let rel = commutator.frobenius_norm() / (a_norm * result.frobenius_norm());
        if !(rel < EIGEN_RESIDUAL_TOLERANCE) {
            return Err(Error::NearDefective {
                condition: eig.condition,
            });
        }
    }
    Ok(result)
}
