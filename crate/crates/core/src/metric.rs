//! Inverse metric problem: every positive-definite solution of
//! `H^† Θ = Θ H` for a non-Hermitian `H` with real non-degenerate spectrum.
//!
//! If `H^† |L_n⟩ = E_n |L_n⟩` then `Θ = Σ κ_n |L_n⟩⟨L_n|` satisfies the
//! relation for any weights, and is positive definite iff every `κ_n > 0`.
//! The eigenvectors are fixed to unit norm with the first nonzero component
//! real positive, so the whole ambiguity lives in `κ`.

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};
use crate::hermitization::MetricCertificate;
use crate::matrix::{self, DenseMatrix, C64};

/// Real spectrum gate: `|Im E| < SPECTRUM_REALITY_TOLERANCE * ||H||_F`.
pub const SPECTRUM_REALITY_TOLERANCE: f64 = 1e-9;
/// Eigenvalues closer than this times `||H||_F` count as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_DIMENSION_CAP: usize = 8;
/// Relative singular-value threshold for the nullspace count.
pub const NULLSPACE_THRESHOLD: f64 = 1e-10;
/// `fit_weights` rejects targets with residual above this times `||Θ||_F`.
pub const FIT_TOLERANCE: f64 = 1e-8;

/// Left eigenvectors of `H` (eigenvectors of `H^†`) under the canonical
/// normalization and phase.
#[derive(Debug, Clone)]
pub struct LeftEigenbasis {
    pub values: Vec<f64>,
    pub left_vectors: DenseMatrix,
}

impl LeftEigenbasis {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `|L_k⟩⟨L_k|`.
    pub fn projector(&self, k: usize) -> DenseMatrix {
        let v = self.left_vectors.as_inner().column(k);
        DenseMatrix::wrap(v * v.adjoint())
    }
}

#[derive(Debug, Clone)]
pub struct MetricFamily {
    basis: LeftEigenbasis,
    weights: Vec<f64>,
}

impl MetricFamily {
    pub fn new(basis: LeftEigenbasis, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: weights.len(),
            });
        }
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, &w)| !(w > 0.0)) {
            return Err(Error::NonPositiveWeight { index, value });
        }
        Ok(Self { basis, weights })
    }

    /// The unit-weight member.
    pub fn unit(basis: LeftEigenbasis) -> Self {
        let weights = vec![1.0; basis.dim()];
        Self { basis, weights }
    }

    pub fn basis(&self) -> &LeftEigenbasis {
        &self.basis
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Weights recovered by [`fit_weights`] and the Frobenius misfit.
#[derive(Debug, Clone)]
pub struct WeightFit {
    pub weights: Vec<f64>,
    pub residual: f64,
}

fn require_real_spectrum(h: &DenseMatrix, values: &[C64]) -> Result<()> {
    let limit = SPECTRUM_REALITY_TOLERANCE * h.frobenius_norm();
    if values.iter().any(|z| z.im.abs() > limit) {
        return Err(Error::ComplexSpectrum {
            eigenvalues: values.to_vec(),
        });
    }
    Ok(())
}

pub fn left_eigenbasis(hamiltonian: &DenseMatrix) -> Result<LeftEigenbasis> {
    let eig = matrix::eigendecompose(&hamiltonian.adjoint())?;
    require_real_spectrum(hamiltonian, &eig.values)?;

    let values = eig.real_values();
    let gap = DEGENERACY_TOLERANCE * hamiltonian.frobenius_norm();
    if values.windows(2).any(|w| !(w[1] - w[0] > gap)) {
        return Err(Error::NearDefective {
            condition: f64::INFINITY,
        });
    }

    let mut vectors = eig.right_vectors.into_inner();
    for mut col in vectors.column_iter_mut() {
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        col /= C64::new(norm, 0.0);
        if let Some(lead) = col.iter().copied().find(|z| z.norm() > 1e-12) {
            col *= lead.conj() / lead.norm();
        }
    }
    Ok(LeftEigenbasis {
        values,
        left_vectors: DenseMatrix::wrap(vectors),
    })
}

/// `Θ = Σ κ_n |L_n⟩⟨L_n|`, certified positive definite.
pub fn metric_from_weights(family: &MetricFamily) -> Result<MetricCertificate> {
    let basis = family.basis();
    let mut theta = DenseMatrix::zeros(basis.dim());
    for (k, &w) in family.weights().iter().enumerate() {
        theta = &theta + &basis.projector(k).scale(C64::new(w, 0.0));
    }
    MetricCertificate::new(theta)
}

pub fn solution_space_dimension(hamiltonian: &DenseMatrix) -> Result<usize> {
    solution_space_dimension_with_cap(hamiltonian, DEFAULT_DIMENSION_CAP)
}

/// Real dimension of the space of Hermitian `Θ` with `H^† Θ = Θ H`.
///
/// A Hermitian matrix has `n²` real parameters: the real diagonal plus real
/// and imaginary parts of the strict upper triangle. The constraint maps each
/// basis element to `2n²` real equations; the nullity of that linear map is
/// read from its singular values.
pub fn solution_space_dimension_with_cap(hamiltonian: &DenseMatrix, cap: usize) -> Result<usize> {
    let n = hamiltonian.dim();
    if n > cap {
        return Err(Error::CapExceeded { dim: n, cap });
    }
    let eig = matrix::eigendecompose(hamiltonian)?;
    require_real_spectrum(hamiltonian, &eig.values)?;

    let h = hamiltonian.as_inner();
    let h_adj = h.adjoint();
    let params = hermitian_basis(n);
    let mut system = DMatrix::<f64>::zeros(2 * n * n, params.len());
    for (col, b) in params.iter().enumerate() {
        let c = &h_adj * b - b * h;
        for (row, z) in c.iter().enumerate() {
            system[(2 * row, col)] = z.re;
            system[(2 * row + 1, col)] = z.im;
        }
    }
    let sv = SVD::new(system, false, false).singular_values;
    // Columns scale with ||H||, which also covers a system that is pure
    // rounding noise (H a multiple of the identity).
    let largest = sv
        .iter()
        .copied()
        .fold(hamiltonian.frobenius_norm(), f64::max);
    let threshold = NULLSPACE_THRESHOLD * largest;
    Ok(sv.iter().filter(|&&s| !(s > threshold)).count())
}

fn hermitian_basis(n: usize) -> Vec<DMatrix<C64>> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut b = DMatrix::zeros(n, n);
        b[(i, i)] = C64::new(1.0, 0.0);
        out.push(b);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut re = DMatrix::zeros(n, n);
            re[(i, j)] = C64::new(1.0, 0.0);
            re[(j, i)] = C64::new(1.0, 0.0);
            out.push(re);
            let mut im = DMatrix::zeros(n, n);
            im[(i, j)] = C64::new(0.0, 1.0);
            im[(j, i)] = C64::new(0.0, -1.0);
            out.push(im);
        }
    }
    out
}

/// Least-squares weights `κ` minimizing `||Σ κ_n |L_n⟩⟨L_n| - Θ||_F`.
pub fn fit_weights(basis: &LeftEigenbasis, target: &MetricCertificate) -> Result<WeightFit> {
    let n = basis.dim();
    if target.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target.dim(),
        });
    }
    let projectors: Vec<DenseMatrix> = (0..n).map(|k| basis.projector(k)).collect();
    let mut design = DMatrix::<f64>::zeros(2 * n * n, n);
    for (col, p) in projectors.iter().enumerate() {
        for (row, z) in p.as_inner().iter().enumerate() {
            design[(2 * row, col)] = z.re;
            design[(2 * row + 1, col)] = z.im;
        }
    }
    let rhs = DVector::from_iterator(
        2 * n * n,
        target.theta().as_inner().iter().flat_map(|z| [z.re, z.im]),
    );
    let weights: Vec<f64> = SVD::new(design, true, true)
        .solve(&rhs, f64::EPSILON)
        .map_err(|_| Error::NearDefective {
            condition: f64::INFINITY,
        })?
        .iter()
        .copied()
        .collect();

    let mut fitted = DenseMatrix::zeros(n);
    for (p, &w) in projectors.iter().zip(&weights) {
        fitted = &fitted + &p.scale(C64::new(w, 0.0));
    }
    let residual = (&fitted - target.theta()).frobenius_norm();
    if !(residual <= FIT_TOLERANCE * target.theta().frobenius_norm()) {
        return Err(Error::TargetOutsideFamily { residual });
    }
    if let Some((index, &value)) = weights.iter().enumerate().find(|(_, &w)| !(w > 0.0)) {
        return Err(Error::NonPositiveWeight { index, value });
    }
    Ok(WeightFit { weights, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitization::quasi_hermiticity_residual;

    fn real(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_real_rows(rows).unwrap()
    }

    fn h11() -> DenseMatrix {
        real(&[&[0.0, -2.0], &[1.0, 3.0]])
    }

    #[test]
    fn left_eigenbasis_of_h11() {
        let basis = left_eigenbasis(&h11()).unwrap();
        assert!((basis.values[0] - 1.0).abs() < 1e-12);
        assert!((basis.values[1] - 2.0).abs() < 1e-12);
        let r2 = 0.5f64.sqrt();
        let r5 = 5f64.sqrt();
        let expected = real(&[&[r2, 1.0 / r5], &[r2, 2.0 / r5]]);
        assert!(basis.left_vectors.max_abs_diff(&expected) < 1e-12);

        let lhs = &h11().adjoint() * &basis.left_vectors;
        let rhs = &basis.left_vectors * &DenseMatrix::real_diagonal(&basis.values).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn left_eigenbasis_of_diagonal_is_standard() {
        let basis = left_eigenbasis(&DenseMatrix::real_diagonal(&[1.0, 2.0]).unwrap()).unwrap();
        assert!(basis.left_vectors.max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn left_eigenbasis_rejects_complex_and_degenerate() {
        assert!(matches!(
            left_eigenbasis(&real(&[&[0.0, -1.0], &[1.0, 0.0]])),
            Err(Error::ComplexSpectrum { .. })
        ));
        assert!(matches!(
            left_eigenbasis(&DenseMatrix::identity(2)),
            Err(Error::NearDefective { .. })
        ));
    }

    #[test]
    fn phase_convention_on_complex_input() {
        let h = DenseMatrix::from_rows(&[
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.5)],
            vec![C64::new(0.0, 0.2), C64::new(2.0, 0.0)],
        ])
        .unwrap();
        let basis = left_eigenbasis(&h).unwrap();
        for k in 0..2 {
            let col: Vec<C64> = (0..2).map(|i| basis.left_vectors.get(i, k)).collect();
            let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-14);
            let lead = col.iter().find(|z| z.norm() > 1e-12).unwrap();
            assert!(lead.im.abs() < 1e-15 && lead.re > 0.0);
        }
    }

    #[test]
    fn metric_from_weights_reproduces_theta11() {
        let basis = left_eigenbasis(&h11()).unwrap();
        let family = MetricFamily::new(basis, vec![2.0, 5.0]).unwrap();
        let m = metric_from_weights(&family).unwrap();
        assert!(m.theta().max_abs_diff(&real(&[&[2.0, 3.0], &[3.0, 5.0]])) < 1e-10);
        assert!(quasi_hermiticity_residual(&h11(), &m).unwrap() < 1e-10);
    }

    #[test]
    fn equal_weights_on_hermitian_diagonal_give_scaled_identity() {
        let basis =
            left_eigenbasis(&DenseMatrix::real_diagonal(&[-1.0, 0.5, 3.0]).unwrap()).unwrap();
        let m = metric_from_weights(&MetricFamily::new(basis, vec![2.5; 3]).unwrap()).unwrap();
        assert!(
            m.theta()
                .max_abs_diff(&DenseMatrix::identity(3).scale(C64::new(2.5, 0.0)))
                < 1e-15
        );
    }

    #[test]
    fn any_single_weight_perturbation_stays_quasi_hermitian() {
        let basis = left_eigenbasis(&h11()).unwrap();
        for (k, delta) in [(0, 0.7), (1, 3.0), (0, -1.5)] {
            let mut w = vec![2.0, 5.0];
            w[k] += delta;
            let m = metric_from_weights(&MetricFamily::new(basis.clone(), w).unwrap()).unwrap();
            assert!(quasi_hermiticity_residual(&h11(), &m).unwrap() < 1e-10);
        }
    }

    #[test]
    fn family_rejects_bad_weights() {
        let basis = left_eigenbasis(&h11()).unwrap();
        assert!(matches!(
            MetricFamily::new(basis.clone(), vec![1.0, 0.0]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(
            MetricFamily::new(basis, vec![1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn solution_space_dimension_examples() {
        assert_eq!(solution_space_dimension(&h11()).unwrap(), 2);
        assert_eq!(
            solution_space_dimension(&DenseMatrix::identity(2)).unwrap(),
            4
        );
        assert_eq!(
            solution_space_dimension(&DenseMatrix::real_diagonal(&[1.0, 2.0]).unwrap()).unwrap(),
            2
        );
        assert!(matches!(
            solution_space_dimension(&DenseMatrix::identity(9)),
            Err(Error::CapExceeded { dim: 9, cap: 8 })
        ));
        assert!(matches!(
            solution_space_dimension(&real(&[&[0.0, -1.0], &[1.0, 0.0]])),
            Err(Error::ComplexSpectrum { .. })
        ));
    }

    #[test]
    fn fit_weights_examples() {
        let basis = left_eigenbasis(&h11()).unwrap();
        let target = MetricCertificate::new(real(&[&[2.0, 3.0], &[3.0, 5.0]])).unwrap();
        let fit = fit_weights(&basis, &target).unwrap();
        assert!((fit.weights[0] - 2.0).abs() < 1e-12);
        assert!((fit.weights[1] - 5.0).abs() < 1e-12);
        assert!(fit.residual < 1e-10);

        let std = left_eigenbasis(&DenseMatrix::real_diagonal(&[1.0, 2.0, 4.0]).unwrap()).unwrap();
        let fit = fit_weights(&std, &MetricCertificate::identity(3)).unwrap();
        for w in fit.weights {
            assert!((w - 1.0).abs() < 1e-14);
        }

        assert!(matches!(
            fit_weights(&basis, &MetricCertificate::identity(2)),
            Err(Error::TargetOutsideFamily { .. })
        ));
        assert!(matches!(
            fit_weights(&basis, &MetricCertificate::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
