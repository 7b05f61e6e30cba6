//! Dyson maps, metrics, and the operator-transformation (OT) and
//! metric-amendment (MA) routes between a non-Hermitian `H` and its Hermitian
//! partner `h = Ω H Ω⁻¹`.

use crate::error::{Error, Result};
use crate::matrix::{self, DenseMatrix, C64, POSITIVITY_FLOOR};

/// Tolerated `||Ω Ω⁻¹ - I||_F / sqrt(n)`.
const MAP_INVERSE_TOLERANCE: f64 = 1e-10;
/// `y_product` requires the quasi-Hermiticity residual below this.
pub const QUASI_HERMITICITY_GATE: f64 = 1e-8;

/// Invertible, generally non-unitary map `Ω` with its cached inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct DysonMap {
    omega: DenseMatrix,
    omega_inv: DenseMatrix,
}

impl DysonMap {
    pub fn new(omega: DenseMatrix) -> Result<Self> {
        let omega_inv = matrix::inverse(&omega)?;
        let n = omega.dim();
        let defect = (&(&omega * &omega_inv) - &DenseMatrix::identity(n)).frobenius_norm()
            / (n as f64).sqrt();
        if !(defect < MAP_INVERSE_TOLERANCE) {
            return Err(Error::IllConditionedMap);
        }
        Ok(Self { omega, omega_inv })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            omega: DenseMatrix::identity(n),
            omega_inv: DenseMatrix::identity(n),
        }
    }

    pub fn omega(&self) -> &DenseMatrix {
        &self.omega
    }

    pub fn inverse(&self) -> &DenseMatrix {
        &self.omega_inv
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    /// `A ↦ Ω A Ω⁻¹`.
    pub fn conjugate(&self, a: &DenseMatrix) -> DenseMatrix {
        &(&self.omega * a) * &self.omega_inv
    }

    /// `A ↦ Ω⁻¹ A Ω`.
    pub fn conjugate_inverse(&self, a: &DenseMatrix) -> DenseMatrix {
        &(&self.omega_inv * a) * &self.omega
    }
}

/// Hermitian positive-definite metric `Θ` with a Cholesky factor and
/// eigenvalue bounds as evidence of positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCertificate {
    theta: DenseMatrix,
    cholesky_factor: DenseMatrix,
    min_eigenvalue: f64,
    max_eigenvalue: f64,
}

impl MetricCertificate {
    /// Certifies `theta`; it is stored as its exact Hermitian part.
    pub fn new(theta: DenseMatrix) -> Result<Self> {
        theta.require_hermitian()?;
        let theta = theta.hermitian_part();
        let cholesky_factor = matrix::cholesky(&theta)?;
        let (values, _) = matrix::hermitian_eigen(&theta);
        let min_eigenvalue = values[0];
        let max_eigenvalue = values[values.len() - 1];
        let floor = POSITIVITY_FLOOR * theta.frobenius_norm();
        if !(min_eigenvalue > floor) {
            return Err(Error::NotPositiveDefinite {
                pivot: 0,
                value: min_eigenvalue,
            });
        }
        Ok(Self {
            theta,
            cholesky_factor,
            min_eigenvalue,
            max_eigenvalue,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            theta: DenseMatrix::identity(n),
            cholesky_factor: DenseMatrix::identity(n),
            min_eigenvalue: 1.0,
            max_eigenvalue: 1.0,
        }
    }

    pub fn theta(&self) -> &DenseMatrix {
        &self.theta
    }

    pub fn cholesky_factor(&self) -> &DenseMatrix {
        &self.cholesky_factor
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.max_eigenvalue
    }

    /// Spectral condition number `θ_max / θ_min`.
    pub fn condition(&self) -> f64 {
        self.max_eigenvalue / self.min_eigenvalue
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }
}

/// Ket `|ψ⟩` with finite amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if let Some(i) = amplitudes
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Euclidean `⟨ψ|ψ⟩`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

/// OT output together with its achieved Hermiticity defect.
#[derive(Debug, Clone)]
pub struct Hermitized {
    pub matrix: DenseMatrix,
    /// `||h - h^†||_F / ||h||_F`.
    pub defect: f64,
}

/// `Θ = Ω^† Ω`.
pub fn metric_from_dyson(map: &DysonMap) -> Result<MetricCertificate> {
    let theta = &map.omega().adjoint() * map.omega();
    MetricCertificate::new(theta).map_err(|_| Error::IllConditionedMap)
}

/// `H = Ω⁻¹ h Ω` for Hermitian `h`.
pub fn de_hermitize(h: &DenseMatrix, map: &DysonMap) -> Result<DenseMatrix> {
    h.check_same_dim(map.omega())?;
    h.require_hermitian()?;
    Ok(map.conjugate_inverse(h))
}

/// `h = Ω H Ω⁻¹`; the result is not required to be Hermitian.
pub fn hermitize_ot(hamiltonian: &DenseMatrix, map: &DysonMap) -> Result<Hermitized> {
    hamiltonian.check_same_dim(map.omega())?;
    let matrix = map.conjugate(hamiltonian);
    let defect = matrix.hermiticity_defect();
    Ok(Hermitized { matrix, defect })
}

/// `||H^† Θ - Θ H||_F / (||H||_F ||Θ||_F)` on raw matrices.
pub fn quasi_hermiticity_defect(hamiltonian: &DenseMatrix, theta: &DenseMatrix) -> Result<f64> {
    hamiltonian.check_same_dim(theta)?;
    let scale = hamiltonian.frobenius_norm() * theta.frobenius_norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let lhs = &hamiltonian.adjoint() * theta;
    let rhs = theta * hamiltonian;
    Ok((&lhs - &rhs).frobenius_norm() / scale)
}

pub fn quasi_hermiticity_residual(
    hamiltonian: &DenseMatrix,
    metric: &MetricCertificate,
) -> Result<f64> {
    quasi_hermiticity_defect(hamiltonian, metric.theta())
}

/// `Y = Θ H`, Hermitian whenever `H^† Θ = Θ H`.
pub fn y_product(hamiltonian: &DenseMatrix, metric: &MetricCertificate) -> Result<DenseMatrix> {
    let residual = quasi_hermiticity_residual(hamiltonian, metric)?;
    if !(residual < QUASI_HERMITICITY_GATE) {
        return Err(Error::NotQuasiHermitian { residual });
    }
    Ok(metric.theta() * hamiltonian)
}

/// `⟨a|Θ|b⟩`.
pub fn physical_inner_product(
    a: &StateVector,
    b: &StateVector,
    metric: &MetricCertificate,
) -> Result<C64> {
    let bra = bra_map(a, metric)?;
    b.check_dim(metric.dim())?;
    Ok(bra
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x * y)
        .sum())
}

/// Components of the row vector `⟨ψ|Θ`, so that `⟨ψ|Θ|x⟩` is the plain
/// (unconjugated) dot product of the result with `x`.
pub fn bra_map(psi: &StateVector, metric: &MetricCertificate) -> Result<StateVector> {
    let n = metric.dim();
    psi.check_dim(n)?;
    let theta = metric.theta();
    let amplitudes = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| psi.amplitudes[i].conj() * theta.get(i, j))
                .sum()
        })
        .collect();
    Ok(StateVector { amplitudes })
}

/// Largest gap between sorted eigenvalues of `a` and `b`.
pub fn isospectrality_check(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    a.check_same_dim(b)?;
    let ea = matrix::eigendecompose(a)?;
    let eb = matrix::eigendecompose(b)?;
    Ok(ea
        .values
        .iter()
        .zip(&eb.values)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}
