//! Schrödinger evolution generated by a stationary quasi-Hermitian `H`
//! (units with ħ = 1).
//!
//! The Euclidean norm of `ψ(t) = e^{-iHt} ψ(0)` is not conserved when `H` is
//! non-Hermitian, but the metric norm `⟨ψ(t)|Θ|ψ(t)⟩` is whenever
//! `H^† Θ = Θ H`. States are propagated from `t = 0` with the spectral
//! decomposition, so there is no step-accumulated error.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hermitization::{
    hermitize_ot, metric_from_dyson, physical_inner_product, DysonMap, MetricCertificate,
    StateVector,
};
use crate::matrix::{self, DenseMatrix, C64};

/// Largest Hermiticity defect of `Ω H Ω⁻¹` accepted by
/// [`expectation_equivalence`].
pub const COMPATIBILITY_TOLERANCE: f64 = 1e-8;

/// `e^{-iHt}`.
pub fn propagator(hamiltonian: &DenseMatrix, t: f64) -> Result<DenseMatrix> {
    if t == 0.0 {
        return Ok(DenseMatrix::identity(hamiltonian.dim()));
    }
    matrix::matrix_exp(&hamiltonian.scale(C64::new(0.0, -t)))
}

#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// `⟨ψ(t)|ψ(t)⟩`.
    pub aux_norms: Vec<f64>,
    /// `⟨ψ(t)|Θ|ψ(t)⟩`.
    pub theta_norms: Vec<f64>,
}

impl EvolutionTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_t |N_Θ(t) - N_Θ(0)| / N_Θ(0)`.
    pub fn theta_norm_drift(&self) -> f64 {
        relative_drift(&self.theta_norms)
    }

    pub fn aux_norm_drift(&self) -> f64 {
        relative_drift(&self.aux_norms)
    }

    /// `max - min` of the auxiliary norm column.
    pub fn aux_norm_range(&self) -> f64 {
        let max = self
            .aux_norms
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let min = self.aux_norms.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }
}

fn relative_drift(values: &[f64]) -> f64 {
    let Some(&first) = values.first() else {
        return 0.0;
    };
    values.iter().map(|v| (v - first).abs()).fold(0.0, f64::max) / first.abs()
}

/// Spectral propagation of one initial state.
struct SpectralPropagator {
    values: Vec<C64>,
    vectors: DMatrix<C64>,
    coefficients: DVector<C64>,
}

impl SpectralPropagator {
    fn new(hamiltonian: &DenseMatrix, psi0: &StateVector) -> Result<Self> {
        let eig = matrix::eigendecompose(hamiltonian)?;
        let v_inv = matrix::inverse(&eig.right_vectors).map_err(|_| Error::NearDefective {
            condition: eig.condition,
        })?;
        let coefficients = v_inv.as_inner() * DVector::from_column_slice(psi0.amplitudes());
        Ok(Self {
            values: eig.values,
            vectors: eig.right_vectors.into_inner(),
            coefficients,
        })
    }

    fn state_at(&self, t: f64) -> Result<StateVector> {
        let phased = DVector::from_iterator(
            self.values.len(),
            self.values
                .iter()
                .zip(self.coefficients.iter())
                .map(|(e, c)| (C64::new(0.0, -t) * e).exp() * c),
        );
        StateVector::new((&self.vectors * phased).iter().copied().collect())
    }
}

/// Samples `ψ(t)` at `t = 0, dt, 2 dt, ...` up to `t_max`.
pub fn evolve(
    hamiltonian: &DenseMatrix,
    metric: &MetricCertificate,
    psi0: &StateVector,
    t_max: f64,
    dt: f64,
) -> Result<EvolutionTrace> {
    if !(dt > 0.0 && dt.is_finite() && t_max.is_finite() && t_max >= dt) {
        return Err(Error::InvalidTimeGrid { t_max, dt });
    }
    hamiltonian.check_same_dim(metric.theta())?;
    psi0.check_dim(hamiltonian.dim())?;

    let prop = SpectralPropagator::new(hamiltonian, psi0)?;
    let steps = (t_max / dt + 1e-9).floor() as usize;
    let mut trace = EvolutionTrace {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        aux_norms: Vec::with_capacity(steps + 1),
        theta_norms: Vec::with_capacity(steps + 1),
    };
    for k in 0..=steps {
        let t = k as f64 * dt;
        let psi = if k == 0 {
            psi0.clone()
        } else {
            prop.state_at(t)?
        };
        trace.aux_norms.push(psi.norm_sqr());
        trace
            .theta_norms
            .push(physical_inner_product(&psi, &psi, metric)?.re);
        trace.times.push(t);
        trace.states.push(psi);
    }
    Ok(trace)
}

/// `|⟨ψ(t)|Θ|ψ(t)⟩ - ||φ(t)||²|` with `ψ` evolved by `H` and `φ` by the
/// Hermitian partner `h = Ω H Ω⁻¹` from `φ(0) = Ω ψ(0)`, with `Θ = Ω^† Ω`.
pub fn expectation_equivalence(
    hamiltonian: &DenseMatrix,
    map: &DysonMap,
    psi0: &StateVector,
    t: f64,
) -> Result<f64> {
    let partner = hermitize_ot(hamiltonian, map)?;
    if !(partner.defect < COMPATIBILITY_TOLERANCE) {
        return Err(Error::NotQuasiHermitian {
            residual: partner.defect,
        });
    }
    psi0.check_dim(hamiltonian.dim())?;
    let metric = metric_from_dyson(map)?;

    let psi_t = StateVector::new(propagator(hamiltonian, t)?.apply(psi0.amplitudes()))?;
    let lhs = physical_inner_product(&psi_t, &psi_t, &metric)?.re;

    // Unitary route in the Hermitian picture.
    let (values, u) = matrix::hermitian_eigen(&partner.matrix);
    let u = u.as_inner();
    let phi0 = DVector::from_vec(map.omega().apply(psi0.amplitudes()));
    let mut c = u.adjoint() * phi0;
    for (ck, e) in c.iter_mut().zip(&values) {
        *ck *= C64::new(0.0, -e * t).exp();
    }
    let phi_t = u * c;
    let rhs: f64 = phi_t.iter().map(|z| z.norm_sqr()).sum();
    Ok((lhs - rhs).abs())
}
