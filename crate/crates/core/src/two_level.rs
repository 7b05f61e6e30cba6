//! Closed forms for the two-level model with textbook Hamiltonian
//! `h = diag(1, 2)` and the two-parameter Dyson map
//!
//! ```text
//! Ω_M = [[1, 0], [s, 1]],  Ω_H = [[1, t], [0, 1]],  Ω = Ω_M Ω_H = [[1, t], [s, st + 1]].
//! ```
//!
//! These are the golden references the generic routines are checked against.

use crate::error::Result;
use crate::hermitization::{DysonMap, MetricCertificate};
use crate::hybrid::{HybridSplit, SplitKind};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleParams {
    pub s: f64,
    pub t: f64,
}

impl ExampleParams {
    pub fn new(s: f64, t: f64) -> Self {
        Self { s, t }
    }
}

/// Eigenvalues of the metric and the discriminant `D` under the square root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleSpectrum {
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub discriminant: f64,
}

fn real(rows: [[f64; 2]; 2]) -> DenseMatrix {
    DenseMatrix::from_real_rows(&rows).expect("finite 2x2 closed form")
}

fn map(rows: [[f64; 2]; 2]) -> DysonMap {
    // det = 1 for every factor, so these never fail on finite input.
    DysonMap::new(real(rows)).expect("unimodular Dyson map")
}

/// The diagonal textbook Hamiltonian `diag(1, 2)`.
pub fn textbook_hamiltonian() -> DenseMatrix {
    real([[1.0, 0.0], [0.0, 2.0]])
}

/// `(Ω_M, Ω_H, Ω)`.
pub fn dyson_factors(p: ExampleParams) -> (DysonMap, DysonMap, DysonMap) {
    let ExampleParams { s, t } = p;
    (
        map([[1.0, 0.0], [s, 1.0]]),
        map([[1.0, t], [0.0, 1.0]]),
        map([[1.0, t], [s, s * t + 1.0]]),
    )
}

/// `H = Ω⁻¹ h Ω`.
pub fn hamiltonian(p: ExampleParams) -> DenseMatrix {
    let ExampleParams { s, t } = p;
    real([[1.0 - s * t, -(s * t + 1.0) * t], [s, s * t + 2.0]])
}

/// `Θ = Ω^† Ω`, certified positive definite.
pub fn metric(p: ExampleParams) -> Result<MetricCertificate> {
    MetricCertificate::new(metric_matrix(p))
}

/// `Θ` entries as closed forms; the two off-diagonal expressions are
/// algebraically equal.
pub fn metric_matrix(p: ExampleParams) -> DenseMatrix {
    let ExampleParams { s, t } = p;
    let upper = (1.0 + s * s) * t + s;
    let lower = t + (t * s + 1.0) * s;
    real([
        [1.0 + s * s, upper],
        [lower, (t + (t * s + 1.0) * s) * t + t * s + 1.0],
    ])
}

/// `Y = H^† Θ = Θ H`.
pub fn y_matrix(p: ExampleParams) -> DenseMatrix {
    let ExampleParams { s, t } = p;
    let off = t + 2.0 * t * s * s + 2.0 * s;
    real([
        [1.0 + 2.0 * s * s, off],
        [off, t * t + 2.0 * t * t * s * s + 4.0 * t * s + 2.0],
    ])
}

/// `D` in expanded form.
pub fn discriminant(p: ExampleParams) -> f64 {
    let ExampleParams { s, t } = p;
    let (s2, t2) = (s * s, t * t);
    let (s3, t3) = (s2 * s, t2 * t);
    let (s4, t4) = (s2 * s2, t2 * t2);
    2.0 * t4 * s2
        + 4.0 * t3 * s
        + 4.0 * t3 * s3
        + t4 * s4
        + s4
        + t4
        + 4.0 * s2
        + 8.0 * t * s
        + 4.0 * t2
        + 10.0 * t2 * s2
        + 2.0 * t2 * s4
        + 4.0 * t * s3
}

/// `D = (4 + t²s² + (s+t)²)(t²s² + (s+t)²)`, a product of nonnegative factors.
pub fn discriminant_factored(p: ExampleParams) -> f64 {
    let ExampleParams { s, t } = p;
    let ts2 = t * t * s * s;
    let sum2 = (s + t) * (s + t);
    (4.0 + ts2 + sum2) * (ts2 + sum2)
}

pub fn metric_spectrum(p: ExampleParams) -> ExampleSpectrum {
    let ExampleParams { s, t } = p;
    let discriminant = discriminant(p);
    let center = 0.5 * t * t + 0.5 * t * t * s * s + t * s + 1.0 + 0.5 * s * s;
    let half_root = 0.5 * discriminant.sqrt();
    ExampleSpectrum {
        theta_plus: center + half_root,
        theta_minus: center - half_root,
        discriminant,
    }
}

/// `H_H = Ω_H H Ω_H⁻¹ = [[1, 0], [s, 2]]`.
pub fn reduced_hamiltonian(s: f64) -> DenseMatrix {
    real([[1.0, 0.0], [s, 2.0]])
}

/// `Θ_M = Ω_M^† Ω_M = [[1 + s², s], [s, 1]]`.
pub fn reduced_metric_matrix(s: f64) -> DenseMatrix {
    real([[1.0 + s * s, s], [s, 1.0]])
}

/// Eigenvalues `(2 + s² ± sqrt((2 + s²)² - 4)) / 2` of `Θ_M`, as
/// `(minus, plus)`. The 1/2 follows from `tr Θ_M = 2 + s²`.
pub fn reduced_metric_eigenvalues(s: f64) -> (f64, f64) {
    let tr = 2.0 + s * s;
    let root = (tr * tr - 4.0).sqrt();
    ((tr - root) / 2.0, (tr + root) / 2.0)
}

/// The hybrid split built from the closed-form `H_H` and `Θ_M`, checked
/// against the generic construction.
pub fn hybrid(p: ExampleParams) -> Result<HybridSplit> {
    let (omega_m, omega_h, omega) = dyson_factors(p);
    let theta_m = MetricCertificate::new(reduced_metric_matrix(p.s))?;
    HybridSplit::assemble_with(
        &hamiltonian(p),
        omega.omega(),
        omega_m,
        omega_h,
        reduced_hamiltonian(p.s),
        theta_m,
        SplitKind::Triangular,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitization::{de_hermitize, metric_from_dyson, quasi_hermiticity_residual};
    use crate::matrix::{cholesky, eigendecompose_hermitian};

    const P11: ExampleParams = ExampleParams { s: 1.0, t: 1.0 };
    const P00: ExampleParams = ExampleParams { s: 0.0, t: 0.0 };

    fn rows(m: [[f64; 2]; 2]) -> DenseMatrix {
        real(m)
    }

    #[test]
    fn textbook_hamiltonian_is_diag_12() {
        let h = textbook_hamiltonian();
        assert_eq!(h, rows([[1.0, 0.0], [0.0, 2.0]]));
        assert_eq!(h.hermiticity_defect(), 0.0);
        let e = eigendecompose_hermitian(&h).unwrap();
        assert_eq!(e.real_values(), vec![1.0, 2.0]);
    }

    #[test]
    fn factors_at_fixed_points() {
        let (_, _, omega) = dyson_factors(P11);
        assert_eq!(omega.omega(), &rows([[1.0, 1.0], [1.0, 2.0]]));
        let (m, h, o) = dyson_factors(P00);
        for f in [m, h, o] {
            assert_eq!(f.omega(), &DenseMatrix::identity(2));
        }
        let (m, h, o) = dyson_factors(ExampleParams::new(0.731, -1.37));
        assert!((m.omega() * h.omega()).max_abs_diff(o.omega()) < 1e-14);
    }

    #[test]
    fn hamiltonian_at_fixed_points() {
        assert_eq!(hamiltonian(P11), rows([[0.0, -2.0], [1.0, 3.0]]));
        assert_eq!(hamiltonian(P00), textbook_hamiltonian());
        let p = ExampleParams::new(-0.4, 1.3);
        let (_, _, omega) = dyson_factors(p);
        let generic = de_hermitize(&textbook_hamiltonian(), &omega).unwrap();
        assert!(generic.max_abs_diff(&hamiltonian(p)) < 1e-12);
    }

    #[test]
    fn characteristic_polynomial_is_parameter_free() {
        for (s, t) in [(0.2, 1.9), (-1.5, 0.7), (1.1, -1.1)] {
            let h = hamiltonian(ExampleParams::new(s, t));
            // E² - tr(H) E + det(H)
            assert!((h.trace().re - 3.0).abs() < 1e-12);
            assert!((h.determinant().re - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_at_fixed_points() {
        assert_eq!(
            metric(P11).unwrap().theta(),
            &rows([[2.0, 3.0], [3.0, 5.0]])
        );
        assert_eq!(metric(P00).unwrap().theta(), &DenseMatrix::identity(2));
        let p = ExampleParams::new(1.7, 0.35);
        let m = metric_matrix(p);
        assert!((m.get(0, 1) - m.get(1, 0)).norm() < 1e-15);
        let (_, _, omega) = dyson_factors(p);
        let generic = metric_from_dyson(&omega).unwrap();
        assert!(generic.theta().max_abs_diff(&m) < 1e-13);
    }

    #[test]
    fn spectrum_at_fixed_points() {
        let sp = metric_spectrum(P11);
        assert_eq!(sp.discriminant, 45.0);
        let r = 45f64.sqrt();
        assert!((sp.theta_plus - (7.0 + r) / 2.0).abs() < 1e-14);
        assert!((sp.theta_minus - (7.0 - r) / 2.0).abs() < 1e-14);
        assert!((sp.theta_plus * sp.theta_minus - 1.0).abs() < 1e-13);
        assert!((sp.theta_plus + sp.theta_minus - 7.0).abs() < 1e-14);

        let sp = metric_spectrum(P00);
        assert_eq!(
            sp,
            ExampleSpectrum {
                theta_plus: 1.0,
                theta_minus: 1.0,
                discriminant: 0.0
            }
        );
        assert_eq!(discriminant_factored(P11), 45.0);
    }

    #[test]
    fn spectrum_matches_eigensolver() {
        for (s, t) in [(0.5, 0.5), (1.9, 0.1), (0.05, 1.95)] {
            let p = ExampleParams::new(s, t);
            let sp = metric_spectrum(p);
            let e = eigendecompose_hermitian(&metric_matrix(p))
                .unwrap()
                .real_values();
            assert!((e[0] - sp.theta_minus).abs() < 1e-9);
            assert!((e[1] - sp.theta_plus).abs() < 1e-9);
            assert!(cholesky(&metric_matrix(p)).is_ok());
        }
    }

    #[test]
    fn hybrid_at_fixed_points() {
        let split = hybrid(P11).unwrap();
        assert_eq!(split.h_h(), &rows([[1.0, 0.0], [1.0, 2.0]]));
        assert_eq!(split.theta_m().theta(), &rows([[2.0, 1.0], [1.0, 1.0]]));
        let (lo, hi) = reduced_metric_eigenvalues(1.0);
        assert!((lo - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((hi - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        let y = split.theta_m().theta() * split.h_h();
        assert_eq!(y, rows([[3.0, 2.0], [2.0, 2.0]]));
        assert_eq!(&split.h_h().adjoint() * split.theta_m().theta(), y);

        let split = hybrid(P00).unwrap();
        assert_eq!(split.h_h(), &textbook_hamiltonian());
        assert_eq!(split.theta_m().theta(), &DenseMatrix::identity(2));

        for s in [-1.8, -0.3, 0.6, 1.4] {
            let split = hybrid(ExampleParams::new(s, 0.9)).unwrap();
            let r = quasi_hermiticity_residual(split.h_h(), split.theta_m()).unwrap();
            assert!(r < 1e-12);
        }
    }
}
