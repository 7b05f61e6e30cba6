//! Hybrid-form Hermitization.
//!
//! The Dyson map is factorized as `Ω = Ω_M Ω_H`. The right factor is spent
//! on a partial operator transformation, `H_H = Ω_H H Ω_H⁻¹`, and the left
//! factor survives as a reduced metric `Θ_M = Ω_M^† Ω_M` under which
//! `H_H^† Θ_M = Θ_M H_H`. The Hermitian partner is then reached from either
//! side: `Ω_M H_H Ω_M⁻¹ = Ω H Ω⁻¹`.
//!
//! Two factorizations are built in:
//!
//! * [`split_triangular`]: LDU of `Ω` without pivoting, `Ω_M = L D`,
//!   `Ω_H = U` (unit upper triangular).
//! * [`split_power`]: powers of the metric through its positive root,
//!   `Ω_M = Θ^{μ/2}`, `Ω_H = Θ^{(1-μ)/2}`. `μ = 0` is the pure OT route and
//!   `μ = 1` the pure MA route.
//!
//! Other factorizations can be validated with [`HybridSplit::assemble`].

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermitization::{
    quasi_hermiticity_residual, DysonMap, Hermitized, MetricCertificate, QUASI_HERMITICITY_GATE,
};
use crate::matrix::{self, DenseMatrix, C64, SINGULARITY_FLOOR};

pub const RECOMPOSITION_TOLERANCE: f64 = 1e-10;
pub const REDUCED_QH_TOLERANCE: f64 = 1e-9;
/// Points of the uniform `μ` grid scanned by [`optimize_split`].
pub const GRID_POINTS: usize = 33;
/// Golden-section refinement stops once the bracket is this narrow.
pub const REFINE_WIDTH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitKind {
    Triangular,
    Power { mu: f64 },
    Custom,
}

#[derive(Debug, Clone)]
pub struct HybridSplit {
    source: DenseMatrix,
    omega: DenseMatrix,
    omega_m: DysonMap,
    omega_h: DysonMap,
    h_h: DenseMatrix,
    theta_m: MetricCertificate,
    recomposition_residual: f64,
    reduced_qh_residual: f64,
    kind: SplitKind,
}

impl HybridSplit {
    /// Builds the split of `hamiltonian` for `Ω = Ω_M Ω_H` and checks the
    /// recomposition and reduced quasi-Hermiticity invariants.
    pub fn assemble(
        hamiltonian: &DenseMatrix,
        omega: &DenseMatrix,
        omega_m: DysonMap,
        omega_h: DysonMap,
        kind: SplitKind,
    ) -> Result<Self> {
        hamiltonian.check_same_dim(omega)?;
        omega.check_same_dim(omega_m.omega())?;
        omega.check_same_dim(omega_h.omega())?;
        let h_h = omega_h.conjugate(hamiltonian);
        let theta_m = MetricCertificate::new(&omega_m.omega().adjoint() * omega_m.omega())
            .map_err(|_| Error::IllConditionedMap)?;
        Self::finish(hamiltonian, omega, omega_m, omega_h, h_h, theta_m, kind)
    }

    /// Like [`assemble`](Self::assemble), but stores caller-supplied
    /// (typically closed-form) `H_H` and `Θ_M` after checking them against
    /// `Ω_H H Ω_H⁻¹` and `Ω_M^† Ω_M` to 1e-10 relative.
    pub fn assemble_with(
        hamiltonian: &DenseMatrix,
        omega: &DenseMatrix,
        omega_m: DysonMap,
        omega_h: DysonMap,
        h_h: DenseMatrix,
        theta_m: MetricCertificate,
        kind: SplitKind,
    ) -> Result<Self> {
        hamiltonian.check_same_dim(omega)?;
        omega.check_same_dim(omega_m.omega())?;
        omega.check_same_dim(omega_h.omega())?;
        let h_h_residual = h_h.relative_distance(&omega_h.conjugate(hamiltonian));
        if !(h_h_residual < RECOMPOSITION_TOLERANCE) {
            return Err(Error::InconsistentSplit {
                what: "H_H",
                residual: h_h_residual,
            });
        }
        let theta_residual = theta_m
            .theta()
            .relative_distance(&(&omega_m.omega().adjoint() * omega_m.omega()));
        if !(theta_residual < RECOMPOSITION_TOLERANCE) {
            return Err(Error::InconsistentSplit {
                what: "Theta_M",
                residual: theta_residual,
            });
        }
        Self::finish(hamiltonian, omega, omega_m, omega_h, h_h, theta_m, kind)
    }

    fn finish(
        hamiltonian: &DenseMatrix,
        omega: &DenseMatrix,
        omega_m: DysonMap,
        omega_h: DysonMap,
        h_h: DenseMatrix,
        theta_m: MetricCertificate,
        kind: SplitKind,
    ) -> Result<Self> {
        let recomposition_residual = (omega_m.omega() * omega_h.omega()).relative_distance(omega);
        if !(recomposition_residual < RECOMPOSITION_TOLERANCE) {
            return Err(Error::InconsistentSplit {
                what: "recomposition",
                residual: recomposition_residual,
            });
        }
        let reduced_qh_residual = quasi_hermiticity_residual(&h_h, &theta_m)?;
        if !(reduced_qh_residual < REDUCED_QH_TOLERANCE) {
            return Err(Error::NotQuasiHermitian {
                residual: reduced_qh_residual,
            });
        }
        Ok(Self {
            source: hamiltonian.clone(),
            omega: omega.clone(),
            omega_m,
            omega_h,
            h_h,
            theta_m,
            recomposition_residual,
            reduced_qh_residual,
            kind,
        })
    }

    pub fn source(&self) -> &DenseMatrix {
        &self.source
    }

    /// The full map `Ω` the factors recompose to.
    pub fn omega(&self) -> &DenseMatrix {
        &self.omega
    }

    pub fn omega_m(&self) -> &DysonMap {
        &self.omega_m
    }

    pub fn omega_h(&self) -> &DysonMap {
        &self.omega_h
    }

    pub fn h_h(&self) -> &DenseMatrix {
        &self.h_h
    }

    pub fn theta_m(&self) -> &MetricCertificate {
        &self.theta_m
    }

    pub fn recomposition_residual(&self) -> f64 {
        self.recomposition_residual
    }

    pub fn reduced_qh_residual(&self) -> f64 {
        self.reduced_qh_residual
    }

    pub fn kind(&self) -> SplitKind {
        self.kind
    }

    pub fn mu(&self) -> Option<f64> {
        match self.kind {
            SplitKind::Power { mu } => Some(mu),
            _ => None,
        }
    }
}

/// `Ω = L D U` with unit-triangular `L`, `U`.
#[derive(Debug, Clone)]
pub struct Ldu {
    pub lower: DenseMatrix,
    pub diagonal: Vec<C64>,
    pub upper: DenseMatrix,
}

/// LDU factorization without pivoting. Fails on the first leading principal
/// minor whose pivot is at or below `SINGULARITY_FLOOR * ||Ω||_F`.
pub fn ldu_decompose(omega: &DenseMatrix) -> Result<Ldu> {
    let n = omega.dim();
    let floor = SINGULARITY_FLOOR * omega.frobenius_norm();
    let mut a = omega.as_inner().clone();
    let mut lower = DMatrix::<C64>::identity(n, n);
    for k in 0..n {
        let pivot = a[(k, k)];
        if !(pivot.norm() > floor) {
            return Err(Error::PivotFailure { minor: k + 1 });
        }
        for i in (k + 1)..n {
            let factor = a[(i, k)] / pivot;
            lower[(i, k)] = factor;
            a[(i, k)] = C64::new(0.0, 0.0);
            for j in (k + 1)..n {
                let delta = factor * a[(k, j)];
                a[(i, j)] -= delta;
            }
        }
    }
    let diagonal: Vec<C64> = (0..n).map(|k| a[(k, k)]).collect();
    let upper = DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => a[(i, j)] / diagonal[i],
        std::cmp::Ordering::Equal => C64::new(1.0, 0.0),
        std::cmp::Ordering::Greater => C64::new(0.0, 0.0),
    });
    Ok(Ldu {
        lower: DenseMatrix::wrap(lower),
        diagonal,
        upper: DenseMatrix::wrap(upper),
    })
}

/// Triangular split of `map`: `Ω_M = L D` (lower), `Ω_H = U` (unit upper).
pub fn split_triangular(hamiltonian: &DenseMatrix, map: &DysonMap) -> Result<HybridSplit> {
    hamiltonian.check_same_dim(map.omega())?;
    let ldu = ldu_decompose(map.omega())?;
    let n = map.dim();
    let lower_scaled = DMatrix::from_fn(n, n, |i, j| ldu.lower.get(i, j) * ldu.diagonal[j]);
    let omega_m = DysonMap::new(DenseMatrix::wrap(lower_scaled))?;
    let omega_h = DysonMap::new(ldu.upper)?;
    HybridSplit::assemble(
        hamiltonian,
        map.omega(),
        omega_m,
        omega_h,
        SplitKind::Triangular,
    )
}

fn check_mu(mu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::MuOutOfRange(mu));
    }
    Ok(())
}

fn require_quasi_hermitian(hamiltonian: &DenseMatrix, metric: &MetricCertificate) -> Result<()> {
    let residual = quasi_hermiticity_residual(hamiltonian, metric)?;
    if !(residual < QUASI_HERMITICITY_GATE) {
        return Err(Error::NotQuasiHermitian { residual });
    }
    Ok(())
}

/// Power-interpolated split through the positive root `Ω = Θ^{1/2}`.
pub fn split_power(
    hamiltonian: &DenseMatrix,
    metric: &MetricCertificate,
    mu: f64,
) -> Result<HybridSplit> {
    check_mu(mu)?;
    require_quasi_hermitian(hamiltonian, metric)?;
    let theta = metric.theta();
    let omega = matrix::matrix_power(theta, 0.5)?;
    let omega_m = DysonMap::new(matrix::matrix_power(theta, mu / 2.0)?)?;
    let omega_h = DysonMap::new(matrix::matrix_power(theta, (1.0 - mu) / 2.0)?)?;
    HybridSplit::assemble(
        hamiltonian,
        &omega,
        omega_m,
        omega_h,
        SplitKind::Power { mu },
    )
}

/// `Ω_M H_H Ω_M⁻¹`, with its Hermiticity defect.
pub fn hybrid_hermitize(split: &HybridSplit) -> Hermitized {
    let matrix = split.omega_m.conjugate(&split.h_h);
    let defect = matrix.hermiticity_defect();
    Hermitized { matrix, defect }
}

/// Scalar proxy for how far a split sits between the OT and MA extremes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCost {
    /// Interpolation parameter; `None` for non-power splits.
    pub mu: Option<f64>,
    /// `||H_H - H_H^†||_F / ||H_H||_F`.
    pub non_hermiticity: f64,
    /// Spectral condition number of `Θ_M`.
    pub metric_condition: f64,
    /// `w_h * non_hermiticity + w_m * log10(metric_condition)`.
    pub total: f64,
}

fn check_weights(w_h: f64, w_m: f64) -> Result<()> {
    if !(w_h >= 0.0 && w_m >= 0.0 && w_h.is_finite() && w_m.is_finite()) {
        return Err(Error::NegativeCostWeight { w_h, w_m });
    }
    Ok(())
}

pub fn split_cost(split: &HybridSplit, w_h: f64, w_m: f64) -> Result<SplitCost> {
    check_weights(w_h, w_m)?;
    let non_hermiticity = split.h_h.hermiticity_defect();
    let metric_condition = split.theta_m.condition();
    Ok(SplitCost {
        mu: split.mu(),
        non_hermiticity,
        metric_condition,
        total: w_h * non_hermiticity + w_m * metric_condition.log10(),
    })
}

/// Outcome of [`optimize_split`].
#[derive(Debug, Clone)]
pub struct SplitOptimum {
    pub mu_star: f64,
    pub cost: SplitCost,
    /// Costs at `μ = k / (GRID_POINTS - 1)`, in grid order.
    pub grid: Vec<SplitCost>,
    /// Golden-section minimizer and its total cost.
    pub refined_mu: f64,
    pub refined_total: f64,
    /// Cost evaluations spent in the refinement.
    pub refine_evaluations: usize,
}

impl SplitOptimum {
    pub fn ot_endpoint(&self) -> &SplitCost {
        &self.grid[0]
    }

    pub fn ma_endpoint(&self) -> &SplitCost {
        &self.grid[self.grid.len() - 1]
    }
}

pub fn grid_mu(k: usize) -> f64 {
    k as f64 / (GRID_POINTS - 1) as f64
}

/// Minimizes [`split_cost`] over the power family: a uniform grid on
/// `[0, 1]`, then golden-section search on the bracket around the best grid
/// point. Ties go to the smaller `μ`.
pub fn optimize_split(
    hamiltonian: &DenseMatrix,
    metric: &MetricCertificate,
    w_h: f64,
    w_m: f64,
) -> Result<SplitOptimum> {
    check_weights(w_h, w_m)?;
    require_quasi_hermitian(hamiltonian, metric)?;

    let cost_at = |mu: f64| -> Result<SplitCost> {
        split_power(hamiltonian, metric, mu).and_then(|s| split_cost(&s, w_h, w_m))
    };

    let grid: Vec<SplitCost> = (0..GRID_POINTS)
        .into_par_iter()
        .map(|k| cost_at(grid_mu(k)))
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (k, c) in grid.iter().enumerate() {
        if c.total < grid[best].total {
            best = k;
        }
    }

    let lo = grid_mu(best.saturating_sub(1));
    let hi = grid_mu((best + 1).min(GRID_POINTS - 1));
    let (refined_mu, refined_total, refine_evaluations) =
        golden_section(|mu| cost_at(mu).map(|c| c.total), lo, hi, REFINE_WIDTH)?;

    let grid_mu_best = grid_mu(best);
    let take_refined = refined_total < grid[best].total
        || (refined_total == grid[best].total && refined_mu < grid_mu_best);
    let (mu_star, cost) = if take_refined {
        (refined_mu, cost_at(refined_mu)?)
    } else {
        (grid_mu_best, grid[best])
    };

    Ok(SplitOptimum {
        mu_star,
        cost,
        grid,
        refined_mu,
        refined_total,
        refine_evaluations,
    })
}

/// Golden-section minimization of `f` on `[a, b]` down to width `tol`.
/// Returns `(x, f(x), evaluations)`; equal values move toward `a`.
fn golden_section<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut evals = 2;
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
        evals += 1;
    }
    Ok(if f1 <= f2 {
        (x1, f1, evals)
    } else {
        (x2, f2, evals)
    })
}
