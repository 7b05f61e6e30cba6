//! Hermitization toolkit for non-Hermitian matrices with real spectra.
//!
//! A non-Hermitian `H` that is isospectral to a Hermitian `h = Ω H Ω⁻¹` can
//! be made Hermitian in three ways:
//!
//! * operator transformation (OT): map `H` to `h` and keep the standard
//!   inner product ([`hermitization::hermitize_ot`]);
//! * metric amendment (MA): keep `H` and use the inner product weighted by
//!   `Θ = Ω^† Ω`, under which `H^† Θ = Θ H` ([`metric`]);
//! * the hybrid form: split `Ω = Ω_M Ω_H`, transform with `Ω_H` only and
//!   amend the metric with `Θ_M = Ω_M^† Ω_M` ([`hybrid`]).
//!
//! [`evolution`] checks that the metric norm is conserved under the
//! non-unitary propagator, and [`two_level`] holds closed forms for a 2×2
//! model used as a regression reference.

// Gates are written `!(x < tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
pub mod hermitization;
pub mod hybrid;
pub mod matrix;
pub mod metric;
pub mod two_level;

pub use error::{Error, Result};
pub use evolution::{evolve, expectation_equivalence, propagator, EvolutionTrace};
pub use hermitization::{
    bra_map, de_hermitize, hermitize_ot, isospectrality_check, metric_from_dyson,
    physical_inner_product, quasi_hermiticity_residual, y_product, DysonMap, Hermitized,
    MetricCertificate, StateVector,
};
pub use hybrid::{
    hybrid_hermitize, optimize_split, split_cost, split_power, split_triangular, HybridSplit,
    SplitCost, SplitKind, SplitOptimum,
};
pub use matrix::{
    adjoint, cholesky, eigendecompose, eigendecompose_hermitian, inverse, matrix_exp, matrix_power,
    DenseMatrix, EigenSystem, C64,
};
pub use metric::{
    fit_weights, left_eigenbasis, metric_from_weights, solution_space_dimension, LeftEigenbasis,
    MetricFamily, WeightFit,
};
pub use two_level::{ExampleParams, ExampleSpectrum};
