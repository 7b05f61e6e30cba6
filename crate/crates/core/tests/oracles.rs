//! Independent reference computations checked against the library.

mod common;

use qherm_core::hermitization::quasi_hermiticity_residual;
use qherm_core::two_level::{self, ExampleParams};
use qherm_core::*;
use rand::Rng;

use common::*;

/// Rank by Gaussian elimination with partial pivoting.
fn rank(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) =
            (rank..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
        else {
            break;
        };
        if rows[pivot][col].abs() <= tol {
            continue;
        }
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank {
                let f = rows[r][col] / rows[rank][col];
                let pivot_row = rows[rank].clone();
                for (x, y) in rows[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Real dimension of `{Θ : H^† Θ = Θ H, Θ = Θ^†}` with `Θ` an arbitrary
/// complex matrix (`2n²` real unknowns) and Hermiticity imposed as equations.
fn brute_force_solution_dimension(h: &DenseMatrix) -> usize {
    let n = h.dim();
    let unknowns = 2 * n * n;
    let h_adj = h.adjoint();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(unknowns);
    for idx in 0..n * n {
        for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            let mut rows = vec![vec![C64::new(0.0, 0.0); n]; n];
            rows[idx / n][idx % n] = unit;
            let e = DenseMatrix::from_rows(&rows).unwrap();
            let qh = &(&h_adj * &e) - &(&e * h);
            let herm = &e - &e.adjoint();
            let mut col = Vec::with_capacity(4 * n * n);
            for m in [qh, herm] {
                for row in m.to_rows() {
                    for z in row {
                        col.push(z.re);
                        col.push(z.im);
                    }
                }
            }
            columns.push(col);
        }
    }
    let equations = columns[0].len();
    let rows: Vec<Vec<f64>> = (0..equations)
        .map(|r| columns.iter().map(|c| c[r]).collect())
        .collect();
    unknowns - rank(rows, 1e-9)
}

#[test]
fn solution_dimension_matches_brute_force() {
    let mut r = rng(11);
    for n in 1..=4 {
        for _ in 0..10 {
            let spectrum = distinct_spectrum(&mut r, n, 0.3);
            let h = de_hermitize(
                &hermitian_with_spectrum(&mut r, &spectrum),
                &random_dyson(&mut r, n),
            )
            .unwrap();
            let fast = solution_space_dimension(&h).unwrap();
            assert_eq!(fast, brute_force_solution_dimension(&h));
            assert_eq!(fast, n);
        }
    }
    for m in [
        DenseMatrix::identity(2),
        DenseMatrix::real_diagonal(&[1.0, 2.0]).unwrap(),
    ] {
        assert_eq!(
            solution_space_dimension(&m).unwrap(),
            brute_force_solution_dimension(&m)
        );
    }
    assert_eq!(brute_force_solution_dimension(&DenseMatrix::identity(2)), 4);
    assert_eq!(
        brute_force_solution_dimension(&DenseMatrix::real_diagonal(&[1.0, 2.0]).unwrap()),
        2
    );
    for _ in 0..20 {
        let (s, t) = st_params(&mut r, -2.0, 2.0);
        let h = two_level::hamiltonian(ExampleParams::new(s, t));
        assert_eq!(brute_force_solution_dimension(&h), 2);
        assert_eq!(solution_space_dimension(&h).unwrap(), 2);
    }
}

#[test]
fn two_by_two_eigenvalues_match_characteristic_polynomial() {
    let mut r = rng(5);
    for _ in 0..200 {
        let a = random_complex(&mut r, 2, 2.0);
        let tr = a.trace();
        let det = a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0);
        let root = (tr * tr - det * 4.0).sqrt();
        let mut roots = [(tr + root) / 2.0, (tr - root) / 2.0];
        roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        let eig = eigendecompose(&a).unwrap();
        for (x, y) in eig.values.iter().zip(&roots) {
            assert!((x - y).norm() < 1e-12 * (1.0 + y.norm()));
        }
    }
}

#[test]
fn closed_forms_match_generic_routines() {
    let mut r = rng(2024);
    for _ in 0..1000 {
        let s: f64 = r.random_range(-2.0..=2.0);
        let t: f64 = r.random_range(-2.0..=2.0);
        let p = ExampleParams::new(s, t);
        let (_, _, omega) = two_level::dyson_factors(p);
        let h = two_level::hamiltonian(p);

        let generic_h = de_hermitize(&two_level::textbook_hamiltonian(), &omega).unwrap();
        assert!(generic_h.relative_distance(&h) < 1e-10);

        let generic_theta = metric_from_dyson(&omega).unwrap();
        assert!(
            generic_theta
                .theta()
                .relative_distance(&two_level::metric_matrix(p))
                < 1e-10
        );

        let split = split_triangular(&h, &omega).unwrap();
        assert!(
            split
                .h_h()
                .relative_distance(&two_level::reduced_hamiltonian(s))
                < 1e-10
        );
        assert!(
            split
                .theta_m()
                .theta()
                .relative_distance(&two_level::reduced_metric_matrix(s))
                < 1e-10
        );

        let sp = two_level::metric_spectrum(p);
        let e = eigendecompose_hermitian(&two_level::metric_matrix(p))
            .unwrap()
            .real_values();
        assert!((e[0] - sp.theta_minus).abs() < 1e-10 * sp.theta_plus);
        assert!((e[1] - sp.theta_plus).abs() < 1e-10 * sp.theta_plus);
        assert!(sp.discriminant >= 0.0);

        let y = y_product(&h, &generic_theta).unwrap();
        assert!(y.relative_distance(&two_level::y_matrix(p)) < 1e-10);
        assert!(quasi_hermiticity_residual(&h, &generic_theta).unwrap() < 1e-11);
    }
}

#[test]
fn metric_is_positive_on_positive_quadrant() {
    let mut r = rng(7);
    for _ in 0..1000 {
        let (s, t) = st_params(&mut r, 0.0, 2.0);
        let p = ExampleParams::new(s, t);
        assert!(cholesky(&two_level::metric_matrix(p)).is_ok());
        let d = two_level::discriminant(p);
        let f = two_level::discriminant_factored(p);
        assert!((d - f).abs() <= 1e-10 * f);
    }
}
