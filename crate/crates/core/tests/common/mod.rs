#![allow(dead_code)]

use qherm_core::{DenseMatrix, DysonMap, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DenseMatrix {
    let rows: Vec<Vec<C64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    C64::new(
                        rng.random_range(-scale..scale),
                        rng.random_range(-scale..scale),
                    )
                })
                .collect()
        })
        .collect();
    DenseMatrix::from_rows(&rows).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    random_complex(rng, n, 1.0).hermitian_part()
}

/// Unitary from the QR of a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let a = random_complex(rng, n, 1.0).into_inner();
    DenseMatrix::new(a.qr().q()).unwrap()
}

/// `U diag(values) U^†`.
pub fn hermitian_with_spectrum(rng: &mut ChaCha8Rng, values: &[f64]) -> DenseMatrix {
    let u = random_unitary(rng, values.len());
    let d = DenseMatrix::real_diagonal(values).unwrap();
    &(&u * &d) * &u.adjoint()
}

/// Well-conditioned non-unitary map `I + 0.4 R`.
pub fn random_dyson(rng: &mut ChaCha8Rng, n: usize) -> DysonMap {
    loop {
        let r = random_complex(rng, n, 0.4);
        let m = &DenseMatrix::identity(n) + &r;
        if qherm_core::matrix::condition_number(&m) < 50.0 {
            return DysonMap::new(m).unwrap();
        }
    }
}

/// `n` distinct reals in `[-3, 3]` separated by at least `gap`.
pub fn distinct_spectrum(rng: &mut ChaCha8Rng, n: usize, gap: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] > gap) {
            return v;
        }
    }
}

pub fn st_params(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> (f64, f64) {
    loop {
        let s: f64 = rng.random_range(lo..=hi);
        let t: f64 = rng.random_range(lo..=hi);
        if s != 0.0 && t != 0.0 || lo < 0.0 {
            return (s, t);
        }
    }
}
