#![allow(dead_code)]

use tensorank::synth_io::SeededRng;
use tensorank::{DenseTensor, Matrix};

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = SeededRng::new(seed);
    Matrix::new(rows, cols, rng.normals(rows * cols)).unwrap()
}

/// `rows × cols` with exact rank `rank` (generically).
pub fn low_rank_matrix(rows: usize, cols: usize, rank: usize, seed: u64) -> Matrix {
    let a = random_matrix(rows, rank, seed);
    let b = random_matrix(rank, cols, seed.wrapping_add(1));
    a.matmul(&b).unwrap()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn relative_error(target: &DenseTensor, approx: &DenseTensor) -> f64 {
    (target.distance_sq(approx).unwrap() / target.frobenius_norm_sq()).sqrt()
}
