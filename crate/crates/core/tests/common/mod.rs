#![allow(dead_code)]

use dwellcut::{Matrix, SystemMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn a1() -> SystemMatrix<f64> {
    SystemMatrix::from_rows(&[vec![-0.3216, -1.0], vec![2.0, -0.3216]]).unwrap()
}

pub fn a2() -> SystemMatrix<f64> {
    SystemMatrix::from_rows(&[vec![-0.3216, -2.0], vec![1.0, -0.3216]]).unwrap()
}

pub fn inverse(s: &Matrix<f64>) -> Matrix<f64> {
    let n = s.rows();
    let na = nalgebra::DMatrix::from_row_slice(n, n, s.as_slice());
    let inv = na.try_inverse().expect("invertible");
    Matrix::from_fn(n, n, |i, j| inv[(i, j)])
}

/// `I + 0.3 G` with `G` uniform in `[-1, 1]`; condition number stays moderate.
pub fn well_conditioned(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
    Matrix::from_fn(n, n, |i, j| {
        let g: f64 = rng.gen_range(-1.0..1.0);
        if i == j {
            1.0 + 0.3 * g
        } else {
            0.3 * g
        }
    })
}

pub fn similar(a: &Matrix<f64>, s: &Matrix<f64>) -> SystemMatrix<f64> {
    SystemMatrix::new(s.matmul(a).matmul(&inverse(s))).unwrap()
}

/// Planar matrix with real eigenvalues `a1 < a2 < 0`, separated by at least 0.2.
pub fn planar_real(rng: &mut ChaCha8Rng) -> (SystemMatrix<f64>, f64, f64) {
    let a2: f64 = rng.gen_range(-2.0..-0.2);
    let a1 = a2 - rng.gen_range(0.2..3.0);
    let s = well_conditioned(rng, 2);
    (similar(&Matrix::diag(&[a1, a2]), &s), a1, a2)
}

/// Planar matrix with eigenvalues `alpha +- i beta`.
pub fn planar_complex(rng: &mut ChaCha8Rng) -> (SystemMatrix<f64>, f64, f64) {
    let alpha: f64 = rng.gen_range(-2.0..-0.1);
    let beta: f64 = rng.gen_range(0.2..3.0);
    let s = well_conditioned(rng, 2);
    let r = Matrix::from_rows(&[vec![alpha, -beta], vec![beta, alpha]]);
    (similar(&r, &s), alpha, beta)
}

/// Random Gaussian-like matrix shifted so that its spectral abscissa lies in `[-1, -0.1]`.
pub fn random_hurwitz(rng: &mut ChaCha8Rng, d: usize) -> SystemMatrix<f64> {
    let g = Matrix::from_fn(d, d, |_, _| {
        let u: f64 = rng.gen_range(-1.0..1.0);
        let v: f64 = rng.gen_range(-1.0..1.0);
        u + v
    });
    let a = SystemMatrix::new(g).unwrap();
    let ev = dwellcut::eigenvalues(&a).unwrap();
    let max_re = ev.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
    let target: f64 = rng.gen_range(-1.0..-0.1);
    SystemMatrix::new(a.matrix().sub(&Matrix::identity(d).scale(max_re - target))).unwrap()
}

pub fn spectral_abscissa(a: &SystemMatrix<f64>) -> f64 {
    dwellcut::eigenvalues(a)
        .unwrap()
        .iter()
        .map(|e| e.0)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Writes straight to stderr so the line shows up even when the harness
/// captures test output.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
    use std::io::Write;
    let line = format!("{} criterion {id} ({name}): {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}
