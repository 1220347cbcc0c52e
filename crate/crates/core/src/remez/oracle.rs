//! Discretized least-deviation problem as a linear program.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quasipoly::moment_vector;
use crate::scalar::Real;
use crate::simplex::{self, LpStatus};
use crate::spectral::Basis;

use super::Functional;

/// Minimum of `max_j |p(t_j)|` over `l(p) = 1` on the uniform grid of
/// `grid_size` points of `[0, T]` (both ends included).
///
/// Solved in dual form: maximize `mu` subject to
/// `sum_j (y+_j - y-_j) u(t_j) = mu l`, `sum_j (y+_j + y-_j) = 1`, `y, mu >= 0`.
/// The optimal `mu` equals the primal minimum by LP duality.
pub fn lp_grid_oracle<F: Real>(
    basis: &Basis<F>,
    horizon: F,
    ell: &Functional<F>,
    grid_size: usize,
) -> Result<F> {
    let n = basis.len();
    if ell.len() != n {
        return Err(Error::InvalidArgument("functional length differs from basis".into()));
    }
    if grid_size < 10 * n || grid_size < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid size {grid_size} below 10 n = {}",
            10 * n
        )));
    }
    if !(horizon > F::zero()) {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    let step = horizon / F::from_usize(grid_size - 1);
    let moments: Vec<Vec<F>> = (0..grid_size)
        .map(|j| {
            let t = if j + 1 == grid_size { horizon } else { F::from_usize(j) * step };
            moment_vector(basis, t).u
        })
        .collect();
    let row_scale: Vec<F> = (0..n)
        .map(|i| {
            let m = moments
                .iter()
                .map(|u| u[i].abs())
                .fold(ell.ell[i].abs(), F::max);
            if m > F::zero() {
                F::one() / m
            } else {
                F::one()
            }
        })
        .collect();

    let cols = 2 * grid_size + 1;
    let mut a = Matrix::zeros(n + 1, cols);
    for (j, u) in moments.iter().enumerate() {
        a[(0, j)] = F::one();
        a[(0, grid_size + j)] = F::one();
        for i in 0..n {
            let v = u[i] * row_scale[i];
            a[(i + 1, j)] = v;
            a[(i + 1, grid_size + j)] = -v;
        }
    }
    for i in 0..n {
        a[(i + 1, cols - 1)] = -ell.ell[i] * row_scale[i];
    }
    let mut b = vec![F::zero(); n + 1];
    b[0] = F::one();
    let mut c = vec![F::zero(); cols];
    c[cols - 1] = -F::one();

    let sol = simplex::solve(&a, &b, &c)?;
    match sol.status {
        LpStatus::Optimal => {
            let mu = sol.x[cols - 1];
            if mu > F::zero() {
                Ok(mu)
            } else {
                Err(Error::DegenerateBasis {
                    condition: f64::INFINITY,
                })
            }
        }
        _ => Err(Error::DegenerateBasis {
            condition: f64::INFINITY,
        }),
    }
}
