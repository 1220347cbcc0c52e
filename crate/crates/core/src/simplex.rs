//! Dense revised simplex for small equality-form linear programs
//!
//! ```text
//! minimize c^T x  subject to  A x = b,  x >= 0
//! ```
//!
//! with few rows and possibly many columns (the LP oracles have `n + 1` or
//! `d + 1` rows and thousands of columns). The basis is refactored from
//! scratch on every iteration, so no rounding drift accumulates in the
//! basic solution.

use crate::error::{Error, Result};
use crate::linalg::{FullPivLu, Matrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution<F> {
    pub status: LpStatus,
    pub x: Vec<F>,
    pub objective: F,
    pub iterations: usize,
}

const MAX_ITER: usize = 50_000;

/// Solves the LP. `a` is `m x N` (row-major), `b` has length `m`, `c` length `N`.
pub fn solve<F: Real>(a: &Matrix<F>, b: &[F], c: &[F]) -> Result<LpSolution<F>> {
    let (m, ncols) = (a.rows(), a.cols());
    if b.len() != m || c.len() != ncols {
        return Err(Error::Lp("dimension mismatch".into()));
    }
    // Columns of A, with rows flipped so that b >= 0; artificials appended.
    let flip: Vec<bool> = b.iter().map(|&v| v < F::zero()).collect();
    let mut cols: Vec<Vec<F>> = (0..ncols)
        .map(|j| {
            (0..m)
                .map(|i| if flip[i] { -a[(i, j)] } else { a[(i, j)] })
                .collect()
        })
        .collect();
    for i in 0..m {
        let mut e = vec![F::zero(); m];
        e[i] = F::one();
        cols.push(e);
    }
    let rhs: Vec<F> = b.iter().map(|v| v.abs()).collect();
    let total = ncols + m;
    let scale = rhs.iter().fold(F::one(), |acc, v| acc.max(*v));

    let mut lp = Tableau {
        m,
        cols,
        rhs,
        basis: (ncols..total).collect(),
        is_artificial: (0..total).map(|j| j >= ncols).collect(),
        iterations: 0,
    };

    // Phase I: minimize the sum of artificials.
    let phase1_cost: Vec<F> = (0..total)
        .map(|j| if j >= ncols { F::one() } else { F::zero() })
        .collect();
    match lp.optimize(&phase1_cost, true)? {
        LpStatus::Optimal => {}
        other => {
            return Err(Error::Lp(format!("phase I ended with status {other:?}")));
        }
    }
    let infeasibility: F = lp.basic_solution()?.iter().zip(&lp.basis)
        .filter(|(_, &j)| lp.is_artificial[j])
        .map(|(v, _)| *v)
        .sum();
    if infeasibility > F::floor_eps(1e-9, 1e3) * scale {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: vec![F::zero(); ncols],
            objective: F::nan(),
            iterations: lp.iterations,
        });
    }
    lp.drive_out_artificials()?;

    // Phase II.
    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat_n(F::zero(), m));
    let status = lp.optimize(&cost, false)?;
    let xb = lp.basic_solution()?;
    let mut x = vec![F::zero(); ncols];
    for (k, &j) in lp.basis.iter().enumerate() {
        if j < ncols {
            x[j] = xb[k].max(F::zero());
        }
    }
    let objective = x.iter().zip(c).map(|(&xi, &ci)| xi * ci).sum();
    Ok(LpSolution {
        status,
        x,
        objective,
        iterations: lp.iterations,
    })
}

struct Tableau<F> {
    m: usize,
    cols: Vec<Vec<F>>,
    rhs: Vec<F>,
    basis: Vec<usize>,
    is_artificial: Vec<bool>,
    iterations: usize,
}

impl<F: Real> Tableau<F> {
    fn factor(&self) -> Result<FullPivLu<F>> {
        let bm = Matrix::from_fn(self.m, self.m, |i, k| self.cols[self.basis[k]][i]);
        FullPivLu::new(&bm).ok_or_else(|| Error::Lp("singular basis".into()))
    }

    fn basic_solution(&self) -> Result<Vec<F>> {
        Ok(self.factor()?.solve(&self.rhs))
    }

    fn optimize(&mut self, cost: &[F], phase_one: bool) -> Result<LpStatus> {
        let dtol = F::floor_eps(1e-11, 64.0);
        let ptol = F::floor_eps(1e-11, 64.0);
        let mut in_basis = vec![false; self.cols.len()];
        for &j in &self.basis {
            in_basis[j] = true;
        }
        let mut stall = 0usize;
        let mut last_obj = F::infinity();
        loop {
            if self.iterations >= MAX_ITER {
                return Err(Error::Lp("iteration limit reached".into()));
            }
            let lu = self.factor()?;
            let xb = lu.solve(&self.rhs);
            let cb: Vec<F> = self.basis.iter().map(|&j| cost[j]).collect();
            let y = lu.solve_transpose(&cb);
            let obj: F = xb.iter().zip(&cb).map(|(&x, &c)| x * c).sum();
            if obj < last_obj - dtol * obj.abs().max(F::one()) {
                stall = 0;
            } else {
                stall += 1;
            }
            last_obj = last_obj.min(obj);
            let bland = stall > 20;

            // Pricing.
            let mut entering = None;
            let mut best = -dtol;
            for (j, col) in self.cols.iter().enumerate() {
                if in_basis[j] || (!phase_one && self.is_artificial[j]) {
                    continue;
                }
                let colscale = col.iter().fold(F::one(), |acc, v| acc.max(v.abs()));
                // Reduced costs below the rounding of the pricing sum are zero.
                let mag = y.iter().zip(col).fold(cost[j].abs(), |acc, (&yi, &ai)| acc + (yi * ai).abs());
                let raw = cost[j] - crate::linalg::dot(&y, col);
                if raw >= -dtol * mag.max(F::one()) {
                    continue;
                }
                let d = raw / colscale;
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(j) = entering else {
                return Ok(LpStatus::Optimal);
            };
            let w = lu.solve(&self.cols[j]);

            // Ratio test; artificial basics at zero block any movement in phase II.
            // Basic values at rounding level count as zero so that degenerate
            // ties are recognised and broken by index.
            let xscale = xb.iter().fold(F::one(), |acc, v| acc.max(v.abs()));
            let zero_level = F::lit(64.0) * F::epsilon() * xscale;
            let mut leave: Option<(usize, F)> = None;
            for (k, (&wk, &xk)) in w.iter().zip(&xb).enumerate() {
                let bj = self.basis[k];
                let xk = if xk <= zero_level { F::zero() } else { xk };
                let ratio = if wk > ptol {
                    xk / wk
                } else if !phase_one && self.is_artificial[bj] && wk.abs() > ptol {
                    F::zero()
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((lk, r)) => ratio < r || (ratio == r && self.basis[k] < self.basis[lk]),
                };
                if better {
                    leave = Some((k, ratio));
                }
            }
            let Some((k, _)) = leave else {
                return Ok(LpStatus::Unbounded);
            };
            in_basis[self.basis[k]] = false;
            in_basis[j] = true;
            self.basis[k] = j;
            self.iterations += 1;
        }
    }

    /// Pivots zero-level artificials out of the basis where a structural
    /// column can replace them; remaining ones mark redundant rows.
    fn drive_out_artificials(&mut self) -> Result<()> {
        let ptol = F::floor_eps(1e-9, 64.0);
        for k in 0..self.m {
            if !self.is_artificial[self.basis[k]] {
                continue;
            }
            let lu = self.factor()?;
            let mut e = vec![F::zero(); self.m];
            e[k] = F::one();
            // Row k of B^{-1} A gives the pivot candidates.
            let r = lu.solve_transpose(&e);
            let candidate = (0..self.cols.len())
                .filter(|&j| !self.is_artificial[j] && !self.basis.contains(&j))
                .map(|j| (j, crate::linalg::dot(&r, &self.cols[j]).abs()))
                .filter(|&(_, v)| v > ptol)
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
            if let Some((j, _)) = candidate {
                self.basis[k] = j;
            }
        }
        Ok(())
    }
}
