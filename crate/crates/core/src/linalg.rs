//! Small dense linear algebra: row-major matrices, full-pivot LU with a
//! condition estimate, and the matrix exponential.
//!
//! Sizes in this crate are tiny (n <= 12 for collocation systems, d <= 12
//! for system matrices), so everything is plain `Vec`-backed and O(n^3).

use std::ops::{Index, IndexMut};

use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<F>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(values: &[F]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: F) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-F::one()))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == F::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[F]) -> Vec<F> {
        assert_eq!(self.cols, x.len(), "dimension mismatch in matvec");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> F {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<F>())
            .fold(F::zero(), F::max)
    }

    pub fn norm_fro(&self) -> F {
        self.data.iter().map(|&x| x * x).sum::<F>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Block-diagonal matrix `diag(self, other)`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }

    pub fn cast<G: Real>(&self) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|&x| G::lit(x.to_f64_lossy()))
                .collect(),
        }
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &F {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with complete pivoting, `P A Q = L U`.
///
/// Complete pivoting makes the diagonal of `U` rank revealing, which is what
/// the collocation solves need: a tiny trailing pivot means the moment
/// vectors are numerically dependent.
#[derive(Debug, Clone)]
pub struct FullPivLu<F> {
    n: usize,
    lu: Matrix<F>,
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
    norm_1: F,
}

impl<F: Real> FullPivLu<F> {
    /// Factors a square matrix. Returns `None` when an exactly zero pivot is met.
    pub fn new(a: &Matrix<F>) -> Option<Self> {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut row_perm: Vec<usize> = (0..n).collect();
        let mut col_perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (mut pi, mut pj, mut best) = (k, k, F::zero());
            for i in k..n {
                for j in k..n {
                    let v = lu[(i, j)].abs();
                    if v > best {
                        best = v;
                        pi = i;
                        pj = j;
                    }
                }
            }
            if best == F::zero() || !best.is_finite() {
                return None;
            }
            if pi != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(pi, j)];
                    lu[(pi, j)] = t;
                }
                row_perm.swap(k, pi);
            }
            if pj != k {
                for i in 0..n {
                    let t = lu[(i, k)];
                    lu[(i, k)] = lu[(i, pj)];
                    lu[(i, pj)] = t;
                }
                col_perm.swap(k, pj);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != F::zero() {
                    for j in (k + 1)..n {
                        let v = lu[(k, j)];
                        lu[(i, j)] -= f * v;
                    }
                }
            }
        }
        Some(Self {
            n,
            lu,
            row_perm,
            col_perm,
            norm_1: a.norm_1(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[F]) -> Vec<F> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y: Vec<F> = self.row_perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s -= self.lu[(i, j)] * y[j];
            }
            y[i] = s / self.lu[(i, i)];
        }
        let mut x = vec![F::zero(); n];
        for (k, &j) in self.col_perm.iter().enumerate() {
            x[j] = y[k];
        }
        x
    }

    /// Solves `A^T x = c`.
    pub fn solve_transpose(&self, c: &[F]) -> Vec<F> {
        let n = self.n;
        assert_eq!(c.len(), n);
        // A^T = Q U^T L^T P, so first undo Q.
        let mut z: Vec<F> = self.col_perm.iter().map(|&j| c[j]).collect();
        for i in 0..n {
            let mut s = z[i];
            for j in 0..i {
                s -= self.lu[(j, i)] * z[j];
            }
            z[i] = s / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for j in (i + 1)..n {
                s -= self.lu[(j, i)] * z[j];
            }
            z[i] = s;
        }
        let mut x = vec![F::zero(); n];
        for (k, &i) in self.row_perm.iter().enumerate() {
            x[i] = z[k];
        }
        x
    }

    /// 1-norm condition number, computed from the explicit inverse.
    pub fn condition(&self) -> F {
        let n = self.n;
        let mut inv_norm = F::zero();
        let mut e = vec![F::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = F::zero());
            e[j] = F::one();
            let col = self.solve(&e);
            let s: F = col.iter().map(|v| v.abs()).sum();
            if !s.is_finite() {
                return F::infinity();
            }
            inv_norm = inv_norm.max(s);
        }
        self.norm_1 * inv_norm
    }

    /// Ratio of smallest to largest pivot magnitude of `U`.
    pub fn pivot_ratio(&self) -> F {
        let first = self.lu[(0, 0)].abs();
        let last = self.lu[(self.n - 1, self.n - 1)].abs();
        last / first
    }
}

// Numerator/denominator coefficients of the [13/13] Pade approximant to exp.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// 1-norm bound below which the [13/13] approximant is accurate to unit roundoff.
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a [13/13] Pade approximant.
pub fn expm<F: Real>(a: &Matrix<F>) -> Matrix<F> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.rows();
    if n == 0 {
        return a.clone();
    }
    let norm = a.norm_1().to_f64_lossy();
    let mut s = 0i32;
    if norm > THETA13 {
        s = (norm / THETA13).log2().ceil() as i32;
    }
    let scaled = a.scale(F::lit(2f64.powi(-s)));
    let b: Vec<F> = PADE13.iter().map(|&c| F::lit(c)).collect();
    let ident = Matrix::identity(n);
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let u_inner = a6
        .scale(b[13])
        .add(&a4.scale(b[11]))
        .add(&a2.scale(b[9]));
    let u = scaled.matmul(
        &a6.matmul(&u_inner)
            .add(&a6.scale(b[7]))
            .add(&a4.scale(b[5]))
            .add(&a2.scale(b[3]))
            .add(&ident.scale(b[1])),
    );
    let v_inner = a6
        .scale(b[12])
        .add(&a4.scale(b[10]))
        .add(&a2.scale(b[8]));
    let v = a6
        .matmul(&v_inner)
        .add(&a6.scale(b[6]))
        .add(&a4.scale(b[4]))
        .add(&a2.scale(b[2]))
        .add(&ident.scale(b[0]));

    let p = v.add(&u);
    let q = v.sub(&u);
    let lu = FullPivLu::new(&q).expect("Pade denominator is nonsingular for scaled input");
    let mut r = Matrix::zeros(n, n);
    let mut col = vec![F::zero(); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = p[(i, j)];
        }
        let x = lu.solve(&col);
        for i in 0..n {
            r[(i, j)] = x[i];
        }
    }
    for _ in 0..s {
        r = r.matmul(&r);
    }
    r
}

pub(crate) fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm2<F: Real>(a: &[F]) -> F {
    a.iter().map(|&x| x * x).sum::<F>().sqrt()
}
