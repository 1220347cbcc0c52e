//! Spectral data of a system matrix and the quasipolynomial basis it spans.
//!
//! The trajectories `t -> <e^{tA} x0, y>` of a Hurwitz matrix `A` span the
//! space of real quasipolynomials `t^k e^{alpha t} cos(beta t)`,
//! `t^k e^{alpha t} sin(beta t)` where `alpha + i beta` runs over the
//! eigenvalues and `k` is below the size of the largest Jordan block of that
//! eigenvalue. Its dimension is the degree of the minimal polynomial.
//!
//! Eigenvalues and singular values are computed in `f64` with `nalgebra`,
//! whatever the scalar type of the caller.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Validated square system matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrix<F> {
    m: Matrix<F>,
}

impl<F: Real> SystemMatrix<F> {
    pub fn new(m: Matrix<F>) -> Result<Self> {
        if m.rows() == 0 {
            return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
        }
        if !m.is_square() {
            return Err(Error::InvalidMatrix(format!(
                "matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_finite() {
            return Err(Error::InvalidMatrix("entries must be finite".into()));
        }
        Ok(Self { m })
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let d = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::InvalidMatrix(format!(
                "row {i} has {} entries, expected {d}",
                row.len()
            )));
        }
        Self::new(Matrix::from_rows(rows))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix<F> {
        &self.m
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        self.m.to_rows()
    }

    /// `c * A`.
    pub fn scaled(&self, c: F) -> Self {
        Self { m: self.m.scale(c) }
    }

    /// `diag(A, other)`.
    pub fn block_diag(&self, other: &Self) -> Self {
        Self {
            m: self.m.block_diag(&other.m),
        }
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.m[(i, j)].to_f64_lossy())
    }
}

/// Tolerances of the spectral analysis. All are relative to `||A||_F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    /// Eigenvalues must satisfy `Re(lambda) < -hurwitz_margin`.
    pub hurwitz_margin: f64,
    /// Eigenvalues closer than `cluster_tol * ||A||` are merged.
    pub cluster_tol: f64,
    /// Singular values of `(A - lambda)^k` below `rank_tol * ||A||^k` count as zero.
    pub rank_tol: f64,
    /// Multiplicative guard band around the rank threshold that triggers a warning.
    pub guard_band: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            hurwitz_margin: 1e-12,
            cluster_tol: 1e-7,
            rank_tol: 1e-9,
            guard_band: 100.0,
        }
    }
}

/// One eigenvalue cluster `alpha + i beta` (reported once per conjugate pair,
/// `beta >= 0`) with its largest Jordan block size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralItem<F> {
    pub alpha: F,
    pub beta: F,
    pub block_size: usize,
}

impl<F: Real> SpectralItem<F> {
    pub fn new(alpha: F, beta: F, block_size: usize) -> Self {
        Self {
            alpha,
            beta,
            block_size,
        }
    }

    /// Number of real basis functions contributed by this item.
    pub fn dimension(&self) -> usize {
        if self.beta > F::zero() {
            2 * self.block_size
        } else {
            self.block_size
        }
    }
}

/// Spectral data that determines the quasipolynomial space of a matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum<F> {
    items: Vec<SpectralItem<F>>,
    minimal_degree: usize,
    warnings: Vec<String>,
}

impl<F: Real> Spectrum<F> {
    /// Builds a spectrum from explicit items, e.g. to override a numerically
    /// doubtful Jordan structure. Items are sorted by `alpha` descending,
    /// then `beta` ascending.
    pub fn from_items(mut items: Vec<SpectralItem<F>>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidArgument("spectrum has no items".into()));
        }
        for it in &items {
            if !it.alpha.is_finite() || !it.beta.is_finite() {
                return Err(Error::InvalidArgument("spectral item is not finite".into()));
            }
            if it.beta < F::zero() {
                return Err(Error::InvalidArgument(
                    "beta must be nonnegative (conjugate pairs are stored once)".into(),
                ));
            }
            if it.block_size == 0 {
                return Err(Error::InvalidArgument("block size must be positive".into()));
            }
        }
        items.sort_by(|a, b| {
            b.alpha
                .partial_cmp(&a.alpha)
                .unwrap()
                .then(a.beta.partial_cmp(&b.beta).unwrap())
        });
        for w in items.windows(2) {
            if w[0].alpha == w[1].alpha && w[0].beta == w[1].beta {
                return Err(Error::InvalidArgument(format!(
                    "duplicate spectral item ({}, {})",
                    w[0].alpha, w[0].beta
                )));
            }
        }
        let minimal_degree = items.iter().map(SpectralItem::dimension).sum();
        Ok(Self {
            items,
            minimal_degree,
            warnings: Vec::new(),
        })
    }

    pub fn items(&self) -> &[SpectralItem<F>] {
        &self.items
    }

    /// Degree of the minimal polynomial, i.e. the dimension of the quasipolynomial space.
    pub fn minimal_degree(&self) -> usize {
        self.minimal_degree
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn max_real_part(&self) -> F {
        self.items
            .iter()
            .map(|it| it.alpha)
            .fold(F::neg_infinity(), F::max)
    }

    pub fn max_beta(&self) -> F {
        self.items.iter().map(|it| it.beta).fold(F::zero(), F::max)
    }

    pub fn is_hurwitz(&self) -> bool {
        self.max_real_part() < F::zero()
    }
}

/// Trigonometric factor of a basis function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigKind {
    Cos,
    Sin,
}

/// `t^power e^{alpha t} cos(beta t)` or `t^power e^{alpha t} sin(beta t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasisFunction<F> {
    pub alpha: F,
    pub beta: F,
    pub power: u32,
    pub kind: TrigKind,
}

impl<F: Real> BasisFunction<F> {
    pub fn value(&self, t: F) -> F {
        let trig = match self.kind {
            TrigKind::Cos => (self.beta * t).cos(),
            TrigKind::Sin => (self.beta * t).sin(),
        };
        t.powi(self.power as i32) * (self.alpha * t).exp() * trig
    }

    pub fn derivative(&self, t: F) -> F {
        let (c, s) = ((self.beta * t).cos(), (self.beta * t).sin());
        let e = (self.alpha * t).exp();
        let k = self.power as i32;
        let tk = t.powi(k);
        let dtk = if k == 0 {
            F::zero()
        } else {
            F::from_usize(k as usize) * t.powi(k - 1)
        };
        match self.kind {
            TrigKind::Cos => e * (dtk * c + tk * (self.alpha * c - self.beta * s)),
            TrigKind::Sin => e * (dtk * s + tk * (self.alpha * s + self.beta * c)),
        }
    }
}

/// Contiguous run of basis functions sharing `(alpha, beta)`: powers
/// `0..block_size`, cos before sin for each power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BasisGroup<F> {
    pub alpha: F,
    pub beta: F,
    pub block_size: usize,
    pub start: usize,
    pub oscillating: bool,
}

/// Ordered real basis of the quasipolynomial space of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis<F> {
    functions: Vec<BasisFunction<F>>,
    groups: Vec<BasisGroup<F>>,
    max_beta: F,
}

impl<F: Real> Basis<F> {
    pub fn functions(&self) -> &[BasisFunction<F>] {
        &self.functions
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn max_beta(&self) -> F {
        self.max_beta
    }

    pub(crate) fn groups(&self) -> &[BasisGroup<F>] {
        &self.groups
    }
}

/// Basis of the quasipolynomial space, ordered by `alpha` descending, `beta`
/// ascending, power ascending, cos before sin.
pub fn build_basis<F: Real>(spectrum: &Spectrum<F>) -> Basis<F> {
    let mut functions = Vec::with_capacity(spectrum.minimal_degree());
    let mut groups = Vec::with_capacity(spectrum.items().len());
    for it in spectrum.items() {
        let oscillating = it.beta > F::zero();
        groups.push(BasisGroup {
            alpha: it.alpha,
            beta: it.beta,
            block_size: it.block_size,
            start: functions.len(),
            oscillating,
        });
        for k in 0..it.block_size {
            functions.push(BasisFunction {
                alpha: it.alpha,
                beta: it.beta,
                power: k as u32,
                kind: TrigKind::Cos,
            });
            if oscillating {
                functions.push(BasisFunction {
                    alpha: it.alpha,
                    beta: it.beta,
                    power: k as u32,
                    kind: TrigKind::Sin,
                });
            }
        }
    }
    Basis {
        functions,
        groups,
        max_beta: spectrum.max_beta(),
    }
}

/// Eigenvalues `(re, im)` of `A`, computed through a real Schur form.
pub fn eigenvalues<F: Real>(a: &SystemMatrix<F>) -> Result<Vec<(f64, f64)>> {
    let m = a.to_nalgebra();
    let schur = m
        .try_schur(f64::EPSILON, 10_000)
        .ok_or(Error::EigenFailure)?;
    let ev = schur.complex_eigenvalues();
    let out: Vec<(f64, f64)> = ev.iter().map(|c| (c.re, c.im)).collect();
    if out.iter().any(|(re, im)| !re.is_finite() || !im.is_finite()) {
        return Err(Error::EigenFailure);
    }
    Ok(out)
}

fn max_real_part(ev: &[(f64, f64)]) -> f64 {
    ev.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max)
}

/// True iff every eigenvalue has real part below `-cfg.hurwitz_margin`.
pub fn is_hurwitz<F: Real>(a: &SystemMatrix<F>, cfg: &SpectralConfig) -> Result<bool> {
    let ev = eigenvalues(a)?;
    Ok(max_real_part(&ev) < -cfg.hurwitz_margin)
}

/// Clusters the eigenvalues of a Hurwitz matrix and determines the largest
/// Jordan block of every cluster.
pub fn compute_spectrum<F: Real>(a: &SystemMatrix<F>, cfg: &SpectralConfig) -> Result<Spectrum<F>> {
    let ev = eigenvalues(a)?;
    let max_re = max_real_part(&ev);
    if max_re >= -cfg.hurwitz_margin {
        return Err(Error::NotHurwitz {
            max_real_part: max_re,
        });
    }
    let m = a.to_nalgebra();
    let d = a.dim();
    let norm = m.norm().max(f64::MIN_POSITIVE);
    let ctol = cfg.cluster_tol * norm;

    let clusters = cluster(&ev, ctol);
    let mut items = Vec::new();
    let mut warnings = Vec::new();
    for cl in clusters {
        let (re, im) = cl.center;
        if im < -ctol {
            continue; // lower member of a conjugate pair
        }
        let complex = im > ctol;
        let beta = if complex { im } else { 0.0 };
        let q = if complex {
            // (A - lambda)(A - conj(lambda)) = A^2 - 2 re A + |lambda|^2 I
            let ident = DMatrix::<f64>::identity(d, d);
            &m * &m - &m * (2.0 * re) + ident * (re * re + im * im)
        } else {
            &m - DMatrix::<f64>::identity(d, d) * re
        };
        let scale = if complex { norm * norm } else { norm };
        let (block, warn) = block_size(&q, scale, cfg);
        if let Some(w) = warn {
            warnings.push(format!("eigenvalue {re:.6e}{im:+.6e}i: {w}"));
        }
        let null_dim = d - rank_with(&matrix_power(&q, block), scale.powi(block as i32), cfg).0;
        let expected = if complex { 2 * cl.size } else { cl.size };
        if null_dim != expected {
            warnings.push(format!(
                "eigenvalue {re:.6e}{im:+.6e}i: generalized eigenspace dimension {null_dim} \
                 differs from cluster multiplicity {expected}"
            ));
        }
        items.push(SpectralItem::new(F::lit(re), F::lit(beta), block));
    }
    let mut spectrum = Spectrum::from_items(items)?;
    spectrum.warnings = warnings;
    if spectrum.minimal_degree > d {
        return Err(Error::InvalidMatrix(format!(
            "inconsistent spectral structure: minimal degree {} exceeds dimension {d}",
            spectrum.minimal_degree
        )));
    }
    Ok(spectrum)
}

struct Cluster {
    center: (f64, f64),
    size: usize,
}

fn cluster(ev: &[(f64, f64)], tol: f64) -> Vec<Cluster> {
    let n = ev.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = (ev[i].0 - ev[j].0).hypot(ev[i].1 - ev[j].1);
            if dist <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut out: Vec<(usize, f64, f64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match out.iter_mut().find(|c| c.0 == r) {
            Some(c) => {
                c.1 += ev[i].0;
                c.2 += ev[i].1;
                c.3 += 1;
            }
            None => out.push((r, ev[i].0, ev[i].1, 1)),
        }
    }
    out.into_iter()
        .map(|(_, re, im, k)| Cluster {
            center: (re / k as f64, im / k as f64),
            size: k,
        })
        .collect()
}

fn matrix_power(q: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let mut out = DMatrix::<f64>::identity(q.nrows(), q.ncols());
    for _ in 0..k {
        out = &out * q;
    }
    out
}

/// Numerical rank with threshold `rank_tol * scale`; also reports whether a
/// singular value fell inside the guard band.
fn rank_with(m: &DMatrix<f64>, scale: f64, cfg: &SpectralConfig) -> (usize, bool) {
    let thr = cfg.rank_tol * scale;
    let sv = match m.clone().try_svd(false, false, f64::EPSILON, 10_000) {
        Some(svd) => svd.singular_values,
        None => return (m.nrows(), true),
    };
    let rank = sv.iter().filter(|&&s| s > thr).count();
    let ambiguous = sv
        .iter()
        .any(|&s| s > thr / cfg.guard_band && s < thr * cfg.guard_band);
    (rank, ambiguous)
}

/// Smallest `k` with `rank(Q^k) == rank(Q^{k+1})`.
fn block_size(q: &DMatrix<f64>, scale: f64, cfg: &SpectralConfig) -> (usize, Option<String>) {
    let d = q.nrows();
    let mut power = q.clone();
    let (mut prev, mut ambiguous) = rank_with(&power, scale, cfg);
    for k in 1..=d {
        power = &power * q;
        let (rank, amb) = rank_with(&power, scale.powi(k as i32 + 1), cfg);
        ambiguous |= amb;
        if rank == prev {
            let warn = ambiguous.then(|| {
                "rank decision within the guard band; block size may be unreliable".to_string()
            });
            return (k, warn);
        }
        prev = rank;
    }
    (d, Some("rank sequence did not stabilise".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn a1() -> SystemMatrix<f64> {
        SystemMatrix::from_rows(&[vec![-0.3216, -1.0], vec![2.0, -0.3216]]).unwrap()
    }

    #[test]
    fn hurwitz_checks() {
        let cfg = SpectralConfig::default();
        let scalar = SystemMatrix::from_rows(&[vec![-1.0]]).unwrap();
        assert!(is_hurwitz(&scalar, &cfg).unwrap());
        let rot = SystemMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        assert!(!is_hurwitz(&rot, &cfg).unwrap());
        assert!(is_hurwitz(&a1(), &cfg).unwrap());
    }

    #[test]
    fn rejects_invalid_matrices() {
        assert!(SystemMatrix::<f64>::from_rows(&[]).is_err());
        assert!(SystemMatrix::from_rows(&[vec![1.0, 2.0]]).is_err());
        assert!(SystemMatrix::from_rows(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn spectrum_of_example_matrix() {
        let s = compute_spectrum(&a1(), &SpectralConfig::default()).unwrap();
        assert_eq!(s.items().len(), 1);
        let it = s.items()[0];
        assert_relative_eq!(it.alpha, -0.3216, epsilon = 1e-12);
        assert_relative_eq!(it.beta, 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(it.block_size, 1);
        assert_eq!(s.minimal_degree(), 2);
    }

    #[test]
    fn spectrum_of_diagonal_matrices() {
        let cfg = SpectralConfig::default();
        let a = SystemMatrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, -2.0]]).unwrap();
        let s = compute_spectrum(&a, &cfg).unwrap();
        let items: Vec<_> = s.items().iter().map(|i| (i.alpha, i.beta, i.block_size)).collect();
        assert_eq!(items.len(), 2);
        assert_relative_eq!(items[0].0, -1.0, epsilon = 1e-14);
        assert_relative_eq!(items[1].0, -2.0, epsilon = 1e-14);
        assert!(items.iter().all(|i| i.1 == 0.0 && i.2 == 1));
        assert_eq!(s.minimal_degree(), 2);

        let b = SystemMatrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        let s = compute_spectrum(&b, &cfg).unwrap();
        assert_eq!(s.items().len(), 1);
        assert_eq!(s.minimal_degree(), 1);
    }

    #[test]
    fn jordan_blocks_are_detected() {
        let cfg = SpectralConfig::default();
        let j2 = SystemMatrix::from_rows(&[vec![-1.0, 1.0], vec![0.0, -1.0]]).unwrap();
        let s = compute_spectrum(&j2, &cfg).unwrap();
        assert_eq!(s.items().len(), 1);
        assert_eq!(s.items()[0].block_size, 2);
        assert_eq!(s.minimal_degree(), 2);

        // Complex Jordan block of size 2: rotation block R with I on the superdiagonal.
        let r = [[-0.5, -2.0], [2.0, -0.5]];
        let mut rows = vec![vec![0.0; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                rows[i][j] = r[i][j];
                rows[i + 2][j + 2] = r[i][j];
            }
            rows[i][i + 2] = 1.0;
        }
        let s = compute_spectrum(&SystemMatrix::from_rows(&rows).unwrap(), &cfg).unwrap();
        assert_eq!(s.items().len(), 1);
        assert_eq!(s.items()[0].block_size, 2);
        assert_relative_eq!(s.items()[0].beta, 2.0, epsilon = 1e-6);
        assert_eq!(s.minimal_degree(), 4);
    }

    #[test]
    fn non_hurwitz_spectrum_is_an_error() {
        let a = SystemMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(matches!(
            compute_spectrum(&a, &SpectralConfig::default()),
            Err(Error::NotHurwitz { .. })
        ));
    }

    #[test]
    fn basis_order_and_examples() {
        let s = Spectrum::from_items(vec![SpectralItem::new(-1.0, 0.0, 2)]).unwrap();
        let b = build_basis(&s);
        assert_eq!(b.len(), 2);
        assert_eq!(b.functions()[0].power, 0);
        assert_eq!(b.functions()[1].power, 1);

        let s = Spectrum::from_items(vec![
            SpectralItem::new(-2.0, 0.0, 1),
            SpectralItem::new(-0.5, 3.0, 1),
            SpectralItem::new(-0.5, 1.0, 1),
        ])
        .unwrap();
        let b = build_basis(&s);
        let order: Vec<_> = b
            .functions()
            .iter()
            .map(|f| (f.alpha, f.beta, f.kind))
            .collect();
        assert_eq!(
            order,
            vec![
                (-0.5, 1.0, TrigKind::Cos),
                (-0.5, 1.0, TrigKind::Sin),
                (-0.5, 3.0, TrigKind::Cos),
                (-0.5, 3.0, TrigKind::Sin),
                (-2.0, 0.0, TrigKind::Cos),
            ]
        );
    }

    #[test]
    fn spectrum_override_validation() {
        assert!(Spectrum::<f64>::from_items(vec![]).is_err());
        assert!(Spectrum::from_items(vec![SpectralItem::new(-1.0, -1.0, 1)]).is_err());
        assert!(Spectrum::from_items(vec![SpectralItem::new(-1.0, 0.0, 0)]).is_err());
        assert!(Spectrum::from_items(vec![
            SpectralItem::new(-1.0, 0.0, 1),
            SpectralItem::new(-1.0, 0.0, 2)
        ])
        .is_err());
    }

    #[test]
    fn basis_derivative_matches_finite_difference() {
        let f = BasisFunction {
            alpha: -0.7f64,
            beta: 1.3,
            power: 2,
            kind: TrigKind::Sin,
        };
        for &t in &[0.0, 0.4, 1.7, 5.0] {
            let h = 1e-6;
            let fd = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
            assert!((f.derivative(t) - fd).abs() < 1e-8);
        }
    }
}
