//! Evaluation of quasipolynomials over a [`Basis`] and their uniform norm on
//! a segment.

use serde::Serialize;

use crate::roots::bracketed_root;
use crate::scalar::Real;
use crate::spectral::Basis;

/// Coefficient vector of a quasipolynomial over a shared basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Quasipolynomial<F> {
    pub coefficients: Vec<F>,
}

impl<F: Real> Quasipolynomial<F> {
    pub fn new(coefficients: Vec<F>) -> Self {
        Self { coefficients }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![F::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn scaled(&self, c: F) -> Self {
        Self::new(self.coefficients.iter().map(|&x| x * c).collect())
    }
}

/// Values of all basis functions at `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentVector<F> {
    pub t: F,
    pub u: Vec<F>,
}

/// Tuning of the uniform-norm search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub grid_per_dim: usize,
    pub grid_min: usize,
    /// Abscissa tolerance of the maximizer refinement, relative to `max(T, 1)`.
    pub t_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_per_dim: 64,
            grid_min: 1024,
            t_tol: 1e-13,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupNormResult<F> {
    pub value: F,
    pub argmax: F,
    pub sign: i8,
    /// `sum |p_i phi_i(argmax)|`, the scale of rounding errors in `value`.
    pub magnitude: F,
}

/// Walks the basis groups at `t`, handing `(index, phi_i(t), phi_i'(t))` to `visit`.
/// The exponential and trigonometric factors are computed once per group.
#[inline]
fn for_each_term<F: Real>(basis: &Basis<F>, t: F, with_derivative: bool, mut visit: impl FnMut(usize, F, F)) {
    for g in basis.groups() {
        let e = (g.alpha * t).exp();
        let (c, s) = if g.oscillating {
            ((g.beta * t).cos(), (g.beta * t).sin())
        } else {
            (F::one(), F::zero())
        };
        let mut tk = F::one(); // t^k
        let mut tk1 = F::zero(); // k t^{k-1}
        let mut idx = g.start;
        for k in 0..g.block_size {
            let (dc, ds) = if with_derivative {
                (
                    e * (tk1 * c + tk * (g.alpha * c - g.beta * s)),
                    e * (tk1 * s + tk * (g.alpha * s + g.beta * c)),
                )
            } else {
                (F::zero(), F::zero())
            };
            visit(idx, e * tk * c, dc);
            idx += 1;
            if g.oscillating {
                visit(idx, e * tk * s, ds);
                idx += 1;
            }
            tk1 = F::from_usize(k + 1) * tk;
            tk *= t;
        }
    }
}

/// `u(t) = (phi_1(t), ..., phi_n(t))`.
pub fn moment_vector<F: Real>(basis: &Basis<F>, t: F) -> MomentVector<F> {
    let mut u = vec![F::zero(); basis.len()];
    for_each_term(basis, t, false, |i, v, _| u[i] = v);
    MomentVector { t, u }
}

/// `p(t) = sum p_i phi_i(t)`.
pub fn eval<F: Real>(p: &Quasipolynomial<F>, basis: &Basis<F>, t: F) -> F {
    debug_assert_eq!(p.len(), basis.len());
    let mut acc = F::zero();
    for_each_term(basis, t, false, |i, v, _| acc += p.coefficients[i] * v);
    acc
}

/// `p'(t)`, differentiated termwise.
pub fn eval_derivative<F: Real>(p: &Quasipolynomial<F>, basis: &Basis<F>, t: F) -> F {
    debug_assert_eq!(p.len(), basis.len());
    let mut acc = F::zero();
    for_each_term(basis, t, true, |i, _, d| acc += p.coefficients[i] * d);
    acc
}

/// `(p(t), p'(t), sum |p_i phi_i(t)|)` in one pass.
pub(crate) fn eval_full<F: Real>(p: &Quasipolynomial<F>, basis: &Basis<F>, t: F) -> (F, F, F) {
    let (mut v, mut d, mut m) = (F::zero(), F::zero(), F::zero());
    for_each_term(basis, t, true, |i, x, dx| {
        let c = p.coefficients[i];
        v += c * x;
        d += c * dx;
        m += (c * x).abs();
    });
    (v, d, m)
}

/// Number of grid points used by [`sup_norm`] for this basis on `[0, T]`.
pub fn grid_size<F: Real>(basis: &Basis<F>, horizon: F, cfg: &SearchConfig) -> usize {
    let n = basis.len();
    let oscillation = (basis.max_beta() * horizon / F::PI()).to_f64_lossy();
    let by_frequency = (16.0 * (1.0 + oscillation)).ceil() as usize;
    (cfg.grid_per_dim * n).max(cfg.grid_min).max(by_frequency).max(2)
}

/// Uniform norm of `p` on `[0, T]` with its maximizer.
///
/// Scans a uniform grid (endpoints included), then refines every grid cell in
/// which `|p|` switches from increasing to decreasing by a bracketed root
/// search on `p'`. Ties are broken towards the smaller abscissa.
pub fn sup_norm<F: Real>(
    p: &Quasipolynomial<F>,
    basis: &Basis<F>,
    horizon: F,
    cfg: &SearchConfig,
) -> SupNormResult<F> {
    assert!(horizon > F::zero(), "horizon must be positive");
    let npts = grid_size(basis, horizon, cfg);
    let step = horizon / F::from_usize(npts - 1);
    let xtol = F::floor_eps(cfg.t_tol, 4.0) * horizon.max(F::one());

    let grid: Vec<(F, F, F, F)> = (0..npts)
        .map(|j| {
            let t = if j + 1 == npts {
                horizon
            } else {
                F::from_usize(j) * step
            };
            let (v, d, m) = eval_full(p, basis, t);
            (t, v, d, m)
        })
        .collect();

    let mut best = SupNormResult {
        value: F::zero(),
        argmax: F::zero(),
        sign: 1,
        magnitude: F::zero(),
    };
    let consider = |t: F, v: F, m: F, best: &mut SupNormResult<F>| {
        let a = v.abs();
        if a > best.value || (a == best.value && t < best.argmax) {
            *best = SupNormResult {
                value: a,
                argmax: t,
                sign: if v < F::zero() { -1 } else { 1 },
                magnitude: m,
            };
        }
    };

    for &(t, v, _, m) in &grid {
        consider(t, v, m, &mut best);
    }
    for w in grid.windows(2) {
        let (t0, v0, d0, _) = w[0];
        let (t1, v1, d1, _) = w[1];
        // |p| rising at the left end and falling at the right end.
        let rising = v0 * d0 > F::zero() || (v0 == F::zero() && d0 != F::zero());
        let falling = v1 * d1 < F::zero();
        if !(rising && falling) || d0.signum() == d1.signum() {
            continue;
        }
        let root = bracketed_root(|t| eval_derivative(p, basis, t), t0, t1, d0, d1, xtol, 200);
        let (v, _, m) = eval_full(p, basis, root);
        consider(root, v, m, &mut best);
    }
    best
}
