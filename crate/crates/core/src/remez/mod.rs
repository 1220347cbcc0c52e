//! Least-deviation quasipolynomials under a linear constraint.
//!
//! Given a basis `phi_1..phi_n` on `[0, T]` and a nonzero functional `l`,
//! find `p = sum p_i phi_i` with `l(p) = 1` and the smallest uniform norm.
//! The solver is a Remez-type exchange over `n`-point alternances: at each
//! step the point of maximal deviation `t0` enters the alternance and the
//! point whose removal keeps `l` inside the cone of signed moment vectors
//! `a_i = sigma_i u(t_i)` leaves it. Every iterate carries a lower bound
//! `b_k` (discrete problem on the alternance) and an upper bound `B_k`
//! (best uniform norm seen so far), so the optimum is always bracketed.
//!
//! The cone representation of `l` is re-solved from scratch after every
//! exchange instead of being updated in place.

mod oracle;

pub use oracle::lp_grid_oracle;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, FullPivLu, Matrix};
use crate::quasipoly::{eval, moment_vector, sup_norm, Quasipolynomial, SearchConfig, SupNormResult};
use crate::scalar::{sign_of, Real};
use crate::spectral::Basis;

/// Linear functional on the quasipolynomial space, as a co-vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Functional<F> {
    pub ell: Vec<F>,
}

impl<F: Real> Functional<F> {
    pub fn new(ell: Vec<F>) -> Result<Self> {
        if ell.iter().all(|&v| v == F::zero()) {
            return Err(Error::InvalidArgument("functional must be nonzero".into()));
        }
        if ell.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("functional must be finite".into()));
        }
        Ok(Self { ell })
    }

    /// Point evaluation `p -> p(t)`, i.e. `l = u(t)`.
    pub fn point_evaluation(basis: &Basis<F>, t: F) -> Result<Self> {
        Self::new(moment_vector(basis, t).u)
    }

    pub fn scaled(&self, c: F) -> Result<Self> {
        Self::new(self.ell.iter().map(|&v| v * c).collect())
    }

    pub fn len(&self) -> usize {
        self.ell.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ell.is_empty()
    }
}

/// Solver settings. Tolerances are stored as `f64` and converted to the
/// working scalar type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct RemezConfig {
    /// Stop once `B - b < eps`.
    pub eps: f64,
    pub max_iter: usize,
    /// Stop as soon as `b > threshold` or `B <= threshold`.
    pub decision_threshold: Option<f64>,
    pub search: SearchConfig,
    /// Relative gap under which a repeated maximizer counts as a stall.
    pub rel_tol: f64,
    /// Lower limit for the step ratio `gamma_0 / Gamma` before `t0` is perturbed.
    pub singular_floor: f64,
    /// Collocation systems with a larger condition estimate are rejected.
    pub max_condition: f64,
    pub jitter_retries: usize,
}

impl Default for RemezConfig {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            max_iter: 500,
            decision_threshold: None,
            search: SearchConfig::default(),
            rel_tol: 1e-12,
            singular_floor: 1e-10,
            max_condition: 1e12,
            jitter_retries: 8,
        }
    }
}

/// Alternance of the current iterate together with its bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternanceState<F> {
    pub points: Vec<F>,
    pub signs: Vec<i8>,
    /// Orientation of the cone: it contains `global_sign * l`.
    pub global_sign: i8,
    pub polynomial: Quasipolynomial<F>,
    pub lower: F,
    pub upper: F,
    /// Positive coefficients with `global_sign * l = sum cone_i sigma_i u(t_i)`.
    pub cone: Vec<F>,
    /// Condition estimate of the equilibrated collocation matrix.
    pub condition: F,
    #[serde(skip)]
    sup: Option<SupNormResult<F>>,
}

impl<F: Real> AlternanceState<F> {
    /// Uniform norm of the current polynomial, if already computed.
    pub fn current_sup(&self) -> Option<SupNormResult<F>> {
        self.sup
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    Stalled,
    EarlyExit,
}

/// Per-iteration audit data of one exchange.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord<F> {
    pub iteration: usize,
    /// `b_k`, `B_k` before the exchange.
    pub lower: F,
    pub upper: F,
    /// `r_k = ||p_k||`.
    pub deviation: F,
    /// Point that entered the alternance and `|p_k|` there.
    pub entered: F,
    pub entered_value: F,
    /// Index of the point that left.
    pub replaced: usize,
    /// Cone coefficient of the entered point and the sum of all coefficients
    /// after the exchange.
    pub gamma0: F,
    pub gamma_total: F,
    /// `b_{k+1}`, `B_{k+1}`.
    pub next_lower: F,
    pub next_upper: F,
    pub perturbed: bool,
}

impl<F: Real> IterationRecord<F> {
    /// `b_{k+1} - b_k - (gamma0 / Gamma)(|p_k(t0)| - b_k)`, zero in exact arithmetic.
    pub fn increment_residual(&self) -> F {
        let predicted = self.gamma0 / self.gamma_total * (self.entered_value - self.lower);
        self.next_lower - self.lower - predicted
    }

    /// `B_{k+1} - b_{k+1} - (1 - gamma0 / Gamma)(B_k - b_k)`, nonpositive in exact arithmetic.
    pub fn contraction_excess(&self) -> F {
        let ratio = self.gamma0 / self.gamma_total;
        (self.next_upper - self.next_lower) - (F::one() - ratio) * (self.upper - self.lower)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeastDeviationResult<F> {
    /// Polynomial attaining the upper bound.
    pub polynomial: Quasipolynomial<F>,
    pub lower: F,
    pub upper: F,
    pub certificate: AlternanceState<F>,
    pub iterations: usize,
    pub status: SolveStatus,
    pub trace: Vec<IterationRecord<F>>,
    /// Rounding level of the computed uniform norms.
    pub noise_floor: F,
    pub warnings: Vec<String>,
}

/// Collocation solve `sum c_i u(t_i) = l` with row and column equilibration.
struct ConeSolve<F> {
    lu: FullPivLu<F>,
    row_scale: Vec<F>,
    col_scale: Vec<F>,
    coeffs: Vec<F>,
    condition: F,
}

impl<F: Real> ConeSolve<F> {
    fn new(basis: &Basis<F>, points: &[F], ell: &[F], max_condition: F) -> Result<Self> {
        let n = basis.len();
        let cols: Vec<Vec<F>> = points.iter().map(|&t| moment_vector(basis, t).u).collect();
        let mut raw = Matrix::from_fn(n, n, |i, j| cols[j][i]);
        let row_scale: Vec<F> = (0..n)
            .map(|i| {
                let m = (0..n).map(|j| raw[(i, j)].abs()).fold(F::zero(), F::max);
                if m > F::zero() {
                    F::one() / m
                } else {
                    F::one()
                }
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                raw[(i, j)] *= row_scale[i];
            }
        }
        let col_scale: Vec<F> = (0..n)
            .map(|j| {
                let m = (0..n).map(|i| raw[(i, j)].abs()).fold(F::zero(), F::max);
                if m > F::zero() {
                    F::one() / m
                } else {
                    F::one()
                }
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                raw[(i, j)] *= col_scale[j];
            }
        }
        let lu = FullPivLu::new(&raw).ok_or(Error::DegenerateBasis {
            condition: f64::INFINITY,
        })?;
        let condition = lu.condition();
        if !(condition <= max_condition) {
            return Err(Error::DegenerateBasis {
                condition: condition.to_f64_lossy(),
            });
        }
        let mut solve = Self {
            lu,
            row_scale,
            col_scale,
            coeffs: Vec::new(),
            condition,
        };
        solve.coeffs = solve.coordinates(ell);
        Ok(solve)
    }

    /// Coordinates `c` of `v` in the columns `u(t_i)`.
    fn coordinates(&self, v: &[F]) -> Vec<F> {
        let rhs: Vec<F> = v.iter().zip(&self.row_scale).map(|(&x, &s)| x * s).collect();
        self.lu
            .solve(&rhs)
            .into_iter()
            .zip(&self.col_scale)
            .map(|(c, &s)| c * s)
            .collect()
    }

    /// Coefficients `p` with `<p, u(t_i)> = values_i`.
    fn interpolate(&self, values: &[F]) -> Vec<F> {
        let rhs: Vec<F> = values.iter().zip(&self.col_scale).map(|(&x, &s)| x * s).collect();
        self.lu
            .solve_transpose(&rhs)
            .into_iter()
            .zip(&self.row_scale)
            .map(|(p, &s)| p * s)
            .collect()
    }
}

/// Alternance data derived from a point set: signs, cone coefficients, the
/// discrete optimum `b = 1 / sum alpha_i` and its polynomial.
fn alternance_from_points<F: Real>(
    basis: &Basis<F>,
    points: Vec<F>,
    ell: &Functional<F>,
    cfg: &RemezConfig,
) -> Result<(AlternanceState<F>, ConeSolve<F>)> {
    let solve = ConeSolve::new(basis, &points, &ell.ell, F::lit(cfg.max_condition))?;
    let signs: Vec<i8> = solve
        .coeffs
        .iter()
        .map(|&c| if c < F::zero() { -1 } else { 1 })
        .collect();
    let cone: Vec<F> = solve.coeffs.iter().map(|c| c.abs()).collect();
    let total: F = cone.iter().copied().sum();
    if !(total > F::zero()) || !total.is_finite() {
        return Err(Error::DegenerateBasis {
            condition: solve.condition.to_f64_lossy(),
        });
    }
    let lower = F::one() / total;
    let targets: Vec<F> = signs.iter().map(|&s| F::from(s).unwrap() * lower).collect();
    let mut coefficients = solve.interpolate(&targets);
    // l(p) = 1 holds in exact arithmetic; enforcing it keeps the uniform norm a
    // valid upper bound despite rounding in the solve.
    let normalization = dot(&coefficients, &ell.ell);
    if normalization.is_finite() && normalization != F::zero() {
        for c in coefficients.iter_mut() {
            *c /= normalization;
        }
    }
    let polynomial = Quasipolynomial::new(coefficients);
    let state = AlternanceState {
        points,
        signs,
        global_sign: 1,
        polynomial,
        lower,
        upper: F::infinity(),
        cone,
        condition: solve.condition,
        sup: None,
    };
    Ok((state, solve))
}

fn chebyshev_nodes<F: Real>(n: usize, horizon: F) -> Vec<F> {
    let half = horizon * F::lit(0.5);
    (1..=n)
        .map(|i| {
            let theta = F::PI() * F::from_usize(2 * i - 1) / F::from_usize(2 * n);
            half * (F::one() - theta.cos())
        })
        .collect()
}

/// Initial alternance on the Chebyshev nodes of `[0, T]`, or on greedily
/// spread grid points if those are numerically degenerate.
pub fn initialize<F: Real>(
    basis: &Basis<F>,
    horizon: F,
    ell: &Functional<F>,
    cfg: &RemezConfig,
) -> Result<AlternanceState<F>> {
    let n = basis.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty basis".into()));
    }
    if ell.len() != n {
        return Err(Error::InvalidArgument(format!(
            "functional has length {}, basis has {n} functions",
            ell.len()
        )));
    }
    if !(horizon > F::zero()) {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    match init_on_nodes(basis, horizon, ell, cfg, chebyshev_nodes(n, horizon)) {
        Err(Error::DegenerateBasis { .. }) if n > 1 => {
            init_on_nodes(basis, horizon, ell, cfg, spread_nodes(basis, horizon, &cfg.search))
        }
        other => other,
    }
}

/// Alternance on `points`, jittered when a cone coefficient vanishes.
fn init_on_nodes<F: Real>(
    basis: &Basis<F>,
    horizon: F,
    ell: &Functional<F>,
    cfg: &RemezConfig,
    mut points: Vec<F>,
) -> Result<AlternanceState<F>> {
    let jitter = horizon / F::from_usize(points.len()) * F::lit(1e-3);
    let mut last_err = None;
    for _ in 0..=cfg.jitter_retries {
        match alternance_from_points(basis, points.clone(), ell, cfg) {
            Ok((mut state, solve)) => {
                // Compare coefficients in equilibrated units, where scale differences
                // between the nodes are removed.
                let scaled: Vec<F> = state.cone.iter().zip(&solve.col_scale).map(|(&c, &s)| c / s).collect();
                let cmax = scaled.iter().copied().fold(F::zero(), F::max);
                let degenerate = scaled.iter().any(|&c| c <= cmax * F::lit(64.0) * F::epsilon());
                if !degenerate {
                    let sup = sup_norm(&state.polynomial, basis, horizon, &cfg.search);
                    state.upper = sup.value;
                    state.sup = Some(sup);
                    return Ok(state);
                }
                last_err = Some(Error::DegenerateBasis {
                    condition: state.condition.to_f64_lossy(),
                });
            }
            Err(e @ Error::DegenerateBasis { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
        for t in points.iter_mut() {
            *t = (*t + jitter).min(horizon);
        }
    }
    Err(last_err.unwrap_or(Error::DegenerateBasis {
        condition: f64::INFINITY,
    }))
}

/// `n` grid points whose moment vectors are as independent as possible:
/// greedy column selection with Gram-Schmidt on the row-equilibrated moment
/// matrix of a uniform grid. Used when the Chebyshev nodes give a
/// numerically singular collocation system, typically when fast modes are
/// negligible on most of `[0, T]`.
fn spread_nodes<F: Real>(basis: &Basis<F>, horizon: F, search: &SearchConfig) -> Vec<F> {
    let n = basis.len();
    let g = crate::quasipoly::grid_size(basis, horizon, search);
    let step = horizon / F::from_usize(g - 1);
    let times: Vec<F> = (0..g)
        .map(|j| if j + 1 == g { horizon } else { F::from_usize(j) * step })
        .collect();
    let mut cols: Vec<Vec<F>> = times.iter().map(|&t| moment_vector(basis, t).u).collect();
    for i in 0..n {
        let m = cols.iter().fold(F::zero(), |m, c| m.max(c[i].abs()));
        if m > F::zero() {
            for c in cols.iter_mut() {
                c[i] /= m;
            }
        }
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    for _ in 0..n {
        let (best, norm) = cols
            .iter()
            .enumerate()
            .filter(|(j, _)| !chosen.contains(j))
            .map(|(j, c)| (j, norm2(c)))
            .fold((0, -F::one()), |acc, x| if x.1 > acc.1 { x } else { acc });
        chosen.push(best);
        if !(norm > F::zero()) {
            continue;
        }
        let q: Vec<F> = cols[best].iter().map(|&v| v / norm).collect();
        for c in cols.iter_mut() {
            let proj = dot(&q, c);
            for (ci, &qi) in c.iter_mut().zip(&q) {
                *ci -= proj * qi;
            }
        }
    }
    let mut pts: Vec<F> = chosen.into_iter().map(|j| times[j]).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts
}

/// Outcome of one exchange.
#[derive(Debug, Clone)]
pub enum StepOutcome<F> {
    Advanced {
        state: AlternanceState<F>,
        record: IterationRecord<F>,
        warning: Option<String>,
    },
    /// The maximizer repeats an alternance point at the alternance level.
    Stalled,
}

/// Expansion of the signed moment vector at `t0` in the current alternance
/// and the leaving index it selects.
struct Exchange<F> {
    t0: F,
    value: F,
    q: usize,
    ratio: F,
}

fn plan_exchange<F: Real>(
    state: &AlternanceState<F>,
    solve: &ConeSolve<F>,
    basis: &Basis<F>,
    t0: F,
) -> Option<Exchange<F>> {
    let v = eval(&state.polynomial, basis, t0);
    let sigma0 = sign_of(v);
    let a0: Vec<F> = moment_vector(basis, t0).u.into_iter().map(|x| x * sigma0).collect();
    // a0 = sum s_i sigma_i u(t_i)
    let c = solve.coordinates(&a0);
    let s: Vec<F> = c
        .iter()
        .zip(&state.signs)
        .map(|(&ci, &si)| ci * F::from(si).unwrap())
        .collect();
    let (mut q, mut best) = (None, F::zero());
    for (i, (&si, &ai)) in s.iter().zip(&state.cone).enumerate() {
        if si > F::zero() {
            let r = si / ai;
            if q.is_none() || r > best {
                q = Some(i);
                best = r;
            }
        }
    }
    let q = q?;
    let gamma0 = state.cone[q] / s[q];
    let mut total = gamma0;
    for (i, (&si, &ai)) in s.iter().zip(&state.cone).enumerate() {
        if i != q {
            total += ai - state.cone[q] * si / s[q];
        }
    }
    Some(Exchange {
        t0,
        value: v.abs(),
        q,
        ratio: gamma0 / total,
    })
}

/// One exchange of the alternance.
pub fn exchange_step<F: Real>(
    state: &AlternanceState<F>,
    basis: &Basis<F>,
    horizon: F,
    ell: &Functional<F>,
    cfg: &RemezConfig,
) -> Result<StepOutcome<F>> {
    let sup = match state.sup {
        Some(s) => s,
        None => sup_norm(&state.polynomial, basis, horizon, &cfg.search),
    };
    let ttol = F::floor_eps(cfg.search.t_tol, 16.0) * horizon.max(F::one());
    let near_existing = state.points.iter().any(|&t| (t - sup.argmax).abs() <= ttol);
    if near_existing && sup.value <= state.lower * (F::one() + F::lit(cfg.rel_tol)) {
        return Ok(StepOutcome::Stalled);
    }

    let solve = ConeSolve::new(basis, &state.points, &ell.ell, F::lit(cfg.max_condition))?;
    let Some(mut plan) = plan_exchange(state, &solve, basis, sup.argmax) else {
        return Ok(StepOutcome::Stalled);
    };
    let mut perturbed = false;
    let mut warning = None;
    let floor = F::lit(cfg.singular_floor);
    if plan.ratio < floor {
        let eta = horizon * F::lit(1e-6);
        let left = (sup.argmax - eta).max(F::zero());
        let right = (sup.argmax + eta).min(horizon);
        let (vl, vr) = (
            eval(&state.polynomial, basis, left).abs(),
            eval(&state.polynomial, basis, right).abs(),
        );
        let t1 = if vr >= vl { right } else { left };
        if let Some(alt) = plan_exchange(state, &solve, basis, t1) {
            if alt.ratio > plan.ratio {
                plan = alt;
                perturbed = true;
            }
        }
        if plan.ratio < floor {
            warning = Some(format!(
                "step ratio gamma0/Gamma = {:e} below {:e}: slow convergence",
                plan.ratio.to_f64_lossy(), cfg.singular_floor
            ));
        }
    }

    let mut points = state.points.clone();
    points[plan.q] = plan.t0;
    let (mut next, _) = alternance_from_points(basis, points, ell, cfg)?;
    let next_upper = state.upper.min(sup.value);
    next.upper = next_upper;
    let new_sup = sup_norm(&next.polynomial, basis, horizon, &cfg.search);
    next.sup = Some(new_sup);

    let gamma_total: F = next.cone.iter().copied().sum();
    let record = IterationRecord {
        iteration: 0,
        lower: state.lower,
        upper: state.upper,
        deviation: sup.value,
        entered: plan.t0,
        entered_value: plan.value,
        replaced: plan.q,
        gamma0: next.cone[plan.q],
        gamma_total,
        next_lower: next.lower,
        next_upper,
        perturbed,
    };
    Ok(StepOutcome::Advanced {
        state: next,
        record,
        warning,
    })
}

/// Least-deviation polynomial with `l(p) = 1` on `[0, T]`.
///
/// Terminates when `B - b < eps` (converged), when the threshold decision
/// is settled (early exit), or when progress stops: iteration cap, repeated
/// maximizer, or a gap below the rounding level of the norm evaluation
/// (stalled). The returned bounds always satisfy `b <= min <= B`.
pub fn solve_least_deviation<F: Real>(
    basis: &Basis<F>,
    horizon: F,
    ell: &Functional<F>,
    cfg: &RemezConfig,
) -> Result<LeastDeviationResult<F>> {
    if !(cfg.eps >= 0.0) {
        return Err(Error::InvalidArgument("eps must be nonnegative".into()));
    }
    let mut state = initialize(basis, horizon, ell, cfg)?;
    let eps = F::lit(cfg.eps);
    let threshold = cfg.decision_threshold.map(F::lit);
    let mut best_poly = state.polynomial.clone();
    let mut best_lower = state.lower;
    let mut trace = Vec::new();
    let mut warnings = Vec::new();
    // Rounding level of every norm evaluation that has entered B so far.
    let mut noise = F::zero();
    let status;
    loop {
        let sup = state.sup.expect("state carries its uniform norm");
        noise = noise.max(F::lit(16.0) * F::epsilon() * sup.magnitude.max(sup.value));
        if sup.value < state.upper {
            state.upper = sup.value;
        }
        if sup.value <= state.upper {
            best_poly = state.polynomial.clone();
        }
        best_lower = best_lower.max(state.lower);
        let (lo, hi) = (best_lower, state.upper);
        if let Some(th) = threshold {
            if lo > th + noise || hi <= th + noise {
                status = SolveStatus::EarlyExit;
                break;
            }
        }
        if hi - lo < eps {
            status = SolveStatus::Converged;
            break;
        }
        if hi - lo <= F::lit(4.0) * noise {
            status = SolveStatus::Stalled;
            warnings.push("bound gap reached the rounding level of the norm evaluation".into());
            break;
        }
        if trace.len() >= cfg.max_iter {
            status = SolveStatus::Stalled;
            warnings.push(format!("iteration cap {} reached", cfg.max_iter));
            break;
        }
        match exchange_step(&state, basis, horizon, ell, cfg)? {
            StepOutcome::Stalled => {
                status = SolveStatus::Stalled;
                warnings.push("maximizer coincides with an alternance point".into());
                break;
            }
            StepOutcome::Advanced {
                state: next,
                mut record,
                warning,
            } => {
                record.iteration = trace.len() + 1;
                trace.push(record);
                if let Some(w) = warning {
                    warnings.push(format!("iteration {}: {w}", record.iteration));
                }
                state = next;
            }
        }
    }
    let noise_floor = noise;
    Ok(LeastDeviationResult {
        polynomial: best_poly,
        lower: best_lower.min(state.upper),
        upper: state.upper,
        iterations: trace.len(),
        certificate: state,
        status,
        trace,
        noise_floor,
        warnings,
    })
}

/// Checks the alternance certificate: `+l` or `-l` lies in the cone of the
/// signed moment vectors, and the certificate polynomial equioscillates at
/// level `[b (1 - 1e-6), B]` on the alternance points with the recorded signs.
pub fn verify_certificate<F: Real>(
    res: &LeastDeviationResult<F>,
    basis: &Basis<F>,
    ell: &Functional<F>,
) -> bool {
    let cert = &res.certificate;
    let n = basis.len();
    if cert.points.len() != n || cert.signs.len() != n || ell.len() != n {
        return false;
    }
    let Ok(solve) = ConeSolve::new(basis, &cert.points, &ell.ell, F::infinity()) else {
        return false;
    };
    let alpha: Vec<F> = solve
        .coeffs
        .iter()
        .zip(&cert.signs)
        .map(|(&c, &s)| c * F::from(s).unwrap())
        .collect();
    let scale = alpha.iter().fold(F::zero(), |m, a| m.max(a.abs()));
    let tol = F::floor_eps(1e-9, 16.0) * scale;
    let in_cone = alpha.iter().all(|&a| a >= -tol) || alpha.iter().all(|&a| a <= tol);
    if !in_cone {
        return false;
    }
    // Values at the nodes carry the rounding of the polynomial's evaluation.
    let lo = res.lower * (F::one() - F::floor_eps(1e-6, 16.0)) - res.noise_floor;
    let hi = res.upper * (F::one() + F::floor_eps(1e-12, 64.0)) + res.noise_floor;
    cert.points.iter().zip(&cert.signs).all(|(&t, &s)| {
        let v = eval(&cert.polynomial, basis, t);
        let sign_ok = (v >= F::zero()) == (s > 0) || v == F::zero();
        sign_ok && v.abs() >= lo && v.abs() <= hi
    }) && dot(&cert.polynomial.coefficients, &ell.ell).is_finite()
}

#[cfg(test)]
mod tests;
