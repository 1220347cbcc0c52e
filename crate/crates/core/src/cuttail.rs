//! Cut tail decisions and the cut tail time `T_cut(A)`.
//!
//! `T > T_cut(A)` iff the least uniform norm on `[0, T]` of a trajectory
//! quasipolynomial `p` with `p(T) = 1` exceeds one. The set of cut tail
//! points is the half-line `(T_cut, inf)`, so `T_cut` is found by bisection
//! on that predicate. Two independent oracles are provided: closed forms for
//! planar matrices with simple eigenvalues, and a direct test of whether
//! `x(T)` lies in the interior of the symmetrized convex hull of a sampled
//! trajectory.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{expm, norm2, Matrix};
use crate::remez::{solve_least_deviation, Functional, RemezConfig, SolveStatus};
use crate::roots::bracketed_root;
use crate::scalar::Real;
use crate::simplex::{self, LpStatus};
use crate::spectral::{build_basis, compute_spectrum, eigenvalues, Basis, SpectralConfig, Spectrum, SystemMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CutTail,
    NotCutTail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RemezBisection,
    PlanarReal,
    PlanarComplex,
    HullOracle,
}

/// Settings of the convex-hull membership check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct HullConfig {
    pub n_samples: usize,
    /// `x(T)` counts as interior when every axis margin, relative to `|x(T)|`,
    /// exceeds this value.
    pub margin_tol: f64,
    /// Largest state dimension accepted.
    pub max_dim: usize,
    /// The trajectory is sampled up to `T + tail_factor / |max Re lambda|`.
    pub tail_factor: f64,
    /// Share of the samples placed on `[0, T]`; the rest cover the tail.
    pub window_fraction: f64,
    /// Seed of the random initial state used by the hull bisection.
    pub seed: u64,
}

impl Default for HullConfig {
    fn default() -> Self {
        Self {
            n_samples: 4000,
            margin_tol: 1e-6,
            max_dim: 6,
            tail_factor: 20.0,
            window_fraction: 0.75,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct CutTailConfig {
    /// A horizon is a cut tail point when the lower bound exceeds `1 + decision_tol`.
    pub decision_tol: f64,
    pub remez: RemezConfig,
    pub spectral: SpectralConfig,
    pub max_doublings: usize,
    /// Hull settings for the bisection on hull membership.
    pub hull_search: HullConfig,
}

impl Default for CutTailConfig {
    fn default() -> Self {
        Self {
            decision_tol: 1e-13,
            remez: RemezConfig::default(),
            spectral: SpectralConfig::default(),
            max_doublings: 60,
            hull_search: HullConfig {
                n_samples: 20_000,
                margin_tol: 1e-12,
                ..HullConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutTailDecision<F> {
    pub t: F,
    pub verdict: Verdict,
    pub lower: F,
    pub upper: F,
    /// Distance of the bounds from the threshold `1 + tol`: `lower - 1 - tol`
    /// for cut tail points, `upper - 1 - tol` (nonpositive) otherwise, zero
    /// when inconclusive.
    pub threshold_margin: F,
    /// Threshold tolerance actually applied, including the rounding level of
    /// the norm evaluation.
    pub tolerance: F,
    pub status: SolveStatus,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutTailResult<F> {
    pub t_low: F,
    pub t_high: F,
    pub estimate: F,
    pub method: Method,
    pub low: Option<CutTailDecision<F>>,
    pub high: Option<CutTailDecision<F>>,
    /// Number of horizons examined.
    pub evaluations: usize,
    pub warnings: Vec<String>,
}

impl<F: Real> CutTailResult<F> {
    fn point(t: F, method: Method) -> Self {
        Self {
            t_low: t,
            t_high: t,
            estimate: t,
            method,
            low: None,
            high: None,
            evaluations: 0,
            warnings: Vec::new(),
        }
    }
}

/// Cut tail decision on a prepared basis.
pub fn decide_on_basis<F: Real>(
    basis: &Basis<F>,
    t: F,
    decision_tol: f64,
    remez: &RemezConfig,
) -> Result<CutTailDecision<F>> {
    if !(t > F::zero()) {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    if !(decision_tol >= 0.0) {
        return Err(Error::InvalidArgument("decision tolerance must be nonnegative".into()));
    }
    let ell = Functional::point_evaluation(basis, t)?;
    let cfg = RemezConfig {
        eps: 0.0,
        decision_threshold: Some(1.0 + decision_tol),
        ..*remez
    };
    let res = solve_least_deviation(basis, t, &ell, &cfg)?;
    let threshold = F::one() + F::lit(decision_tol) + res.noise_floor;
    let (verdict, margin) = if res.lower > threshold {
        (Verdict::CutTail, res.lower - threshold)
    } else if res.upper <= threshold {
        (Verdict::NotCutTail, res.upper - threshold)
    } else {
        (Verdict::Inconclusive, F::zero())
    };
    Ok(CutTailDecision {
        t,
        verdict,
        lower: res.lower,
        upper: res.upper,
        threshold_margin: margin,
        tolerance: threshold - F::one(),
        status: res.status,
        iterations: res.iterations,
    })
}

/// Decides whether `T` is a cut tail point of `A`.
pub fn is_cut_tail<F: Real>(a: &SystemMatrix<F>, t: F, cfg: &CutTailConfig) -> Result<CutTailDecision<F>> {
    let spectrum = compute_spectrum(a, &cfg.spectral)?;
    is_cut_tail_with_spectrum(&spectrum, t, cfg)
}

/// As [`is_cut_tail`] for explicitly given spectral data.
pub fn is_cut_tail_with_spectrum<F: Real>(
    spectrum: &Spectrum<F>,
    t: F,
    cfg: &CutTailConfig,
) -> Result<CutTailDecision<F>> {
    require_hurwitz(spectrum)?;
    decide_on_basis(&build_basis(spectrum), t, cfg.decision_tol, &cfg.remez)
}

fn require_hurwitz<F: Real>(spectrum: &Spectrum<F>) -> Result<()> {
    if spectrum.is_hurwitz() {
        Ok(())
    } else {
        Err(Error::NotHurwitz {
            max_real_part: spectrum.max_real_part().to_f64_lossy(),
        })
    }
}

/// `T_cut(A)` to within `tol` by bisection on the cut tail predicate.
pub fn compute_tcut<F: Real>(a: &SystemMatrix<F>, tol: F, cfg: &CutTailConfig) -> Result<CutTailResult<F>> {
    let spectrum = compute_spectrum(a, &cfg.spectral)?;
    let mut res = compute_tcut_with_spectrum(&spectrum, tol, cfg)?;
    res.warnings.splice(0..0, spectrum.warnings().iter().cloned());
    Ok(res)
}

/// As [`compute_tcut`] for explicitly given spectral data.
pub fn compute_tcut_with_spectrum<F: Real>(
    spectrum: &Spectrum<F>,
    tol: F,
    cfg: &CutTailConfig,
) -> Result<CutTailResult<F>> {
    require_hurwitz(spectrum)?;
    if !(tol > F::zero()) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if spectrum.minimal_degree() == 1 {
        return Ok(CutTailResult::point(F::zero(), Method::RemezBisection));
    }
    let basis = build_basis(spectrum);
    let mut evaluations = 0usize;
    let mut warnings = Vec::new();
    // Horizons whose decision stayed ambiguous, with the side they were assigned to.
    let mut ambiguous: Vec<(F, bool)> = Vec::new();

    let mut decide = |t: F, evaluations: &mut usize, warnings: &mut Vec<String>| -> Result<(bool, CutTailDecision<F>)> {
        *evaluations += 1;
        let d = decide_on_basis(&basis, t, cfg.decision_tol, &cfg.remez)?;
        match d.verdict {
            Verdict::CutTail => return Ok((true, d)),
            Verdict::NotCutTail => return Ok((false, d)),
            Verdict::Inconclusive => {}
        }
        let retry = decide_on_basis(&basis, t, 0.0, &cfg.remez)?;
        match retry.verdict {
            Verdict::CutTail => Ok((true, retry)),
            Verdict::NotCutTail => Ok((false, retry)),
            Verdict::Inconclusive => {
                let mid = (retry.lower + retry.upper) * F::lit(0.5);
                let side = mid > F::one() + F::lit(cfg.decision_tol);
                warnings.push(format!(
                    "T = {t}: bounds [{}, {}] straddle the threshold; bracket widened",
                    retry.lower, retry.upper
                ));
                ambiguous.push((t, side));
                Ok((side, retry))
            }
        }
    };

    let tau = F::one() / spectrum.max_real_part().abs();
    let mut t_low = F::zero();
    let mut low_decision = None;
    let mut t_high = tau;
    let mut doublings = 0usize;
    let mut high_decision = loop {
        let (cut, d) = decide(t_high, &mut evaluations, &mut warnings)?;
        if cut {
            break d;
        }
        t_low = t_high;
        low_decision = Some(d);
        if doublings >= cfg.max_doublings {
            return Err(Error::NoUpperBracket {
                doublings,
                last_t: t_high.to_f64_lossy(),
            });
        }
        t_high = t_high + t_high;
        doublings += 1;
    };

    let half = F::lit(0.5);
    while t_high - t_low > tol {
        let mid = t_low + (t_high - t_low) * half;
        if mid <= t_low || mid >= t_high {
            break;
        }
        let (cut, d) = decide(mid, &mut evaluations, &mut warnings)?;
        if cut {
            t_high = mid;
            high_decision = d;
        } else {
            t_low = mid;
            low_decision = Some(d);
        }
    }
    for &(t, side) in &ambiguous {
        if side {
            t_low = t_low.min(t);
        } else {
            t_high = t_high.max(t);
        }
    }
    Ok(CutTailResult {
        t_low,
        t_high,
        estimate: (t_low + t_high) * half,
        method: Method::RemezBisection,
        low: low_decision,
        high: Some(high_decision),
        evaluations,
        warnings,
    })
}

/// Positive root of `(1 + e^{-a1 t}) / a1 = (1 + e^{-a2 t}) / a2`, the cut
/// tail time of a planar matrix with real eigenvalues `a1 != a2`, both negative.
pub fn tcut_planar_real<F: Real>(alpha1: F, alpha2: F) -> Result<F> {
    if !(alpha1 < F::zero() && alpha2 < F::zero()) {
        return Err(Error::InvalidArgument("eigenvalues must be negative".into()));
    }
    if alpha1 == alpha2 {
        return Err(Error::Unsupported("repeated real eigenvalue".into()));
    }
    let (a1, a2) = if alpha1 < alpha2 { (alpha1, alpha2) } else { (alpha2, alpha1) };
    // Dividing by e^{-a1 t} keeps the function bounded: g(t) e^{a1 t}.
    let g = |t: F| ((a1 * t).exp() + F::one()) / a1 - ((a1 * t).exp() + ((a1 - a2) * t).exp()) / a2;
    let mut hi = F::one() / a2.abs();
    let g0 = g(F::zero());
    let mut ghi = g(hi);
    let mut lo = F::zero();
    let mut glo = g0;
    let mut guard = 0;
    while ghi > F::zero() {
        lo = hi;
        glo = ghi;
        hi = hi + hi;
        ghi = g(hi);
        guard += 1;
        if guard > 200 || !ghi.is_finite() {
            return Err(Error::InvalidArgument("no sign change of the planar equation".into()));
        }
    }
    let xtol = F::floor_eps(1e-14, 4.0) * hi;
    Ok(bracketed_root(g, lo, hi, glo, ghi, xtol, 400))
}

/// First positive root of `alpha sin(beta t) + beta cos(beta t) + beta e^{alpha t}`,
/// the cut tail time of a planar matrix with eigenvalues `alpha +- i beta`.
pub fn tcut_planar_complex<F: Real>(alpha: F, beta: F) -> Result<F> {
    if !(alpha < F::zero() && beta > F::zero()) {
        return Err(Error::InvalidArgument("need alpha < 0 and beta > 0".into()));
    }
    let h = |t: F| alpha * (beta * t).sin() + beta * (beta * t).cos() + beta * (alpha * t).exp();
    let step = F::PI() / (F::lit(8.0) * beta);
    let mut lo = F::zero();
    let mut hlo = h(lo);
    for k in 1..=8 * 64 {
        let hi = step * F::from_usize(k);
        let hhi = h(hi);
        if hhi <= F::zero() {
            let xtol = F::floor_eps(1e-14, 4.0) * hi;
            return Ok(bracketed_root(h, lo, hi, hlo, hhi, xtol, 400));
        }
        lo = hi;
        hlo = hhi;
    }
    Err(Error::InvalidArgument("no sign change of the planar equation".into()))
}

/// `T_cut` of a 2x2 matrix from the closed forms.
pub fn compute_tcut_planar<F: Real>(a: &SystemMatrix<F>, cfg: &SpectralConfig) -> Result<CutTailResult<F>> {
    if a.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "closed forms need a 2x2 matrix, got dimension {}",
            a.dim()
        )));
    }
    let spectrum = compute_spectrum(a, cfg)?;
    let items = spectrum.items();
    let (t, method) = match items {
        [one] if one.beta > F::zero() => (tcut_planar_complex(one.alpha, one.beta)?, Method::PlanarComplex),
        [x, y] => (tcut_planar_real(x.alpha, y.alpha)?, Method::PlanarReal),
        _ => return Err(Error::Unsupported("closed forms exclude repeated eigenvalues".into())),
    };
    Ok(CutTailResult::point(t, method))
}

fn slowest_rate<F: Real>(a: &SystemMatrix<F>) -> Result<f64> {
    let ev = eigenvalues(a)?;
    let max_re = ev.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
    if !(max_re < 0.0) {
        return Err(Error::NotHurwitz { max_real_part: max_re });
    }
    Ok(-max_re)
}

/// Sample times: `window_fraction` of them uniformly on `[0, T]` (both ends
/// included), the rest uniformly on `(T, t_big]`.
fn sample_times<F: Real>(t: F, t_big: F, cfg: &HullConfig) -> Vec<F> {
    let n = cfg.n_samples.max(4);
    let n_in = ((n as f64 * cfg.window_fraction).round() as usize).clamp(2, n - 1);
    let n_tail = n - n_in;
    let mut times: Vec<F> = (0..n_in)
        .map(|j| {
            if j + 1 == n_in {
                t
            } else {
                t * F::from_usize(j) / F::from_usize(n_in - 1)
            }
        })
        .collect();
    let tail = t_big - t;
    times.extend((1..=n_tail).map(|j| t + tail * F::from_usize(j) / F::from_usize(n_tail)));
    times
}

/// Smallest axis margin of `x(T)` inside the symmetrized convex hull of the
/// sampled trajectory, relative to `|x(T)|`.
///
/// For each of the `2d` directions `+-e_m`, maximizes `delta` subject to
/// `x(T) +- delta e_m` being a combination `sum (y+_j - y-_j) x(t_j)` with
/// `sum (y+_j + y-_j) <= 1`. Boundary points get a margin of at most zero
/// because the sampled hull is contained in the hull of the full trajectory.
pub fn hull_margin<F: Real>(a: &SystemMatrix<F>, x0: &[F], t: F, cfg: &HullConfig) -> Result<F> {
    let d = a.dim();
    if d > cfg.max_dim {
        return Err(Error::Unsupported(format!(
            "hull check limited to dimension {}, got {d}",
            cfg.max_dim
        )));
    }
    if x0.len() != d {
        return Err(Error::InvalidArgument(format!(
            "initial state has length {}, expected {d}",
            x0.len()
        )));
    }
    if !(t > F::zero()) {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    if cfg.n_samples < 2 * d + 2 {
        return Err(Error::InvalidArgument("too few hull samples".into()));
    }
    let rate = slowest_rate(a)?;
    let t_big = t + F::lit(cfg.tail_factor / rate);
    let times = sample_times(t, t_big, cfg);
    let xt = expm(&a.matrix().scale(t)).matvec(x0);
    let scale = norm2(&xt);
    if !(scale > F::zero()) {
        return Err(Error::InvalidArgument("trajectory vanishes at T".into()));
    }
    let samples: Vec<Vec<F>> = times
        .iter()
        .map(|&s| {
            expm(&a.matrix().scale(s))
                .matvec(x0)
                .into_iter()
                .map(|v| v / scale)
                .collect()
        })
        .collect();
    let target: Vec<F> = xt.iter().map(|&v| v / scale).collect();

    let n = samples.len();
    let cols = 2 * n + 2; // y+, y-, delta, slack
    let mut base = Matrix::zeros(d + 1, cols);
    for (j, x) in samples.iter().enumerate() {
        for i in 0..d {
            base[(i, j)] = x[i];
            base[(i, n + j)] = -x[i];
        }
        base[(d, j)] = F::one();
        base[(d, n + j)] = F::one();
    }
    base[(d, cols - 1)] = F::one();
    let mut rhs = target.clone();
    rhs.push(F::one());
    let mut cost = vec![F::zero(); cols];
    cost[2 * n] = -F::one();

    let mut margin = F::infinity();
    for m in 0..d {
        for dir in [F::one(), -F::one()] {
            let mut lp = base.clone();
            lp[(m, 2 * n)] = -dir;
            let sol = simplex::solve(&lp, &rhs, &cost)?;
            let delta = match sol.status {
                LpStatus::Optimal => sol.x[2 * n],
                LpStatus::Infeasible => -F::infinity(),
                LpStatus::Unbounded => return Err(Error::Lp("unbounded hull margin".into())),
            };
            margin = margin.min(delta);
        }
    }
    Ok(margin)
}

/// True iff `x(T) = e^{TA} x0` lies in the interior of the symmetrized convex
/// hull of the sampled trajectory.
pub fn hull_membership_oracle<F: Real>(a: &SystemMatrix<F>, x0: &[F], t: F, cfg: &HullConfig) -> Result<bool> {
    Ok(hull_margin(a, x0, t, cfg)? > F::lit(cfg.margin_tol))
}

/// Random unit vector with Gaussian-like direction, drawn from `seed`.
pub fn random_unit_vector<F: Real>(d: usize, seed: u64) -> Vec<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Vec<f64> = (0..d)
            .map(|_| {
                // Box-Muller
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
            .collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| F::lit(x / n)).collect();
        }
    }
}

/// `T_cut` by bisection on hull membership of a random initial state.
///
/// Much slower and less accurate than [`compute_tcut`]; meant as an
/// independent cross-check in low dimension.
pub fn compute_tcut_hull<F: Real>(a: &SystemMatrix<F>, tol: F, cfg: &CutTailConfig) -> Result<CutTailResult<F>> {
    if !(tol > F::zero()) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let spectrum = compute_spectrum(a, &cfg.spectral)?;
    require_hurwitz(&spectrum)?;
    if spectrum.minimal_degree() == 1 {
        return Ok(CutTailResult::point(F::zero(), Method::HullOracle));
    }
    let hull = &cfg.hull_search;
    let x0 = random_unit_vector::<F>(a.dim(), hull.seed);
    let tau = F::one() / spectrum.max_real_part().abs();
    let mut evaluations = 0usize;
    let mut t_low = F::zero();
    let mut t_high = tau;
    let mut doublings = 0;
    loop {
        evaluations += 1;
        if hull_membership_oracle(a, &x0, t_high, hull)? {
            break;
        }
        t_low = t_high;
        if doublings >= cfg.max_doublings {
            return Err(Error::NoUpperBracket {
                doublings,
                last_t: t_high.to_f64_lossy(),
            });
        }
        t_high = t_high + t_high;
        doublings += 1;
    }
    let half = F::lit(0.5);
    while t_high - t_low > tol {
        let mid = t_low + (t_high - t_low) * half;
        evaluations += 1;
        if hull_membership_oracle(a, &x0, mid, hull)? {
            t_high = mid;
        } else {
            t_low = mid;
        }
    }
    Ok(CutTailResult {
        t_low,
        t_high,
        estimate: (t_low + t_high) * half,
        method: Method::HullOracle,
        low: None,
        high: None,
        evaluations,
        warnings: Vec::new(),
    })
}
