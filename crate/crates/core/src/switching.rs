//! Linear switching systems with dwell-time restrictions.
//!
//! A system is a finite set of regimes `A` with dwell bounds: every
//! activation of `A` lasts at least `m(A)` and at most `M(A)` (possibly
//! unbounded). Stability of the system with lower bounds only is equivalent
//! to stability of the system with upper bounds `m(A) + T_cut(A)`, so any
//! given `M(A) >= m(A) + T_cut(A)` can be dropped.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cuttail::{compute_tcut, CutTailConfig};
use crate::error::{Error, Result};
use crate::linalg::{expm, norm2};
use crate::scalar::Real;
use crate::spectral::{is_hurwitz, SystemMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Regime<F> {
    pub label: String,
    pub matrix: SystemMatrix<F>,
    /// Minimal dwell time `m`.
    pub min_dwell: F,
    /// Maximal dwell time `M`; `None` for unbounded.
    pub max_dwell: Option<F>,
}

impl<F: Real> Regime<F> {
    pub fn new(label: impl Into<String>, matrix: SystemMatrix<F>, min_dwell: F, max_dwell: Option<F>) -> Self {
        Self {
            label: label.into(),
            matrix,
            min_dwell,
            max_dwell,
        }
    }

    fn admits(&self, duration: F) -> bool {
        let tol = F::floor_eps(1e-12, 16.0) * self.min_dwell.max(F::one());
        duration >= self.min_dwell - tol && self.max_dwell.is_none_or(|mx| duration <= mx + tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchedSystem<F> {
    regimes: Vec<Regime<F>>,
}

impl<F: Real> SwitchedSystem<F> {
    /// Validates dwell bounds, label uniqueness and a common state dimension.
    pub fn new(regimes: Vec<Regime<F>>) -> Result<Self> {
        if regimes.is_empty() {
            return Err(Error::InvalidSystem("no regimes".into()));
        }
        let d = regimes[0].matrix.dim();
        for (i, r) in regimes.iter().enumerate() {
            if r.label.is_empty() {
                return Err(Error::InvalidSystem(format!("regime {i} has an empty label")));
            }
            if regimes[..i].iter().any(|o| o.label == r.label) {
                return Err(Error::InvalidSystem(format!("duplicate label '{}'", r.label)));
            }
            if r.matrix.dim() != d {
                return Err(Error::InvalidSystem(format!(
                    "regime '{}' has dimension {}, expected {d}",
                    r.label,
                    r.matrix.dim()
                )));
            }
            if !(r.min_dwell > F::zero()) || !r.min_dwell.is_finite() {
                return Err(Error::InvalidSystem(format!(
                    "regime '{}': m must be positive and finite",
                    r.label
                )));
            }
            if let Some(mx) = r.max_dwell {
                if !(mx > r.min_dwell) {
                    return Err(Error::InvalidSystem(format!(
                        "regime '{}': M = {mx} must exceed m = {}",
                        r.label, r.min_dwell
                    )));
                }
            }
        }
        Ok(Self { regimes })
    }

    pub fn regimes(&self) -> &[Regime<F>] {
        &self.regimes
    }

    pub fn dim(&self) -> usize {
        self.regimes[0].matrix.dim()
    }

    pub fn regime(&self, label: &str) -> Option<&Regime<F>> {
        self.regimes.iter().find(|r| r.label == label)
    }

    /// Applies `S A S^-1` to every regime.
    pub fn similarity(&self, s: &crate::linalg::Matrix<F>) -> Result<Self> {
        let lu = crate::linalg::FullPivLu::new(s).ok_or_else(|| Error::InvalidArgument("singular transform".into()))?;
        let d = s.rows();
        let mut inv = crate::linalg::Matrix::zeros(d, d);
        for j in 0..d {
            let mut e = vec![F::zero(); d];
            e[j] = F::one();
            for (i, v) in lu.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        let regimes = self
            .regimes
            .iter()
            .map(|r| {
                Ok(Regime {
                    matrix: SystemMatrix::new(s.matmul(r.matrix.matrix()).matmul(&inv))?,
                    ..r.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(regimes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment<F> {
    pub label: String,
    pub duration: F,
}

/// Piecewise-constant switching law as consecutive (regime, duration) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct SwitchingLaw<F> {
    pub segments: Vec<Segment<F>>,
}

impl<F: Real> SwitchingLaw<F> {
    pub fn new(segments: Vec<(String, F)>) -> Self {
        Self {
            segments: segments
                .into_iter()
                .map(|(label, duration)| Segment { label, duration })
                .collect(),
        }
    }

    pub fn total_time(&self) -> F {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Lists every segment that breaks the dwell bounds, names an unknown
    /// regime, or repeats the previous regime.
    pub fn validate(&self, sys: &SwitchedSystem<F>) -> Result<()> {
        let mut violations = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            match sys.regime(&seg.label) {
                None => violations.push(format!("segment {i}: unknown regime '{}'", seg.label)),
                Some(r) => {
                    if !r.admits(seg.duration) {
                        let upper = r.max_dwell.map_or("inf".to_string(), |m| m.to_string());
                        violations.push(format!(
                            "segment {i}: duration {} of '{}' outside [{}, {upper}]",
                            seg.duration, seg.label, r.min_dwell
                        ));
                    }
                }
            }
            if i > 0 && self.segments[i - 1].label == seg.label {
                violations.push(format!("segment {i}: repeats regime '{}'", seg.label));
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidLaw { violations })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DwellRow<F> {
    pub label: String,
    pub hurwitz: bool,
    pub min_dwell: F,
    pub max_dwell: Option<F>,
    /// `None` when some regime is not Hurwitz.
    pub t_cut: Option<F>,
    /// Bisection bracket around `t_cut`; the upper end is a certified cut tail point.
    pub t_cut_bracket: Option<(F, F)>,
    /// `m + T_cut`.
    pub critical_max_dwell: Option<F>,
    /// Whether the given `M` is at least `m + T_cut`.
    pub max_dwell_covers_critical: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DwellReport<F> {
    pub rows: Vec<DwellRow<F>>,
    pub all_hurwitz: bool,
    /// Upper bounds can be dropped: every regime has `M` unbounded or `M >= m + T_cut`.
    pub upper_bounds_redundant: Option<bool>,
    pub note: String,
}

/// Critical upper dwell bounds `m + T_cut` of every regime.
pub fn critical_bounds<F: Real>(sys: &SwitchedSystem<F>, tol: F, cfg: &CutTailConfig) -> Result<DwellReport<F>> {
    let hurwitz: Vec<bool> = sys
        .regimes
        .iter()
        .map(|r| is_hurwitz(&r.matrix, &cfg.spectral))
        .collect::<Result<_>>()?;
    let all_hurwitz = hurwitz.iter().all(|&h| h);
    if !all_hurwitz {
        let bad: Vec<&str> = sys
            .regimes
            .iter()
            .zip(&hurwitz)
            .filter(|(_, &h)| !h)
            .map(|(r, _)| r.label.as_str())
            .collect();
        let rows = sys
            .regimes
            .iter()
            .zip(&hurwitz)
            .map(|(r, &h)| DwellRow {
                label: r.label.clone(),
                hurwitz: h,
                min_dwell: r.min_dwell,
                max_dwell: r.max_dwell,
                t_cut: None,
                t_cut_bracket: None,
                critical_max_dwell: None,
                max_dwell_covers_critical: None,
            })
            .collect();
        return Ok(DwellReport {
            rows,
            all_hurwitz,
            upper_bounds_redundant: None,
            note: format!(
                "regime non-Hurwitz: {}. Staying in such a regime forever is admissible \
                 when M is unbounded, so the system without upper dwell bounds is unstable.",
                bad.join(", ")
            ),
        });
    }

    let mut rows = Vec::with_capacity(sys.regimes.len());
    for r in &sys.regimes {
        let res = compute_tcut(&r.matrix, tol, cfg)?;
        let t_cut = res.estimate;
        let critical = r.min_dwell + t_cut;
        rows.push(DwellRow {
            label: r.label.clone(),
            hurwitz: true,
            min_dwell: r.min_dwell,
            max_dwell: r.max_dwell,
            t_cut: Some(t_cut),
            t_cut_bracket: Some((res.t_low, res.t_high)),
            critical_max_dwell: Some(critical),
            max_dwell_covers_critical: r.max_dwell.map(|mx| mx >= critical),
        });
    }
    let redundant = rows.iter().all(|row| row.max_dwell_covers_critical != Some(false));
    let mut note = String::from(
        "All regimes are Hurwitz. The system with lower dwell bounds m is stable if and only if \
         the system with dwell intervals [m, m + T_cut] is stable.",
    );
    if redundant {
        if rows.iter().any(|row| row.max_dwell.is_some()) {
            note.push_str(
                " Every given M satisfies M >= m + T_cut, so stability of the system with the given \
                 upper bounds transfers to the system without upper bounds.",
            );
        }
    } else {
        let short: Vec<&str> = rows
            .iter()
            .filter(|row| row.max_dwell_covers_critical == Some(false))
            .map(|row| row.label.as_str())
            .collect();
        note.push_str(&format!(
            " For regime(s) {} the given M is below m + T_cut; the reduction does not apply to them.",
            short.join(", ")
        ));
    }
    Ok(DwellReport {
        rows,
        all_hurwitz,
        upper_bounds_redundant: Some(redundant),
        note,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySample<F> {
    pub t: F,
    pub x: Vec<F>,
    pub norm: F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Trajectory<F> {
    pub samples: Vec<TrajectorySample<F>>,
}

impl<F: Real> Trajectory<F> {
    pub fn last(&self) -> Option<&TrajectorySample<F>> {
        self.samples.last()
    }
}

/// Trajectory under `law`, sampled `steps_per_segment` times per segment.
///
/// Every sample is `e^{s A} x_k` with `x_k` the state at the start of its
/// segment, so segment boundaries carry no accumulated stepping error.
pub fn simulate<F: Real>(
    sys: &SwitchedSystem<F>,
    law: &SwitchingLaw<F>,
    x0: &[F],
    steps_per_segment: usize,
) -> Result<Trajectory<F>> {
    law.validate(sys)?;
    if x0.len() != sys.dim() {
        return Err(Error::InvalidArgument(format!(
            "initial state has length {}, expected {}",
            x0.len(),
            sys.dim()
        )));
    }
    let steps = steps_per_segment.max(1);
    let mut samples = vec![TrajectorySample {
        t: F::zero(),
        x: x0.to_vec(),
        norm: norm2(x0),
    }];
    let mut t0 = F::zero();
    let mut x = x0.to_vec();
    for seg in &law.segments {
        let a = sys.regime(&seg.label).expect("validated").matrix.matrix();
        let mut end = x.clone();
        for k in 1..=steps {
            let s = seg.duration * F::from_usize(k) / F::from_usize(steps);
            let xs = expm(&a.scale(s)).matvec(&x);
            if k == steps {
                end = xs.clone();
            }
            samples.push(TrajectorySample {
                t: t0 + s,
                norm: norm2(&xs),
                x: xs,
            });
        }
        t0 += seg.duration;
        x = end;
    }
    Ok(Trajectory { samples })
}

/// Worst growth found by [`random_switching_search`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome<F> {
    /// `max |x(horizon)| / |x0|` over all trials.
    pub growth: F,
    pub worst_trial: usize,
    pub worst_law: SwitchingLaw<F>,
    pub worst_x0: Vec<F>,
    pub trials: usize,
    pub horizon: F,
}

fn gaussian_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d)
            .map(|_| {
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
            .collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Random admissible laws with durations uniform in
/// `[m, min(M, m + 3 T_cut)]`, regimes drawn uniformly among those that differ
/// from the previous one. Trial `k` draws from stream `k` of a generator
/// seeded with `seed`, so results do not depend on evaluation order.
///
/// A heuristic falsifier: growth above one disproves stability, growth below
/// one proves nothing.
pub fn random_switching_search<F: Real>(
    sys: &SwitchedSystem<F>,
    trials: usize,
    horizon: F,
    seed: u64,
    cfg: &CutTailConfig,
) -> Result<SearchOutcome<F>> {
    let tol = F::floor_eps(1e-6, 64.0);
    let t_cuts = sys
        .regimes
        .iter()
        .map(|r| compute_tcut(&r.matrix, tol, cfg).map(|res| res.estimate))
        .collect::<Result<Vec<F>>>()?;
    random_switching_search_with(sys, &t_cuts, trials, horizon, seed)
}

/// As [`random_switching_search`] with the cut tail times supplied.
pub fn random_switching_search_with<F: Real>(
    sys: &SwitchedSystem<F>,
    t_cuts: &[F],
    trials: usize,
    horizon: F,
    seed: u64,
) -> Result<SearchOutcome<F>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    if !(horizon > F::zero()) {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    if t_cuts.len() != sys.regimes.len() {
        return Err(Error::InvalidArgument("one cut tail time per regime expected".into()));
    }
    let k = sys.regimes.len();
    let d = sys.dim();
    let mut best: Option<SearchOutcome<F>> = None;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let x0: Vec<F> = gaussian_unit(&mut rng, d).into_iter().map(F::lit).collect();
        let mut segments = Vec::new();
        let mut x = x0.clone();
        let mut elapsed = F::zero();
        let mut prev: Option<usize> = None;
        while elapsed < horizon {
            let idx = match (k, prev) {
                (1, _) | (_, None) => rng.gen_range(0..k),
                (_, Some(p)) => {
                    let j = rng.gen_range(0..k - 1);
                    if j >= p {
                        j + 1
                    } else {
                        j
                    }
                }
            };
            let r = &sys.regimes[idx];
            let mut hi = r.min_dwell + F::lit(3.0) * t_cuts[idx];
            if let Some(mx) = r.max_dwell {
                hi = hi.min(mx);
            }
            let u = F::lit(rng.gen::<f64>());
            let duration = if k == 1 {
                // A lone regime cannot switch; its flow is the same whatever the segmentation.
                horizon - elapsed
            } else {
                r.min_dwell + (hi - r.min_dwell) * u
            };
            let run = duration.min(horizon - elapsed);
            x = expm(&r.matrix.matrix().scale(run)).matvec(&x);
            elapsed += duration;
            segments.push(Segment {
                label: r.label.clone(),
                duration,
            });
            prev = Some(idx);
        }
        let growth = norm2(&x) / norm2(&x0);
        if best.as_ref().is_none_or(|b| growth > b.growth) {
            best = Some(SearchOutcome {
                growth,
                worst_trial: trial,
                worst_law: SwitchingLaw { segments },
                worst_x0: x0,
                trials,
                horizon,
            });
        }
    }
    Ok(best.expect("at least one trial"))
}
