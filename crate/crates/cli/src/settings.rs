//! Resolved run configuration. Precedence: flags, then `DWELLCUT_*`
//! environment variables, then a `--config` file, then built-in defaults.

use clap::Args;
use dwellcut::CutTailConfig;
use serde::{Deserialize, Serialize};

use crate::failure::{CliResult, Failure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Bracket width of the `T_cut` bisection.
    pub tol: f64,
    /// Bound gap at which the least-deviation solver stops.
    pub eps: f64,
    /// Number of points in the plot CSV.
    pub plot_points: usize,
    pub cut_tail: CutTailConfig,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            eps: 1e-6,
            plot_points: 1000,
            cut_tail: CutTailConfig::default(),
        }
    }
}

/// Tuning flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Tuning {
    /// JSON file with settings, or a previous report whose `config` is reused.
    #[arg(long, env = "DWELLCUT_CONFIG")]
    pub config: Option<String>,
    /// Threshold slack of the cut tail decision `b > 1 + decision_tol`.
    #[arg(long, env = "DWELLCUT_DECISION_TOL")]
    pub decision_tol: Option<f64>,
    /// Iteration cap of the exchange algorithm.
    #[arg(long, env = "DWELLCUT_MAX_ITER")]
    pub max_iter: Option<usize>,
    /// Relative distance below which eigenvalues are merged.
    #[arg(long, env = "DWELLCUT_CLUSTER_TOL")]
    pub cluster_tol: Option<f64>,
    /// Relative singular value threshold of the Jordan rank decisions.
    #[arg(long, env = "DWELLCUT_RANK_TOL")]
    pub rank_tol: Option<f64>,
    /// Required margin `Re(lambda) < -margin` for stability.
    #[arg(long, env = "DWELLCUT_HURWITZ_MARGIN")]
    pub hurwitz_margin: Option<f64>,
    /// Trajectory samples of the hull method.
    #[arg(long, env = "DWELLCUT_HULL_SAMPLES")]
    pub hull_samples: Option<usize>,
    /// Points in the plot CSV.
    #[arg(long, env = "DWELLCUT_PLOT_POINTS")]
    pub plot_points: Option<usize>,
}

fn load_file(path: &str) -> CliResult<Settings> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, &e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Failure::malformed(path, &e))?;
    let value = match value.get("config") {
        Some(inner) if value.get("command").is_some() => inner.clone(),
        _ => value,
    };
    serde_json::from_value(value).map_err(|e| Failure::malformed(path, &e))
}

impl Tuning {
    /// `tol` and `eps` come from the subcommand's own flags.
    pub fn resolve(&self, tol: Option<f64>, eps: Option<f64>) -> CliResult<Settings> {
        let mut s = match &self.config {
            Some(path) => load_file(path)?,
            None => Settings::default(),
        };
        if let Some(v) = tol {
            s.tol = v;
        }
        if let Some(v) = eps {
            s.eps = v;
        }
        if let Some(v) = self.decision_tol {
            s.cut_tail.decision_tol = v;
        }
        if let Some(v) = self.max_iter {
            s.cut_tail.remez.max_iter = v;
        }
        if let Some(v) = self.cluster_tol {
            s.cut_tail.spectral.cluster_tol = v;
        }
        if let Some(v) = self.rank_tol {
            s.cut_tail.spectral.rank_tol = v;
        }
        if let Some(v) = self.hurwitz_margin {
            s.cut_tail.spectral.hurwitz_margin = v;
        }
        if let Some(v) = self.hull_samples {
            s.cut_tail.hull_search.n_samples = v;
        }
        if let Some(v) = self.plot_points {
            s.plot_points = v;
        }
        s.validate()?;
        Ok(s)
    }
}

impl Settings {
    fn validate(&self) -> CliResult<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Failure::usage(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("tol", self.tol)?;
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Failure::usage(format!("eps must be nonnegative and finite, got {}", self.eps)));
        }
        if !(self.cut_tail.decision_tol >= 0.0) {
            return Err(Failure::usage("decision_tol must be nonnegative"));
        }
        positive("cluster_tol", self.cut_tail.spectral.cluster_tol)?;
        positive("rank_tol", self.cut_tail.spectral.rank_tol)?;
        if self.plot_points < 2 {
            return Err(Failure::usage("plot_points must be at least 2"));
        }
        Ok(())
    }
}
