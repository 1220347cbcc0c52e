use clap::{Args, ValueEnum};
use dwellcut::cuttail::{compute_tcut_hull, compute_tcut_planar};
use dwellcut::{compute_tcut_with_spectrum, CutTailResult, Error, Spectrum, SystemMatrix};
use serde::Serialize;

use super::{cut_tail_certificate, require_hurwitz, spectrum_of};
use crate::failure::{CliResult, Failure, EXIT_NUMERICAL};
use crate::input::{load, system_matrix, MatrixDocument};
use crate::report::{Clock, CommandEcho, Report};
use crate::settings::Tuning;
use crate::Common;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    /// Bisection on the least-deviation decision.
    Remez,
    /// Closed forms of the 2x2 case.
    Planar,
    /// Bisection on convex-hull membership of a sampled trajectory.
    Hull,
    /// Every applicable method, cross-checked.
    All,
}

#[derive(Debug, Args)]
pub struct TcutArgs {
    /// Matrix file.
    pub matrix: String,
    /// Width of the final bracket around `T_cut`.
    #[arg(long, env = "DWELLCUT_TOL", allow_negative_numbers = true)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "remez", env = "DWELLCUT_METHOD")]
    pub method: MethodArg,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Serialize)]
pub struct MethodOutcome {
    pub method: MethodArg,
    /// `ok`, `skipped` (method not applicable) or `failed`.
    pub status: &'static str,
    pub t_cut: Option<f64>,
    pub t_low: Option<f64>,
    pub t_high: Option<f64>,
    pub evaluations: usize,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct TcutResults {
    pub dimension: usize,
    pub spectrum: Spectrum<f64>,
    pub t_cut: f64,
    pub methods: Vec<MethodOutcome>,
    /// Largest difference between the estimates of two methods.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_discrepancy: Option<f64>,
}

fn outcome(method: MethodArg, r: Result<CutTailResult<f64>, Error>) -> MethodOutcome {
    match r {
        Ok(res) => MethodOutcome {
            method,
            status: "ok",
            t_cut: Some(res.estimate),
            t_low: Some(res.t_low),
            t_high: Some(res.t_high),
            evaluations: res.evaluations,
            warnings: res.warnings,
            error: None,
        },
        Err(e) => MethodOutcome {
            method,
            status: if matches!(e, Error::Unsupported(_)) { "skipped" } else { "failed" },
            t_cut: None,
            t_low: None,
            t_high: None,
            evaluations: 0,
            warnings: Vec::new(),
            error: Some(e.to_string()),
        },
    }
}

fn run_method(
    method: MethodArg,
    a: &SystemMatrix<f64>,
    spectrum: &Spectrum<f64>,
    tol: f64,
    cfg: &dwellcut::CutTailConfig,
) -> Result<CutTailResult<f64>, Error> {
    match method {
        MethodArg::Remez => compute_tcut_with_spectrum(spectrum, tol, cfg).map(|mut r| {
            r.warnings.splice(0..0, spectrum.warnings().iter().cloned());
            r
        }),
        MethodArg::Planar => compute_tcut_planar(a, &cfg.spectral),
        MethodArg::Hull => compute_tcut_hull(a, tol, cfg),
        MethodArg::All => unreachable!("expanded by the caller"),
    }
}

pub fn run(args: &TcutArgs, echo: CommandEcho) -> CliResult<()> {
    let mut clock = Clock::start();
    let settings = args.tuning.resolve(args.tol, None)?;
    let input = load::<MatrixDocument>(&args.matrix)?;
    let a = system_matrix(&input.doc.matrix, &args.matrix)?;
    let override_ = input.doc.spectrum_override(&args.matrix)?;
    require_hurwitz(&a, &settings)?;
    let spectrum = spectrum_of(&a, override_, &settings)?;
    clock.lap("spectrum");

    let methods = match args.method {
        MethodArg::All => vec![MethodArg::Remez, MethodArg::Planar, MethodArg::Hull],
        m => vec![m],
    };
    let cfg = settings.cut_tail;
    let outcomes: Vec<MethodOutcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = methods
            .iter()
            .map(|&m| {
                let (a, spectrum) = (&a, &spectrum);
                scope.spawn(move || outcome(m, run_method(m, a, spectrum, settings.tol, &cfg)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("method thread panicked")).collect()
    });
    clock.lap("methods");

    if args.method != MethodArg::All {
        let o = &outcomes[0];
        if o.status != "ok" {
            let err = run_method(o.method, &a, &spectrum, settings.tol, &cfg).unwrap_err();
            return Err(Failure::from(err).at(&args.matrix));
        }
    } else if let Some(o) = outcomes.iter().find(|o| o.status == "failed") {
        return Err(Failure::new(
            "numerical_failure",
            EXIT_NUMERICAL,
            format!("method {:?} failed: {}", o.method, o.error.as_deref().unwrap_or("")),
        ));
    }

    let estimates: Vec<f64> = outcomes.iter().filter_map(|o| o.t_cut).collect();
    let max_discrepancy = (args.method == MethodArg::All).then(|| {
        let mut worst: f64 = 0.0;
        for (i, x) in estimates.iter().enumerate() {
            for y in &estimates[..i] {
                worst = worst.max((x - y).abs());
            }
        }
        worst
    });
    let t_cut = outcomes.iter().find_map(|o| o.t_cut).expect("at least one method succeeded");

    let mut certificates = Vec::new();
    if let Some(remez) = outcomes.iter().find(|o| o.method == MethodArg::Remez && o.status == "ok") {
        let t_high = remez.t_high.expect("ok outcome has a bracket");
        if t_high > 0.0 {
            certificates.push(cut_tail_certificate(&spectrum, t_high, &settings, "cut tail at t_high".into())?);
        }
    }
    clock.lap("certificates");

    let mut summary = format!("T_cut = {t_cut:.7}\n");
    for o in &outcomes {
        summary.push_str(&format!(
            "  {:<7} {:<8} {:>12}  [{}, {}]\n",
            format!("{:?}", o.method).to_lowercase(),
            o.status,
            super::fmt_opt(o.t_cut),
            super::fmt_opt(o.t_low),
            super::fmt_opt(o.t_high)
        ));
    }
    if let Some(d) = max_discrepancy {
        summary.push_str(&format!("max discrepancy {d:.3e}\n"));
    }

    let report = Report {
        command: echo,
        inputs: vec![input.digest],
        results: TcutResults {
            dimension: a.dim(),
            spectrum,
            t_cut,
            methods: outcomes,
            max_discrepancy,
        },
        certificates,
        config: settings,
        version: env!("CARGO_PKG_VERSION"),
        timings: None,
    };
    args.common.output().emit(report, clock, &summary)
}
