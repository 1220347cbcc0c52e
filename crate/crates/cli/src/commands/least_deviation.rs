use std::fmt::Write as _;

use clap::Args;
use dwellcut::{
    build_basis, eval, solve_least_deviation, verify_certificate, BasisFunction, Functional, RemezConfig,
    SolveStatus, TrigKind,
};
use serde::Serialize;

use super::spectrum_of;
use crate::failure::{CliResult, Failure};
use crate::input::{load, system_matrix, MatrixDocument};
use crate::report::{Certificate, Clock, CommandEcho, Report};
use crate::settings::Tuning;
use crate::Common;

#[derive(Debug, Args)]
pub struct LeastDeviationArgs {
    /// Matrix file.
    pub matrix: String,
    /// Horizon `T` of the interval `[0, T]`.
    #[arg(long = "T", value_name = "T", allow_negative_numbers = true)]
    pub horizon: f64,
    /// Stop once the bound gap `B - b` is below this value.
    #[arg(long, env = "DWELLCUT_EPS", allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Write `t,value` samples of the polynomial to this CSV file.
    #[arg(long)]
    pub plot: Option<String>,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub lower: f64,
    pub upper: f64,
    pub deviation: f64,
    pub entered: f64,
    pub replaced: usize,
    pub next_lower: f64,
    pub next_upper: f64,
}

#[derive(Debug, Serialize)]
pub struct BasisEntry {
    pub alpha: f64,
    pub beta: f64,
    pub power: u32,
    pub kind: TrigKind,
}

#[derive(Debug, Serialize)]
pub struct LeastDeviationResults {
    pub horizon: f64,
    pub lower: f64,
    pub upper: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub noise_floor: f64,
    /// `b_k` nondecreasing and `B_k` nonincreasing along the trace.
    pub monotone: bool,
    pub basis: Vec<BasisEntry>,
    /// Coefficients of the polynomial attaining `upper`, normalized by `p(T) = 1`.
    pub coefficients: Vec<f64>,
    pub trace: Vec<TraceRow>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<String>,
}

pub fn run(args: &LeastDeviationArgs, echo: CommandEcho) -> CliResult<()> {
    let mut clock = Clock::start();
    let settings = args.tuning.resolve(None, args.eps)?;
    if !(args.horizon > 0.0 && args.horizon.is_finite()) {
        return Err(Failure::usage(format!("T must be positive and finite, got {}", args.horizon)));
    }
    let input = load::<MatrixDocument>(&args.matrix)?;
    let a = system_matrix(&input.doc.matrix, &args.matrix)?;
    let override_ = input.doc.spectrum_override(&args.matrix)?;
    let spectrum = spectrum_of(&a, override_, &settings)?;
    let basis = build_basis(&spectrum);
    let t = args.horizon;
    let ell = Functional::point_evaluation(&basis, t)?;
    clock.lap("spectrum");

    let cfg = RemezConfig {
        eps: settings.eps,
        decision_threshold: None,
        ..settings.cut_tail.remez
    };
    let res = solve_least_deviation(&basis, t, &ell, &cfg)?;
    let verified = verify_certificate(&res, &basis, &ell);
    clock.lap("solve");

    let slack = 1e-12;
    let monotone = res.trace.iter().all(|r| {
        r.next_lower >= r.lower - slack * r.lower.abs().max(1.0) && r.next_upper <= r.upper
    });

    if let Some(path) = &args.plot {
        let n = settings.plot_points;
        let mut csv = String::from("t,value\n");
        for j in 0..n {
            let tj = if j + 1 == n { t } else { t * j as f64 / (n - 1) as f64 };
            let _ = writeln!(csv, "{tj},{}", eval(&res.polynomial, &basis, tj));
        }
        std::fs::write(path, csv).map_err(|e| Failure::io(path, &e))?;
        clock.lap("plot");
    }

    let mut summary = format!(
        "b = {:.12}\nB = {:.12}\nstatus {:?} after {} iterations\n  k  b_k               B_k\n",
        res.lower, res.upper, res.status, res.iterations
    );
    for r in &res.trace {
        let _ = writeln!(summary, "{:>3}  {:<16.12}  {:.12}", r.iteration, r.lower, r.upper);
    }

    let certificate = Certificate {
        context: "least deviation".into(),
        horizon: t,
        lower: res.lower,
        upper: res.upper,
        points: res.certificate.points.clone(),
        signs: res.certificate.signs.clone(),
        cone: res.certificate.cone.clone(),
        condition: res.certificate.condition,
        verified,
    };
    let results = LeastDeviationResults {
        horizon: t,
        lower: res.lower,
        upper: res.upper,
        status: res.status,
        iterations: res.iterations,
        noise_floor: res.noise_floor,
        monotone,
        basis: basis
            .functions()
            .iter()
            .map(|f: &BasisFunction<f64>| BasisEntry {
                alpha: f.alpha,
                beta: f.beta,
                power: f.power,
                kind: f.kind,
            })
            .collect(),
        coefficients: res.polynomial.coefficients.clone(),
        trace: res
            .trace
            .iter()
            .map(|r| TraceRow {
                iteration: r.iteration,
                lower: r.lower,
                upper: r.upper,
                deviation: r.deviation,
                entered: r.entered,
                replaced: r.replaced,
                next_lower: r.next_lower,
                next_upper: r.next_upper,
            })
            .collect(),
        warnings: spectrum.warnings().iter().cloned().chain(res.warnings.iter().cloned()).collect(),
        plot: args.plot.clone(),
    };
    let report = Report {
        command: echo,
        inputs: vec![input.digest],
        results,
        certificates: vec![certificate],
        config: settings,
        version: env!("CARGO_PKG_VERSION"),
        timings: None,
    };
    args.common.output().emit(report, clock, &summary)
}
