use std::fmt::Write as _;

use clap::Args;
use dwellcut::switching::random_switching_search_with;
use dwellcut::{compute_spectrum, critical_bounds, DwellReport, SearchOutcome};
use serde::Serialize;

use super::cut_tail_certificate;
use crate::failure::{CliResult, Failure, EXIT_NOT_HURWITZ};
use crate::input::{load, SystemDocument};
use crate::report::{Clock, CommandEcho, Report};
use crate::settings::Tuning;
use crate::Common;

#[derive(Debug, Args)]
pub struct DwellArgs {
    /// System file.
    pub system: String,
    /// Width of the bracket around each `T_cut`.
    #[arg(long, env = "DWELLCUT_TOL", allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Random switching search: number of trials, horizon and seed.
    #[arg(long, num_args = 3, value_names = ["TRIALS", "HORIZON", "SEED"])]
    pub simulate: Option<Vec<String>>,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Serialize)]
pub struct Simulation {
    pub trials: usize,
    pub horizon: f64,
    pub seed: u64,
    #[serde(flatten)]
    pub outcome: Option<SearchOutcome<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct DwellResults {
    #[serde(flatten)]
    pub report: DwellReport<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<Simulation>,
}

fn parse_simulate(v: &[String]) -> CliResult<(usize, f64, u64)> {
    let bad = |what: &str, s: &str| Failure::usage(format!("--simulate: invalid {what} '{s}'"));
    let trials = v[0].parse::<usize>().map_err(|_| bad("trial count", &v[0]))?;
    let horizon = v[1].parse::<f64>().map_err(|_| bad("horizon", &v[1]))?;
    let seed = v[2].parse::<u64>().map_err(|_| bad("seed", &v[2]))?;
    if trials == 0 || !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Failure::usage("--simulate needs a positive trial count and horizon"));
    }
    Ok((trials, horizon, seed))
}

pub fn run(args: &DwellArgs, echo: CommandEcho) -> CliResult<()> {
    let mut clock = Clock::start();
    let settings = args.tuning.resolve(args.tol, None)?;
    let simulate = args.simulate.as_deref().map(parse_simulate).transpose()?;
    let input = load::<SystemDocument>(&args.system)?;
    let sys = input.doc.build(&args.system)?;
    let report = critical_bounds(&sys, settings.tol, &settings.cut_tail)?;
    clock.lap("critical bounds");

    let mut certificates = Vec::new();
    for (row, regime) in report.rows.iter().zip(sys.regimes()) {
        if let Some((_, t_high)) = row.t_cut_bracket {
            if t_high > 0.0 {
                let spectrum = compute_spectrum(&regime.matrix, &settings.cut_tail.spectral)?;
                certificates.push(cut_tail_certificate(
                    &spectrum,
                    t_high,
                    &settings,
                    format!("regime '{}': cut tail at t_high", row.label),
                )?);
            }
        }
    }
    clock.lap("certificates");

    let simulation = match simulate {
        None => None,
        Some((trials, horizon, seed)) if report.all_hurwitz => {
            let t_cuts: Vec<f64> = report.rows.iter().map(|r| r.t_cut.expect("Hurwitz rows carry T_cut")).collect();
            let outcome = random_switching_search_with(&sys, &t_cuts, trials, horizon, seed)?;
            clock.lap("simulation");
            Some(Simulation {
                trials,
                horizon,
                seed,
                outcome: Some(outcome),
                skipped: None,
            })
        }
        Some((trials, horizon, seed)) => Some(Simulation {
            trials,
            horizon,
            seed,
            outcome: None,
            skipped: Some("some regime is not Hurwitz".into()),
        }),
    };

    let mut summary = String::from("regime      hurwitz  m           M           T_cut       m + T_cut   M >= m + T_cut\n");
    for r in &report.rows {
        let _ = writeln!(
            summary,
            "{:<11} {:<8} {:<11} {:<11} {:<11} {:<11} {}",
            r.label,
            r.hurwitz,
            format!("{:.7}", r.min_dwell),
            super::fmt_opt(r.max_dwell),
            super::fmt_opt(r.t_cut),
            super::fmt_opt(r.critical_max_dwell),
            r.max_dwell_covers_critical.map_or("-".to_string(), |b| b.to_string()),
        );
    }
    let _ = writeln!(summary, "{}", report.note);
    if let Some(Simulation { outcome: Some(o), .. }) = &simulation {
        let _ = writeln!(summary, "worst growth over {} trials: {:.3e}", o.trials, o.growth);
    }

    let all_hurwitz = report.all_hurwitz;
    let note = report.note.clone();
    let full = Report {
        command: echo,
        inputs: vec![input.digest],
        results: DwellResults { report, simulation },
        certificates,
        config: settings,
        version: env!("CARGO_PKG_VERSION"),
        timings: None,
    };
    args.common.output().emit(full, clock, &summary)?;
    if all_hurwitz {
        Ok(())
    } else {
        Err(Failure::new("not_hurwitz", EXIT_NOT_HURWITZ, note).at(&args.system))
    }
}
