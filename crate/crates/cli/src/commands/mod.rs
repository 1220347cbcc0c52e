pub mod dwell;
pub mod least_deviation;
pub mod tcut;

use dwellcut::{
    build_basis, compute_spectrum, eigenvalues, is_hurwitz, solve_least_deviation, verify_certificate, Error,
    Functional, RemezConfig, Spectrum, SystemMatrix,
};

use crate::failure::CliResult;
use crate::report::Certificate;
use crate::settings::Settings;

/// Fails with the not-Hurwitz error when the spectrum leaves the stable half plane.
pub fn require_hurwitz(a: &SystemMatrix<f64>, settings: &Settings) -> CliResult<()> {
    if is_hurwitz(a, &settings.cut_tail.spectral)? {
        return Ok(());
    }
    let max_real_part = eigenvalues(a)?.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
    Err(Error::NotHurwitz { max_real_part }.into())
}

pub fn spectrum_of(
    a: &SystemMatrix<f64>,
    override_: Option<Spectrum<f64>>,
    settings: &Settings,
) -> CliResult<Spectrum<f64>> {
    match override_ {
        Some(s) => Ok(s),
        None => Ok(compute_spectrum(a, &settings.cut_tail.spectral)?),
    }
}

/// Alternance certificate of the cut tail decision at `t`.
pub fn cut_tail_certificate(
    spectrum: &Spectrum<f64>,
    t: f64,
    settings: &Settings,
    context: String,
) -> CliResult<Certificate> {
    let basis = build_basis(spectrum);
    let ell = Functional::point_evaluation(&basis, t)?;
    let cfg = RemezConfig {
        eps: 0.0,
        decision_threshold: Some(1.0 + settings.cut_tail.decision_tol),
        ..settings.cut_tail.remez
    };
    let res = solve_least_deviation(&basis, t, &ell, &cfg)?;
    let verified = verify_certificate(&res, &basis, &ell);
    Ok(Certificate {
        context,
        horizon: t,
        lower: res.lower,
        upper: res.upper,
        points: res.certificate.points.clone(),
        signs: res.certificate.signs.clone(),
        cone: res.certificate.cone.clone(),
        condition: res.certificate.condition,
        verified,
    })
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.7}"))
}
