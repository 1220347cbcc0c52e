use super::*;
use crate::quasipoly::moment_vector;
use crate::spectral::{build_basis, SpectralItem, Spectrum};
use approx::assert_relative_eq;

fn basis(items: &[(f64, f64, usize)]) -> Basis<f64> {
    let s = Spectrum::from_items(
        items
            .iter()
            .map(|&(a, b, r)| SpectralItem::new(a, b, r))
            .collect(),
    )
    .unwrap();
    build_basis(&s)
}

fn a1_basis() -> Basis<f64> {
    basis(&[(-0.3216, 2f64.sqrt(), 1)])
}

fn at_end(b: &Basis<f64>, t: f64) -> Functional<f64> {
    Functional::point_evaluation(b, t).unwrap()
}

#[test]
fn zero_functional_rejected() {
    assert!(Functional::new(vec![0.0, 0.0]).is_err());
}

#[test]
fn initialize_scalar_case() {
    let b = basis(&[(-1.0, 0.0, 1)]);
    let ell = at_end(&b, 1.0);
    let st = initialize(&b, 1.0, &ell, &RemezConfig::default()).unwrap();
    assert_relative_eq!(st.points[0], 0.5, epsilon = 1e-15);
    let e = std::f64::consts::E;
    assert_relative_eq!(st.polynomial.coefficients[0], e, epsilon = 1e-14);
    assert_relative_eq!(st.lower, e * (-0.5f64).exp(), epsilon = 1e-14);
    assert_relative_eq!(st.upper, e, epsilon = 1e-14);
}

#[test]
fn initialize_a1_has_positive_cone() {
    let b = a1_basis();
    let ell = at_end(&b, 1.0);
    let st = initialize(&b, 1.0, &ell, &RemezConfig::default()).unwrap();
    assert!(st.lower > 0.0);
    assert!(st.cone.iter().all(|&c| c > 0.0));
    // l(p) = 1 is p(T) = 1.
    assert_relative_eq!(eval(&st.polynomial, &b, 1.0), 1.0, epsilon = 1e-12);
    // Independent check of the cone: sum alpha_i sigma_i u(t_i) = l.
    for k in 0..2 {
        let s: f64 = st
            .points
            .iter()
            .zip(&st.signs)
            .zip(&st.cone)
            .map(|((&t, &sg), &a)| a * sg as f64 * moment_vector(&b, t).u[k])
            .sum();
        assert_relative_eq!(s, ell.ell[k], epsilon = 1e-12);
    }
    for (&t, &sg) in st.points.iter().zip(&st.signs) {
        assert_relative_eq!(eval(&st.polynomial, &b, t), sg as f64 * st.lower, epsilon = 1e-12);
    }
}

#[test]
fn exchange_keeps_cone_positive() {
    let b = a1_basis();
    let ell = at_end(&b, 3.0);
    let cfg = RemezConfig::default();
    let mut st = initialize(&b, 3.0, &ell, &cfg).unwrap();
    for _ in 0..10 {
        match exchange_step(&st, &b, 3.0, &ell, &cfg).unwrap() {
            StepOutcome::Advanced { state, record, .. } => {
                assert!(state.cone.iter().all(|&c| c > 0.0));
                assert!(record.increment_residual().abs() <= 1e-9 * state.lower.max(1.0));
                assert!(record.contraction_excess() <= 1e-9);
                st = state;
            }
            StepOutcome::Stalled => break,
        }
    }
}

#[test]
fn scalar_minimum_is_exp_t() {
    let b = basis(&[(-1.0, 0.0, 1)]);
    for &t in &[0.3, 1.0, 4.0] {
        let ell = at_end(&b, t);
        let res = solve_least_deviation(&b, t, &ell, &RemezConfig::default()).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert!(res.lower <= t.exp() * (1.0 + 1e-12));
        assert!(res.upper >= t.exp() * (1.0 - 1e-12));
        assert!(res.upper - res.lower < 1e-6);
        assert!(verify_certificate(&res, &b, &ell));
    }
}

#[test]
fn a1_minimum_below_and_above_threshold() {
    let b = a1_basis();
    let cfg = RemezConfig {
        eps: 1e-12,
        ..RemezConfig::default()
    };
    let below = solve_least_deviation(&b, 1.0, &at_end(&b, 1.0), &cfg).unwrap();
    assert!((below.upper - 1.0).abs() < 1e-10, "{below:?}");
    let above = solve_least_deviation(&b, 2.0, &at_end(&b, 2.0), &cfg).unwrap();
    assert!(above.lower > 1.001);
    assert!(verify_certificate(&above, &b, &at_end(&b, 2.0)));
}

#[test]
fn flipped_sign_fails_verification() {
    let b = a1_basis();
    let ell = at_end(&b, 2.5);
    let mut res = solve_least_deviation(&b, 2.5, &ell, &RemezConfig::default()).unwrap();
    assert!(verify_certificate(&res, &b, &ell));
    res.certificate.signs[0] = -res.certificate.signs[0];
    assert!(!verify_certificate(&res, &b, &ell));
}

#[test]
fn decision_threshold_exits_early() {
    let b = a1_basis();
    let cfg = RemezConfig {
        eps: 0.0,
        decision_threshold: Some(1.0),
        ..RemezConfig::default()
    };
    let res = solve_least_deviation(&b, 3.0, &at_end(&b, 3.0), &cfg).unwrap();
    assert_eq!(res.status, SolveStatus::EarlyExit);
    assert!(res.lower > 1.0);
}

#[test]
fn lp_oracle_scalar_is_exact() {
    let b = basis(&[(-1.0, 0.0, 1)]);
    let v = lp_grid_oracle(&b, 1.0, &at_end(&b, 1.0), 20).unwrap();
    assert_relative_eq!(v, std::f64::consts::E, epsilon = 1e-12);
}

#[test]
fn lp_oracle_rejects_small_grid() {
    let b = a1_basis();
    assert!(lp_grid_oracle(&b, 1.0, &at_end(&b, 1.0), 19).is_err());
}

#[test]
fn lp_oracle_nested_grids_nondecreasing() {
    let b = basis(&[(-0.5, 1.0, 1), (-1.5, 0.0, 1)]);
    let ell = at_end(&b, 3.0);
    let coarse = lp_grid_oracle(&b, 3.0, &ell, 101).unwrap();
    let fine = lp_grid_oracle(&b, 3.0, &ell, 401).unwrap();
    assert!(fine >= coarse - 1e-12);
}

#[test]
fn lp_oracle_agrees_with_exchange_on_a1() {
    let b = a1_basis();
    let ell = at_end(&b, 3.0);
    let res = solve_least_deviation(&b, 3.0, &ell, &RemezConfig::default()).unwrap();
    let lp = lp_grid_oracle(&b, 3.0, &ell, 4000).unwrap();
    assert!((lp - res.lower).abs() <= 1e-3);
    assert!(lp <= res.upper + 1e-9);
}

#[test]
fn chebyshev_system_alternates() {
    let b = basis(&[(-0.5, 0.0, 1), (-1.0, 0.0, 1), (-2.0, 0.0, 1)]);
    let ell = at_end(&b, 2.0);
    let res = solve_least_deviation(&b, 2.0, &ell, &RemezConfig::default()).unwrap();
    let mut pts: Vec<(f64, i8)> = res
        .certificate
        .points
        .iter()
        .copied()
        .zip(res.certificate.signs.iter().copied())
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    assert_eq!(pts.len(), 3);
    for w in pts.windows(2) {
        assert_ne!(w[0].1, w[1].1);
    }
}

#[test]
fn single_precision_solve() {
    let s = Spectrum::from_items(vec![SpectralItem::new(-0.3216f32, 2f32.sqrt(), 1)]).unwrap();
    let b = build_basis(&s);
    let ell = Functional::point_evaluation(&b, 2.0f32).unwrap();
    let cfg = RemezConfig {
        eps: 1e-4,
        ..RemezConfig::default()
    };
    let res = solve_least_deviation(&b, 2.0f32, &ell, &cfg).unwrap();
    assert!(res.upper - res.lower < 1e-3);
    assert!(res.lower > 1.0);
}
