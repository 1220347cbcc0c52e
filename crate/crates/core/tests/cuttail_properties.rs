mod common;

use common::*;
use dwellcut::cuttail::{compute_tcut_hull, compute_tcut_planar};
use dwellcut::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn complex_closed_form_scales_inversely(alpha in -3.0f64..-0.05, beta in 0.1f64..5.0, c in 0.1f64..10.0) {
        let t = tcut_planar_complex(alpha, beta).unwrap();
        let tc = tcut_planar_complex(c * alpha, c * beta).unwrap();
        prop_assert!((tc - t / c).abs() <= 1e-10 * (t / c).max(1.0));
        let h = alpha * (beta * t).sin() + beta * (beta * t).cos() + beta * (alpha * t).exp();
        prop_assert!(h.abs() < 1e-10 * beta.max(1.0));
    }

    #[test]
    fn real_closed_form_scales_inversely(a2 in -3.0f64..-0.05, gap in 0.01f64..5.0, c in 0.1f64..10.0) {
        let a1 = a2 - gap;
        let t = tcut_planar_real(a1, a2).unwrap();
        let tc = tcut_planar_real(c * a1, c * a2).unwrap();
        prop_assert!((tc - t / c).abs() <= 1e-9 * (t / c).max(1.0));
        prop_assert!(t > 0.0);
    }
}

#[test]
fn verdicts_switch_once_along_a_grid() {
    let mut rng = rng(11u64);
    let cfg = CutTailConfig::default();
    for d in [2, 3, 4] {
        let a = random_hurwitz(&mut rng, d);
        let tcut = compute_tcut(&a, 1e-6, &cfg).unwrap().estimate;
        let verdicts: Vec<Verdict> = (1..=20)
            .map(|k| is_cut_tail(&a, tcut * 0.1 * k as f64, &cfg).unwrap().verdict)
            .collect();
        let first_cut = verdicts.iter().position(|&v| v == Verdict::CutTail).unwrap();
        assert!(verdicts[..first_cut].iter().all(|&v| v == Verdict::NotCutTail), "{verdicts:?}");
        assert!(verdicts[first_cut..].iter().all(|&v| v == Verdict::CutTail), "{verdicts:?}");
        assert!((9..=10).contains(&first_cut), "switch at index {first_cut}");
    }
}

#[test]
fn bracket_decisions_match_their_sides() {
    let r = compute_tcut(&a1(), 1e-6, &CutTailConfig::default()).unwrap();
    assert!(r.t_high - r.t_low <= 1e-6f64);
    assert_eq!(r.high.as_ref().unwrap().verdict, Verdict::CutTail);
    assert_eq!(r.low.as_ref().unwrap().verdict, Verdict::NotCutTail);
    assert_eq!(r.method, Method::RemezBisection);
}

#[test]
fn spectrum_override_matches_matrix_route() {
    let cfg = CutTailConfig::default();
    let spectrum = Spectrum::from_items(vec![SpectralItem::new(-0.3216, 2f64.sqrt(), 1)]).unwrap();
    let a = compute_tcut_with_spectrum(&spectrum, 1e-7, &cfg).unwrap();
    let b = compute_tcut(&a1(), 1e-7, &cfg).unwrap();
    assert!((a.estimate - b.estimate).abs() <= 2e-7);
}

#[test]
fn jordan_blocks_are_supported() {
    // e^{-t}, t e^{-t}: a Jordan block of size two.
    let a = SystemMatrix::from_rows(&[vec![-1.0f64, 1.0], vec![0.0, -1.0]]).unwrap();
    let r = compute_tcut(&a, 1e-6, &CutTailConfig::default()).unwrap();
    assert!(r.estimate > 0.0);
    let scaled = compute_tcut(&a.scaled(2.0), 1e-6, &CutTailConfig::default()).unwrap();
    assert!((scaled.estimate - r.estimate / 2.0).abs() <= 2e-6);
    assert!(compute_tcut_planar(&a, &SpectralConfig::default()).is_err());
}

#[test]
fn scalar_matrix_has_zero_cut_tail_time() {
    let a = SystemMatrix::from_rows(&[vec![-1.0f64]]).unwrap();
    let r = compute_tcut(&a, 1e-6, &CutTailConfig::default()).unwrap();
    assert_eq!((r.t_low, r.t_high, r.estimate), (0.0, 0.0, 0.0));
}

#[test]
fn hull_bisection_is_close_to_remez() {
    let cfg = CutTailConfig::default();
    let hull = compute_tcut_hull(&a1(), 1e-6, &cfg).unwrap();
    let remez = compute_tcut(&a1(), 1e-7, &cfg).unwrap();
    assert!((hull.estimate - remez.estimate).abs() <= 1e-4, "{} vs {}", hull.estimate, remez.estimate);
}

#[test]
fn not_hurwitz_is_an_error() {
    let a = SystemMatrix::from_rows(&[vec![0.0f64, 1.0], vec![-1.0, 0.0]]).unwrap();
    assert!(matches!(
        compute_tcut(&a, 1e-6, &CutTailConfig::default()),
        Err(Error::NotHurwitz { .. })
    ));
}

#[test]
fn single_precision_pipeline() {
    let a = SystemMatrix::from_rows(&[vec![-2.0f32, 0.0], vec![0.0, -1.0]]).unwrap();
    let cfg = CutTailConfig {
        decision_tol: 1e-5,
        ..CutTailConfig::default()
    };
    let r = compute_tcut(&a, 1e-4f32, &cfg).unwrap();
    assert!((r.estimate - (1.0f32 + 2f32.sqrt()).ln()).abs() < 1e-2, "{}", r.estimate);
}
