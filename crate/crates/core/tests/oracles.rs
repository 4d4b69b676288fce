use proptest::prelude::*;

use llrcal::calibration::{cmlg_fit, logreg_fit, logreg_objective};
use llrcal::evaluation::{eer_rocch, empirical_cllr, min_cllr_pav};
use llrcal::llr_model::CalibratedGaussianLlrModel;
use llrcal::quadrature::Quadrature;
use llrcal::synthgen::SynthSpec;
use llrcal::{AffineCalibration, TrialScores};

// 30-digit arbitrary-precision values of ∫ log₂(1 + e⁻ˣ) N(x; μ, 2μ) dx.
const CLLR_REFERENCE: [(f64, f64); 7] = [
    (0.1, 0.964_805_959_465_421_2),
    (0.5, 0.839_252_780_203_583),
    (1.0, 0.709_519_886_639_152),
    (2.0, 0.514_055_845_867_065),
    (4.0, 0.278_548_409_209_611_9),
    (8.0, 0.087_177_714_225_517_8),
    (50.0, 1.245_285_251_175_71e-6),
];

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Composite trapezoid rule over ±14σ; spectrally accurate for this smooth,
/// rapidly decaying integrand.
fn trapezoid_cllr(mu: f64) -> f64 {
    let s = (2.0 * mu).sqrt();
    let n = 20_000;
    let (lo, hi) = (mu - 14.0 * s, mu + 14.0 * s);
    let h = (hi - lo) / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let x = lo + h * i as f64;
        let z = (x - mu) / s;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += w * softplus(-x) * (-0.5 * z * z).exp();
    }
    acc * h / (s * (2.0 * std::f64::consts::PI).sqrt()) / std::f64::consts::LN_2
}

#[test]
fn theoretical_cllr_matches_high_precision_reference() {
    let q = Quadrature::default();
    for (mu, want) in CLLR_REFERENCE {
        let got = CalibratedGaussianLlrModel::new(mu)
            .unwrap()
            .theoretical_cllr(&q)
            .unwrap();
        assert!(
            ((got - want) / want).abs() < 1e-9,
            "mu={mu} got={got} want={want}"
        );
    }
}

#[test]
fn theoretical_cllr_matches_trapezoid_oracle() {
    let q = Quadrature::default();
    for mu in [0.05, 0.3, 1.7, 3.0, 6.5, 12.0] {
        let got = CalibratedGaussianLlrModel::new(mu)
            .unwrap()
            .theoretical_cllr(&q)
            .unwrap();
        let want = trapezoid_cllr(mu);
        assert!((got - want).abs() < 1e-10, "mu={mu} got={got} want={want}");
    }
}

#[test]
fn theoretical_cllr_agrees_with_monte_carlo() {
    let m = CalibratedGaussianLlrModel::new(2.0).unwrap();
    let n = 2_000_000;
    let llrs = SynthSpec::new(m, n, n, 99).generate();
    let mc = empirical_cllr(&llrs).unwrap();
    // Both class terms share one distribution by symmetry, so the balanced
    // mean has variance σ²/(2n) with σ² the per-trial cost variance.
    let per_trial: Vec<f64> = llrs
        .targets()
        .iter()
        .map(|&x| softplus(-x) / std::f64::consts::LN_2)
        .collect();
    let mean = per_trial.iter().sum::<f64>() / n as f64;
    let var = per_trial
        .iter()
        .map(|c| (c - mean) * (c - mean))
        .sum::<f64>()
        / (n as f64 - 1.0);
    let se = (var / (2.0 * n as f64)).sqrt();
    let theory = m.theoretical_cllr(&Quadrature::default()).unwrap();
    assert!(
        (mc - theory).abs() < 3.0 * se,
        "mc={mc} theory={theory} se={se}"
    );
}

#[test]
fn cmlg_matches_hand_computed_formula() {
    let t = vec![1.0, 2.0, 4.0, 5.0];
    let n = vec![-2.0, -1.0, 0.0, 3.0, -5.0];
    let s = TrialScores::new(t.clone(), n.clone()).unwrap();
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let var = |x: &[f64]| {
        let m = mean(x);
        x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
    };
    let (me, md) = (mean(&t), mean(&n));
    let v = 0.5 * var(&t) + 0.5 * var(&n);
    let a = (me - md) / v;
    let b = -a * (me + md) / 2.0;
    let cal = cmlg_fit(&s, 0.5).unwrap();
    assert!((cal.a() - a).abs() < 1e-14);
    assert!((cal.b() - b).abs() < 1e-14);
}

#[test]
fn logreg_stationary_point_has_zero_gradient() {
    let truth = AffineCalibration::new(1.7, 0.4).unwrap();
    let s = SynthSpec::with_eer(0.08, 3000, 5000, 5)
        .unwrap()
        .decalibrated(truth)
        .generate();
    for alpha in [0.5, 0.2, 0.9] {
        let cal = logreg_fit(&s, alpha).unwrap();
        let f = |a: f64, b: f64| logreg_objective(&s, alpha, a, b).unwrap();
        let h = 1e-5;
        let ga = (f(cal.a() + h, cal.b()) - f(cal.a() - h, cal.b())) / (2.0 * h);
        let gb = (f(cal.a(), cal.b() + h) - f(cal.a(), cal.b() - h)) / (2.0 * h);
        assert!(
            ga.abs() < 1e-7 && gb.abs() < 1e-7,
            "alpha={alpha} grad=({ga}, {gb})"
        );
    }
}

fn quarter_grid() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-40i32..40).prop_map(|k| k as f64 / 4.0), 1..25)
}

fn datasets() -> impl Strategy<Value = TrialScores> {
    (quarter_grid(), quarter_grid()).prop_map(|(t, n)| TrialScores::new(t, n).unwrap())
}

proptest! {
    #[test]
    fn min_cllr_never_exceeds_cllr(s in datasets()) {
        prop_assert!(min_cllr_pav(&s).unwrap() <= empirical_cllr(&s).unwrap() + 1e-15);
    }

    #[test]
    fn min_cllr_lies_in_unit_interval(s in datasets()) {
        let m = min_cllr_pav(&s).unwrap();
        prop_assert!((0.0..=1.0).contains(&m), "{}", m);
    }

    #[test]
    fn metrics_ignore_trial_order(s in datasets(), k in 0usize..50) {
        let mut t = s.targets().to_vec();
        let mut n = s.nontargets().to_vec();
        t.reverse();
        let r = k % n.len();
        n.rotate_left(r);
        let p = TrialScores::new(t, n).unwrap();
        prop_assert_eq!(min_cllr_pav(&s).unwrap(), min_cllr_pav(&p).unwrap());
        prop_assert_eq!(eer_rocch(&s).unwrap(), eer_rocch(&p).unwrap());
    }

    #[test]
    fn metrics_ignore_uniform_duplication(s in datasets()) {
        let twice = |x: &[f64]| x.iter().chain(x).copied().collect::<Vec<_>>();
        let d = TrialScores::new(twice(s.targets()), twice(s.nontargets())).unwrap();
        prop_assert!((min_cllr_pav(&s).unwrap() - min_cllr_pav(&d).unwrap()).abs() < 1e-12);
        prop_assert!((eer_rocch(&s).unwrap() - eer_rocch(&d).unwrap()).abs() < 1e-12);
        prop_assert!((empirical_cllr(&s).unwrap() - empirical_cllr(&d).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ranking_metrics_ignore_monotone_transforms(s in datasets()) {
        let eer = eer_rocch(&s).unwrap();
        let min = min_cllr_pav(&s).unwrap();
        for f in [|x: f64| 3.0 * x + 1.0, |x: f64| x.exp(), |x: f64| x * x * x] {
            let g = s.map(f);
            prop_assert!((eer_rocch(&g).unwrap() - eer).abs() < 1e-12);
            prop_assert!((min_cllr_pav(&g).unwrap() - min).abs() < 1e-12);
        }
    }

    #[test]
    fn eer_is_a_probability(s in datasets()) {
        let e = eer_rocch(&s).unwrap();
        prop_assert!((0.0..=0.5).contains(&e), "{}", e);
    }
}
