use approx::assert_relative_eq;
use proptest::prelude::*;
use ramsey_core::dicke::{family_moments, SpinMoments, SqueezingFamily};
use ramsey_core::noise::{NoiseModel, SpatialSpectrum, SpectrumKind, TemporalSpectrum};
use ramsey_core::uncertainty::{
    calibrated_slope, evaluate, ghz_slope, variance_full, variance_ghz, variance_markovian, variance_no_noise,
    variance_simplified, variance_spatial_approx, variance_temp_unc, FormulaTag, GhzMode, ProtocolParams,
};
use ramsey_core::Error;

fn spec(kind: SpectrumKind, a: f64, sigma: f64) -> TemporalSpectrum {
    TemporalSpectrum::new(kind, a, sigma).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(a.abs()).max(f64::MIN_POSITIVE)
}

/// Direct evaluation of the four-fold sums over qubits and shots, with the
/// phase covariance `Q_τ(l−l')P(n−n')` from quadrature.
fn literal_variance(m: &SpinMoments, model: &NoiseModel, p: &ProtocolParams) -> f64 {
    let n = p.n_qubits;
    let l = p.shots as usize;
    let q: Vec<f64> = (0..l).map(|d| model.temporal.shot_correlation(p.tau, d as u64).unwrap()).collect();
    let pc: Vec<f64> = (0..n).map(|d| model.spatial.correlation(d as i64).unwrap()).collect();
    let cov = |n1: usize, l1: usize, n2: usize, l2: usize| q[l1.abs_diff(l2)] * pc[n1.abs_diff(n2)];
    let (nf, lf) = (n as f64, l as f64);
    let gamma = cov(0, 0, 0, 0);
    let mut total = nf * lf / 4.0 * gamma.exp();
    let mut cross_shot = 0.0;
    for n1 in 0..n {
        for n2 in 0..n {
            for l1 in 0..l {
                for l2 in 0..l {
                    if l1 != l2 {
                        cross_shot += cov(n1, l1, n2, l2).sinh();
                    }
                }
            }
        }
    }
    total += m.jz_mean * m.jz_mean / (nf * nf) * cross_shot;
    if n > 1 {
        let mut exp_sum = 0.0;
        let mut bracket = 0.0;
        for n1 in 0..n {
            for n2 in 0..n {
                if n1 != n2 {
                    let x = cov(n1, 0, n2, 0);
                    exp_sum += x.exp();
                    bracket += m.jz2_mean * x.sinh() + m.jy2_mean * x.cosh();
                }
            }
        }
        total += -lf / (4.0 * (nf - 1.0)) * exp_sum + lf / (nf * (nf - 1.0)) * bracket;
    } else {
        // A single qubit has ⟨J_y²⟩ = 1/4; the n ≠ n' sums are empty.
        total += lf * (m.jy2_mean - 0.25);
    }
    total / (p.total_time * m.jz_mean).powi(2)
}

#[test]
fn full_variance_matches_literal_sums() {
    let models = [
        NoiseModel::temporal_only(spec(SpectrumKind::Gaussian, 0.8, 0.6)),
        NoiseModel::temporal_only(spec(SpectrumKind::Ohmic, 1.5, 0.4)),
        NoiseModel::new(
            spec(SpectrumKind::Linear, 0.7, 1.2),
            SpatialSpectrum::new(SpectrumKind::Gaussian, 0.9, 0.7).unwrap(),
        ),
        NoiseModel::new(
            spec(SpectrumKind::Ohmic, 1.0, 0.8),
            SpatialSpectrum::new(SpectrumKind::Ohmic, 1.2, 1.5).unwrap(),
        ),
        NoiseModel::new(
            TemporalSpectrum::white(0.4).unwrap(),
            SpatialSpectrum::new(SpectrumKind::Linear, 1.0, 0.5).unwrap(),
        ),
    ];
    let families = [
        SqueezingFamily::Coherent,
        SqueezingFamily::PsiKappa(0.6),
        SqueezingFamily::OneAxisTwisted(0.25),
        SqueezingFamily::TwoAxisTwisted(0.1),
    ];
    for model in &models {
        for &family in &families {
            for (n, shots, tau) in [(2, 3, 0.7), (4, 6, 0.4), (6, 9, 1.1)] {
                let m = family_moments(n, family).unwrap();
                let p = ProtocolParams::new(n, shots as f64 * tau, tau).unwrap();
                let ours = variance_full(&m, model, &p).unwrap().total_variance;
                let oracle = literal_variance(&m, model, &p);
                assert!(rel(ours, oracle) < 1e-10, "{model:?} {family:?} N={n}: {ours} vs {oracle}");
            }
        }
    }
}

#[test]
fn single_qubit_matches_literal_sums() {
    let model = NoiseModel::temporal_only(spec(SpectrumKind::Gaussian, 1.0, 0.5));
    let p = ProtocolParams::new(1, 8.0, 0.5).unwrap();
    let m = SpinMoments::separable(1);
    assert!(rel(variance_full(&m, &model, &p).unwrap().total_variance, literal_variance(&m, &model, &p)) < 1e-10);
}

#[test]
fn no_noise_reduction() {
    let m = family_moments(12, SqueezingFamily::PsiKappa(0.4)).unwrap();
    let p = ProtocolParams::new(12, 300.0, 1.5).unwrap();
    let b = variance_full(&m, &NoiseModel::silent(), &p).unwrap();
    let expected = m.jy2_mean / (p.tau * p.total_time * m.jz_mean * m.jz_mean);
    assert_relative_eq!(b.total_variance, expected, max_relative = 1e-14);
    assert_relative_eq!(variance_no_noise(&m, &p).unwrap().total_variance, expected, max_relative = 1e-14);
}

#[test]
fn white_separable_reduction() {
    let (n, a, tau, t) = (50usize, 0.7, 0.9, 270.0);
    let nf = n as f64;
    let m = SpinMoments::separable(n);
    let white = TemporalSpectrum::white(a).unwrap();
    let p = ProtocolParams::new(n, t, tau).unwrap();
    let expected = (nf * ((a * tau).exp() - 1.0) / 4.0 + nf / 4.0) / (t * tau * nf * nf / 4.0);
    assert_relative_eq!(
        variance_full(&m, &NoiseModel::temporal_only(white), &p).unwrap().total_variance,
        expected,
        max_relative = 1e-12
    );
    assert_relative_eq!(variance_markovian(&m, &white, &p).unwrap().total_variance, expected, max_relative = 1e-12);
}

#[test]
fn white_separable_optimum_value() {
    let m = SpinMoments::separable(100);
    let model = NoiseModel::temporal_only(TemporalSpectrum::white(1.0).unwrap());
    let p = ProtocolParams::new(100, 1000.0, 1.0).unwrap();
    assert_relative_eq!(
        variance_full(&m, &model, &p).unwrap().total_stddev,
        (std::f64::consts::E / 1e5).sqrt(),
        max_relative = 1e-13
    );
}

#[test]
fn temporally_uncorrelated_noise_has_no_cross_shot_term() {
    let m = family_moments(8, SqueezingFamily::PsiKappa(0.5)).unwrap();
    let p = ProtocolParams::new(8, 100.0, 0.5).unwrap();
    let white = TemporalSpectrum::white(1.2).unwrap();
    assert_eq!(variance_temp_unc(&m, &white, &p).unwrap().cross_shot_term, 0.0);
    assert_eq!(variance_simplified(&m, &white, &p).unwrap().cross_shot_term, 0.0);
}

#[test]
fn gaussian_two_shot_cross_term() {
    let (n, sigma, tau) = (3usize, 2.0, 0.25);
    let s = spec(SpectrumKind::Gaussian, 1.0, sigma);
    let p = ProtocolParams::new(n, 2.0 * tau, tau).unwrap();
    let m = SpinMoments::separable(n);
    let q1 = s.shot_correlation(tau, 1).unwrap();
    let expected = 2.0 * q1.sinh() / (n as f64 * p.total_time * p.total_time);
    assert_relative_eq!(variance_temp_unc(&m, &s, &p).unwrap().cross_shot_term, expected, max_relative = 1e-10);
}

#[test]
fn simplified_close_to_exact_for_weak_shot_correlations() {
    for kind in [SpectrumKind::Gaussian, SpectrumKind::Linear, SpectrumKind::Ohmic] {
        for (a, sigma, tau) in [(0.05, 0.5, 1.0), (0.1, 2.0, 0.3), (0.02, 0.1, 2.0)] {
            let s = spec(kind, a, sigma);
            let max_q = (1..200u64).map(|d| s.shot_correlation_fast(tau, d).abs()).fold(0.0, f64::max);
            assert!(max_q < 0.05);
            let m = family_moments(20, SqueezingFamily::PsiKappa(0.5)).unwrap();
            let p = ProtocolParams::new(20, 400.0, tau).unwrap();
            let exact = variance_temp_unc(&m, &s, &p).unwrap().total_variance;
            let approx = variance_simplified(&m, &s, &p).unwrap().total_variance;
            assert!(rel(approx, exact) < 0.05, "{kind:?}");
        }
    }
}

#[test]
fn simplified_long_time_term_is_the_bound() {
    let white = TemporalSpectrum::white(0.6).unwrap();
    let p = ProtocolParams::new(10, 1e6, 1.0).unwrap();
    let b = variance_simplified(&SpinMoments::separable(10), &white, &p).unwrap();
    let long_time = white.gamma(p.total_time).unwrap() / (10.0 * p.total_time * p.total_time);
    assert_relative_eq!(long_time, b.fundamental_bound.powi(2), max_relative = 1e-12);
}

#[test]
fn spatial_approx_separable_has_no_qubit_term() {
    for kind in SpectrumKind::ALL {
        let model = NoiseModel::new(
            spec(SpectrumKind::Ohmic, 1.0, 0.5),
            SpatialSpectrum::new(kind, 0.8, 0.9).unwrap(),
        );
        let p = ProtocolParams::new(16, 500.0, 0.4).unwrap();
        let b = variance_spatial_approx(&SpinMoments::separable(16), &model, &p).unwrap();
        assert_eq!(b.cross_qubit_term, 0.0);
    }
}

#[test]
fn spatial_bracket_is_at_least_minus_one() {
    for kind in SpectrumKind::ALL {
        for k0 in [0.05, 0.3, 1.0, 3.0, 10.0] {
            for b in [0.1, 1.0, 5.0] {
                let g = SpatialSpectrum::new(kind, b, k0).unwrap();
                let bracket = g.value(0.0) / g.correlation(0).unwrap() - 1.0;
                assert!(bracket >= -1.0);
            }
        }
    }
}

#[test]
fn ghz_noiseless_is_heisenberg() {
    let p = ProtocolParams::new(20, 100.0, 0.5).unwrap();
    for mode in [GhzMode::Exact, GhzMode::Simple] {
        let b = variance_ghz(&NoiseModel::silent(), &p, mode).unwrap();
        assert_relative_eq!(b.total_stddev, 1.0 / (20.0 * (100.0f64 * 0.5).sqrt()), max_relative = 1e-14);
    }
}

#[test]
fn ghz_white_optimum_value() {
    let (n, a) = (25usize, 2.0);
    let tau = 1.0 / (n as f64 * a);
    let p = ProtocolParams::new(n, 1000.0 * tau, tau).unwrap();
    let model = NoiseModel::temporal_only(TemporalSpectrum::white(a).unwrap());
    let b = variance_ghz(&model, &p, GhzMode::Exact).unwrap();
    let expected = (a * std::f64::consts::E / (n as f64 * p.total_time)).sqrt();
    assert_relative_eq!(b.total_stddev, expected, max_relative = 1e-12);
}

#[test]
fn ghz_simple_close_to_exact_for_weak_shot_correlations() {
    for kind in [SpectrumKind::Gaussian, SpectrumKind::Linear, SpectrumKind::Ohmic] {
        let n = 10usize;
        let (a, sigma, tau) = (0.002, 1.0, 0.5);
        let s = spec(kind, a, sigma);
        let max_q = (1..100u64).map(|d| s.shot_correlation_fast(tau, d).abs()).fold(0.0, f64::max);
        assert!(n as f64 * max_q < 0.05);
        let model = NoiseModel::temporal_only(s);
        let p = ProtocolParams::new(n, 200.0, tau).unwrap();
        let exact = variance_ghz(&model, &p, GhzMode::Exact).unwrap().total_variance;
        let simple = variance_ghz(&model, &p, GhzMode::Simple).unwrap().total_variance;
        assert!(rel(simple, exact) < 0.02, "{kind:?}");
    }
}

#[test]
fn calibrated_slope_values() {
    let m = family_moments(6, SqueezingFamily::PsiKappa(0.8)).unwrap();
    let p = ProtocolParams::new(6, 20.0, 0.5).unwrap();
    assert_eq!(calibrated_slope(&m, &NoiseModel::silent(), &p).unwrap(), 0.5 * m.jz_mean);
    let white = NoiseModel::temporal_only(TemporalSpectrum::white(2.0).unwrap());
    assert_relative_eq!(
        calibrated_slope(&m, &white, &p).unwrap(),
        0.5 * (-0.5f64).exp() * m.jz_mean,
        max_relative = 1e-15
    );
    assert_relative_eq!(ghz_slope(&NoiseModel::silent(), &p, std::f64::consts::FRAC_PI_2).unwrap(), 3.0);
}

#[test]
fn noiseless_variance_from_slope() {
    let m = family_moments(9, SqueezingFamily::OneAxisTwisted(0.2)).unwrap();
    let p = ProtocolParams::new(9, 40.0, 0.8).unwrap();
    let slope = calibrated_slope(&m, &NoiseModel::silent(), &p).unwrap();
    let l = p.shots as f64;
    let from_slope = l * m.jy2_mean / (l * slope).powi(2);
    assert_relative_eq!(
        variance_full(&m, &NoiseModel::silent(), &p).unwrap().total_variance,
        from_slope,
        max_relative = 1e-14
    );
}

#[test]
fn overflow_is_reported() {
    let m = SpinMoments::separable(4);
    let model = NoiseModel::temporal_only(TemporalSpectrum::white(1.0).unwrap());
    let p = ProtocolParams::new(4, 1e4, 800.0).unwrap();
    assert!(matches!(variance_full(&m, &model, &p), Err(Error::DephasingOverflow { .. })));
    let p = ProtocolParams::new(400, 1e4, 2.0).unwrap();
    assert!(matches!(variance_ghz(&model, &p, GhzMode::Exact), Err(Error::DephasingOverflow { .. })));
}

#[test]
fn markovian_form_rejects_correlated_noise() {
    let m = SpinMoments::separable(4);
    let p = ProtocolParams::new(4, 10.0, 1.0).unwrap();
    assert!(variance_markovian(&m, &spec(SpectrumKind::Ohmic, 1.0, 1.0), &p).is_err());
    let spatial = NoiseModel::new(
        TemporalSpectrum::white(1.0).unwrap(),
        SpatialSpectrum::new(SpectrumKind::Gaussian, 1.0, 1.0).unwrap(),
    );
    assert!(evaluate(FormulaTag::Markovian, &m, &spatial, &p).is_err());
}

#[test]
fn protocol_snaps_total_time() {
    let p = ProtocolParams::new(3, 10.0, 0.3).unwrap();
    assert_eq!(p.shots, 33);
    assert!((p.shots as f64 * p.tau - p.total_time).abs() <= p.tau * 1e-9);
    assert!(ProtocolParams::new(3, 1.0, 5.0).is_err());
    assert!(ProtocolParams::new(0, 1.0, 0.5).is_err());
}

#[test]
fn formula_tags_round_trip() {
    for tag in FormulaTag::ALL {
        assert_eq!(tag.name().parse::<FormulaTag>().unwrap(), tag);
        assert_eq!(tag.to_string(), tag.name());
    }
}

fn kind_strategy() -> impl Strategy<Value = SpectrumKind> {
    prop::sample::select(SpectrumKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trivial_spatial_full_equals_temporal_form(
        kind in kind_strategy(),
        a in 0.05f64..2.0,
        sigma in 0.05f64..2.0,
        n in 1usize..60,
        kappa in 0.05f64..1.0,
        tau in 0.02f64..3.0,
        shots in 1u32..3000,
    ) {
        let s = spec(kind, a, sigma);
        let m = family_moments(n, SqueezingFamily::PsiKappa(kappa)).unwrap();
        let p = ProtocolParams::new(n, shots as f64 * tau, tau).unwrap();
        let full = variance_full(&m, &NoiseModel::temporal_only(s), &p).unwrap().total_variance;
        let temp = variance_temp_unc(&m, &s, &p).unwrap().total_variance;
        prop_assert!(rel(full, temp) < 1e-10);
    }

    #[test]
    fn white_variance_decreases_with_total_time(
        a in 0.05f64..2.0,
        tau in 0.05f64..2.0,
        shots in 1u64..10_000,
        n in 1usize..40,
    ) {
        let m = SpinMoments::separable(n);
        let model = NoiseModel::temporal_only(TemporalSpectrum::white(a).unwrap());
        let p1 = ProtocolParams::with_fixed_total(n, shots as f64 * tau, shots).unwrap();
        let p2 = ProtocolParams::with_fixed_total(n, (shots + 1) as f64 * tau, shots + 1).unwrap();
        let v1 = variance_full(&m, &model, &p1).unwrap().total_variance;
        let v2 = variance_full(&m, &model, &p2).unwrap().total_variance;
        prop_assert!(v2 <= v1);
    }

    #[test]
    fn breakdown_terms_sum_to_total(
        t_kind in kind_strategy(),
        s_kind in kind_strategy(),
        n in 2usize..30,
        tau in 0.05f64..2.0,
        shots in 2u32..500,
    ) {
        let model = NoiseModel::new(spec(t_kind, 0.5, 0.7), SpatialSpectrum::new(s_kind, 0.8, 0.6).unwrap());
        let m = family_moments(n, SqueezingFamily::OneAxisTwisted(0.1)).unwrap();
        let p = ProtocolParams::new(n, shots as f64 * tau, tau).unwrap();
        let b = variance_full(&m, &model, &p).unwrap();
        let sum = b.shot_noise_term + b.single_shot_dephasing_term + b.cross_shot_term + b.cross_qubit_term;
        prop_assert!(rel(sum, b.total_variance) < 1e-12);
        prop_assert!((b.total_stddev - b.total_variance.sqrt()).abs() <= 1e-15 * b.total_stddev);
    }
}
