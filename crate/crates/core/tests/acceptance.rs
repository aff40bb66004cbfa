//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line before asserting.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramsey_core::dicke::{family_moments, SpinMoments, SqueezingFamily};
use ramsey_core::mc::{empirical_estimator_variance, McConfig};
use ramsey_core::noise::{zero_freq_bound, NoiseModel, SpatialSpectrum, SpectrumKind, TemporalSpectrum};
use ramsey_core::optimizer::{gain_curve, no_noise_gain, optimize_protocol, scaling_exponent, OptimizerConfig};
use ramsey_core::uncertainty::{
    variance_full, variance_markovian, variance_no_noise, variance_simplified, variance_spatial_approx, FormulaTag,
    ProtocolParams,
};

/// Written to the stdout handle directly so the line shows without `--nocapture`.
fn report(id: u32, ok: bool, detail: impl AsRef<str>) {
    let line = format!("{} criterion {id}: {}\n", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

/// Log-spaced even qubit numbers, deduplicated.
fn even_grid(lo: f64, hi: f64, count: usize) -> Vec<usize> {
    let mut ns: Vec<usize> = log_grid(lo, hi, count)
        .into_iter()
        .map(|n| ((n / 2.0).round() as usize).max(1) * 2)
        .collect();
    ns.dedup();
    ns
}

fn temporal(kind: SpectrumKind, a: f64, sigma: f64) -> NoiseModel {
    NoiseModel::temporal_only(TemporalSpectrum::new(kind, a, sigma).unwrap())
}

#[test]
fn c01_markovian_optimum() {
    let start = Instant::now();
    let model = temporal(SpectrumKind::White, 1.0, 1.0);
    let r = optimize_protocol(&model, SqueezingFamily::Coherent, 100, 1e3, FormulaTag::Full18, &OptimizerConfig::default())
        .unwrap();
    let elapsed = start.elapsed();
    let expected = (std::f64::consts::E / 1e5).sqrt();
    let tau_err = rel(r.tau_opt, 1.0);
    let db_err = rel(r.min_stddev, expected);
    let ok = tau_err <= 0.01 && db_err <= 0.01 && elapsed < Duration::from_secs(1);
    report(
        1,
        ok,
        format!("tau_opt {:.6} (rel {tau_err:.1e}), db {:.6e} vs {expected:.6e} (rel {db_err:.1e}), {elapsed:.2?}", r.tau_opt, r.min_stddev),
    );
    assert!(ok);
}

#[test]
fn c02_sqrt_e_ceiling() {
    let start = Instant::now();
    let model = temporal(SpectrumKind::White, 1.0, 1.0);
    let ns = even_grid(2.0, 1e4, 60);
    let pts = gain_curve(&model, SqueezingFamily::PsiKappa(1.0), &ns, 1e3, FormulaTag::Full18, &OptimizerConfig::default())
        .unwrap();
    let elapsed = start.elapsed();
    let ceiling = std::f64::consts::E.sqrt();
    let drops: Vec<(usize, f64, f64)> = pts
        .windows(2)
        .filter(|w| w[1].gain_r < w[0].gain_r)
        .map(|w| (w[1].n_qubits, w[0].gain_r, w[1].gain_r))
        .collect();
    let max_r = pts.iter().map(|p| p.gain_r).fold(0.0, f64::max);
    let last = pts.last().unwrap();
    let ok = drops.is_empty()
        && max_r < ceiling
        && last.n_qubits == 10_000
        && last.gain_r > 1.55
        && elapsed < Duration::from_secs(60);
    report(
        2,
        ok,
        format!(
            "{} points, decreases {:?}, max r {max_r:.5} < {ceiling:.5}, r(N={}) {:.5}, {elapsed:.2?}",
            pts.len(),
            drops,
            last.n_qubits,
            last.gain_r
        ),
    );
    assert!(ok);
}

#[test]
fn c03_table_exponents() {
    let start = Instant::now();
    let ns = even_grid(1e3, 1e4, 8);
    // (kind, Δb, τ_opt, κ_opt) target exponents and tolerances
    let targets = [
        (SpectrumKind::White, (-0.5, 0.03), (-1.0 / 3.0, 0.05), (-1.0 / 3.0, 0.06)),
        (SpectrumKind::Gaussian, (-0.5, 0.03), (-0.25, 0.05), (-0.375, 0.06)),
        (SpectrumKind::Linear, (-2.0 / 3.0, 0.04), (-1.0 / 3.0, 0.05), (-1.0 / 3.0, 0.06)),
        (SpectrumKind::Ohmic, (-0.75, 0.04), (-0.25, 0.05), (-0.375, 0.06)),
    ];
    let mut all_ok = true;
    let mut lines = Vec::new();
    for (kind, db, tau, kappa) in targets {
        let model = temporal(kind, 1.0, 0.5);
        let pts = gain_curve(&model, SqueezingFamily::PsiKappa(1.0), &ns, 1e4, FormulaTag::Full18, &OptimizerConfig::default())
            .unwrap();
        let fit = |values: Vec<f64>| {
            let data: Vec<(f64, f64)> = pts.iter().zip(values).map(|(p, v)| (p.n_qubits as f64, v)).collect();
            scaling_exponent(&data, None).unwrap().exponent
        };
        let e_db = fit(pts.iter().map(|p| p.min_stddev).collect());
        let e_tau = fit(pts.iter().map(|p| p.tau_opt).collect());
        let e_kappa = fit(pts.iter().map(|p| p.squeeze_opt.unwrap()).collect());
        let ok = (e_db - db.0).abs() <= db.1 && (e_tau - tau.0).abs() <= tau.1 && (e_kappa - kappa.0).abs() <= kappa.1;
        all_ok &= ok;
        lines.push(format!("{} db {e_db:+.3} tau {e_tau:+.3} kappa {e_kappa:+.3}", kind.name()));
    }
    let elapsed = start.elapsed();
    let ok = all_ok && elapsed < Duration::from_secs(600);
    report(3, ok, format!("{}; {elapsed:.2?}", lines.join("; ")));
    assert!(ok);
}

#[test]
fn c04_fundamental_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let spatial_kinds: Vec<Option<SpectrumKind>> =
        std::iter::once(None).chain(SpectrumKind::ALL.into_iter().map(Some)).collect();
    let mut violations = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for i in 0..50 {
        let t_kind = SpectrumKind::ALL[i % 4];
        let s_kind = spatial_kinds[(i / 4) % spatial_kinds.len()];
        let a = rng.random_range(0.2..3.0);
        let sigma = rng.random_range(0.05..2.0);
        let spatial = match s_kind {
            None => SpatialSpectrum::trivial(),
            Some(k) => SpatialSpectrum::new(k, rng.random_range(0.2..2.0), rng.random_range(0.1..3.0)).unwrap(),
        };
        let model = NoiseModel::new(TemporalSpectrum::new(t_kind, a, sigma).unwrap(), spatial);
        let n = rng.random_range(1..=40usize);
        let family = match i % 3 {
            0 => SqueezingFamily::Coherent,
            1 => SqueezingFamily::PsiKappa(rng.random_range(0.05..1.0)),
            _ => SqueezingFamily::OneAxisTwisted(rng.random_range(0.0..0.5)),
        };
        let total_time = 10f64.powf(rng.random_range(3.0..5.0)) / a;
        let tau = 10f64.powf(rng.random_range(-2.0..0.5)) / a;
        let p = ProtocolParams::new(n, total_time, tau).unwrap();
        let moments = family_moments(n, family).unwrap();
        let b = variance_full(&moments, &model, &p).unwrap();
        let bound = zero_freq_bound(&model, n, p.total_time).unwrap();
        if bound > 0.0 {
            min_ratio = min_ratio.min(b.total_stddev / bound);
        }
        if b.total_stddev < bound * (1.0 - 1e-9) {
            violations.push((i, b.total_stddev, bound));
        }
    }
    let ok = violations.is_empty();
    report(4, ok, format!("50 configurations, {} violations {violations:?}, min db/bound {min_ratio:.4}", violations.len()));
    assert!(ok);
}

#[test]
fn c05_closed_forms() {
    let a = 1.3;
    let mut worst_q0 = 0.0f64;
    let mut worst_diff = 0.0f64;
    let mut worst_window = 0.0f64;
    for kind in SpectrumKind::ALL {
        let sigma = 0.7;
        let s = TemporalSpectrum::new(kind, a, sigma).unwrap();
        for st in log_grid(1e-2, 1e2, 10) {
            let tau = st / sigma;
            let gamma = s.gamma(tau).unwrap();
            worst_q0 = worst_q0.max(rel(s.shot_correlation(tau, 0).unwrap(), gamma));
            for dl in 1..=3u64 {
                let d = dl as f64;
                let g = |t: f64| if t == 0.0 { 0.0 } else { s.gamma(t).unwrap() };
                let expected = 0.5 * (g((d + 1.0) * tau) - 2.0 * g(d * tau) + g((d - 1.0) * tau));
                let q = s.shot_correlation(tau, dl).unwrap();
                // Far-apart shots are nearly uncorrelated; both sides then carry
                // rounding of order ε·γ(τ), so the error is referenced to at
                // least 1e-7·γ(τ).
                let err = (q - expected).abs() / expected.abs().max(1e-7 * gamma);
                worst_diff = worst_diff.max(err);
            }
            let shots = 6u64;
            let mut window = shots as f64 * s.shot_correlation(tau, 0).unwrap();
            for dl in 1..shots {
                window += 2.0 * (shots - dl) as f64 * s.shot_correlation(tau, dl).unwrap();
            }
            worst_window = worst_window.max(rel(window, s.gamma(shots as f64 * tau).unwrap()));
        }
    }
    let ok = worst_q0 <= 1e-6 && worst_diff <= 1e-6 && worst_window <= 1e-6;
    report(
        5,
        ok,
        format!("max rel: Q(0) vs gamma {worst_q0:.1e}, second difference {worst_diff:.1e}, window sum {worst_window:.1e}"),
    );
    assert!(ok);
}

#[test]
fn c06_long_time_limits() {
    let a = 1.0;
    let sigma = 0.5;
    let total_time = 1e4 / sigma;
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in SpectrumKind::ALL {
        let s = TemporalSpectrum::new(kind, a, sigma).unwrap();
        let rate = s.gamma(total_time).unwrap() / total_time;
        let pass = match kind {
            SpectrumKind::White | SpectrumKind::Gaussian => rel(rate, s.value(0.0)) <= 0.01,
            SpectrumKind::Linear | SpectrumKind::Ohmic => rate < 0.01 * a,
        };
        ok &= pass;
        parts.push(format!("{} gamma(T)/T = {rate:.4e} (S(0) = {:.3e})", kind.name(), s.value(0.0)));
    }
    report(6, ok, parts.join(", "));
    assert!(ok);
}

#[test]
fn c07_ghz() {
    let cfg = OptimizerConfig::default();
    let white = temporal(SpectrumKind::White, 1.0, 1.0);
    let mut worst_white = 0.0f64;
    for n in 2..=128 {
        let r = optimize_protocol(&white, SqueezingFamily::Ghz, n, 1e4, FormulaTag::GhzExact, &cfg).unwrap();
        worst_white = worst_white.max((r.gain_r - 1.0).abs());
    }
    let ohmic = temporal(SpectrumKind::Ohmic, 1.0, 0.5);
    let ns: Vec<usize> = log_grid(10.0, 1e3, 9).into_iter().map(|n| n.round() as usize).collect();
    let pts = gain_curve(&ohmic, SqueezingFamily::Ghz, &ns, 1e4, FormulaTag::GhzSimple, &cfg).unwrap();
    let data: Vec<(f64, f64)> = pts.iter().map(|p| (p.n_qubits as f64, p.min_stddev)).collect();
    let e_ohmic = scaling_exponent(&data, None).unwrap().exponent;
    let linear = temporal(SpectrumKind::Linear, 1.0, 0.5);
    let r_linear = optimize_protocol(&linear, SqueezingFamily::Ghz, 1000, 1e4, FormulaTag::GhzExact, &cfg)
        .unwrap()
        .gain_r;
    let ok = worst_white <= 0.01 && (e_ohmic + 0.75).abs() <= 0.04 && r_linear < 1.0;
    report(
        7,
        ok,
        format!("white max |r-1| {worst_white:.1e}, ohmic db exponent {e_ohmic:+.3}, linear r(N=1000) {r_linear:.4}"),
    );
    assert!(ok);
}

#[test]
fn c08_no_noise_exponents() {
    let ns = even_grid(1e2, 1e3, 8);
    let mut parts = Vec::new();
    let mut ok = true;
    for (family, target) in [
        (SqueezingFamily::PsiKappa(1.0), 0.5),
        (SqueezingFamily::TwoAxisTwisted(0.0), 0.5),
        (SqueezingFamily::OneAxisTwisted(0.0), 1.0 / 3.0),
    ] {
        let data: Vec<(f64, f64)> = ns
            .iter()
            .map(|&n| (n as f64, no_noise_gain(family, n, None).unwrap().gain_r))
            .collect();
        let e = scaling_exponent(&data, None).unwrap().exponent;
        ok &= (e - target).abs() <= 0.05;
        parts.push(format!("{family:?} {e:+.3}"));
    }
    report(8, ok, parts.join(", "));
    assert!(ok);
}

#[test]
fn c09_monte_carlo() {
    let start = Instant::now();
    let t = |kind, a, sigma| TemporalSpectrum::new(kind, a, sigma).unwrap();
    let s = |kind, b, k0| SpatialSpectrum::new(kind, b, k0).unwrap();
    use SpectrumKind::*;
    use SqueezingFamily::*;
    let trivial = SpatialSpectrum::trivial;
    // (temporal, spatial, family, N, T, τ)
    let cases = [
        (TemporalSpectrum::silent(), trivial(), Coherent, 4, 50.0, 1.0),
        (TemporalSpectrum::silent(), trivial(), PsiKappa(0.4), 6, 40.0, 1.0),
        (t(White, 0.5, 1.0), trivial(), Coherent, 4, 50.0, 1.0),
        (t(White, 0.3, 1.0), trivial(), PsiKappa(0.5), 8, 30.0, 1.0),
        (t(Gaussian, 1.0, 0.5), trivial(), Coherent, 1, 60.0, 1.0),
        (t(Gaussian, 2.0, 0.3), trivial(), PsiKappa(0.5), 6, 20.0, 1.0),
        (t(Gaussian, 1.0, 0.5), s(White, 0.8, 1.0), OneAxisTwisted(0.2), 5, 30.0, 0.5),
        (t(Linear, 1.0, 0.5), trivial(), Coherent, 3, 40.0, 0.8),
        (t(Linear, 1.0, 0.5), s(Gaussian, 1.0, 0.8), OneAxisTwisted(0.3), 6, 20.0, 0.5),
        (t(Linear, 0.5, 1.0), s(Linear, 1.0, 1.5), PsiKappa(0.7), 8, 25.0, 0.5),
        (t(Ohmic, 1.0, 0.3), trivial(), PsiKappa(0.6), 6, 40.0, 1.0),
        (t(Ohmic, 2.0, 0.5), s(Ohmic, 1.0, 1.0), TwoAxisTwisted(0.15), 6, 20.0, 0.5),
        (t(Ohmic, 1.0, 0.5), s(Gaussian, 0.5, 0.5), Coherent, 8, 30.0, 0.6),
        (t(White, 0.4, 1.0), s(Gaussian, 1.0, 0.6), TwoAxisTwisted(0.1), 7, 30.0, 0.8),
        (t(Gaussian, 0.5, 1.0), s(Linear, 1.0, 2.0), Coherent, 4, 30.0, 1.0),
        (t(Gaussian, 1.0, 0.5), trivial(), Ghz, 4, 30.0, 0.3),
        (t(White, 0.5, 1.0), trivial(), Ghz, 3, 40.0, 0.4),
        (t(Ohmic, 1.0, 0.5), trivial(), Ghz, 6, 30.0, 0.2),
        (t(Linear, 1.0, 0.5), s(Gaussian, 0.7, 1.0), Ghz, 5, 20.0, 0.3),
        (TemporalSpectrum::silent(), trivial(), Ghz, 8, 20.0, 0.5),
    ];
    let mut z_scores = Vec::new();
    for (i, (temporal, spatial, family, n, total_time, tau)) in cases.into_iter().enumerate() {
        let model = NoiseModel::new(temporal, spatial);
        let p = ProtocolParams::new(n, total_time, tau).unwrap();
        let e = empirical_estimator_variance(&model, family, &p, McConfig::new(10_000, 900 + i as u64)).unwrap();
        z_scores.push(e.z_score());
    }
    let elapsed = start.elapsed();
    let within3 = z_scores.iter().filter(|z| z.abs() <= 3.0).count();
    let max_z = z_scores.iter().map(|z| z.abs()).fold(0.0, f64::max);
    let ok = within3 * 100 >= 95 * z_scores.len() && max_z <= 4.0 && elapsed < Duration::from_secs(900);
    let zs: Vec<String> = z_scores.iter().map(|z| format!("{z:+.2}")).collect();
    report(
        9,
        ok,
        format!("{within3}/{} with |z| <= 3, max |z| {max_z:.2}, z = [{}], {elapsed:.2?}", z_scores.len(), zs.join(" ")),
    );
    assert!(ok);
}

#[test]
fn c10_reduction_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_nonoise = 0.0f64;
    let mut worst_markov = 0.0f64;
    let mut spatial_mismatch = 0usize;
    for _ in 0..200 {
        let n = rng.random_range(1..=200usize);
        let j = 0.5 * n as f64;
        let jz = rng.random_range(0.05..1.0) * j;
        let jz2 = jz * jz + rng.random::<f64>() * (j * j - jz * jz);
        let jy2 = rng.random_range(0.01..1.0) * j * j;
        let moments = SpinMoments::from_parts(n, jz, jy2, jz2).unwrap();
        let tau = 10f64.powf(rng.random_range(-2.0..1.0));
        let total_time = tau * rng.random_range(1..2000u32) as f64;
        let p = ProtocolParams::new(n, total_time, tau).unwrap();

        let silent = NoiseModel::silent();
        let full = variance_full(&moments, &silent, &p).unwrap().total_variance;
        worst_nonoise = worst_nonoise.max(rel(full, variance_no_noise(&moments, &p).unwrap().total_variance));

        let white = TemporalSpectrum::white(rng.random_range(0.01..2.0)).unwrap();
        let full = variance_full(&moments, &NoiseModel::temporal_only(white), &p).unwrap().total_variance;
        worst_markov = worst_markov.max(rel(full, variance_markovian(&moments, &white, &p).unwrap().total_variance));

        let kind = SpectrumKind::ALL[rng.random_range(0..4)];
        let temporal = TemporalSpectrum::new(kind, rng.random_range(0.1..2.0), rng.random_range(0.1..2.0)).unwrap();
        let approx = variance_spatial_approx(&moments, &NoiseModel::temporal_only(temporal), &p).unwrap();
        let simple = variance_simplified(&moments, &temporal, &p).unwrap();
        if approx.total_variance != simple.total_variance {
            spatial_mismatch += 1;
        }
    }
    let ok = worst_nonoise <= 1e-10 && worst_markov <= 1e-10 && spatial_mismatch == 0;
    report(
        10,
        ok,
        format!(
            "200 draws: silent vs noise-free {worst_nonoise:.1e}, white vs Markovian {worst_markov:.1e}, spatial approx vs simplified mismatches {spatial_mismatch}"
        ),
    );
    assert!(ok);
}
