//! Collective-spin states against a brute-force construction in the full
//! `2^N`-dimensional Hilbert space.

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use ramsey_core::dicke::{
    family_moments, ghz_state, make_psi_kappa, make_state, make_twisted_state, make_twisted_state_with, spin_moments,
    SpinMoments, SqueezingFamily, TwistConfig,
};
use ramsey_core::Error;

type CMat = DMatrix<Complex64>;
type CVec = DVector<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Collective operators `J_x, J_y, J_z` on `N` qubits; bit `n` set means qubit `n` is down.
struct Dense {
    jx: CMat,
    jy: CMat,
    jz: CMat,
}

impl Dense {
    fn new(n: usize) -> Self {
        let dim = 1usize << n;
        let mut jx = CMat::zeros(dim, dim);
        let mut jy = CMat::zeros(dim, dim);
        let mut jz = CMat::zeros(dim, dim);
        for b in 0..dim {
            for q in 0..n {
                let bit = 1usize << q;
                let down = b & bit != 0;
                let flipped = b ^ bit;
                // σ_x|0⟩ = |1⟩, σ_y|0⟩ = i|1⟩, σ_y|1⟩ = −i|0⟩, σ_z|0⟩ = |0⟩.
                jx[(flipped, b)] += c(0.5);
                jy[(flipped, b)] += if down { -0.5 * I } else { 0.5 * I };
                jz[(b, b)] += c(if down { -0.5 } else { 0.5 });
            }
        }
        Self { jx, jy, jz }
    }

    fn ops(&self) -> [&CMat; 3] {
        [&self.jx, &self.jy, &self.jz]
    }
}

fn product_state(n: usize, single: [Complex64; 2]) -> CVec {
    let dim = 1usize << n;
    CVec::from_fn(dim, |b, _| {
        (0..n).fold(c(1.0), |acc, q| acc * single[(b >> q) & 1])
    })
}

fn expect(psi: &CVec, op: &CMat) -> f64 {
    psi.dotc(&(op * psi)).re
}

fn expect2(psi: &CVec, a: &CMat, b: &CMat) -> f64 {
    // Symmetrized ⟨{A, B}⟩/2.
    let ab = psi.dotc(&(a * (b * psi))).re;
    let ba = psi.dotc(&(b * (a * psi))).re;
    0.5 * (ab + ba)
}

/// Moments in the frame where the mean spin is `+z` and `J_y` is the
/// minimum-variance direction orthogonal to it.
fn aligned_moments(n: usize, dense: &Dense, psi: &CVec) -> SpinMoments {
    let ops = dense.ops();
    let mean: Vec<f64> = ops.iter().map(|o| expect(psi, o)).collect();
    let len = mean.iter().map(|x| x * x).sum::<f64>().sqrt();
    let axis: Vec<f64> = mean.iter().map(|x| x / len).collect();
    let cov = DMatrix::from_fn(3, 3, |i, j| expect2(psi, ops[i], ops[j]) - mean[i] * mean[j]);
    // Orthonormal basis (u, v) of the plane orthogonal to the mean spin.
    let helper = if axis[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot: f64 = helper.iter().zip(&axis).map(|(h, a)| h * a).sum();
    let mut u: Vec<f64> = helper.iter().zip(&axis).map(|(h, a)| h - dot * a).collect();
    let un = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    u.iter_mut().for_each(|x| *x /= un);
    let v = [
        axis[1] * u[2] - axis[2] * u[1],
        axis[2] * u[0] - axis[0] * u[2],
        axis[0] * u[1] - axis[1] * u[0],
    ];
    let quad = |x: &[f64], y: &[f64]| {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += x[i] * cov[(i, j)] * y[j];
            }
        }
        s
    };
    let (uu, vv, uv) = (quad(&u, &u), quad(&v, &v), quad(&u, &v));
    let min_var = 0.5 * (uu + vv) - (0.25 * (uu - vv) * (uu - vv) + uv * uv).sqrt();
    let along = quad(&axis, &axis) + len * len;
    SpinMoments::from_parts(n, len, min_var, along).unwrap()
}

fn raw_moments(n: usize, dense: &Dense, psi: &CVec) -> (SpinMoments, f64, f64) {
    let jz = expect(psi, &dense.jz);
    let jy2 = expect2(psi, &dense.jy, &dense.jy);
    let jz2 = expect2(psi, &dense.jz, &dense.jz);
    let m = SpinMoments::from_parts(n, jz, jy2, jz2).unwrap();
    (m, expect(psi, &dense.jx), expect(psi, &dense.jy))
}

/// `|ψ_κ⟩` built from the `J_y` ladder generated by `R = −(J_z + iJ_x)` starting
/// at the product state with every spin along `−y`.
fn brute_psi_kappa(n: usize, kappa: f64, dense: &Dense) -> CVec {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut level = product_state(n, [c(s), -I * s]);
    let raise = -(&dense.jz + &dense.jx * I);
    let half = 0.5 * n as f64;
    let mut psi = CVec::zeros(1 << n);
    for k in 0..=n {
        let m = k as f64 - half;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        psi += &level * c(sign * (-m * m / (n as f64 * kappa * kappa)).exp());
        if k < n {
            level = &raise * &level;
            let norm = level.norm();
            level /= c(norm);
        }
    }
    let norm = psi.norm();
    psi / c(norm)
}

fn evolve(h: &CMat, t: f64, psi: &CVec) -> CVec {
    let eig = h.clone().symmetric_eigen();
    let phases = CMat::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t)));
    let u = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    u * psi
}

fn brute_oat(n: usize, chi_t: f64, dense: &Dense) -> CVec {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = product_state(n, [c(s), c(s)]);
    evolve(&(&dense.jz * &dense.jz), chi_t, &psi)
}

fn brute_tat(n: usize, chi_t: f64, dense: &Dense) -> CVec {
    let psi = product_state(n, [c(1.0), c(0.0)]);
    let plus = &dense.jx + &dense.jy * I;
    let minus = &dense.jx - &dense.jy * I;
    let h = (&plus * &plus - &minus * &minus) * (-0.5 * I);
    evolve(&h, chi_t, &psi)
}

fn assert_moments_close(ours: &SpinMoments, oracle: &SpinMoments, tol: f64, what: &str) {
    let scale = 1.0 + 0.25 * (ours.n_qubits * ours.n_qubits) as f64;
    for (name, a, b) in [
        ("jz_mean", ours.jz_mean, oracle.jz_mean),
        ("jy2_mean", ours.jy2_mean, oracle.jy2_mean),
        ("jz2_mean", ours.jz2_mean, oracle.jz2_mean),
    ] {
        assert!((a - b).abs() <= tol * scale, "{what} {name}: {a} vs {b}");
    }
}

#[test]
fn psi_kappa_moments_match_full_space_construction() {
    for n in 1..=8 {
        let dense = Dense::new(n);
        for kappa in [0.2, 0.5, 0.7, 1.0] {
            let psi = brute_psi_kappa(n, kappa, &dense);
            let (oracle, jx, jy) = raw_moments(n, &dense, &psi);
            let ours = spin_moments(&make_psi_kappa(n, kappa).unwrap()).unwrap();
            assert_moments_close(&ours, &oracle, 1e-10, &format!("psi N={n} kappa={kappa}"));
            assert!(jx.abs() < 1e-10 && jy.abs() < 1e-10);
            assert!(ours.jx_mean.abs() < 1e-10 && ours.jy_mean.abs() < 1e-10);
        }
    }
}

#[test]
fn one_axis_twisted_moments_match_dense_evolution() {
    for n in 2..=8 {
        let dense = Dense::new(n);
        for chi_t in [0.0, 0.05, 0.2, 0.6] {
            let oracle = aligned_moments(n, &dense, &brute_oat(n, chi_t, &dense));
            let ours = family_moments(n, SqueezingFamily::OneAxisTwisted(chi_t)).unwrap();
            assert_moments_close(&ours, &oracle, 1e-9, &format!("OAT N={n} chi_t={chi_t}"));
            assert!(ours.jx_mean.abs() < 1e-10 && ours.jy_mean.abs() < 1e-10);
        }
    }
}

#[test]
fn two_axis_twisted_moments_match_dense_evolution() {
    for n in 2..=8 {
        let dense = Dense::new(n);
        for chi_t in [0.02, 0.1, 0.25] {
            let oracle = aligned_moments(n, &dense, &brute_tat(n, chi_t, &dense));
            let ours = family_moments(n, SqueezingFamily::TwoAxisTwisted(chi_t)).unwrap();
            assert_moments_close(&ours, &oracle, 1e-9, &format!("TAT N={n} chi_t={chi_t}"));
            assert!(ours.jx_mean.abs() < 1e-10 && ours.jy_mean.abs() < 1e-10);
        }
    }
}

#[test]
fn ghz_and_coherent_match_full_space() {
    for n in 2..=8 {
        let dense = Dense::new(n);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut ghz = CVec::zeros(1 << n);
        ghz[0] = c(s);
        ghz[(1 << n) - 1] = c(s);
        let (oracle, _, _) = raw_moments(n, &dense, &ghz);
        let ours = spin_moments(&ghz_state(n).unwrap()).unwrap();
        assert_moments_close(&ours, &oracle, 1e-12, "ghz");

        let up = product_state(n, [c(1.0), c(0.0)]);
        let (oracle, _, _) = raw_moments(n, &dense, &up);
        let ours = spin_moments(&make_state(n, SqueezingFamily::Coherent).unwrap()).unwrap();
        assert_moments_close(&ours, &oracle, 1e-12, "coherent");
    }
}

#[test]
fn psi_kappa_two_qubits_by_substitution() {
    let s = make_psi_kappa(2, 1.0).unwrap();
    let w = (-0.5f64).exp();
    let norm = (2.0 * w * w + 1.0).sqrt();
    let expected = [w / norm, -1.0 / norm, w / norm];
    for (a, e) in s.amplitudes().iter().zip(expected) {
        assert_relative_eq!(a.re, e, epsilon = 1e-15);
    }
}

#[test]
fn psi_kappa_small_kappa_tends_to_central_level() {
    for n in [4, 10, 30] {
        let s = make_psi_kappa(n, 1e-3).unwrap();
        assert_relative_eq!(s.amplitudes()[n / 2].norm(), 1.0, epsilon = 1e-12);
        let m = spin_moments(&s).unwrap();
        assert!(m.jz_mean.abs() < 1e-9 && m.jy_var < 1e-9);
    }
}

#[test]
fn psi_kappa_moments_grow_with_kappa() {
    for n in [10, 40, 200] {
        let mut previous: Option<SpinMoments> = None;
        for i in 1..=10 {
            let m = family_moments(n, SqueezingFamily::PsiKappa(0.1 * i as f64)).unwrap();
            if let Some(p) = previous {
                assert!(m.jy_var >= p.jy_var && m.jz_mean >= p.jz_mean, "N={n} kappa={}", 0.1 * i as f64);
            }
            previous = Some(m);
        }
    }
}

#[test]
fn squeezing_ratio_respects_heisenberg_floor() {
    for n in [2, 5, 10, 64, 301] {
        let families = [
            SqueezingFamily::PsiKappa(2.0 / n as f64),
            SqueezingFamily::PsiKappa(0.3),
            SqueezingFamily::PsiKappa(1.0),
            SqueezingFamily::OneAxisTwisted(0.05),
            SqueezingFamily::OneAxisTwisted(0.5),
            SqueezingFamily::TwoAxisTwisted(0.01),
            SqueezingFamily::TwoAxisTwisted(0.3),
            SqueezingFamily::Coherent,
        ];
        for f in families {
            let Ok(m) = family_moments(n, f) else { continue };
            if m.jz_mean.abs() < 1e-12 {
                continue;
            }
            assert!(m.squeezing_ratio() >= (1.0 - 1e-6) / n as f64, "{f:?} N={n}");
        }
    }
}

#[test]
fn untwisted_state_is_coherent() {
    for n in [2, 9, 50] {
        for family in [SqueezingFamily::OneAxisTwisted(0.0), SqueezingFamily::TwoAxisTwisted(0.0)] {
            let m = family_moments(n, family).unwrap();
            assert_relative_eq!(m.jz_mean, 0.5 * n as f64, max_relative = 1e-12);
            assert_relative_eq!(m.jy_var, 0.25 * n as f64, max_relative = 1e-10);
        }
    }
}

#[test]
fn one_axis_twisting_squeezes_ten_qubits() {
    let n = 10;
    let best = (1..=100)
        .map(|i| family_moments(n, SqueezingFamily::OneAxisTwisted(0.01 * i as f64)).unwrap().squeezing_ratio())
        .fold(f64::INFINITY, f64::min);
    assert!(best < 1.0 / (n as f64).sqrt());
}

#[test]
fn coherent_state_moments() {
    let m = spin_moments(&make_state(7, SqueezingFamily::Coherent).unwrap()).unwrap();
    assert_eq!(m.jz_mean, 3.5);
    assert_eq!(m.jy2_mean, 1.75);
}

#[test]
fn states_are_normalized() {
    for n in [1, 2, 17, 400] {
        for f in [SqueezingFamily::PsiKappa(0.05), SqueezingFamily::Coherent, SqueezingFamily::Ghz] {
            let s = make_state(n, f).unwrap();
            assert_eq!(s.amplitudes().len(), n + 1);
            let norm: f64 = s.amplitudes().iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn two_axis_twisting_respects_size_cap() {
    let cfg = TwistConfig { tat_max_qubits: 16, ..TwistConfig::default() };
    assert!(matches!(
        make_twisted_state_with(17, SqueezingFamily::TwoAxisTwisted(0.1), cfg),
        Err(Error::SizeLimit { .. })
    ));
    assert!(make_twisted_state_with(16, SqueezingFamily::TwoAxisTwisted(0.1), cfg).is_ok());
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(matches!(make_psi_kappa(4, 0.0), Err(Error::InvalidParameter { name: "kappa", .. })));
    assert!(make_psi_kappa(4, 1.01).is_err());
    assert!(make_psi_kappa(0, 0.5).is_err());
    assert!(make_twisted_state(1, SqueezingFamily::OneAxisTwisted(0.1)).is_err());
    assert!(make_twisted_state(4, SqueezingFamily::OneAxisTwisted(-0.1)).is_err());
    assert!(family_moments(4, SqueezingFamily::Ghz).is_err());
}
