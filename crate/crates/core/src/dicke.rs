//! Probe states in the symmetric (N+1)-dimensional Dicke subspace and their
//! collective-spin moments.
//!
//! Amplitudes are indexed by `k = m + N/2 ∈ {0..=N}`, where `m` is the
//! eigenvalue of the spin component along the state's quantization axis.
//!
//! Phase conventions:
//!
//! * [`Basis::Z`]: standard Condon–Shortley phases, `J_+ = J_x + iJ_y` has
//!   non-negative matrix elements `√((j−m)(j+m+1))`.
//! * [`Basis::Y`]: the raising operator for `J_y` is taken as
//!   `R = −(J_z + iJ_x)`, again with non-negative matrix elements. With this
//!   choice the alternating-sign Gaussian family has `⟨J_z⟩ > 0`.
//!
//! Twisted states are rotated after evolution so that the mean spin points
//! along `+z` and the squeezed quadrature is `J_y`, which is the orientation
//! the Ramsey protocol expects.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-12;

/// Quantization axis of the Dicke basis an amplitude vector is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Y,
    Z,
}

/// A pure state of `n_qubits` spins in the symmetric subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveSpinState {
    n_qubits: usize,
    basis: Basis,
    amplitudes: Vec<Complex64>,
}

impl CollectiveSpinState {
    /// Wraps an amplitude vector, checking length and normalization.
    pub fn new(n_qubits: usize, basis: Basis, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::param("n_qubits", "must be at least 1"));
        }
        if amplitudes.len() != n_qubits + 1 {
            return Err(Error::param(
                "amplitudes",
                format!("expected {} entries, got {}", n_qubits + 1, amplitudes.len()),
            ));
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self {
            n_qubits,
            basis,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Spin projection `m` for amplitude index `k`.
    pub fn m_of(&self, k: usize) -> f64 {
        k as f64 - 0.5 * self.n_qubits as f64
    }

    /// The same state expressed in the `J_z` Dicke basis.
    ///
    /// For a Y-basis state the `J_y` eigenvectors are generated in the Z basis
    /// from the lowest-weight state with the raising operator `R`, so the
    /// result honours the Y-basis phase convention exactly. Intended for the
    /// small systems that are embedded into the full Hilbert space.
    pub fn to_z_basis(&self) -> Result<CollectiveSpinState> {
        match self.basis {
            Basis::Z => Ok(self.clone()),
            Basis::Y => {
                const CAP: usize = 64;
                if self.n_qubits > CAP {
                    return Err(Error::SizeLimit {
                        what: "Y to Z basis conversion",
                        n: self.n_qubits,
                        cap: CAP,
                    });
                }
                let vectors = y_eigenvectors_in_z(self.n_qubits);
                let dim = self.n_qubits + 1;
                let mut out = vec![Complex64::new(0.0, 0.0); dim];
                for (amp, vec) in self.amplitudes.iter().zip(&vectors) {
                    for (o, v) in out.iter_mut().zip(vec) {
                        *o += amp * v;
                    }
                }
                renormalize(&mut out);
                CollectiveSpinState::new(self.n_qubits, Basis::Z, out)
            }
        }
    }
}

/// Collective-spin expectation values entering the variance formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinMoments {
    pub n_qubits: usize,
    pub jz_mean: f64,
    pub jy2_mean: f64,
    pub jz2_mean: f64,
    pub jy_var: f64,
    pub jz_var: f64,
    /// Transverse means; both vanish for every state built in this module.
    pub jx_mean: f64,
    pub jy_mean: f64,
}

impl SpinMoments {
    /// Builds moments from the three quantities the protocol depends on,
    /// assuming `⟨J_x⟩ = ⟨J_y⟩ = 0`.
    pub fn from_parts(n_qubits: usize, jz_mean: f64, jy2_mean: f64, jz2_mean: f64) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::param("n_qubits", "must be at least 1"));
        }
        let j = 0.5 * n_qubits as f64;
        let slack = 1e-9 * (1.0 + j * j);
        if jy2_mean < -slack || jz2_mean < -slack {
            return Err(Error::param("moments", "second moments must be non-negative"));
        }
        if jz_mean.abs() > j + slack || jz2_mean > j * j + slack {
            return Err(Error::param("moments", "moments exceed the spin length"));
        }
        let jz_var = jz2_mean - jz_mean * jz_mean;
        if jz_var < -1e-9 * (1.0 + jz2_mean) {
            return Err(Error::param("moments", "negative J_z variance"));
        }
        Ok(Self {
            n_qubits,
            jz_mean,
            jy2_mean: jy2_mean.max(0.0),
            jz2_mean: jz2_mean.max(0.0),
            jy_var: jy2_mean.max(0.0),
            jz_var: jz_var.max(0.0),
            jx_mean: 0.0,
            jy_mean: 0.0,
        })
    }

    /// Product state with every spin along `+z`: `⟨J_z⟩ = N/2`, `⟨J_y²⟩ = N/4`, `⟨J_z²⟩ = N²/4`.
    pub fn separable(n_qubits: usize) -> Self {
        let n = n_qubits as f64;
        Self {
            n_qubits,
            jz_mean: 0.5 * n,
            jy2_mean: 0.25 * n,
            jz2_mean: 0.25 * n * n,
            jy_var: 0.25 * n,
            jz_var: 0.0,
            jx_mean: 0.0,
            jy_mean: 0.0,
        }
    }

    /// Ramsey figure of merit `ΔJ_y / ⟨J_z⟩`.
    pub fn squeezing_ratio(&self) -> f64 {
        self.jy_var.sqrt() / self.jz_mean.abs()
    }
}

/// Probe-state families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SqueezingFamily {
    /// Gaussian-weighted superposition of `J_y` Dicke states, `κ ∈ (0, 1]`.
    PsiKappa(f64),
    /// One-axis twisting for a dimensionless time `χt ≥ 0`.
    OneAxisTwisted(f64),
    /// Two-axis twisting for a dimensionless time `χt ≥ 0`.
    TwoAxisTwisted(f64),
    /// Coherent spin state along `+z` (the separable protocol).
    Coherent,
    Ghz,
}

impl SqueezingFamily {
    /// The family parameter, if the family has one.
    pub fn parameter(&self) -> Option<f64> {
        match *self {
            SqueezingFamily::PsiKappa(k) => Some(k),
            SqueezingFamily::OneAxisTwisted(t) | SqueezingFamily::TwoAxisTwisted(t) => Some(t),
            SqueezingFamily::Coherent | SqueezingFamily::Ghz => None,
        }
    }

    /// Same family with a different parameter value.
    pub fn with_parameter(&self, value: f64) -> Self {
        match self {
            SqueezingFamily::PsiKappa(_) => SqueezingFamily::PsiKappa(value),
            SqueezingFamily::OneAxisTwisted(_) => SqueezingFamily::OneAxisTwisted(value),
            SqueezingFamily::TwoAxisTwisted(_) => SqueezingFamily::TwoAxisTwisted(value),
            other => *other,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SqueezingFamily::PsiKappa(k) => {
                if !(k > 0.0 && k <= 1.0) {
                    return Err(Error::param("kappa", format!("must lie in (0, 1], got {k}")));
                }
            }
            SqueezingFamily::OneAxisTwisted(t) | SqueezingFamily::TwoAxisTwisted(t) => {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(Error::param("chi_t", format!("must be finite and >= 0, got {t}")));
                }
            }
            SqueezingFamily::Coherent | SqueezingFamily::Ghz => {}
        }
        Ok(())
    }
}

/// Limits for the twisting integrators.
#[derive(Debug, Clone, Copy)]
pub struct TwistConfig {
    /// Largest N accepted for two-axis twisting.
    pub tat_max_qubits: usize,
    /// Allowed drift of the squared norm during RK4 integration.
    pub norm_drift_tol: f64,
}

impl Default for TwistConfig {
    fn default() -> Self {
        Self {
            tat_max_qubits: 2000,
            norm_drift_tol: 1e-10,
        }
    }
}

fn check_n(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::param("n_qubits", "must be at least 1"));
    }
    Ok(())
}

#[inline]
fn ladder(n: usize, k: usize) -> f64 {
    // <k+1| raising |k> = sqrt((j - m)(j + m + 1)) with j - m = n - k, j + m + 1 = k + 1.
    (((n - k) * (k + 1)) as f64).sqrt()
}

fn renormalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in v.iter_mut() {
        *a /= norm;
    }
}

/// `|ψ_κ⟩ ∝ Σ_m (−1)^m exp(−m²/(Nκ²)) |m⟩_y`.
pub fn make_psi_kappa(n_qubits: usize, kappa: f64) -> Result<CollectiveSpinState> {
    check_n(n_qubits)?;
    SqueezingFamily::PsiKappa(kappa).validate()?;
    let n = n_qubits as f64;
    let width = n * kappa * kappa;
    let half = 0.5 * n;
    // Smallest |m| gives the largest weight; subtract it in the exponent.
    let m_min2 = if n_qubits.is_multiple_of(2) { 0.0 } else { 0.25 };
    let mut amps: Vec<Complex64> = (0..=n_qubits)
        .map(|k| {
            let m = k as f64 - half;
            let w = (-(m * m - m_min2) / width).exp();
            // (−1)^m = e^{iπm}; the constant e^{−iπN/2} is dropped.
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * w, 0.0)
        })
        .collect();
    renormalize(&mut amps);
    CollectiveSpinState::new(n_qubits, Basis::Y, amps)
}

/// Coherent spin state along `+z`.
pub fn coherent_state(n_qubits: usize) -> Result<CollectiveSpinState> {
    check_n(n_qubits)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); n_qubits + 1];
    amps[n_qubits] = Complex64::new(1.0, 0.0);
    CollectiveSpinState::new(n_qubits, Basis::Z, amps)
}

/// `(|0…0⟩ + |1…1⟩)/√2`, with `|0⟩` the `σ_z = +1` level.
pub fn ghz_state(n_qubits: usize) -> Result<CollectiveSpinState> {
    check_n(n_qubits)?;
    if n_qubits == 1 {
        // |0> + |1> is the coherent state along +x.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        return CollectiveSpinState::new(1, Basis::Z, vec![Complex64::new(s, 0.0); 2]);
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); n_qubits + 1];
    amps[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[n_qubits] = amps[0];
    CollectiveSpinState::new(n_qubits, Basis::Z, amps)
}

/// Coherent state along `+x`, in the Z basis: binomial amplitudes.
fn coherent_x(n_qubits: usize) -> Vec<Complex64> {
    let n = n_qubits as f64;
    let ln_norm = -0.5 * n * std::f64::consts::LN_2;
    let lg_n = libm::lgamma(n + 1.0);
    (0..=n_qubits)
        .map(|k| {
            let kf = k as f64;
            let ln_binom = lg_n - libm::lgamma(kf + 1.0) - libm::lgamma(n - kf + 1.0);
            Complex64::new((0.5 * ln_binom + ln_norm).exp(), 0.0)
        })
        .collect()
}

/// Builds a state of the requested family.
pub fn make_state(n_qubits: usize, family: SqueezingFamily) -> Result<CollectiveSpinState> {
    match family {
        SqueezingFamily::PsiKappa(k) => make_psi_kappa(n_qubits, k),
        SqueezingFamily::OneAxisTwisted(_) | SqueezingFamily::TwoAxisTwisted(_) => {
            make_twisted_state(n_qubits, family)
        }
        SqueezingFamily::Coherent => coherent_state(n_qubits),
        SqueezingFamily::Ghz => ghz_state(n_qubits),
    }
}

/// Moments of the family member, without keeping the state around.
pub fn family_moments(n_qubits: usize, family: SqueezingFamily) -> Result<SpinMoments> {
    match family {
        SqueezingFamily::Coherent => {
            check_n(n_qubits)?;
            Ok(SpinMoments::separable(n_qubits))
        }
        SqueezingFamily::Ghz => Err(Error::Unsupported(
            "GHZ probes are evaluated with the GHZ variance, not collective-spin moments".into(),
        )),
        other => spin_moments(&make_state(n_qubits, other)?),
    }
}

/// One- or two-axis twisted state with the default [`TwistConfig`].
pub fn make_twisted_state(n_qubits: usize, family: SqueezingFamily) -> Result<CollectiveSpinState> {
    make_twisted_state_with(n_qubits, family, TwistConfig::default())
}

/// One- or two-axis twisted state.
///
/// * OAT: the coherent state along `+x` evolves under `χJ_z²` (exact diagonal
///   phases `e^{−iχt m²}`), is rotated about `x` to bring the minimum-variance
///   direction of the `y–z` plane onto `y`, then rotated by `−π/2` about `y` so
///   the mean spin points along `+z`.
/// * TAT: the coherent state along `+z` evolves under
///   `(χ/2i)(J_+² − J_−²)` with RK4, then is rotated about `z` to bring the
///   minimum-variance direction onto `y`.
pub fn make_twisted_state_with(
    n_qubits: usize,
    family: SqueezingFamily,
    cfg: TwistConfig,
) -> Result<CollectiveSpinState> {
    family.validate()?;
    match family {
        SqueezingFamily::OneAxisTwisted(chi_t) => {
            if n_qubits < 2 {
                return Err(Error::param("n_qubits", "twisting needs at least 2 qubits"));
            }
            Ok(CollectiveSpinState {
                n_qubits,
                basis: Basis::Z,
                amplitudes: one_axis_twist(n_qubits, chi_t),
            })
        }
        SqueezingFamily::TwoAxisTwisted(chi_t) => {
            if n_qubits < 2 {
                return Err(Error::param("n_qubits", "twisting needs at least 2 qubits"));
            }
            if n_qubits > cfg.tat_max_qubits {
                return Err(Error::SizeLimit {
                    what: "two-axis twisting",
                    n: n_qubits,
                    cap: cfg.tat_max_qubits,
                });
            }
            Ok(CollectiveSpinState {
                n_qubits,
                basis: Basis::Z,
                amplitudes: two_axis_twist(n_qubits, chi_t, cfg.norm_drift_tol)?,
            })
        }
        _ => Err(Error::param("family", "expected a twisted family")),
    }
}

fn one_axis_twist(n: usize, chi_t: f64) -> Vec<Complex64> {
    let half = 0.5 * n as f64;
    let mut amps = coherent_x(n);
    for (k, a) in amps.iter_mut().enumerate() {
        let m = k as f64 - half;
        *a *= Complex64::from_polar(1.0, -chi_t * m * m);
    }
    // Covariance in the y–z plane (both means vanish by symmetry).
    let raw = z_basis_raw(&amps);
    let j = half;
    let casimir = j * (j + 1.0);
    let vyy = -0.5 * raw.p2.re + 0.5 * (casimir - raw.jz2);
    let vzz = raw.jz2;
    let vyz = 0.5 * raw.x.im;
    let phi = 0.5 * (2.0 * vyz).atan2(vyy - vzz);
    // Major axis at phi; the minimum lies a quarter turn away.
    let phi_min = phi + 0.5 * std::f64::consts::PI;
    // After a rotation by α about x, J_y becomes J_y cos α − J_z sin α.
    let jy2_after = |alpha: f64| {
        let (s, c) = alpha.sin_cos();
        vyy * c * c + vzz * s * s - 2.0 * vyz * s * c
    };
    let alpha = [-phi_min, phi_min]
        .into_iter()
        .fold(None::<(f64, f64)>, |best, a| {
            let v = jy2_after(a);
            match best {
                Some((_, bv)) if v >= bv - 1e-12 * (1.0 + bv.abs()) => best,
                _ => Some((a, v)),
            }
        })
        .expect("two candidates")
        .0;
    let aligned = rotate(&amps, Axis::X, alpha);
    rotate(&aligned, Axis::Y, -0.5 * std::f64::consts::PI)
}

fn two_axis_twist(n: usize, chi_t: f64, drift_tol: f64) -> Result<Vec<Complex64>> {
    let mut init = vec![Complex64::new(0.0, 0.0); n + 1];
    init[n] = Complex64::new(1.0, 0.0);
    let mut amps = init.clone();
    if chi_t > 0.0 {
        let nf = n as f64;
        let mut h = (1e-3 / nf).min(chi_t / 100.0);
        let mut stepper = TatStepper::new(n);
        let mut attempts = 0;
        loop {
            let steps = (chi_t / h).ceil() as usize;
            let dt = chi_t / steps as f64;
            let psi = stepper.integrate(steps, dt);
            let norm2: f64 = psi.iter().map(|a| a * a).sum();
            if (norm2 - 1.0).abs() <= drift_tol {
                for (i, a) in psi.iter().enumerate() {
                    amps[stepper.parity + 2 * i] = Complex64::new(*a, 0.0);
                }
                break;
            }
            attempts += 1;
            if attempts > 8 {
                return Err(Error::Unsupported(format!(
                    "two-axis twisting RK4 norm drift {:e} above tolerance",
                    (norm2 - 1.0).abs()
                )));
            }
            h *= 0.5;
        }
        renormalize(&mut amps);
    }
    let j = 0.5 * n as f64;
    let casimir = j * (j + 1.0);
    let raw = z_basis_raw(&amps);
    // Covariance in the x–y plane.
    let vxx = 0.5 * raw.p2.re + 0.5 * (casimir - raw.jz2);
    let vyy = -0.5 * raw.p2.re + 0.5 * (casimir - raw.jz2);
    let vxy = 0.5 * raw.p2.im;
    let phi = 0.5 * (2.0 * vxy).atan2(vxx - vyy);
    let phi_min = phi + 0.5 * std::f64::consts::PI;
    let candidates = [0.5 * std::f64::consts::PI - phi_min, phi_min - 0.5 * std::f64::consts::PI];
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for beta in candidates {
        let rotated = rotate_z(&amps, beta);
        let r = z_basis_raw(&rotated);
        let jy2 = -0.5 * r.p2.re + 0.5 * (casimir - r.jz2);
        if best.as_ref().is_none_or(|(v, _)| jy2 < *v - 1e-12 * (1.0 + v.abs())) {
            best = Some((jy2, rotated));
        }
    }
    Ok(best.expect("at least one candidate").1)
}

/// RK4 for `dψ/dt = −i H ψ` with `H = (J_+² − J_−²)/(2i)`, i.e. `dψ/dt = −(J_+² − J_−²)ψ/2`.
///
/// The generator is real and only couples `k` to `k ± 2`, so starting from `|n⟩`
/// the amplitudes stay real and on the sites `k ≡ n (mod 2)`.
struct TatStepper {
    parity: usize,
    /// `<k+2| J_+² |k>` for consecutive sites of the sector.
    coupling: Vec<f64>,
    bufs: [Vec<f64>; 5],
}

impl TatStepper {
    fn new(n: usize) -> Self {
        let parity = n % 2;
        let len = (n - parity) / 2 + 1;
        let coupling = (0..len - 1)
            .map(|i| {
                let k = parity + 2 * i;
                ladder(n, k) * ladder(n, k + 1)
            })
            .collect();
        Self {
            parity,
            coupling,
            bufs: std::array::from_fn(|_| vec![0.0; len]),
        }
    }

    fn derivative(coupling: &[f64], psi: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (i, c) in coupling.iter().enumerate() {
            out[i + 1] -= 0.5 * c * psi[i];
            out[i] += 0.5 * c * psi[i + 1];
        }
    }

    fn integrate(&mut self, steps: usize, dt: f64) -> Vec<f64> {
        let [psi, k1, k2, k3, tmp] = &mut self.bufs;
        psi.fill(0.0);
        *psi.last_mut().expect("non-empty sector") = 1.0;
        let c = &self.coupling;
        for _ in 0..steps {
            Self::derivative(c, psi, k1);
            for i in 0..psi.len() {
                tmp[i] = psi[i] + 0.5 * dt * k1[i];
            }
            Self::derivative(c, tmp, k2);
            for i in 0..psi.len() {
                tmp[i] = psi[i] + 0.5 * dt * k2[i];
                k1[i] += 2.0 * k2[i];
            }
            Self::derivative(c, tmp, k3);
            for i in 0..psi.len() {
                tmp[i] = psi[i] + dt * k3[i];
                k1[i] += 2.0 * k3[i];
            }
            Self::derivative(c, tmp, k2);
            for i in 0..psi.len() {
                psi[i] += dt / 6.0 * (k1[i] + k2[i]);
            }
        }
        psi.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    X,
    Y,
}

/// `e^{−iβJ_z}` in the Z basis.
fn rotate_z(amps: &[Complex64], beta: f64) -> Vec<Complex64> {
    let half = 0.5 * (amps.len() - 1) as f64;
    amps.iter()
        .enumerate()
        .map(|(k, a)| a * Complex64::from_polar(1.0, -beta * (k as f64 - half)))
        .collect()
}

/// `J_x` or `J_y` applied to a Z-basis vector.
fn apply_transverse(axis: Axis, v: &[Complex64], out: &mut [Complex64]) {
    let n = v.len() - 1;
    for o in out.iter_mut() {
        *o = Complex64::new(0.0, 0.0);
    }
    for k in 0..n {
        let c = 0.5 * ladder(n, k);
        match axis {
            // J_x = (J_+ + J_-)/2
            Axis::X => {
                out[k + 1] += c * v[k];
                out[k] += c * v[k + 1];
            }
            // J_y = (J_+ - J_-)/(2i) = -i/2 J_+ + i/2 J_-
            Axis::Y => {
                out[k + 1] += Complex64::new(0.0, -c) * v[k];
                out[k] += Complex64::new(0.0, c) * v[k + 1];
            }
        }
    }
}

/// Bessel functions `J_0..=J_kmax` of real argument by Miller's backward recurrence.
fn bessel_j_sequence(z: f64, kmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = kmax.max(z.abs() as usize) + 40 + (z.abs().cbrt() as usize) * 10;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = (2.0 * k as f64 / z) * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        let idx = k - 1;
        if idx <= kmax {
            out[idx] = cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            for o in out.iter_mut() {
                *o *= 1e-250;
            }
        }
    }
    norm += cur; // J_0
    for o in out.iter_mut() {
        *o /= norm;
    }
    out
}

/// `e^{−iβJ_axis}` applied with a Chebyshev expansion of the propagator.
///
/// The spectrum of `J_axis` is `[−j, j]`; the Chebyshev coefficients of
/// `e^{−i z x}` on `[−1, 1]` are `(2 − δ_{k0}) (−i)^k J_k(z)` with `z = βj`.
fn rotate(amps: &[Complex64], axis: Axis, beta: f64) -> Vec<Complex64> {
    let len = amps.len();
    let j = 0.5 * (len - 1) as f64;
    if j == 0.0 || beta == 0.0 {
        return amps.to_vec();
    }
    let z = beta * j;
    let kmax = (z.abs() + 12.0 * z.abs().cbrt() + 30.0).ceil() as usize;
    let bessel = bessel_j_sequence(z, kmax);
    // J_axis / j as a tridiagonal operator with precomputed couplings.
    let n = len - 1;
    let coupling: Vec<f64> = (0..n).map(|k| 0.5 * ladder(n, k) / j).collect();
    let (up, down) = match axis {
        Axis::X => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        Axis::Y => (Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)),
    };
    let apply = |v: &[Complex64], out: &mut [Complex64]| {
        out[n] = Complex64::new(0.0, 0.0);
        for k in 0..n {
            out[k] = coupling[k] * down * v[k + 1];
        }
        for k in 0..n {
            out[k + 1] += coupling[k] * up * v[k];
        }
    };
    let mut t_prev = amps.to_vec();
    let mut t_cur = vec![Complex64::new(0.0, 0.0); len];
    apply(&t_prev, &mut t_cur);
    let mut out: Vec<Complex64> = t_prev.iter().map(|v| v * bessel[0]).collect();
    let mut phase = Complex64::new(0.0, -1.0);
    for (o, v) in out.iter_mut().zip(&t_cur) {
        *o += 2.0 * bessel[1] * phase * v;
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for bk in bessel.iter().skip(2) {
        apply(&t_cur, &mut buf);
        for i in 0..len {
            buf[i] = 2.0 * buf[i] - t_prev[i];
        }
        std::mem::swap(&mut t_prev, &mut t_cur);
        std::mem::swap(&mut t_cur, &mut buf);
        phase *= Complex64::new(0.0, -1.0);
        let c = 2.0 * bk * phase;
        for (o, v) in out.iter_mut().zip(&t_cur) {
            *o += c * v;
        }
    }
    out
}

/// `J_y` eigenvectors (ordered `m = −j..=j`) expressed in the Z basis.
fn y_eigenvectors_in_z(n: usize) -> Vec<Vec<Complex64>> {
    let half = 0.5 * n as f64;
    // |−j>_y is the product of (|0> − i|1>)/√2, with |1> the spin-down level.
    // Dicke index k has n − k spins down.
    let lg_n = libm::lgamma(n as f64 + 1.0);
    let lowest: Vec<Complex64> = (0..=n)
        .map(|k| {
            let down = n - k;
            let ln_binom = lg_n - libm::lgamma(k as f64 + 1.0) - libm::lgamma(down as f64 + 1.0);
            let mag = (0.5 * ln_binom - 0.5 * n as f64 * std::f64::consts::LN_2).exp();
            let phase = match down % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, -1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, 1.0),
            };
            mag * phase
        })
        .collect();
    let mut out = Vec::with_capacity(n + 1);
    out.push(lowest);
    let mut jx = vec![Complex64::new(0.0, 0.0); n + 1];
    for _ in 0..n {
        let prev = out.last().expect("non-empty");
        apply_transverse(Axis::X, prev, &mut jx);
        // R = −(J_z + i J_x)
        let mut next: Vec<Complex64> = prev
            .iter()
            .enumerate()
            .map(|(k, v)| -(k as f64 - half) * v - Complex64::new(0.0, 1.0) * jx[k])
            .collect();
        renormalize(&mut next);
        out.push(next);
    }
    out
}

/// Ladder sums of a Z-basis vector.
struct RawZ {
    jz: f64,
    jz2: f64,
    /// `⟨J_+⟩`
    p1: Complex64,
    /// `⟨J_+²⟩`
    p2: Complex64,
    /// `⟨{J_+, J_z}⟩`
    x: Complex64,
}

fn z_basis_raw(a: &[Complex64]) -> RawZ {
    let n = a.len() - 1;
    let half = 0.5 * n as f64;
    let mut jz = 0.0;
    let mut jz2 = 0.0;
    let mut p1 = Complex64::new(0.0, 0.0);
    let mut p2 = Complex64::new(0.0, 0.0);
    let mut x = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        let m = k as f64 - half;
        let w = a[k].norm_sqr();
        jz += w * m;
        jz2 += w * m * m;
        if k < n {
            let c = ladder(n, k);
            let t = a[k + 1].conj() * a[k] * c;
            p1 += t;
            x += t * (2.0 * m + 1.0);
            if k + 1 < n {
                p2 += a[k + 2].conj() * a[k] * c * ladder(n, k + 1);
            }
        }
    }
    RawZ { jz, jz2, p1, p2, x }
}

/// `⟨J_z⟩`, `⟨J_y²⟩`, `⟨J_z²⟩` (and transverse means) in `O(N)`.
pub fn spin_moments(state: &CollectiveSpinState) -> Result<SpinMoments> {
    let a = &state.amplitudes;
    let norm2: f64 = a.iter().map(|v| v.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm2));
    }
    let n = state.n_qubits;
    let j = 0.5 * n as f64;
    let casimir = j * (j + 1.0);
    let (jz_mean, jy2_mean, jz2_mean, jx_mean, jy_mean) = match state.basis {
        Basis::Z => {
            let r = z_basis_raw(a);
            let jy2 = -0.5 * r.p2.re + 0.5 * (casimir - r.jz2);
            (r.jz, jy2, r.jz2, r.p1.re, r.p1.im)
        }
        Basis::Y => {
            // Same ladder sums with J_y as the quantization axis and R = −(J_z + iJ_x).
            let r = z_basis_raw(a);
            let jz = -r.p1.re;
            let jx = -r.p1.im;
            let jz2 = 0.5 * r.p2.re + 0.5 * (casimir - r.jz2);
            (jz, r.jz2, jz2, jx, r.jz)
        }
    };
    let jy_var = (jy2_mean - jy_mean * jy_mean).max(0.0);
    let jz_var_raw = jz2_mean - jz_mean * jz_mean;
    if jz_var_raw < -1e-12 * (1.0 + jz2_mean) {
        return Err(Error::param("state", format!("negative J_z variance {jz_var_raw:e}")));
    }
    Ok(SpinMoments {
        n_qubits: n,
        jz_mean,
        jy2_mean: jy2_mean.max(0.0),
        jz2_mean: jz2_mean.max(0.0),
        jy_var,
        jz_var: jz_var_raw.max(0.0),
        jx_mean,
        jy_mean,
    })
}
