//! Classical dephasing noise: temporal spectra `S(ω)`, spatial spectra `G(k)`,
//! the per-shot dephasing `γ(τ)`, the shot-to-shot phase covariance `Q_τ(Δl)`,
//! the qubit-to-qubit correlation `P(Δn)` and the zero-frequency bound.
//!
//! All four spectral shapes share one parametrisation, `strength · f(x/width)`:
//!
//! | kind     | `f(x)`            |
//! |----------|-------------------|
//! | White    | `1`               |
//! | Gaussian | `exp(−x²/2)`      |
//! | Linear   | `1 − exp(−|x|)`   |
//! | Ohmic    | `|x| exp(−|x|)`   |
//!
//! Lattice spacing is fixed to one, so spatial spectra live on `k ∈ [−π, π]`.

use std::f64::consts::{FRAC_2_PI, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate_panels, QuadConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    White,
    Gaussian,
    Linear,
    Ohmic,
}

impl SpectrumKind {
    pub const ALL: [SpectrumKind; 4] = [
        SpectrumKind::White,
        SpectrumKind::Gaussian,
        SpectrumKind::Linear,
        SpectrumKind::Ohmic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SpectrumKind::White => "white",
            SpectrumKind::Gaussian => "gaussian",
            SpectrumKind::Linear => "linear",
            SpectrumKind::Ohmic => "ohmic",
        }
    }

    /// Dimensionless shape `f(x)`.
    fn shape(&self, x: f64) -> f64 {
        let ax = x.abs();
        match self {
            SpectrumKind::White => 1.0,
            SpectrumKind::Gaussian => (-0.5 * x * x).exp(),
            SpectrumKind::Linear => -(-ax).exp_m1(),
            SpectrumKind::Ohmic => ax * (-ax).exp(),
        }
    }

    /// `f(∞)`: the flat high-frequency plateau handled analytically.
    fn plateau(&self) -> f64 {
        match self {
            SpectrumKind::White | SpectrumKind::Linear => 1.0,
            SpectrumKind::Gaussian | SpectrumKind::Ohmic => 0.0,
        }
    }

    /// `f(x) − f(∞)`, decaying at least exponentially.
    fn remainder(&self, x: f64) -> f64 {
        let ax = x.abs();
        match self {
            SpectrumKind::White => 0.0,
            SpectrumKind::Gaussian => (-0.5 * x * x).exp(),
            SpectrumKind::Linear => -(-ax).exp(),
            SpectrumKind::Ohmic => ax * (-ax).exp(),
        }
    }

    /// `∫_u^∞ |f(x) − f(∞)| dx`.
    fn remainder_tail(&self, u: f64) -> f64 {
        match self {
            SpectrumKind::White => 0.0,
            SpectrumKind::Gaussian => (PI / 2.0).sqrt() * libm::erfc(u / SQRT_2),
            SpectrumKind::Linear => (-u).exp(),
            SpectrumKind::Ohmic => (u + 1.0) * (-u).exp(),
        }
    }
}

impl std::str::FromStr for SpectrumKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "white" | "w" => Ok(SpectrumKind::White),
            "gaussian" | "g" => Ok(SpectrumKind::Gaussian),
            "linear" | "l" => Ok(SpectrumKind::Linear),
            "ohmic" | "o" => Ok(SpectrumKind::Ohmic),
            other => Err(Error::param("kind", format!("unknown spectrum kind `{other}`"))),
        }
    }
}

/// `S(ω)` with strength `A` and characteristic frequency `σ` (both angular frequencies).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalSpectrum {
    pub kind: SpectrumKind,
    pub strength: f64,
    pub sigma: f64,
}

impl TemporalSpectrum {
    /// A zero strength is accepted and describes a noiseless environment.
    pub fn new(kind: SpectrumKind, strength: f64, sigma: f64) -> Result<Self> {
        if !(strength >= 0.0 && strength.is_finite()) {
            return Err(Error::param("A", format!("must be finite and >= 0, got {strength}")));
        }
        if kind != SpectrumKind::White && !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma", format!("must be finite and > 0, got {sigma}")));
        }
        Ok(Self {
            kind,
            strength,
            sigma: if kind == SpectrumKind::White { sigma.max(0.0) } else { sigma },
        })
    }

    pub fn white(strength: f64) -> Result<Self> {
        Self::new(SpectrumKind::White, strength, 1.0)
    }

    /// Noise-free environment.
    pub fn silent() -> Self {
        Self {
            kind: SpectrumKind::White,
            strength: 0.0,
            sigma: 1.0,
        }
    }

    pub fn is_silent(&self) -> bool {
        self.strength == 0.0
    }

    fn scale(&self) -> f64 {
        if self.kind == SpectrumKind::White {
            1.0
        } else {
            self.sigma
        }
    }

    /// `S(ω)`.
    pub fn value(&self, omega: f64) -> f64 {
        self.strength * self.kind.shape(omega / self.scale())
    }

    /// `γ(τ) = E[φ²]` of the phase integrated over one shot of length `τ`.
    pub fn gamma(&self, tau: f64) -> Result<f64> {
        if !(tau > 0.0) {
            return Err(Error::param("tau", format!("must be > 0, got {tau}")));
        }
        Ok(self.gamma_unchecked(tau))
    }

    /// Closed-form `γ(τ)`; `γ(0) = 0`.
    pub(crate) fn gamma_unchecked(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        let a = self.strength;
        let s = self.sigma;
        let u = s * tau;
        match self.kind {
            SpectrumKind::White => a * tau,
            SpectrumKind::Gaussian => {
                let bracket = (2.0 / PI).sqrt() * (-0.5 * u * u).exp_m1() / u + libm::erf(u / SQRT_2);
                a * tau * bracket
            }
            SpectrumKind::Linear => {
                // 1 − (2/π) arctan(u) = (2/π) arctan(1/u)
                let bracket = FRAC_2_PI * (1.0 / u).atan() + log1p_sq(u) / (PI * u);
                a * tau * bracket
            }
            SpectrumKind::Ohmic => a / (PI * s) * log1p_sq(u),
        }
    }

    /// Autocorrelation `R(t) = (1/2π)∫S(ω)e^{iωt}dω`, split into its smooth part
    /// and the weight of `δ(t)`. The Gaussian prefactor is `Aσ/√(2π)`, the value
    /// consistent with this transform and with `γ_G`.
    pub fn autocorrelation(&self, t: f64) -> Autocorrelation {
        let a = self.strength;
        let s = self.sigma;
        let st2 = (s * t) * (s * t);
        match self.kind {
            SpectrumKind::White => Autocorrelation { smooth: 0.0, delta_weight: a },
            SpectrumKind::Gaussian => Autocorrelation {
                smooth: a * s / (2.0 * PI).sqrt() * (-0.5 * st2).exp(),
                delta_weight: 0.0,
            },
            SpectrumKind::Linear => Autocorrelation {
                smooth: -a * s / PI / (1.0 + st2),
                delta_weight: a,
            },
            SpectrumKind::Ohmic => Autocorrelation {
                smooth: a * s / PI * (1.0 - st2) / ((1.0 + st2) * (1.0 + st2)),
                delta_weight: 0.0,
            },
        }
    }

    /// Upper bound on `|R(t)|` (smooth part) over all `t ≥ t0 ≥ 0`. Every kind
    /// has a decreasing envelope: `e^{−x²/2}` for Gaussian, `1/(1+x²)` for Linear
    /// and Ohmic (`|1−x²| ≤ 1+x²`), with `x = σt`.
    pub fn autocorrelation_envelope(&self, t0: f64) -> f64 {
        let a = self.strength;
        let s = self.sigma;
        let x2 = (s * t0) * (s * t0);
        match self.kind {
            SpectrumKind::White => 0.0,
            SpectrumKind::Gaussian => a * s / (2.0 * PI).sqrt() * (-0.5 * x2).exp(),
            SpectrumKind::Linear | SpectrumKind::Ohmic => a * s / PI / (1.0 + x2),
        }
    }

    /// `Q_τ(Δl)` from the closed-form `γ` via the stationary-increment identity
    /// `Q_τ(Δl) = ½[γ((Δl+1)τ) − 2γ(Δlτ) + γ(|Δl−1|τ)]`.
    pub fn shot_correlation_fast(&self, tau: f64, delta_l: u64) -> f64 {
        if delta_l == 0 {
            return self.gamma_unchecked(tau);
        }
        if self.kind == SpectrumKind::White {
            return 0.0;
        }
        let d = delta_l as f64;
        0.5 * (self.gamma_unchecked((d + 1.0) * tau) - 2.0 * self.gamma_unchecked(d * tau)
            + self.gamma_unchecked((d - 1.0) * tau))
    }

    /// `Q_τ(Δl) = (τ²/π) ∫₀^∞ S(ω) sinc²(τω/2) cos(τωΔl) dω` by adaptive quadrature.
    ///
    /// The flat plateau of White/Linear spectra is integrated analytically
    /// (it contributes `S(∞) τ max(0, 1 − Δl)`); the exponentially decaying
    /// remainder is integrated in `x = τω` on panels aligned with the
    /// oscillation period, up to a cutoff whose analytic tail bound is
    /// negligible.
    pub fn shot_correlation(&self, tau: f64, delta_l: u64) -> Result<f64> {
        if !(tau > 0.0) {
            return Err(Error::param("tau", format!("must be > 0, got {tau}")));
        }
        let a = self.strength;
        let plateau = a * self.kind.plateau() * tau * if delta_l == 0 { 1.0 } else { 0.0 };
        if self.kind == SpectrumKind::White || a == 0.0 {
            return Ok(plateau);
        }
        let s = self.sigma * tau;
        let dl = delta_l as f64;
        let kind = self.kind;
        let prefactor = tau * a / PI;
        let integrand = move |x: f64| {
            let half = 0.5 * x;
            let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { half.sin() / half };
            kind.remainder(x / s) * sinc * sinc * (x * dl).cos()
        };
        // Magnitude of the remainder contribution, used for absolute tolerances.
        let scale = s.min(1.0);
        let tail_target = 1e-15 * scale;
        let mut cutoff = (8.0 * s).max(4.0 * PI);
        while (4.0 / (cutoff * cutoff)).min(1.0 / cutoff) * s * kind.remainder_tail(cutoff / s) > tail_target {
            cutoff *= 1.5;
        }
        let period = 2.0 * PI / dl.max(1.0);
        let width = period.min(s.max(1e-300) * 2.0).max(cutoff / 4.0e6);
        let count = (cutoff / width).ceil() as usize;
        if count > 4_000_000 {
            return Err(Error::Unsupported(format!(
                "shot correlation quadrature needs {count} panels (sigma*tau = {s:e})"
            )));
        }
        // Finer panels near the origin where the spectral remainder varies fastest.
        let mut edges = Vec::with_capacity(count + 32);
        edges.push(0.0);
        let mut x = (s * 1e-3).min(width);
        while x < width {
            edges.push(x);
            x *= 2.0;
        }
        for i in 1..=count {
            edges.push(i as f64 * cutoff / count as f64);
        }
        edges.sort_by(|p, q| p.total_cmp(q));
        edges.dedup();
        let cfg = QuadConfig {
            abs_tol: 1e-15 * scale,
            rel_tol: 1e-12,
            max_panels: 8_000_000,
        };
        let est = integrate_panels(integrand, &edges, cfg)?;
        // Strongly cancelling integrals are only accurate relative to ∫|f|.
        let floor = (1e-14 * scale).max(200.0 * f64::EPSILON * est.magnitude);
        if est.error > 1e-8 * est.value.abs() && est.error > floor {
            return Err(Error::Quadrature {
                value: est.value,
                error: est.error,
            });
        }
        Ok(plateau + prefactor * est.value)
    }
}

/// `ln(1 + u²)` without overflow for large `u`.
fn log1p_sq(u: f64) -> f64 {
    if u.abs() > 1e8 {
        2.0 * u.abs().ln() + (1.0 / (u * u)).ln_1p()
    } else {
        (u * u).ln_1p()
    }
}

/// Autocorrelation split into a smooth function and an explicit `δ(t)` weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Autocorrelation {
    pub smooth: f64,
    pub delta_weight: f64,
}

/// `G(k)` on the Brillouin zone `[−π, π]` with strength `B` and width `k0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialSpectrum {
    pub kind: SpectrumKind,
    pub strength: f64,
    pub k0: f64,
}

impl SpatialSpectrum {
    pub fn new(kind: SpectrumKind, strength: f64, k0: f64) -> Result<Self> {
        if !(strength > 0.0 && strength.is_finite()) {
            return Err(Error::param("B", format!("must be finite and > 0, got {strength}")));
        }
        if kind != SpectrumKind::White && !(k0 > 0.0 && k0.is_finite()) {
            return Err(Error::param("k0", format!("must be finite and > 0, got {k0}")));
        }
        Ok(Self { kind, strength, k0 })
    }

    /// `G ≡ 1`: spatially uncorrelated noise, `P(Δn) = δ_{Δn,0}`.
    pub fn trivial() -> Self {
        Self {
            kind: SpectrumKind::White,
            strength: 1.0,
            k0: 1.0,
        }
    }

    pub fn is_uncorrelated(&self) -> bool {
        self.kind == SpectrumKind::White
    }

    fn scale(&self) -> f64 {
        if self.kind == SpectrumKind::White {
            1.0
        } else {
            self.k0
        }
    }

    /// `G(k)`; arguments are not folded into `[−π, π]`.
    pub fn value(&self, k: f64) -> f64 {
        self.strength * self.kind.shape(k / self.scale())
    }

    /// `P(Δn) = (1/2π) ∫_{−π}^{π} G(k) e^{ikΔn} dk`.
    pub fn correlation(&self, delta_n: i64) -> Result<f64> {
        let n = delta_n.unsigned_abs();
        let b = self.strength;
        let plateau = if n == 0 { b * self.kind.plateau() } else { 0.0 };
        if self.kind == SpectrumKind::White {
            return Ok(plateau);
        }
        let kind = self.kind;
        let k0 = self.k0;
        let nf = n as f64;
        let integrand = move |k: f64| kind.remainder(k / k0) * (k * nf).cos();
        let width = (PI / nf.max(1.0)).min(k0.max(1e-3));
        let count = (PI / width).ceil().max(1.0) as usize;
        let edges: Vec<f64> = (0..=count).map(|i| PI * i as f64 / count as f64).collect();
        let cfg = QuadConfig {
            abs_tol: 1e-15 * b,
            rel_tol: 1e-13,
            max_panels: 1_000_000,
        };
        let est = integrate_panels(integrand, &edges, cfg)?;
        Ok(plateau + b / PI * est.value)
    }
}

/// Separable space–time noise: `E[φ_{nl} φ_{n'l'}] = Q_τ(l−l') P(n−n')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub temporal: TemporalSpectrum,
    pub spatial: SpatialSpectrum,
}

impl NoiseModel {
    pub fn new(temporal: TemporalSpectrum, spatial: SpatialSpectrum) -> Self {
        Self { temporal, spatial }
    }

    /// Temporal noise only; qubits see independent realizations.
    pub fn temporal_only(temporal: TemporalSpectrum) -> Self {
        Self {
            temporal,
            spatial: SpatialSpectrum::trivial(),
        }
    }

    pub fn silent() -> Self {
        Self::temporal_only(TemporalSpectrum::silent())
    }

    /// `S(0) · G(0)`.
    pub fn zero_frequency_power(&self) -> f64 {
        self.temporal.value(0.0) * self.spatial.value(0.0)
    }

    /// Spatial kernel for `n_qubits` qubits.
    pub fn spatial_kernel(&self, n_qubits: usize) -> Result<SpatialKernel> {
        SpatialKernel::new(self.spatial, n_qubits)
    }
}

/// `P(Δn)` tabulated for `0 ≤ Δn < N`, with negligible tail entries zeroed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialKernel {
    values: Vec<f64>,
    n_qubits: usize,
}

impl SpatialKernel {
    /// Relative threshold below which `P(Δn)` is treated as zero.
    pub const TRUNCATION: f64 = 1e-12;

    pub fn new(spec: SpatialSpectrum, n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::param("n_qubits", "must be at least 1"));
        }
        let mut values = vec![0.0; n_qubits];
        values[0] = spec.correlation(0)?;
        let p0 = values[0];
        if !spec.is_uncorrelated() {
            for (dn, v) in values.iter_mut().enumerate().skip(1) {
                let p = spec.correlation(dn as i64)?;
                *v = if p.abs() < Self::TRUNCATION * p0 { 0.0 } else { p };
            }
        }
        Ok(Self { values, n_qubits })
    }

    /// `P(Δn)`; zero beyond the table.
    pub fn get(&self, delta_n: usize) -> f64 {
        self.values.get(delta_n).copied().unwrap_or(0.0)
    }

    pub fn p0(&self) -> f64 {
        self.values[0]
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `(Δn, 2(N − Δn))` pairs with non-zero `P(Δn)`, for sums over `n ≠ n'`.
    pub fn off_diagonal(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.n_qubits;
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, p)| **p != 0.0)
            .map(move |(dn, p)| (*p, 2.0 * (n - dn) as f64))
    }

    /// `Σ_{n,n'} P(n − n')`.
    pub fn total_sum(&self) -> f64 {
        self.n_qubits as f64 * self.p0() + self.off_diagonal().map(|(p, w)| p * w).sum::<f64>()
    }
}

/// Lower bound `Δb ≥ √(S(0) G(0) / (N T))`.
pub fn zero_freq_bound(model: &NoiseModel, n_qubits: usize, total_time: f64) -> Result<f64> {
    if n_qubits == 0 {
        return Err(Error::param("n_qubits", "must be at least 1"));
    }
    if !(total_time > 0.0) {
        return Err(Error::param("T", format!("must be > 0, got {total_time}")));
    }
    Ok((model.zero_frequency_power() / (n_qubits as f64 * total_time)).sqrt())
}
