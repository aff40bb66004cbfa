//! Closed-form variance of the Ramsey frequency estimator.
//!
//! The full expression is evaluated with the four-fold qubit/shot sums reduced
//! by stationarity. Every sum over `sinh(x)` is split into its linear part,
//! which has an exact closed form (`Σ_{l≠l'} Q_τ(l−l') = γ(Lτ) − Lγ(τ)`), and
//! the cubic remainder `sinh(x) − x`, which is summed explicitly until the
//! correlations become negligible.
//!
//! The breakdown regroups the numerator so that each part is computed without
//! cancellation:
//!
//! * `shot_noise_term`: `L⟨J_y²⟩`
//! * `single_shot_dephasing_term`: `(NL/4)(e^γ − 1)`
//! * `cross_shot_term`: `(⟨J_z⟩²/N²) Σ_{n,n'} Σ_{l≠l'} sinh(Q P)`
//! * `cross_qubit_term`: what remains of the same-shot `n ≠ n'` sums
//!
//! each divided by `(T⟨J_z⟩)²`. For `N = 1` the `n ≠ n'` sums are empty and the
//! expression reduces to the single-particle form without `(N − 1)` factors.

use serde::{Deserialize, Serialize};

use crate::dicke::SpinMoments;
use crate::error::{Error, Result};
use crate::noise::{zero_freq_bound, NoiseModel, SpatialKernel, SpectrumKind, TemporalSpectrum};

/// Largest exponent accepted before reporting an overflow.
pub const EXPONENT_LIMIT: f64 = 700.0;

/// Products `Q·P` below this size contribute only through their linear part.
const CUBIC_CUTOFF: f64 = 1e-5;

/// One sensing configuration: `L` shots of length `τ` in a total time `T = Lτ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub n_qubits: usize,
    pub total_time: f64,
    pub tau: f64,
    pub shots: u64,
    /// Operating offset from the point of optimal response; only the Monte
    /// Carlo oracle uses a non-zero value.
    pub theta: f64,
}

impl ProtocolParams {
    /// Fixes `L = round(T/τ)` and snaps `T` to `Lτ`.
    pub fn new(n_qubits: usize, total_time: f64, tau: f64) -> Result<Self> {
        check_basic(n_qubits, total_time, tau)?;
        let shots = (total_time / tau).round();
        if shots < 1.0 {
            return Err(Error::param("tau", format!("τ = {tau} leaves no shot in T = {total_time}")));
        }
        if shots > 9.0e15 {
            return Err(Error::param("tau", format!("T/τ = {shots:e} shots is too many")));
        }
        Ok(Self {
            n_qubits,
            total_time: shots * tau,
            tau,
            shots: shots as u64,
            theta: 0.0,
        })
    }

    /// Keeps `T` and sets `τ = T/L`.
    pub fn with_fixed_total(n_qubits: usize, total_time: f64, shots: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::param("shots", "must be at least 1"));
        }
        let tau = total_time / shots as f64;
        check_basic(n_qubits, total_time, tau)?;
        Ok(Self {
            n_qubits,
            total_time,
            tau,
            shots,
            theta: 0.0,
        })
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    fn l(&self) -> f64 {
        self.shots as f64
    }

    fn n(&self) -> f64 {
        self.n_qubits as f64
    }
}

fn check_basic(n_qubits: usize, total_time: f64, tau: f64) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::param("N", "must be at least 1"));
    }
    if !(total_time > 0.0 && total_time.is_finite()) {
        return Err(Error::param("T", format!("must be finite and > 0, got {total_time}")));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::param("tau", format!("must be finite and > 0, got {tau}")));
    }
    Ok(())
}

/// Which closed form produced a breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaTag {
    /// Exact variance with spatial and temporal correlations.
    Full18,
    /// Spatially uncorrelated noise, exact `sinh` over shot pairs.
    TempUnc22,
    /// Linearized shot correlations.
    Simplified23,
    /// Linearized, long-time form with spatial correlations.
    SpatialApprox26,
    NoNoise,
    /// White temporal noise without spatial correlations.
    Markovian,
    GhzExact,
    GhzSimple,
}

impl FormulaTag {
    pub const ALL: [FormulaTag; 8] = [
        FormulaTag::Full18,
        FormulaTag::TempUnc22,
        FormulaTag::Simplified23,
        FormulaTag::SpatialApprox26,
        FormulaTag::NoNoise,
        FormulaTag::Markovian,
        FormulaTag::GhzExact,
        FormulaTag::GhzSimple,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FormulaTag::Full18 => "full18",
            FormulaTag::TempUnc22 => "tempunc22",
            FormulaTag::Simplified23 => "simplified23",
            FormulaTag::SpatialApprox26 => "spatial26",
            FormulaTag::NoNoise => "nonoise",
            FormulaTag::Markovian => "markovian",
            FormulaTag::GhzExact => "ghz-exact",
            FormulaTag::GhzSimple => "ghz-simple",
        }
    }

    pub fn is_ghz(&self) -> bool {
        matches!(self, FormulaTag::GhzExact | FormulaTag::GhzSimple)
    }
}

impl std::str::FromStr for FormulaTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        FormulaTag::ALL
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| Error::param("formula", format!("unknown formula `{s}`")))
    }
}

impl std::fmt::Display for FormulaTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// GHZ evaluation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GhzMode {
    Exact,
    Simple,
}

/// Per-term decomposition of `Var(b_est)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyBreakdown {
    pub shot_noise_term: f64,
    pub single_shot_dephasing_term: f64,
    pub cross_shot_term: f64,
    pub cross_qubit_term: f64,
    pub total_variance: f64,
    pub total_stddev: f64,
    pub fundamental_bound: f64,
    pub formula_tag: FormulaTag,
}

impl UncertaintyBreakdown {
    fn from_terms(terms: [f64; 4], bound: f64, tag: FormulaTag) -> Result<Self> {
        let total: f64 = terms.iter().sum();
        if !total.is_finite() {
            return Err(Error::DephasingOverflow {
                exponent: f64::INFINITY,
                limit: EXPONENT_LIMIT,
            });
        }
        if total <= 0.0 {
            return Err(Error::Unsupported(format!(
                "{tag} gives a non-positive variance {total:e}; the approximation is outside its validity range"
            )));
        }
        Ok(Self {
            shot_noise_term: terms[0],
            single_shot_dephasing_term: terms[1],
            cross_shot_term: terms[2],
            cross_qubit_term: terms[3],
            total_variance: total,
            total_stddev: total.sqrt(),
            fundamental_bound: bound,
            formula_tag: tag,
        })
    }
}

fn check_exponent(x: f64) -> Result<()> {
    if x.abs() > EXPONENT_LIMIT || !x.is_finite() {
        Err(Error::DephasingOverflow {
            exponent: x,
            limit: EXPONENT_LIMIT,
        })
    } else {
        Ok(())
    }
}

fn check_moments(moments: &SpinMoments, p: &ProtocolParams) -> Result<()> {
    if moments.n_qubits != p.n_qubits {
        return Err(Error::param(
            "N",
            format!("moments are for {} qubits, protocol for {}", moments.n_qubits, p.n_qubits),
        ));
    }
    if moments.jz_mean.abs() <= 1e-300 {
        return Err(Error::ZeroContrast);
    }
    Ok(())
}

/// `sinh(y) − y` without cancellation.
fn sinh_minus_x(y: f64) -> f64 {
    if y.abs() < 0.1 {
        let y2 = y * y;
        // Taylor series through y^11; the next term is below 1e-20 relative.
        y * y2 / 6.0 * (1.0 + y2 / 20.0 * (1.0 + y2 / 42.0 * (1.0 + y2 / 72.0 * (1.0 + y2 / 110.0))))
    } else {
        y.sinh() - y
    }
}

/// `cosh(y) − 1` without cancellation.
fn cosh_minus_one(y: f64) -> f64 {
    let s = (0.5 * y).sinh();
    2.0 * s * s
}

/// `Σ_{l≠l'} Q_τ(l−l')` over `L` shots: `γ(Lτ) − Lγ(τ)`, exactly zero for white noise.
fn shot_pair_sum(temporal: &TemporalSpectrum, tau: f64, shots: u64) -> f64 {
    if temporal.kind == SpectrumKind::White || shots < 2 || temporal.is_silent() {
        return 0.0;
    }
    temporal.gamma_unchecked(shots as f64 * tau) - shots as f64 * temporal.gamma_unchecked(tau)
}

/// `Σ_{l≠l'} [f(Q_τ(l−l')·c) − Q_τ(l−l')·c]` summed over the given scale factors `c`
/// with weights, for `f = sinh`. Pairs whose argument stays below [`CUBIC_CUTOFF`]
/// are skipped. For `Δl ≥ 1`, `|Q_τ(Δl)| ≤ τ² sup_{t ≥ (Δl−1)τ} |R(t)|`, so the
/// scan stops once the autocorrelation envelope puts all later shots below the cutoff.
fn shot_cubic_sum(temporal: &TemporalSpectrum, tau: f64, shots: u64, scales: &[(f64, f64)]) -> f64 {
    if temporal.kind == SpectrumKind::White || shots < 2 || scales.is_empty() {
        return 0.0;
    }
    let q0 = temporal.gamma_unchecked(tau);
    // Suffix maxima of |c| let the inner loop stop early.
    let mut suffix = vec![0.0f64; scales.len() + 1];
    for i in (0..scales.len()).rev() {
        suffix[i] = suffix[i + 1].max(scales[i].0.abs());
    }
    let c_max = suffix[0];
    if q0 * c_max < CUBIC_CUTOFF {
        return 0.0;
    }
    let l = shots as f64;
    let tau2 = tau * tau;
    let mut total = 0.0;
    for dl in 1..shots {
        if tau2 * temporal.autocorrelation_envelope((dl - 1) as f64 * tau) * c_max < CUBIC_CUTOFF {
            break;
        }
        let q = temporal.shot_correlation_fast(tau, dl);
        if q.abs() * c_max < CUBIC_CUTOFF {
            continue;
        }
        let weight = 2.0 * (l - dl as f64);
        let mut inner = 0.0;
        for (i, &(c, w)) in scales.iter().enumerate() {
            if q.abs() * suffix[i] < CUBIC_CUTOFF {
                break;
            }
            inner += w * sinh_minus_x(q * c);
        }
        total += weight * inner;
    }
    total
}

/// Moment-independent sums for one `(N, τ, L)` under a noise model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSums {
    /// Temporal `Q_τ(0)`.
    pub gamma_temporal: f64,
    /// `γ(τ) = Q_τ(0) P(0)`.
    pub gamma: f64,
    /// Temporal `γ(Lτ)`.
    pub gamma_total: f64,
    /// `Σ_{n≠n'} (e^x − 1)`, `x = Q_τ(0) P(n−n')`.
    pub pair_expm1: f64,
    /// `Σ_{n≠n'} sinh x`.
    pub pair_sinh: f64,
    /// `Σ_{n≠n'} (cosh x − 1)`.
    pub pair_coshm1: f64,
    /// `Σ_{n,n'} Σ_{l≠l'} sinh(Q_τ(l−l') P(n−n'))`.
    pub cross_shot: f64,
}

/// A noise model prepared for a fixed number of qubits: the spatial kernel is
/// tabulated once and shared by all evaluations.
#[derive(Debug, Clone)]
pub struct Evaluator {
    model: NoiseModel,
    kernel: SpatialKernel,
    /// `(P(Δn), multiplicity)` for all `Δn` including zero, sorted by decreasing `|P|`.
    weighted_p: Vec<(f64, f64)>,
    bound_power: f64,
}

impl Evaluator {
    pub fn new(model: NoiseModel, n_qubits: usize) -> Result<Self> {
        let kernel = model.spatial_kernel(n_qubits)?;
        let mut weighted_p: Vec<(f64, f64)> = std::iter::once((kernel.p0(), n_qubits as f64))
            .chain(kernel.off_diagonal())
            .collect();
        weighted_p.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
        Ok(Self {
            model,
            kernel,
            weighted_p,
            bound_power: model.zero_frequency_power(),
        })
    }

    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    pub fn kernel(&self) -> &SpatialKernel {
        &self.kernel
    }

    pub fn n_qubits(&self) -> usize {
        self.kernel.n_qubits()
    }

    fn check_protocol(&self, p: &ProtocolParams) -> Result<()> {
        if p.n_qubits != self.n_qubits() {
            return Err(Error::param(
                "N",
                format!("evaluator prepared for {} qubits, protocol has {}", self.n_qubits(), p.n_qubits),
            ));
        }
        Ok(())
    }

    /// `√(S(0)G(0)/(NT))`.
    pub fn bound(&self, p: &ProtocolParams) -> f64 {
        (self.bound_power / (p.n() * p.total_time)).sqrt()
    }

    /// Sums entering the full variance.
    pub fn kernel_sums(&self, p: &ProtocolParams) -> Result<KernelSums> {
        self.check_protocol(p)?;
        let temporal = &self.model.temporal;
        let q0 = temporal.gamma_unchecked(p.tau);
        let gamma = q0 * self.kernel.p0();
        check_exponent(gamma)?;
        let (mut pair_expm1, mut pair_sinh, mut pair_coshm1) = (0.0, 0.0, 0.0);
        for (pn, w) in self.kernel.off_diagonal() {
            let x = q0 * pn;
            check_exponent(x)?;
            pair_expm1 += w * x.exp_m1();
            pair_sinh += w * x.sinh();
            pair_coshm1 += w * cosh_minus_one(x);
        }
        let linear = self.kernel.total_sum() * shot_pair_sum(temporal, p.tau, p.shots);
        let cubic = shot_cubic_sum(temporal, p.tau, p.shots, &self.weighted_p);
        Ok(KernelSums {
            gamma_temporal: q0,
            gamma,
            gamma_total: temporal.gamma_unchecked(p.total_time),
            pair_expm1,
            pair_sinh,
            pair_coshm1,
            cross_shot: linear + cubic,
        })
    }

    /// Full variance from precomputed sums.
    pub fn combine_full(&self, moments: &SpinMoments, p: &ProtocolParams, sums: &KernelSums) -> Result<UncertaintyBreakdown> {
        check_moments(moments, p)?;
        let n = p.n();
        let l = p.l();
        let denom = (p.total_time * moments.jz_mean).powi(2);
        let shot = l * moments.jy2_mean / denom;
        let dephasing = 0.25 * n * l * sums.gamma.exp_m1() / denom;
        let cross_shot = moments.jz_mean * moments.jz_mean / (n * n) * sums.cross_shot / denom;
        let cross_qubit = if p.n_qubits > 1 {
            (-0.25 * l / (n - 1.0) * sums.pair_expm1
                + l / (n * (n - 1.0)) * (moments.jz2_mean * sums.pair_sinh + moments.jy2_mean * sums.pair_coshm1))
                / denom
        } else {
            0.0
        };
        UncertaintyBreakdown::from_terms([shot, dephasing, cross_shot, cross_qubit], self.bound(p), FormulaTag::Full18)
    }

    pub fn full(&self, moments: &SpinMoments, p: &ProtocolParams) -> Result<UncertaintyBreakdown> {
        let sums = self.kernel_sums(p)?;
        self.combine_full(moments, p, &sums)
    }

    /// Linearized long-time form with spatial correlations. The last term is
    /// kept at finite `T` as `γ(T)G(0)/(NT²)`, which tends to `S(0)G(0)/(NT)`.
    pub fn spatial_approx(&self, moments: &SpinMoments, p: &ProtocolParams) -> Result<UncertaintyBreakdown> {
        self.check_protocol(p)?;
        check_moments(moments, p)?;
        let temporal = &self.model.temporal;
        let p0 = self.kernel.p0();
        let g0 = self.model.spatial.value(0.0);
        let gamma = temporal.gamma_unchecked(p.tau) * p0;
        check_exponent(gamma)?;
        let [shot, dephasing] = leading_terms(moments, p, gamma);
        let cross_shot = linear_shot_term(temporal, p, p0, g0);
        let ratio = moments.jz_var / (moments.jz_mean * moments.jz_mean);
        let cross_qubit = gamma / (p.n() * p.tau * p.total_time) * ratio * (g0 / p0 - 1.0);
        UncertaintyBreakdown::from_terms(
            [shot, dephasing, cross_shot, cross_qubit],
            self.bound(p),
            FormulaTag::SpatialApprox26,
        )
    }

    /// GHZ probe. The total phase `Σ_n φ_n` of a shot has variance
    /// `Q_τ(0) Σ_{n,n'} P(n−n')`, which is `Nγ(τ)` without spatial correlations.
    pub fn ghz(&self, p: &ProtocolParams, mode: GhzMode) -> Result<UncertaintyBreakdown> {
        self.check_protocol(p)?;
        let temporal = &self.model.temporal;
        let sp = self.kernel.total_sum();
        let v = temporal.gamma_unchecked(p.tau) * sp;
        check_exponent(v)?;
        let n = p.n();
        let l = p.l();
        let denom = (n * p.total_time).powi(2);
        let linear = sp * shot_pair_sum(temporal, p.tau, p.shots);
        let cross = match mode {
            GhzMode::Exact => linear + shot_cubic_sum(temporal, p.tau, p.shots, &[(sp, 1.0)]),
            GhzMode::Simple => linear,
        };
        let tag = match mode {
            GhzMode::Exact => FormulaTag::GhzExact,
            GhzMode::Simple => FormulaTag::GhzSimple,
        };
        UncertaintyBreakdown::from_terms(
            [l / denom, l * v.exp_m1() / denom, cross / denom, 0.0],
            self.bound(p),
            tag,
        )
    }

    /// Dispatches on the formula tag. GHZ tags ignore `moments`.
    pub fn evaluate(&self, tag: FormulaTag, moments: &SpinMoments, p: &ProtocolParams) -> Result<UncertaintyBreakdown> {
        let temporal = &self.model.temporal;
        let bound = self.bound(p);
        let with_bound = |mut b: UncertaintyBreakdown| {
            b.fundamental_bound = bound;
            b
        };
        match tag {
            FormulaTag::Full18 => self.full(moments, p),
            FormulaTag::SpatialApprox26 => self.spatial_approx(moments, p),
            FormulaTag::GhzExact => self.ghz(p, GhzMode::Exact),
            FormulaTag::GhzSimple => self.ghz(p, GhzMode::Simple),
            FormulaTag::TempUnc22 => variance_temp_unc(moments, temporal, p).map(with_bound),
            FormulaTag::Simplified23 => variance_simplified(moments, temporal, p).map(with_bound),
            FormulaTag::NoNoise => variance_no_noise(moments, p).map(with_bound),
            FormulaTag::Markovian => {
                if !self.model.spatial.is_uncorrelated() || self.kernel.p0() != 1.0 {
                    return Err(Error::param(
                        "formula",
                        "markovian requires spatially uncorrelated noise with P(0) = 1",
                    ));
                }
                variance_markovian(moments, temporal, p).map(with_bound)
            }
        }
    }
}

/// `[⟨J_y²⟩/(τT⟨J_z⟩²), N(e^γ − 1)/(4τT⟨J_z⟩²)]`.
fn leading_terms(moments: &SpinMoments, p: &ProtocolParams, gamma: f64) -> [f64; 2] {
    let denom = p.tau * p.total_time * moments.jz_mean * moments.jz_mean;
    [moments.jy2_mean / denom, 0.25 * p.n() * gamma.exp_m1() / denom]
}

/// `−γ(τ)P(0)/(NτT) + γ(T)G(0)/(NT²)`; white noise reduces to `A(G(0) − P(0))/(NT)`.
fn linear_shot_term(temporal: &TemporalSpectrum, p: &ProtocolParams, p0: f64, g0: f64) -> f64 {
    let nt = p.n() * p.total_time;
    if temporal.kind == SpectrumKind::White {
        return temporal.strength * (g0 - p0) / nt;
    }
    (temporal.gamma_unchecked(p.total_time) * g0 / p.total_time - temporal.gamma_unchecked(p.tau) * p0 / p.tau) / nt
}

/// Full variance with spatial and temporal correlations.
pub fn variance_full(moments: &SpinMoments, model: &NoiseModel, p: &ProtocolParams) -> Result<UncertaintyBreakdown> {
    Evaluator::new(*model, p.n_qubits)?.full(moments, p)
}

/// Spatially uncorrelated noise with the exact `sinh` over shot pairs.
pub fn variance_temp_unc(
    moments: &SpinMoments,
    temporal: &TemporalSpectrum,
    p: &ProtocolParams,
) -> Result<UncertaintyBreakdown> {
    check_moments(moments, p)?;
    let gamma = temporal.gamma_unchecked(p.tau);
    check_exponent(gamma)?;
    let [shot, dephasing] = leading_terms(moments, p, gamma);
    let pairs = shot_pair_sum(temporal, p.tau, p.shots) + shot_cubic_sum(temporal, p.tau, p.shots, &[(1.0, 1.0)]);
    let cross_shot = pairs / (p.n() * p.total_time * p.total_time);
    let bound = (temporal.value(0.0) / (p.n() * p.total_time)).sqrt();
    UncertaintyBreakdown::from_terms([shot, dephasing, cross_shot, 0.0], bound, FormulaTag::TempUnc22)
}

/// Linearized shot correlations: `⟨J_y²⟩/(τT⟨J_z⟩²) + N(e^γ−1)/(4τT⟨J_z⟩²) − γ(τ)/(NτT) + γ(T)/(NT²)`.
pub fn variance_simplified(
    moments: &SpinMoments,
    temporal: &TemporalSpectrum,
    p: &ProtocolParams,
) -> Result<UncertaintyBreakdown> {
    check_moments(moments, p)?;
    let gamma = temporal.gamma_unchecked(p.tau);
    check_exponent(gamma)?;
    let [shot, dephasing] = leading_terms(moments, p, gamma);
    let cross_shot = linear_shot_term(temporal, p, 1.0, 1.0);
    let bound = (temporal.value(0.0) / (p.n() * p.total_time)).sqrt();
    UncertaintyBreakdown::from_terms([shot, dephasing, cross_shot, 0.0], bound, FormulaTag::Simplified23)
}

/// Linearized long-time form with spatial correlations.
pub fn variance_spatial_approx(
    moments: &SpinMoments,
    model: &NoiseModel,
    p: &ProtocolParams,
) -> Result<UncertaintyBreakdown> {
    Evaluator::new(*model, p.n_qubits)?.spatial_approx(moments, p)
}

/// Noise-free variance `⟨J_y²⟩/(τT⟨J_z⟩²)`.
pub fn variance_no_noise(moments: &SpinMoments, p: &ProtocolParams) -> Result<UncertaintyBreakdown> {
    check_moments(moments, p)?;
    let [shot, _] = leading_terms(moments, p, 0.0);
    UncertaintyBreakdown::from_terms([shot, 0.0, 0.0, 0.0], 0.0, FormulaTag::NoNoise)
}

/// White temporal noise without spatial correlations: `[N(e^{Aτ} − 1)/4 + ⟨J_y²⟩]/(Tτ⟨J_z⟩²)`.
pub fn variance_markovian(
    moments: &SpinMoments,
    temporal: &TemporalSpectrum,
    p: &ProtocolParams,
) -> Result<UncertaintyBreakdown> {
    if temporal.kind != SpectrumKind::White {
        return Err(Error::param("formula", "markovian requires white temporal noise"));
    }
    check_moments(moments, p)?;
    let gamma = temporal.strength * p.tau;
    check_exponent(gamma)?;
    let [shot, dephasing] = leading_terms(moments, p, gamma);
    let bound = (temporal.strength / (p.n() * p.total_time)).sqrt();
    UncertaintyBreakdown::from_terms([shot, dephasing, 0.0, 0.0], bound, FormulaTag::Markovian)
}

/// GHZ probe: `[L e^{Nγ} + Σ_{l≠l'} sinh(N Q_τ)]/(N²T²)` (exact) or its linearization.
pub fn variance_ghz(model: &NoiseModel, p: &ProtocolParams, mode: GhzMode) -> Result<UncertaintyBreakdown> {
    Evaluator::new(*model, p.n_qubits)?.ghz(p, mode)
}

/// Any formula by tag; GHZ tags ignore `moments`.
pub fn evaluate(
    tag: FormulaTag,
    moments: &SpinMoments,
    model: &NoiseModel,
    p: &ProtocolParams,
) -> Result<UncertaintyBreakdown> {
    Evaluator::new(*model, p.n_qubits)?.evaluate(tag, moments, p)
}

/// Per-shot slope `∂⟨M⟩/∂b = τ e^{−γ(τ)/2} ⟨J_z⟩` at the optimal operating point.
pub fn calibrated_slope(moments: &SpinMoments, model: &NoiseModel, p: &ProtocolParams) -> Result<f64> {
    let gamma = model.temporal.gamma_unchecked(p.tau) * model.spatial.correlation(0)?;
    check_exponent(gamma)?;
    Ok(p.tau * (-0.5 * gamma).exp() * moments.jz_mean)
}

/// GHZ per-shot slope `Nτ e^{−V/2} |sin θ|`, with `V` the variance of the total shot phase.
pub fn ghz_slope(model: &NoiseModel, p: &ProtocolParams, theta: f64) -> Result<f64> {
    let kernel = model.spatial_kernel(p.n_qubits)?;
    let v = model.temporal.gamma_unchecked(p.tau) * kernel.total_sum();
    check_exponent(v)?;
    Ok(p.n() * p.tau * (-0.5 * v).exp() * theta.sin().abs())
}

/// `Δb_est` bound of the model for this protocol.
pub fn fundamental_bound(model: &NoiseModel, p: &ProtocolParams) -> Result<f64> {
    zero_freq_bound(model, p.n_qubits, p.total_time)
}
