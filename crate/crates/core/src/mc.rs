//! Monte Carlo oracle: shot-by-shot simulation of the Ramsey protocol with
//! persistent Gaussian phase noise.
//!
//! Phases are drawn at shot granularity with covariance
//! `E[φ_{nl} φ_{n'l'}] = Q_τ(l−l') P(n−n')`. The covariance is a Kronecker
//! product, so each factor is diagonalized on its own and a draw is
//! `Φ = F_P Z F_Qᵀ` with `Z` an `N×L` matrix of standard normals.
//!
//! Each trajectory owns a ChaCha stream selected by its index, so results do
//! not depend on scheduling.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dicke::{make_state, spin_moments, CollectiveSpinState, SqueezingFamily};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::uncertainty::{calibrated_slope, ghz_slope, variance_full, variance_ghz, GhzMode, ProtocolParams};

/// Largest `N·L` accepted for phase sampling.
pub const MAX_PHASE_ENTRIES: usize = 4096;
/// Largest `N` for the statevector simulation.
pub const MAX_STATEVECTOR_QUBITS: usize = 12;
/// Relative clip tolerance for negative covariance eigenvalues.
const CLIP_TOLERANCE: f64 = 1e-10;

/// One draw of the shot-integrated phases `φ_{n,l}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatrix {
    pub n_qubits: usize,
    pub shots: usize,
    /// Row-major `values[n * shots + l]`.
    pub values: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
}

impl PhaseMatrix {
    pub fn get(&self, n: usize, l: usize) -> f64 {
        self.values[n * self.shots + l]
    }

    /// Phases of all qubits in shot `l`.
    pub fn column(&self, l: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_qubits).map(move |n| self.get(n, l))
    }

    /// `Σ_n φ_{n,l}`.
    pub fn column_sum(&self, l: usize) -> f64 {
        self.column(l).sum()
    }

    pub fn zeros(n_qubits: usize, shots: usize) -> Self {
        Self {
            n_qubits,
            shots,
            values: vec![0.0; n_qubits * shots],
            seed: 0,
            stream: 0,
        }
    }
}

/// Factorized covariance for repeated draws.
#[derive(Debug, Clone)]
pub struct PhaseSampler {
    n_qubits: usize,
    shots: usize,
    /// `F_P` with `F_P F_Pᵀ = P`.
    spatial_factor: DMatrix<f64>,
    /// `F_Q` with `F_Q F_Qᵀ = Q`.
    temporal_factor: DMatrix<f64>,
    silent: bool,
}

impl PhaseSampler {
    pub fn new(model: &NoiseModel, n_qubits: usize, shots: usize, tau: f64) -> Result<Self> {
        if n_qubits == 0 || shots == 0 {
            return Err(Error::param("shots", "need at least one qubit and one shot"));
        }
        if n_qubits * shots > MAX_PHASE_ENTRIES {
            return Err(Error::SizeLimit {
                what: "phase sampling (N·L)",
                n: n_qubits * shots,
                cap: MAX_PHASE_ENTRIES,
            });
        }
        if !(tau > 0.0) {
            return Err(Error::param("tau", format!("must be > 0, got {tau}")));
        }
        let kernel = model.spatial_kernel(n_qubits)?;
        let p = DMatrix::from_fn(n_qubits, n_qubits, |i, j| kernel.get(i.abs_diff(j)));
        let q = DMatrix::from_fn(shots, shots, |i, j| {
            model.temporal.shot_correlation_fast(tau, i.abs_diff(j) as u64)
        });
        let spatial_factor = symmetric_factor(p, || format!("spatial spectrum {:?}", model.spatial))?;
        let temporal_factor =
            symmetric_factor(q, || format!("temporal spectrum {:?} at tau = {tau}", model.temporal))?;
        Ok(Self {
            n_qubits,
            shots,
            spatial_factor,
            temporal_factor,
            silent: model.temporal.is_silent(),
        })
    }

    /// Draws the phases of trajectory `stream`.
    pub fn sample(&self, seed: u64, stream: u64) -> PhaseMatrix {
        let mut rng = trajectory_rng(seed, stream);
        self.sample_with(&mut rng, seed, stream)
    }

    fn sample_with<R: Rng>(&self, rng: &mut R, seed: u64, stream: u64) -> PhaseMatrix {
        let (n, l) = (self.n_qubits, self.shots);
        if self.silent {
            let mut m = PhaseMatrix::zeros(n, l);
            m.seed = seed;
            m.stream = stream;
            return m;
        }
        let z = DMatrix::from_fn(n, l, |_, _| rng.sample::<f64, _>(StandardNormal));
        let phi = &self.spatial_factor * z * self.temporal_factor.transpose();
        let mut values = Vec::with_capacity(n * l);
        for i in 0..n {
            for j in 0..l {
                values.push(phi[(i, j)]);
            }
        }
        PhaseMatrix {
            n_qubits: n,
            shots: l,
            values,
            seed,
            stream,
        }
    }
}

fn symmetric_factor(m: DMatrix<f64>, context: impl Fn() -> String) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(m);
    let max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -CLIP_TOLERANCE * max {
        return Err(Error::IndefiniteCovariance {
            min_eigenvalue: min,
            max_eigenvalue: max,
            context: context(),
        });
    }
    let mut f = eig.eigenvectors;
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        f.column_mut(j).scale_mut(s);
    }
    Ok(f)
}

/// Samples phases for one trajectory.
pub fn sample_phase_matrix(
    model: &NoiseModel,
    n_qubits: usize,
    shots: usize,
    tau: f64,
    seed: u64,
) -> Result<PhaseMatrix> {
    Ok(PhaseSampler::new(model, n_qubits, shots, tau)?.sample(seed, 0))
}

fn trajectory_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Statevector of the symmetric probe after the first `π/2` pulse, ready for
/// repeated shots.
#[derive(Debug, Clone)]
pub struct RamseySimulator {
    n_qubits: usize,
    /// Amplitudes over `2^N` product states; bit `n` set means qubit `n` is down.
    prepared: Vec<Complex64>,
    /// Number of up spins of each basis state.
    ups: Vec<u32>,
}

impl RamseySimulator {
    pub fn new(state: &CollectiveSpinState) -> Result<Self> {
        let n = state.n_qubits();
        if n > MAX_STATEVECTOR_QUBITS {
            return Err(Error::SizeLimit {
                what: "statevector simulation",
                n,
                cap: MAX_STATEVECTOR_QUBITS,
            });
        }
        let z = state.to_z_basis()?;
        let dim = 1usize << n;
        let ups: Vec<u32> = (0..dim).map(|b| n as u32 - (b as u32).count_ones()).collect();
        let lg_n = libm::lgamma(n as f64 + 1.0);
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|b| {
                let k = ups[b] as usize;
                let ln_binom = lg_n - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0);
                z.amplitudes()[k] * (-0.5 * ln_binom).exp()
            })
            .collect();
        for q in 0..n {
            rotate_y_half_pi(&mut amps, q);
        }
        Ok(Self {
            n_qubits: n,
            prepared: amps,
            ups,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Outcome distribution of `J_z` (index `k = m + N/2`) after phase
    /// rotations `π/2 + θ + φ_n` and the closing `π/2` pulse.
    pub fn outcome_distribution(&self, theta: f64, phases: impl Iterator<Item = f64>) -> Vec<f64> {
        let n = self.n_qubits;
        let betas: Vec<f64> = phases.map(|phi| std::f64::consts::FRAC_PI_2 + theta + phi).collect();
        let dim = self.prepared.len();
        // Phase angle of each basis state: −½ Σ_n s_n β_n with s_n = +1 for up.
        let mut angle = vec![0.0; dim];
        let base: f64 = -0.5 * betas.iter().sum::<f64>();
        angle[0] = base;
        for q in 0..n {
            let bit = 1usize << q;
            for b in bit..(bit << 1) {
                angle[b] = angle[b - bit] + betas[q];
            }
        }
        let mut amps: Vec<Complex64> = self
            .prepared
            .iter()
            .zip(&angle)
            .map(|(a, &t)| a * Complex64::from_polar(1.0, t))
            .collect();
        for q in 0..n {
            rotate_y_half_pi(&mut amps, q);
        }
        let mut probs = vec![0.0; n + 1];
        for (a, &k) in amps.iter().zip(&self.ups) {
            probs[k as usize] += a.norm_sqr();
        }
        probs
    }

    /// `E[J_z]` of the final measurement for given phases.
    pub fn mean_outcome(&self, theta: f64, phases: impl Iterator<Item = f64>) -> f64 {
        let half = 0.5 * self.n_qubits as f64;
        self.outcome_distribution(theta, phases)
            .iter()
            .enumerate()
            .map(|(k, p)| p * (k as f64 - half))
            .sum()
    }
}

/// `exp(−iπσ_y/4)` on qubit `q`, basis order (up, down).
fn rotate_y_half_pi(amps: &mut [Complex64], q: usize) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bit = 1usize << q;
    for b in 0..amps.len() {
        if b & bit == 0 {
            let up = amps[b];
            let down = amps[b | bit];
            amps[b] = (up - down) * s;
            amps[b | bit] = (up + down) * s;
        }
    }
}

fn sample_index<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    probs.len() - 1
}

/// Measurement outcomes `m_l` (eigenvalues of `J_z`) for one trajectory.
pub fn simulate_squeezed_run(
    state: &CollectiveSpinState,
    phases: &PhaseMatrix,
    p: &ProtocolParams,
    seed: u64,
) -> Result<Vec<f64>> {
    let sim = RamseySimulator::new(state)?;
    check_phase_shape(phases, p)?;
    let mut rng = trajectory_rng(seed, OUTCOME_STREAM | phases.stream);
    Ok(squeezed_outcomes(&sim, phases, p.theta, &mut rng))
}

fn squeezed_outcomes<R: Rng>(sim: &RamseySimulator, phases: &PhaseMatrix, theta: f64, rng: &mut R) -> Vec<f64> {
    let half = 0.5 * sim.n_qubits as f64;
    (0..phases.shots)
        .map(|l| {
            let probs = sim.outcome_distribution(theta, phases.column(l));
            sample_index(rng, &probs) as f64 - half
        })
        .collect()
}

/// GHZ outcomes `±1`: `+1` with probability `cos²((θ + Σ_n φ_{n,l})/2)`.
pub fn simulate_ghz_run(phases: &PhaseMatrix, p: &ProtocolParams, seed: u64) -> Result<Vec<f64>> {
    check_phase_shape(phases, p)?;
    let mut rng = trajectory_rng(seed, OUTCOME_STREAM | phases.stream);
    Ok(ghz_outcomes(phases, p.theta, &mut rng))
}

fn ghz_outcomes<R: Rng>(phases: &PhaseMatrix, theta: f64, rng: &mut R) -> Vec<f64> {
    (0..phases.shots)
        .map(|l| {
            let c = (0.5 * (theta + phases.column_sum(l))).cos();
            if rng.random::<f64>() < c * c {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}

fn check_phase_shape(phases: &PhaseMatrix, p: &ProtocolParams) -> Result<()> {
    if phases.n_qubits != p.n_qubits || phases.shots as u64 != p.shots {
        return Err(Error::param(
            "phases",
            format!(
                "phase matrix is {}x{}, protocol needs {}x{}",
                phases.n_qubits, phases.shots, p.n_qubits, p.shots
            ),
        ));
    }
    Ok(())
}

/// How the estimator's slope is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SlopeMode {
    /// Closed-form calibrated slope.
    Analytic,
    /// Slope averaged over a held-out batch of noisy shots, from exact
    /// finite differences of the conditional mean outcome.
    Empirical { batch: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_trajectories: usize,
    pub seed: u64,
    pub slope: SlopeMode,
}

impl McConfig {
    pub fn new(n_trajectories: usize, seed: u64) -> Self {
        Self {
            n_trajectories,
            seed,
            slope: SlopeMode::Analytic,
        }
    }
}

/// Empirical estimator statistics against the closed-form reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub empirical_variance: f64,
    /// Jackknife standard error of `empirical_variance`.
    pub standard_error: f64,
    pub n_trajectories: usize,
    pub analytic_reference: f64,
    /// Mean of `b_est − b_p`; the true offset is `θ/τ`.
    pub mean_estimate: f64,
    pub mean_standard_error: f64,
    pub slope: f64,
}

impl McEstimate {
    /// `(empirical − analytic) / standard_error`.
    pub fn z_score(&self) -> f64 {
        (self.empirical_variance - self.analytic_reference) / self.standard_error
    }
}

/// Sample variance and its jackknife standard error.
pub fn jackknife_variance(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    assert!(n >= 3, "need at least three samples");
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let centered: Vec<f64> = samples.iter().map(|x| x - mean).collect();
    let s1: f64 = centered.iter().sum();
    let s2: f64 = centered.iter().map(|x| x * x).sum();
    let var = (s2 - s1 * s1 / nf) / (nf - 1.0);
    let loo: Vec<f64> = centered
        .iter()
        .map(|x| {
            let a = s1 - x;
            let b = s2 - x * x;
            (b - a * a / (nf - 1.0)) / (nf - 2.0)
        })
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / nf;
    let spread: f64 = loo.iter().map(|v| (v - loo_mean) * (v - loo_mean)).sum();
    (var, ((nf - 1.0) / nf * spread).sqrt())
}

fn map_trajectories<F>(count: usize, f: F) -> Vec<f64>
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count as u64).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count as u64).map(f).collect()
    }
}

/// Stream offset for the held-out calibration batch.
const CALIBRATION_STREAM: u64 = 1 << 62;
/// Stream bit for outcome draws of the standalone run functions, so that
/// reusing the phase seed does not replay the phase randomness.
const OUTCOME_STREAM: u64 = 1 << 63;

/// Runs `n_trajectories` independent experiments and compares the variance of
/// `b_est` with the closed form (the full variance, or the exact GHZ variance).
pub fn empirical_estimator_variance(
    model: &NoiseModel,
    family: SqueezingFamily,
    p: &ProtocolParams,
    cfg: McConfig,
) -> Result<McEstimate> {
    if cfg.n_trajectories < 100 {
        return Err(Error::param("trajectories", "at least 100 trajectories are required"));
    }
    family.validate()?;
    let shots = p.shots as usize;
    let sampler = PhaseSampler::new(model, p.n_qubits, shots, p.tau)?;
    let l = shots as f64;
    let seed = cfg.seed;
    let (estimates, slope, analytic) = if family == SqueezingFamily::Ghz {
        let theta = if p.theta == 0.0 { std::f64::consts::FRAC_PI_2 } else { p.theta };
        let slope = match cfg.slope {
            SlopeMode::Analytic => ghz_slope(model, p, theta)?,
            SlopeMode::Empirical { batch } => {
                let n = p.n_qubits as f64;
                let fd = |phases: &PhaseMatrix, l: usize| {
                    let h = 1e-4;
                    let s = phases.column_sum(l);
                    // The GHZ phase grows N times faster in the signal.
                    n * ((theta + h + s).cos() - (theta - h + s).cos()) / (2.0 * h)
                };
                empirical_slope(&sampler, seed, batch, p, fd)?.abs()
            }
        };
        let analytic = variance_ghz(model, p, GhzMode::Exact)?.total_variance;
        let est = map_trajectories(cfg.n_trajectories, |i| {
            let mut rng = trajectory_rng(seed, i);
            let phases = sampler.sample_with(&mut rng, seed, i);
            // Outcomes at θ = π/2 have mean −sin(Σφ); the sign is irrelevant for the variance.
            let m = ghz_outcomes(&phases, theta, &mut rng);
            -m.iter().sum::<f64>() / (l * slope)
        });
        (est, slope, analytic)
    } else {
        let state = make_state(p.n_qubits, family)?;
        let moments = spin_moments(&state)?;
        let sim = RamseySimulator::new(&state)?;
        let slope = match cfg.slope {
            SlopeMode::Analytic => calibrated_slope(&moments, model, p)?,
            SlopeMode::Empirical { batch } => {
                let fd = |phases: &PhaseMatrix, l: usize| {
                    let h = 1e-4;
                    (sim.mean_outcome(p.theta + h, phases.column(l)) - sim.mean_outcome(p.theta - h, phases.column(l)))
                        / (2.0 * h)
                };
                empirical_slope(&sampler, seed, batch, p, fd)?
            }
        };
        let analytic = variance_full(&moments, model, p)?.total_variance;
        let est = map_trajectories(cfg.n_trajectories, |i| {
            let mut rng = trajectory_rng(seed, i);
            let phases = sampler.sample_with(&mut rng, seed, i);
            let m = squeezed_outcomes(&sim, &phases, p.theta, &mut rng);
            m.iter().sum::<f64>() / (l * slope)
        });
        (est, slope, analytic)
    };
    let (var, se) = jackknife_variance(&estimates);
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    Ok(McEstimate {
        empirical_variance: var,
        standard_error: se,
        n_trajectories: estimates.len(),
        analytic_reference: analytic,
        mean_estimate: mean,
        mean_standard_error: (var / n).sqrt(),
        slope,
    })
}

/// Mean over a held-out batch of `τ · ∂E[m | φ]/∂θ`.
fn empirical_slope<F>(sampler: &PhaseSampler, seed: u64, batch: usize, p: &ProtocolParams, derivative: F) -> Result<f64>
where
    F: Fn(&PhaseMatrix, usize) -> f64 + Sync + Send,
{
    if batch == 0 {
        return Err(Error::param("batch", "calibration batch must be non-empty"));
    }
    let per_trajectory = map_trajectories(batch, |i| {
        let stream = CALIBRATION_STREAM + i;
        let phases = sampler.sample(seed, stream);
        (0..phases.shots).map(|l| derivative(&phases, l)).sum::<f64>() / phases.shots as f64
    });
    Ok(p.tau * per_trajectory.iter().sum::<f64>() / batch as f64)
}
