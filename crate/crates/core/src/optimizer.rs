//! Minimization of `Δb_est` over the interrogation time and the squeezing
//! parameter, the metrological gain against the separable protocol, and
//! log–log scaling fits.
//!
//! The search runs a log-spaced grid followed by coordinate-wise golden-section
//! refinement in log space from the best few grid points. `τ` is always snapped
//! to `T/L` with integer `L`, so the total time stays fixed while the objective
//! is explored.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::dicke::{family_moments, SpinMoments, SqueezingFamily};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::uncertainty::{Evaluator, FormulaTag, KernelSums, ProtocolParams, UncertaintyBreakdown};

/// Search settings. Bounds default to the values described on each field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub grid_tau: usize,
    pub grid_squeeze: usize,
    /// Defaults to `[1e-4, 1e2] / A`.
    pub tau_bounds: Option<(f64, f64)>,
    /// Defaults to `[max(2/N, 1e-3), 1]` for κ; twisting times default to a
    /// window around the known optimal scaling.
    pub squeeze_bounds: Option<(f64, f64)>,
    /// Stop the coordinate cycles when a cycle improves the objective by less
    /// than this fraction.
    pub rel_tol: f64,
    /// Width (in natural-log units) at which a golden-section bracket is considered closed.
    pub log_width_tol: f64,
    pub max_cycles: usize,
    /// Number of distinct grid minima refined.
    pub starts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_tau: 24,
            grid_squeeze: 24,
            tau_bounds: None,
            squeeze_bounds: None,
            rel_tol: 1e-10,
            log_width_tol: 1e-7,
            max_cycles: 200,
            starts: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub tau_opt: f64,
    /// κ or χt; `None` for separable and GHZ probes.
    pub squeeze_opt: Option<f64>,
    pub min_stddev: f64,
    /// `Δb_sep / Δb`, both optimized under the same noise.
    pub gain_r: f64,
    pub separable_stddev: f64,
    pub separable_tau: f64,
    pub breakdown: UncertaintyBreakdown,
    pub evaluations: usize,
    /// Points where the objective failed (overflow, zero contrast) and was skipped.
    pub skipped: usize,
    pub converged: bool,
}

/// Best point found by the grid-plus-refinement search.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Optimum {
    tau: f64,
    squeeze: Option<f64>,
    value: f64,
    grid_min: f64,
    evaluations: usize,
    skipped: usize,
    converged: bool,
}

/// Objective `Δb(τ, s)` with caches for moments (per `s`) and kernel sums (per `L`).
struct Objective<'a> {
    evaluator: &'a Evaluator,
    family: SqueezingFamily,
    tag: FormulaTag,
    n_qubits: usize,
    total_time: f64,
    moments: Mutex<HashMap<u64, Option<SpinMoments>>>,
    sums: Mutex<HashMap<u64, Option<KernelSums>>>,
}

impl<'a> Objective<'a> {
    fn new(evaluator: &'a Evaluator, family: SqueezingFamily, tag: FormulaTag, total_time: f64) -> Self {
        Self {
            evaluator,
            family,
            tag,
            n_qubits: evaluator.n_qubits(),
            total_time,
            moments: Mutex::new(HashMap::new()),
            sums: Mutex::new(HashMap::new()),
        }
    }

    fn shots(&self, tau: f64) -> u64 {
        (self.total_time / tau).round().max(1.0) as u64
    }

    fn protocol(&self, shots: u64) -> Result<ProtocolParams> {
        ProtocolParams::with_fixed_total(self.n_qubits, self.total_time, shots)
    }

    fn moments(&self, squeeze: Option<f64>) -> Option<SpinMoments> {
        let family = match squeeze {
            Some(s) => self.family.with_parameter(s),
            None => self.family,
        };
        if self.tag.is_ghz() {
            return Some(SpinMoments::separable(self.n_qubits));
        }
        let key = squeeze.map_or(u64::MAX, f64::to_bits);
        if let Some(m) = self.moments.lock().expect("moment cache").get(&key) {
            return *m;
        }
        let m = family_moments(self.n_qubits, family).ok();
        self.moments.lock().expect("moment cache").insert(key, m);
        m
    }

    fn kernel_sums(&self, p: &ProtocolParams) -> Option<KernelSums> {
        if let Some(s) = self.sums.lock().expect("sum cache").get(&p.shots) {
            return *s;
        }
        let s = self.evaluator.kernel_sums(p).ok();
        self.sums.lock().expect("sum cache").insert(p.shots, s);
        s
    }

    fn breakdown(&self, tau: f64, squeeze: Option<f64>) -> Result<UncertaintyBreakdown> {
        let p = self.protocol(self.shots(tau))?;
        let moments = self
            .moments(squeeze)
            .ok_or_else(|| Error::Unsupported("moments unavailable for this parameter".into()))?;
        if self.tag == FormulaTag::Full18 {
            let sums = self
                .kernel_sums(&p)
                .ok_or(Error::DephasingOverflow { exponent: f64::INFINITY, limit: crate::uncertainty::EXPONENT_LIMIT })?;
            self.evaluator.combine_full(&moments, &p, &sums)
        } else {
            self.evaluator.evaluate(self.tag, &moments, &p)
        }
    }

    fn value(&self, tau: f64, squeeze: Option<f64>) -> Option<f64> {
        self.breakdown(tau, squeeze).ok().map(|b| b.total_stddev)
    }

    /// `τ` actually used for a requested value.
    fn snapped(&self, tau: f64) -> f64 {
        self.total_time / self.shots(tau) as f64
    }
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 || lo == hi {
        return vec![(lo * hi).sqrt()];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

fn map_indexed<T: Send, F: Fn(usize) -> T + Sync + Send>(count: usize, f: F) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// `a` is better than `b`: lower value; ties prefer smaller τ, then larger squeezing parameter.
fn better(a: (f64, f64, Option<f64>), b: (f64, f64, Option<f64>)) -> bool {
    let scale = a.0.abs().max(b.0.abs());
    if (a.0 - b.0).abs() > 1e-13 * scale {
        return a.0 < b.0;
    }
    if a.1 != b.1 {
        return a.1 < b.1;
    }
    a.2.unwrap_or(0.0) > b.2.unwrap_or(0.0)
}

/// Golden-section minimization of `f(exp(x))` for `x ∈ [a, b]`.
fn golden<F: FnMut(f64) -> Option<f64>>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64, usize) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let eval = |f: &mut F, x: f64| f(x.exp()).unwrap_or(f64::INFINITY);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(&mut f, c);
    let mut fd = eval(&mut f, d);
    let mut evals = 2;
    while (b - a).abs() > tol {
        // Ties go left, toward smaller parameters.
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(&mut f, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(&mut f, d);
        }
        evals += 1;
    }
    if fc <= fd {
        (c.exp(), fc, evals)
    } else {
        (d.exp(), fd, evals)
    }
}

/// Half-width of the next line-search bracket around `x_new`.
fn next_width(x_old: f64, x_new: f64, bracket: (f64, f64), bounds: (f64, f64), width: f64, full: f64, tol: f64) -> f64 {
    let margin = 0.05 * (bracket.1 - bracket.0);
    let at_edge = (x_new - bracket.0 < margin && bracket.0 > bounds.0) || (bracket.1 - x_new < margin && bracket.1 < bounds.1);
    if at_edge {
        return full.max(2.0 * width).min(full);
    }
    (4.0 * (x_new - x_old).abs()).clamp(100.0 * tol, full)
}

fn minimize(obj: &Objective<'_>, tau_bounds: (f64, f64), squeeze_bounds: Option<(f64, f64)>, cfg: &OptimizerConfig) -> Result<Optimum> {
    let taus = log_grid(tau_bounds.0, tau_bounds.1, cfg.grid_tau.max(3));
    let squeezes: Vec<Option<f64>> = match squeeze_bounds {
        Some((lo, hi)) => log_grid(lo, hi, cfg.grid_squeeze.max(3)).into_iter().map(Some).collect(),
        None => vec![None],
    };
    // Kernel sums depend on τ only; fill the cache before the grid sweep.
    if obj.tag == FormulaTag::Full18 {
        let filled = map_indexed(taus.len(), |i| {
            let p = obj.protocol(obj.shots(taus[i])).ok()?;
            Some((p.shots, obj.evaluator.kernel_sums(&p).ok()))
        });
        let mut cache = obj.sums.lock().expect("sum cache");
        for (shots, sums) in filled.into_iter().flatten() {
            cache.insert(shots, sums);
        }
    }
    let values: Vec<Vec<Option<f64>>> = map_indexed(squeezes.len(), |j| {
        taus.iter().map(|&t| obj.value(t, squeezes[j])).collect()
    });
    let mut evaluations = taus.len() * squeezes.len();
    let mut skipped = values.iter().flatten().filter(|v| v.is_none()).count();
    let mut grid: Vec<(f64, usize, usize)> = Vec::new();
    for (j, row) in values.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            if let Some(v) = v {
                grid.push((*v, i, j));
            }
        }
    }
    if grid.is_empty() {
        return Err(Error::Unsupported(
            "objective failed at every grid point; check the bounds and noise strength".into(),
        ));
    }
    grid.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(x.1.cmp(&y.1))
            .then(y.2.cmp(&x.2))
    });
    let grid_min = grid[0].0;
    // Starting points: best grid points that are not neighbours of one another.
    let mut starts: Vec<(usize, usize)> = Vec::new();
    for &(_, i, j) in &grid {
        if starts.len() >= cfg.starts.max(1) {
            break;
        }
        if starts.iter().all(|&(si, sj)| si.abs_diff(i) > 1 || sj.abs_diff(j) > 1) {
            starts.push((i, j));
        }
    }
    let dlog_tau = if taus.len() > 1 { (taus[1] / taus[0]).ln() } else { 1.0 };
    let dlog_sq = match squeeze_bounds {
        Some(_) if squeezes.len() > 1 => (squeezes[1].unwrap() / squeezes[0].unwrap()).ln(),
        _ => 1.0,
    };
    let (lt_lo, lt_hi) = (tau_bounds.0.ln(), tau_bounds.1.ln());
    let mut best: Option<(f64, f64, Option<f64>)> = None;
    let mut converged_all = true;
    let refined = map_indexed(starts.len(), |k| {
        let (i, j) = starts[k];
        let mut tau = obj.snapped(taus[i]);
        let mut sq = squeezes[j];
        let mut f = obj.value(tau, sq).unwrap_or(f64::INFINITY);
        let mut evals = 1usize;
        let mut converged = false;
        // Bracket half-widths shrink to a few times the last accepted step, and
        // reopen to a full grid cell when a minimum lands near the bracket edge.
        let mut w_tau = dlog_tau;
        let mut w_sq = dlog_sq;
        for _ in 0..cfg.max_cycles {
            let before = f;
            let lt = tau.ln();
            let (t_lo, t_hi) = ((lt - w_tau).max(lt_lo), (lt + w_tau).min(lt_hi));
            let (t, ft, e) = golden(|t| obj.value(t, sq), t_lo, t_hi, cfg.log_width_tol);
            evals += e;
            let t = obj.snapped(t);
            w_tau = next_width(lt, t.ln(), (t_lo, t_hi), (lt_lo, lt_hi), w_tau, dlog_tau, cfg.log_width_tol);
            if ft < f {
                tau = t;
                f = ft;
            }
            if let (Some(s), Some((lo, hi))) = (sq, squeeze_bounds) {
                let ls = s.ln();
                let (s_lo, s_hi) = ((ls - w_sq).max(lo.ln()), (ls + w_sq).min(hi.ln()));
                let (s_new, fs, e) = golden(|s| obj.value(tau, Some(s)), s_lo, s_hi, cfg.log_width_tol);
                evals += e;
                w_sq = next_width(ls, s_new.ln(), (s_lo, s_hi), (lo.ln(), hi.ln()), w_sq, dlog_sq, cfg.log_width_tol);
                if fs < f {
                    sq = Some(s_new);
                    f = fs;
                }
            }
            if before - f <= cfg.rel_tol * f.abs() {
                converged = true;
                break;
            }
        }
        (f, tau, sq, evals, converged)
    });
    for (f, tau, sq, evals, converged) in refined {
        evaluations += evals;
        converged_all &= converged;
        if !f.is_finite() {
            skipped += 1;
            continue;
        }
        let cand = (f, tau, sq);
        if best.is_none_or(|b| better(cand, b)) {
            best = Some(cand);
        }
    }
    // The grid optimum itself competes too (refinement never loses to it).
    let (gv, gi, gj) = grid[0];
    let grid_cand = (gv, obj.snapped(taus[gi]), squeezes[gj]);
    let (value, tau, squeeze) = match best {
        Some(b) if !better(grid_cand, b) => b,
        _ => grid_cand,
    };
    Ok(Optimum {
        tau,
        squeeze,
        value,
        grid_min,
        evaluations,
        skipped,
        converged: converged_all,
    })
}

/// Default `τ` search window `[1e-4, 1e2] / A`; `A = 0` falls back to `[1e-4, 1] T`.
pub fn default_tau_bounds(model: &NoiseModel, total_time: f64) -> (f64, f64) {
    let a = model.temporal.strength;
    let (lo, hi) = if a > 0.0 { (1e-4 / a, 1e2 / a) } else { (1e-4 * total_time, total_time) };
    (lo.min(total_time), hi.min(total_time))
}

/// Default squeezing window of a family, `None` when the family has no parameter.
pub fn default_squeeze_bounds(family: SqueezingFamily, n_qubits: usize) -> Option<(f64, f64)> {
    let n = n_qubits as f64;
    match family {
        SqueezingFamily::PsiKappa(_) => Some(((2.0 / n).max(1e-3).min(1.0), 1.0)),
        SqueezingFamily::OneAxisTwisted(_) => {
            let scale = n.powf(-2.0 / 3.0);
            Some((1e-2 * scale, (10.0 * scale).min(std::f64::consts::FRAC_PI_2)))
        }
        SqueezingFamily::TwoAxisTwisted(_) => {
            let scale = (2.0 * n).ln().max(1.0) / n;
            Some((1e-2 * scale, (5.0 * scale).min(2.0)))
        }
        SqueezingFamily::Coherent | SqueezingFamily::Ghz => None,
    }
}

fn effective_tag(family: SqueezingFamily, tag: FormulaTag) -> FormulaTag {
    match (family, tag) {
        (SqueezingFamily::Ghz, t) if !t.is_ghz() => FormulaTag::GhzExact,
        (f, t) if f != SqueezingFamily::Ghz && t.is_ghz() => FormulaTag::Full18,
        (_, t) => t,
    }
}

/// Optimizes τ (and the squeezing parameter when the family has one) and
/// reports the gain against the separable protocol optimized the same way.
///
/// GHZ probes always use a GHZ formula; other probes never do.
pub fn optimize_protocol(
    model: &NoiseModel,
    family: SqueezingFamily,
    n_qubits: usize,
    total_time: f64,
    tag: FormulaTag,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    let evaluator = Evaluator::new(*model, n_qubits)?;
    optimize_with(&evaluator, family, total_time, tag, cfg)
}

fn optimize_with(
    evaluator: &Evaluator,
    family: SqueezingFamily,
    total_time: f64,
    tag: FormulaTag,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    if !(total_time > 0.0) {
        return Err(Error::param("T", format!("must be > 0, got {total_time}")));
    }
    let n_qubits = evaluator.n_qubits();
    let tau_bounds = cfg
        .tau_bounds
        .unwrap_or_else(|| default_tau_bounds(evaluator.model(), total_time));
    if !(tau_bounds.0 > 0.0 && tau_bounds.0 <= tau_bounds.1) {
        return Err(Error::param("tau", format!("invalid bounds {tau_bounds:?}")));
    }
    let squeeze_bounds = default_squeeze_bounds(family, n_qubits).map(|default| cfg.squeeze_bounds.unwrap_or(default));
    let tag_main = effective_tag(family, tag);
    let main = Objective::new(evaluator, family, tag_main, total_time);
    let best = minimize(&main, tau_bounds, squeeze_bounds, cfg)?;
    let breakdown = main.breakdown(best.tau, best.squeeze)?;

    let (sep_value, sep_tau) = if family == SqueezingFamily::Coherent && !tag_main.is_ghz() {
        (best.value, best.tau)
    } else {
        let sep = Objective::new(evaluator, SqueezingFamily::Coherent, effective_tag(SqueezingFamily::Coherent, tag), total_time);
        let s = minimize(&sep, tau_bounds, None, cfg)?;
        (s.value, s.tau)
    };
    debug_assert!(best.value <= best.grid_min);
    Ok(OptimizationResult {
        tau_opt: best.tau,
        squeeze_opt: best.squeeze,
        min_stddev: best.value,
        gain_r: sep_value / best.value,
        separable_stddev: sep_value,
        separable_tau: sep_tau,
        breakdown,
        evaluations: best.evaluations,
        skipped: best.skipped,
        converged: best.converged,
    })
}

/// One point of a gain curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainPoint {
    pub n_qubits: usize,
    pub gain_r: f64,
    pub tau_opt: f64,
    pub squeeze_opt: Option<f64>,
    pub min_stddev: f64,
    pub separable_stddev: f64,
    pub bound: f64,
    pub converged: bool,
}

/// Optimized gain for each `N` of an increasing grid.
pub fn gain_curve(
    model: &NoiseModel,
    family: SqueezingFamily,
    n_grid: &[usize],
    total_time: f64,
    tag: FormulaTag,
    cfg: &OptimizerConfig,
) -> Result<Vec<GainPoint>> {
    if n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("N", "grid must be strictly increasing"));
    }
    n_grid
        .iter()
        .map(|&n| {
            let r = optimize_protocol(model, family, n, total_time, tag, cfg)?;
            Ok(GainPoint {
                n_qubits: n,
                gain_r: r.gain_r,
                tau_opt: r.tau_opt,
                squeeze_opt: r.squeeze_opt,
                min_stddev: r.min_stddev,
                separable_stddev: r.separable_stddev,
                bound: r.breakdown.fundamental_bound,
                converged: r.converged,
            })
        })
        .collect()
}

/// Noise-free gain `⟨J_z⟩ / (√N ΔJ_y)` maximized over the squeezing parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoNoiseGain {
    pub n_qubits: usize,
    pub gain_r: f64,
    pub squeeze_opt: Option<f64>,
}

pub fn no_noise_gain(family: SqueezingFamily, n_qubits: usize, squeeze_bounds: Option<(f64, f64)>) -> Result<NoNoiseGain> {
    let n = n_qubits as f64;
    let ratio = |m: &SpinMoments| m.squeezing_ratio() * n.sqrt();
    let Some((lo, hi)) = squeeze_bounds.or_else(|| default_squeeze_bounds(family, n_qubits)) else {
        if family == SqueezingFamily::Ghz {
            // Heisenberg scaling of the noise-free GHZ protocol.
            return Ok(NoNoiseGain { n_qubits, gain_r: n.sqrt(), squeeze_opt: None });
        }
        let m = family_moments(n_qubits, family)?;
        return Ok(NoNoiseGain { n_qubits, gain_r: 1.0 / ratio(&m), squeeze_opt: None });
    };
    // Near-vanishing contrast (e.g. OAT at χt = π/2 for N = 2) leaves the ratio as 0/0.
    let f = |s: f64| {
        family_moments(n_qubits, family.with_parameter(s))
            .ok()
            .filter(|m| m.jz_mean.abs() >= 1e-6 * n && m.jy_var > 0.0)
            .map(|m| ratio(&m))
    };
    let grid = log_grid(lo, hi, 32);
    let values: Vec<Option<f64>> = map_indexed(grid.len(), |i| f(grid[i]));
    let (best_i, _) = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Unsupported("no valid squeezing parameter".into()))?;
    let a = grid[best_i.saturating_sub(1)].ln();
    let b = grid[(best_i + 1).min(grid.len() - 1)].ln();
    let (s, v, _) = golden(f, a, b, 1e-8);
    let (s, v) = if v <= values[best_i].unwrap() { (s, v) } else { (grid[best_i], values[best_i].unwrap()) };
    Ok(NoNoiseGain {
        n_qubits,
        gain_r: 1.0 / v,
        squeeze_opt: Some(s),
    })
}

/// Least-squares power law `value ≈ e^intercept · N^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    /// `NaN` when the values are constant (the fit is degenerate).
    pub r_squared: f64,
    pub window: (f64, f64),
    pub points: usize,
}

impl ScalingFit {
    pub fn is_degenerate(&self) -> bool {
        self.r_squared.is_nan()
    }
}

/// Ordinary least squares on `(ln N, ln value)` for points inside `window`
/// (all points when `None`).
pub fn scaling_exponent(points: &[(f64, f64)], window: Option<(f64, f64)>) -> Result<ScalingFit> {
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let sel: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, _)| *n >= lo && *n <= hi)
        .copied()
        .collect();
    if sel.len() < 5 {
        return Err(Error::param("points", format!("need at least 5 points in the window, got {}", sel.len())));
    }
    if sel.iter().any(|(n, v)| !(*n > 0.0) || !(*v > 0.0)) {
        return Err(Error::param("points", "N and values must be positive"));
    }
    let xs: Vec<f64> = sel.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = sel.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::param("points", "all N are equal"));
    }
    let exponent = sxy / sxx;
    let r_squared = if syy <= 1e-28 * k { f64::NAN } else { (sxy * sxy / (sxx * syy)).min(1.0) };
    let window = (
        sel.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        sel.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
    );
    Ok(ScalingFit {
        exponent: if r_squared.is_nan() { 0.0 } else { exponent },
        intercept: my - exponent * mx,
        r_squared,
        window,
        points: sel.len(),
    })
}

/// Upper decade of an `N` grid, the default fit window.
pub fn upper_decade(n_grid: &[usize]) -> (f64, f64) {
    let max = n_grid.iter().copied().max().unwrap_or(1) as f64;
    (max / 10.0, max)
}
