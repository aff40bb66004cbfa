//! Figure datasets. Each has baked-in defaults; `--A`,
//! `--T`, `--n-grid`, `--points` and (fig8) `--formula` override them.

use clap::ValueEnum;
use rayon::prelude::*;
use ramsey_core::dicke::SqueezingFamily;
use ramsey_core::noise::{NoiseModel, SpatialSpectrum, SpectrumKind, TemporalSpectrum};
use ramsey_core::optimizer::{no_noise_gain, optimize_protocol, OptimizationResult, OptimizerConfig};
use ramsey_core::uncertainty::FormulaTag;

use crate::config::{invalid, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    /// White noise: Δb vs T at N = 100 and gain vs N at AT = 10³.
    Fig2,
    /// Four temporal spectra, σ/A = 1/2: scaled Δb, gain, τ_opt, κ_opt vs N.
    Fig3,
    /// Temporal × spatial spectra, A/σ = B/k0 = 1/8: gain vs N.
    Fig4,
    /// ψ_κ, OAT and TAT gains without noise and under white noise.
    Fig6,
    /// Single qubit, σ/A = 10⁻³: γ(T)/T and Δb vs T.
    Fig7,
    /// GHZ probes under the four temporal spectra, σ/A = 1/2.
    Fig8,
}

/// Log-spaced integers on `[lo, hi]`, rounded to even values when `even`.
pub fn log_grid(lo: f64, hi: f64, points: usize, even: bool) -> Vec<usize> {
    let mut out: Vec<usize> = (0..points)
        .map(|i| {
            let x = if points == 1 { lo } else { lo * (hi / lo).powf(i as f64 / (points - 1) as f64) };
            if even {
                (2 * (x / 2.0).round() as usize).max(2)
            } else {
                x.round().max(1.0) as usize
            }
        })
        .collect();
    out.dedup();
    out
}

fn real_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lo * (hi / lo).powf(i as f64 / (points.max(2) - 1) as f64))
        .collect()
}

struct Defaults {
    a: f64,
    points: usize,
}

fn n_grid(cfg: &RunConfig, lo: f64, hi: f64, d: &Defaults, even: bool) -> Result<Vec<usize>, CliError> {
    Ok(match cfg.n_list()? {
        Some(g) => g,
        None => log_grid(lo, hi, cfg.points.unwrap_or(d.points), even),
    })
}

fn temporal(kind: SpectrumKind, a: f64, sigma: f64) -> Result<NoiseModel, CliError> {
    Ok(NoiseModel::temporal_only(TemporalSpectrum::new(kind, a, sigma)?))
}

fn run_all<J: Sync, R: Send>(jobs: &[J], f: impl Fn(&J) -> Result<R, CliError> + Sync + Send) -> Result<Vec<R>, CliError> {
    jobs.par_iter().map(f).collect()
}

fn psi() -> SqueezingFamily {
    SqueezingFamily::PsiKappa(1.0)
}

fn opt(model: &NoiseModel, family: SqueezingFamily, n: usize, t: f64, tag: FormulaTag) -> Result<OptimizationResult, CliError> {
    Ok(optimize_protocol(model, family, n, t, tag, &OptimizerConfig::default())?)
}

pub fn figure(id: FigureId, cfg: &RunConfig) -> Result<Table, CliError> {
    let a = cfg.a.unwrap_or(1.0);
    if !(a > 0.0) {
        return Err(invalid("A", "figures need A > 0"));
    }
    match id {
        FigureId::Fig2 => fig2(cfg, a),
        FigureId::Fig3 => fig3(cfg, a),
        FigureId::Fig4 => fig4(cfg, a),
        FigureId::Fig6 => fig6(cfg, a),
        FigureId::Fig7 => fig7(cfg, a),
        FigureId::Fig8 => fig8(cfg, a),
    }
}

fn fig2(cfg: &RunConfig, a: f64) -> Result<Table, CliError> {
    let model = temporal(SpectrumKind::White, a, 1.0)?;
    let d = Defaults { a, points: 25 };
    let mut t = Table::new(&[
        "panel", "N", "T", "separable_stddev", "squeezed_stddev", "bound", "gain_r", "tau_opt", "kappa_opt",
    ]);
    let times = real_grid(10.0 / d.a, 1e5 / d.a, cfg.points.unwrap_or(13));
    let fixed_n = cfg.n.unwrap_or(100);
    let a_rows = run_all(&times, |&tt| opt(&model, psi(), fixed_n, tt, FormulaTag::Full18).map(|r| (fixed_n, tt, r)))?;
    let total = cfg.t.unwrap_or(1e3 / a);
    let ns = n_grid(cfg, 2.0, 1e4, &d, true)?;
    let b_rows = run_all(&ns, |&n| opt(&model, psi(), n, total, FormulaTag::Full18).map(|r| (n, total, r)))?;
    for (panel, rows) in [("a", a_rows), ("b", b_rows)] {
        for (n, tt, r) in rows {
            t.push(vec![
                panel.into(),
                n.into(),
                tt.into(),
                r.separable_stddev.into(),
                r.min_stddev.into(),
                r.breakdown.fundamental_bound.into(),
                r.gain_r.into(),
                r.tau_opt.into(),
                r.squeeze_opt.into(),
            ]);
        }
    }
    Ok(t)
}

/// `Δb √(NT/A)`.
fn scaled(v: f64, n: usize, t: f64, a: f64) -> Cell {
    (v * (n as f64 * t / a).sqrt()).into()
}

fn fig3(cfg: &RunConfig, a: f64) -> Result<Table, CliError> {
    let d = Defaults { a, points: 20 };
    let total = cfg.t.unwrap_or(1e4 / a);
    let ns = n_grid(cfg, 2.0, 1e4, &d, true)?;
    let jobs: Vec<(SpectrumKind, usize)> = SpectrumKind::ALL.iter().flat_map(|&k| ns.iter().map(move |&n| (k, n))).collect();
    let rows = run_all(&jobs, |&(kind, n)| opt(&temporal(kind, a, a / 2.0)?, psi(), n, total, FormulaTag::Full18))?;
    let mut t = Table::new(&[
        "spectrum", "N", "scaled_separable", "scaled_squeezed", "gain_r", "tau_opt", "kappa_opt", "scaled_bound",
    ]);
    for (&(kind, n), r) in jobs.iter().zip(rows) {
        t.push(vec![
            kind.name().into(),
            n.into(),
            scaled(r.separable_stddev, n, total, a),
            scaled(r.min_stddev, n, total, a),
            r.gain_r.into(),
            r.tau_opt.into(),
            r.squeeze_opt.into(),
            scaled(r.breakdown.fundamental_bound, n, total, a),
        ]);
    }
    Ok(t)
}

fn fig4(cfg: &RunConfig, a: f64) -> Result<Table, CliError> {
    let d = Defaults { a, points: 10 };
    let total = cfg.t.unwrap_or(1e4 / a);
    let b = cfg.b.unwrap_or(1.0);
    let ns = n_grid(cfg, 10.0, 1e3, &d, true)?;
    let mut jobs = Vec::new();
    for &tk in &SpectrumKind::ALL {
        for &sk in &SpectrumKind::ALL {
            for &n in &ns {
                jobs.push((tk, sk, n));
            }
        }
    }
    let rows = run_all(&jobs, |&(tk, sk, n)| {
        let model = NoiseModel::new(TemporalSpectrum::new(tk, a, 8.0 * a)?, SpatialSpectrum::new(sk, b, 8.0 * b)?);
        opt(&model, psi(), n, total, FormulaTag::Full18)
    })?;
    let mut t = Table::new(&[
        "temporal", "spatial", "N", "gain_r", "tau_opt", "kappa_opt", "squeezed_stddev", "separable_stddev",
    ]);
    for (&(tk, sk, n), r) in jobs.iter().zip(rows) {
        t.push(vec![
            tk.name().into(),
            sk.name().into(),
            n.into(),
            r.gain_r.into(),
            r.tau_opt.into(),
            r.squeeze_opt.into(),
            r.min_stddev.into(),
            r.separable_stddev.into(),
        ]);
    }
    Ok(t)
}

fn fig6(cfg: &RunConfig, a: f64) -> Result<Table, CliError> {
    let d = Defaults { a, points: 15 };
    let total = cfg.t.unwrap_or(1e3 / a);
    let ns = n_grid(cfg, 2.0, 1e3, &d, true)?;
    let families = [
        ("psi-kappa", SqueezingFamily::PsiKappa(1.0)),
        ("oat", SqueezingFamily::OneAxisTwisted(0.1)),
        ("tat", SqueezingFamily::TwoAxisTwisted(0.1)),
    ];
    let model = temporal(SpectrumKind::White, a, 1.0)?;
    let mut jobs = Vec::new();
    for panel in ["a", "b"] {
        for &(name, f) in &families {
            for &n in &ns {
                jobs.push((panel, name, f, n));
            }
        }
    }
    let rows = run_all(&jobs, |&(panel, _, f, n)| {
        if panel == "a" {
            let g = no_noise_gain(f, n, None)?;
            Ok((g.gain_r, None, g.squeeze_opt))
        } else {
            let r = opt(&model, f, n, total, FormulaTag::Full18)?;
            Ok((r.gain_r, Some(r.tau_opt), r.squeeze_opt))
        }
    })?;
    let mut t = Table::new(&["panel", "family", "N", "gain_r", "tau_opt", "squeeze_opt"]);
    for (&(panel, name, _, n), (g, tau, s)) in jobs.iter().zip(rows) {
        t.push(vec![panel.into(), name.into(), n.into(), g.into(), tau.into(), s.into()]);
    }
    Ok(t)
}

fn fig7(cfg: &RunConfig, a: f64) -> Result<Table, CliError> {
    let sigma = cfg.sigma.unwrap_or(1e-3 * a);
    let xs = real_grid(1e-2, 1e4, cfg.points.unwrap_or(25));
    let jobs: Vec<(SpectrumKind, f64)> = SpectrumKind::ALL.iter().flat_map(|&k| xs.iter().map(move |&x| (k, x / sigma))).collect();
    let rows = run_all(&jobs, |&(kind, total)| {
        let model = temporal(kind, a, sigma)?;
        let rate = model.temporal.gamma(total)? / total;
        let r = opt(&model, SqueezingFamily::Coherent, 1, total, FormulaTag::Full18)?;
        Ok((rate, r))
    })?;
    let mut t = Table::new(&["spectrum", "T", "sigma_T", "gamma_rate", "stddev", "tau_opt"]);
    for (&(kind, total), (rate, r)) in jobs.iter().zip(rows) {
        t.push(vec![
            kind.name().into(),
            total.into(),
            (sigma * total).into(),
            rate.into(),
            r.min_stddev.into(),
            r.tau_opt.into(),
        ]);
    }
    Ok(t)
}

fn fig8(cfg: &RunConfig, a: f64) -> Result<Table, CliError> {
    let d = Defaults { a, points: 16 };
    let total = cfg.t.unwrap_or(1e4 / a);
    let tag: FormulaTag = cfg.formula.as_deref().unwrap_or("ghz-simple").parse()?;
    if !tag.is_ghz() {
        return Err(invalid("formula", "fig8 needs ghz-exact or ghz-simple"));
    }
    let ns = n_grid(cfg, 1.0, 1e3, &d, false)?;
    let jobs: Vec<(SpectrumKind, usize)> = SpectrumKind::ALL.iter().flat_map(|&k| ns.iter().map(move |&n| (k, n))).collect();
    let rows = run_all(&jobs, |&(kind, n)| opt(&temporal(kind, a, a / 2.0)?, SqueezingFamily::Ghz, n, total, tag))?;
    let mut t = Table::new(&[
        "spectrum", "N", "scaled_ghz", "scaled_separable", "gain_r", "tau_opt", "scaled_bound",
    ]);
    for (&(kind, n), r) in jobs.iter().zip(rows) {
        t.push(vec![
            kind.name().into(),
            n.into(),
            scaled(r.min_stddev, n, total, a),
            scaled(r.separable_stddev, n, total, a),
            r.gain_r.into(),
            r.tau_opt.into(),
            scaled(r.breakdown.fundamental_bound, n, total, a),
        ]);
    }
    Ok(t)
}
