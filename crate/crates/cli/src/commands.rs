use clap::ValueEnum;
use ramsey_core::dicke::{family_moments, SpinMoments, SqueezingFamily};
use ramsey_core::mc::{empirical_estimator_variance, McConfig};
use ramsey_core::noise::{NoiseModel, SpatialSpectrum, TemporalSpectrum};
use ramsey_core::optimizer::{optimize_protocol, scaling_exponent, OptimizationResult, OptimizerConfig};
use ramsey_core::uncertainty::{evaluate, ProtocolParams};

use crate::config::{invalid, FamilyName, Param, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

pub fn eval(cfg: &RunConfig) -> Result<Table, CliError> {
    let model = cfg.noise_model()?;
    let family = cfg.fixed_family()?;
    let tag = cfg.formula()?;
    let n = cfg.n()?;
    let p = ProtocolParams::new(n, cfg.total_time()?, cfg.fixed_tau()?)?.with_theta(cfg.theta.unwrap_or(0.0));
    let moments = if family == SqueezingFamily::Ghz {
        SpinMoments::separable(n)
    } else {
        family_moments(n, family)?
    };
    let b = evaluate(tag, &moments, &model, &p)?;
    let mut t = Table::new(&[
        "formula", "family", "squeeze", "N", "T", "tau", "shots", "shot_noise", "dephasing", "cross_shot",
        "cross_qubit", "variance", "stddev", "bound",
    ]);
    t.push(vec![
        tag.name().into(),
        cfg.family_name().to_string().into(),
        family.parameter().into(),
        n.into(),
        p.total_time.into(),
        p.tau.into(),
        p.shots.into(),
        b.shot_noise_term.into(),
        b.single_shot_dephasing_term.into(),
        b.cross_shot_term.into(),
        b.cross_qubit_term.into(),
        b.total_variance.into(),
        b.total_stddev.into(),
        b.fundamental_bound.into(),
    ]);
    Ok(t)
}

/// Optimizer settings with fixed parameters pinned to a zero-width window.
fn optimizer_config(cfg: &RunConfig, fixed_squeeze: Option<f64>) -> OptimizerConfig {
    let mut oc = OptimizerConfig::default();
    if let Some(Param::Fixed(tau)) = cfg.tau {
        oc.tau_bounds = Some((tau, tau));
    }
    if let Some(s) = fixed_squeeze {
        oc.squeeze_bounds = Some((s, s));
    }
    oc
}

fn optimize_one(cfg: &RunConfig, model: &NoiseModel, n: usize) -> Result<OptimizationResult, CliError> {
    let (family, fixed) = cfg.optimized_family()?;
    let oc = optimizer_config(cfg, fixed);
    Ok(optimize_protocol(model, family, n, cfg.total_time()?, cfg.formula()?, &oc)?)
}

pub fn optimize(cfg: &RunConfig) -> Result<Table, CliError> {
    let model = cfg.noise_model()?;
    let grid = cfg.n_list()?.ok_or_else(|| invalid("N", "required (or n_grid)"))?;
    let tag = cfg.formula()?;
    let mut t = Table::new(&[
        "family", "formula", "N", "T", "tau_opt", "squeeze_opt", "stddev", "separable_stddev", "separable_tau",
        "gain_r", "bound", "evaluations", "skipped", "converged",
    ]);
    for &n in &grid {
        let r = optimize_one(cfg, &model, n)?;
        t.push(vec![
            cfg.family_name().to_string().into(),
            tag.name().into(),
            n.into(),
            cfg.total_time()?.into(),
            r.tau_opt.into(),
            r.squeeze_opt.into(),
            r.min_stddev.into(),
            r.separable_stddev.into(),
            r.separable_tau.into(),
            r.gain_r.into(),
            r.breakdown.fundamental_bound.into(),
            r.evaluations.into(),
            r.skipped.into(),
            r.converged.into(),
        ]);
    }
    if grid.len() >= 5 {
        for col in ["stddev", "tau_opt", "gain_r"] {
            let pts = numeric_pairs(&t, "N", col);
            if let Ok(fit) = scaling_exponent(&pts, None) {
                eprintln!("{col} ~ N^{:.4} (r^2 = {:.4})", fit.exponent, fit.r_squared);
            }
        }
    }
    Ok(t)
}

pub fn numeric_pairs(t: &Table, x: &str, y: &str) -> Vec<(f64, f64)> {
    let num = |c: &Cell| match c {
        Cell::Real(v) => Some(*v),
        Cell::Int(v) => Some(*v as f64),
        _ => None,
    };
    let xs = t.column(x).unwrap_or_default();
    let ys = t.column(y).unwrap_or_default();
    xs.into_iter()
        .zip(ys)
        .filter_map(|(a, b)| Some((num(a)?, num(b)?)))
        .collect()
}

pub fn bound(cfg: &RunConfig) -> Result<Table, CliError> {
    let model = cfg.noise_model()?;
    let n = cfg.n()?;
    let total = cfg.total_time()?;
    let r = optimize_one(cfg, &model, n)?;
    let bound = r.breakdown.fundamental_bound;
    let ratio = if bound > 0.0 { r.min_stddev / bound } else { f64::INFINITY };
    let mut t = Table::new(&["S0", "G0", "N", "T", "bound", "optimized_stddev", "ratio"]);
    t.push(vec![
        model.temporal.value(0.0).into(),
        model.spatial.value(0.0).into(),
        n.into(),
        total.into(),
        bound.into(),
        r.min_stddev.into(),
        ratio.into(),
    ]);
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum McGrid {
    /// White noise with separable probes.
    White,
    /// No noise, separable and squeezed probes.
    ZeroNoise,
    /// One configuration from the run settings.
    Config,
}

struct McCase {
    label: String,
    model: NoiseModel,
    family: SqueezingFamily,
    p: ProtocolParams,
}

fn white_case(n: usize, a_tau: f64, shots: u64) -> Result<McCase, CliError> {
    let model = NoiseModel::temporal_only(TemporalSpectrum::white(1.0)?);
    Ok(McCase {
        label: format!("white-sep-N{n}-Atau{a_tau}"),
        model,
        family: SqueezingFamily::Coherent,
        p: ProtocolParams::new(n, shots as f64 * a_tau, a_tau)?,
    })
}

fn mc_cases(grid: McGrid, cfg: &RunConfig) -> Result<Vec<McCase>, CliError> {
    match grid {
        McGrid::White => vec![
            white_case(1, 1.0, 40),
            white_case(2, 0.5, 50),
            white_case(4, 0.5, 50),
            white_case(4, 1.0, 20),
            white_case(8, 0.25, 40),
        ]
        .into_iter()
        .collect(),
        McGrid::ZeroNoise => {
            let mut cases = Vec::new();
            for n in [2usize, 4, 8] {
                cases.push(McCase {
                    label: format!("silent-sep-N{n}"),
                    model: NoiseModel::silent(),
                    family: SqueezingFamily::Coherent,
                    p: ProtocolParams::new(n, 50.0, 1.0)?,
                });
            }
            cases.push(McCase {
                label: "silent-psi-N6".into(),
                model: NoiseModel::silent(),
                family: SqueezingFamily::PsiKappa(0.6),
                p: ProtocolParams::new(6, 40.0, 1.0)?,
            });
            Ok(cases)
        }
        McGrid::Config => {
            let n = cfg.n()?;
            let p = ProtocolParams::new(n, cfg.total_time()?, cfg.fixed_tau()?)?.with_theta(cfg.theta.unwrap_or(0.0));
            Ok(vec![McCase {
                label: "config".into(),
                model: cfg.noise_model()?,
                family: cfg.fixed_family()?,
                p,
            }])
        }
    }
}

fn noise_label(m: &NoiseModel) -> String {
    if m.temporal.is_silent() {
        return "silent".into();
    }
    let t = m.temporal.kind.name();
    if m.spatial == SpatialSpectrum::trivial() {
        t.to_string()
    } else {
        format!("{t}x{}", m.spatial.kind.name())
    }
}

/// The report is returned even when a check fails, so it can be written first.
pub fn mc_validate(grid: McGrid, cfg: &RunConfig) -> Result<(Table, Option<CliError>), CliError> {
    let trajectories = cfg.trajectories.unwrap_or(10_000);
    let seed = cfg.seed();
    let mut t = Table::new(&[
        "config", "noise", "family", "N", "shots", "tau", "empirical", "analytic", "standard_error", "z",
    ]);
    let mut worst: f64 = 0.0;
    for (i, case) in mc_cases(grid, cfg)?.into_iter().enumerate() {
        let e = empirical_estimator_variance(
            &case.model,
            case.family,
            &case.p,
            McConfig::new(trajectories, seed.wrapping_add(i as u64)),
        )?;
        let z = e.z_score();
        worst = worst.max(z.abs());
        t.push(vec![
            case.label.into(),
            noise_label(&case.model).into(),
            family_label(case.family).into(),
            case.p.n_qubits.into(),
            case.p.shots.into(),
            case.p.tau.into(),
            e.empirical_variance.into(),
            e.analytic_reference.into(),
            e.standard_error.into(),
            z.into(),
        ]);
    }
    let failure = (worst > 4.0).then(|| CliError::Statistical(format!("max |z| = {worst:.3} exceeds 4")));
    Ok((t, failure))
}

pub fn family_label(f: SqueezingFamily) -> String {
    let name = match f {
        SqueezingFamily::Coherent => FamilyName::Separable,
        SqueezingFamily::PsiKappa(_) => FamilyName::PsiKappa,
        SqueezingFamily::OneAxisTwisted(_) => FamilyName::Oat,
        SqueezingFamily::TwoAxisTwisted(_) => FamilyName::Tat,
        SqueezingFamily::Ghz => FamilyName::Ghz,
    };
    match f.parameter() {
        Some(v) => format!("{name}({v})"),
        None => name.to_string(),
    }
}
