//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain numbers and strings and returns a flat `Float64Array`,
//! so the page needs no glue beyond the generated module.

use ramsey_core::dicke::{family_moments, SqueezingFamily};
use ramsey_core::noise::{NoiseModel, SpectrumKind, TemporalSpectrum};
use ramsey_core::optimizer::{optimize_protocol, OptimizerConfig};
use ramsey_core::uncertainty::FormulaTag;
use wasm_bindgen::prelude::*;

fn js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn spectrum(kind: &str, strength: f64, sigma: f64) -> Result<TemporalSpectrum, JsError> {
    let kind: SpectrumKind = kind.parse().map_err(js)?;
    TemporalSpectrum::new(kind, strength, sigma).map_err(js)
}

fn family(name: &str, parameter: f64) -> Result<SqueezingFamily, JsError> {
    match name {
        "separable" => Ok(SqueezingFamily::Coherent),
        "psi-kappa" => Ok(SqueezingFamily::PsiKappa(parameter)),
        "oat" => Ok(SqueezingFamily::OneAxisTwisted(parameter)),
        "tat" => Ok(SqueezingFamily::TwoAxisTwisted(parameter)),
        other => Err(JsError::new(&format!("unknown family `{other}`"))),
    }
}

/// Single-qubit dephasing γ(τ) at each τ.
#[wasm_bindgen]
pub fn gamma_curve(kind: &str, strength: f64, sigma: f64, taus: &[f64]) -> Result<Vec<f64>, JsError> {
    let s = spectrum(kind, strength, sigma)?;
    taus.iter().map(|&t| s.gamma(t).map_err(js)).collect()
}

/// Optimized uncertainty of `family` against separable probes, per N.
///
/// Returns `[gain_r, tau_opt, squeeze_opt, stddev, separable_stddev]` for each N,
/// with `squeeze_opt` NaN for separable probes.
#[wasm_bindgen]
pub fn gain_vs_n(
    kind: &str,
    strength: f64,
    sigma: f64,
    family_name: &str,
    total_time: f64,
    ns: &[u32],
) -> Result<Vec<f64>, JsError> {
    let model = NoiseModel::temporal_only(spectrum(kind, strength, sigma)?);
    let fam = family(family_name, 0.5)?;
    let mut out = Vec::with_capacity(5 * ns.len());
    for &n in ns {
        let r = optimize_protocol(&model, fam, n as usize, total_time, FormulaTag::Full18, &OptimizerConfig::default())
            .map_err(js)?;
        out.extend([r.gain_r, r.tau_opt, r.squeeze_opt.unwrap_or(f64::NAN), r.min_stddev, r.separable_stddev]);
    }
    Ok(out)
}

/// `[⟨J_z⟩, Var J_y, Var J_z, ξ]` of each family member, with `ξ = √N·ΔJ_y/|⟨J_z⟩|`.
#[wasm_bindgen]
pub fn squeezing_moments(family_name: &str, n: u32, parameters: &[f64]) -> Result<Vec<f64>, JsError> {
    let mut out = Vec::with_capacity(4 * parameters.len());
    for &p in parameters {
        let m = family_moments(n as usize, family(family_name, p)?).map_err(js)?;
        out.extend([m.jz_mean, m.jy_var, m.jz_var, m.squeezing_ratio() * (n as f64).sqrt()]);
    }
    Ok(out)
}
