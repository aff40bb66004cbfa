//! Run configuration shared by all subcommands. The same record is read from
//! a TOML file and from flags; flags win.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use ramsey_core::dicke::SqueezingFamily;
use ramsey_core::noise::{NoiseModel, SpatialSpectrum, SpectrumKind, TemporalSpectrum};
use ramsey_core::uncertainty::FormulaTag;
use serde::{Deserialize, Deserializer};

use crate::error::CliError;

/// A real parameter that is either fixed or left to the optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Fixed(f64),
    Optimize,
}

impl FromStr for Param {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("optimize") {
            return Ok(Param::Optimize);
        }
        s.parse::<f64>()
            .map(Param::Fixed)
            .map_err(|_| format!("expected a number or \"optimize\", got `{s}`"))
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Param::Fixed(v)),
            Raw::Int(v) => Ok(Param::Fixed(v as f64)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// State family names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyName {
    Separable,
    PsiKappa,
    Oat,
    Tat,
    Ghz,
}

impl FromStr for FamilyName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "separable" | "coherent" => Ok(FamilyName::Separable),
            "psi-kappa" | "psi" | "squeezed" => Ok(FamilyName::PsiKappa),
            "oat" => Ok(FamilyName::Oat),
            "tat" => Ok(FamilyName::Tat),
            "ghz" => Ok(FamilyName::Ghz),
            other => Err(format!("unknown family `{other}` (separable, psi-kappa, oat, tat, ghz)")),
        }
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyName::Separable => "separable",
            FamilyName::PsiKappa => "psi-kappa",
            FamilyName::Oat => "oat",
            FamilyName::Tat => "tat",
            FamilyName::Ghz => "ghz",
        })
    }
}

impl<'de> Deserialize<'de> for FamilyName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn parse_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad integer `{x}` in list")))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NGrid(pub Vec<usize>);

impl FromStr for NGrid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_list(s).map(NGrid)
    }
}

impl<'de> Deserialize<'de> for NGrid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Vec::<usize>::deserialize(d).map(NGrid)
    }
}

/// Every field is optional here; each command checks what it needs.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Temporal spectrum: white, gaussian, linear, ohmic or silent.
    #[arg(long)]
    pub noise: Option<String>,
    /// Temporal noise strength A.
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: Option<f64>,
    /// Temporal spectral width σ.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Spatial spectrum kind, or "trivial" for uncorrelated qubits.
    #[arg(long)]
    pub spatial: Option<String>,
    /// Spatial noise strength B.
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: Option<f64>,
    /// Spatial spectral width k0.
    #[arg(long)]
    pub k0: Option<f64>,
    /// Probe: separable, psi-kappa, oat, tat or ghz.
    #[arg(long)]
    pub family: Option<FamilyName>,
    /// κ for psi-kappa (number or "optimize").
    #[arg(long)]
    pub kappa: Option<Param>,
    /// Twisting time χt for oat/tat (number or "optimize").
    #[arg(long = "chi-t")]
    pub chi_t: Option<Param>,
    /// Number of qubits.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Comma-separated, increasing list of qubit numbers.
    #[arg(long = "n-grid")]
    pub n_grid: Option<NGrid>,
    /// Total time T.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: Option<f64>,
    /// Interrogation time τ (number or "optimize").
    #[arg(long)]
    pub tau: Option<Param>,
    /// Operating point θ.
    #[arg(long)]
    pub theta: Option<f64>,
    /// full18, tempunc22, simplified23, spatial26, nonoise, markovian, ghz-exact, ghz-simple.
    #[arg(long)]
    pub formula: Option<String>,
    /// Number of grid points for figure sweeps.
    #[arg(long)]
    pub points: Option<usize>,
    /// Monte Carlo trajectories per configuration.
    #[arg(long)]
    pub trajectories: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for parallel sweeps.
    #[arg(long)]
    pub threads: Option<usize>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f),)* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }

    /// Values of `self` take precedence over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(
            base, self, noise, a, sigma, spatial, b, k0, family, kappa, chi_t, n, n_grid, t, tau, theta, formula,
            points, trajectories, seed, out, format, threads
        )
    }

    pub fn noise_model(&self) -> Result<NoiseModel, CliError> {
        let name = self.noise.as_deref().unwrap_or("white");
        let a = self.a.unwrap_or(1.0);
        let temporal = if name.eq_ignore_ascii_case("silent") || name.eq_ignore_ascii_case("none") {
            TemporalSpectrum::silent()
        } else {
            let kind = SpectrumKind::from_str(name).map_err(|_| invalid("noise", format!("unknown spectrum `{name}`")))?;
            TemporalSpectrum::new(kind, a, self.sigma.unwrap_or(1.0))?
        };
        let spatial = match self.spatial.as_deref() {
            None => SpatialSpectrum::trivial(),
            Some(s) if s.eq_ignore_ascii_case("trivial") => SpatialSpectrum::trivial(),
            Some(s) => {
                let kind = SpectrumKind::from_str(s).map_err(|_| invalid("spatial", format!("unknown spectrum `{s}`")))?;
                SpatialSpectrum::new(kind, self.b.unwrap_or(1.0), self.k0.unwrap_or(1.0))?
            }
        };
        Ok(NoiseModel::new(temporal, spatial))
    }

    pub fn family_name(&self) -> FamilyName {
        self.family.unwrap_or(FamilyName::Separable)
    }

    /// The squeezing parameter flag that belongs to the chosen family.
    fn squeeze_param(&self) -> Option<Param> {
        match self.family_name() {
            FamilyName::PsiKappa => self.kappa,
            FamilyName::Oat | FamilyName::Tat => self.chi_t,
            _ => None,
        }
    }

    fn squeeze_field(&self) -> &'static str {
        if self.family_name() == FamilyName::PsiKappa {
            "kappa"
        } else {
            "chi_t"
        }
    }

    /// Family with a fixed parameter, for evaluation.
    pub fn fixed_family(&self) -> Result<SqueezingFamily, CliError> {
        let family = self.family_name();
        let value = match (family, self.squeeze_param()) {
            (FamilyName::Separable | FamilyName::Ghz, _) => 0.0,
            (_, Some(Param::Fixed(v))) => v,
            (_, Some(Param::Optimize)) => {
                return Err(invalid(self.squeeze_field(), "eval needs a fixed value; use the optimize command"))
            }
            (_, None) => return Err(invalid(self.squeeze_field(), format!("required for family {family}"))),
        };
        let f = build_family(family, value);
        f.validate()?;
        Ok(f)
    }

    /// Family template for the optimizer and the fixed parameter, if any.
    pub fn optimized_family(&self) -> Result<(SqueezingFamily, Option<f64>), CliError> {
        let family = self.family_name();
        match self.squeeze_param() {
            Some(Param::Fixed(v)) => {
                let f = build_family(family, v);
                f.validate()?;
                Ok((f, Some(v)))
            }
            _ => Ok((build_family(family, 1.0), None)),
        }
    }

    pub fn formula(&self) -> Result<FormulaTag, CliError> {
        let default = if self.family_name() == FamilyName::Ghz { "ghz-exact" } else { "full18" };
        let tag: FormulaTag = self.formula.as_deref().unwrap_or(default).parse()?;
        if tag.is_ghz() != (self.family_name() == FamilyName::Ghz) {
            return Err(invalid("formula", format!("{tag} does not apply to family {}", self.family_name())));
        }
        Ok(tag)
    }

    pub fn n(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| invalid("N", "required"))
    }

    pub fn total_time(&self) -> Result<f64, CliError> {
        self.t.ok_or_else(|| invalid("T", "required"))
    }

    pub fn fixed_tau(&self) -> Result<f64, CliError> {
        match self.tau {
            Some(Param::Fixed(v)) => Ok(v),
            Some(Param::Optimize) => Err(invalid("tau", "eval needs a fixed value; use the optimize command")),
            None => Err(invalid("tau", "required")),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    /// `--n-grid`, else `--N` alone, else `None`.
    pub fn n_list(&self) -> Result<Option<Vec<usize>>, CliError> {
        if let Some(NGrid(g)) = &self.n_grid {
            if g.is_empty() || g.windows(2).any(|w| w[1] <= w[0]) || g[0] == 0 {
                return Err(invalid("n_grid", "must be a non-empty, strictly increasing list of positive integers"));
            }
            return Ok(Some(g.clone()));
        }
        Ok(self.n.map(|n| vec![n]))
    }
}

pub fn build_family(name: FamilyName, value: f64) -> SqueezingFamily {
    match name {
        FamilyName::Separable => SqueezingFamily::Coherent,
        FamilyName::PsiKappa => SqueezingFamily::PsiKappa(value),
        FamilyName::Oat => SqueezingFamily::OneAxisTwisted(value),
        FamilyName::Tat => SqueezingFamily::TwoAxisTwisted(value),
        FamilyName::Ghz => SqueezingFamily::Ghz,
    }
}

pub fn invalid(field: &str, reason: impl fmt::Display) -> CliError {
    CliError::Validation(format!("invalid parameter `{field}`: {reason}"))
}
