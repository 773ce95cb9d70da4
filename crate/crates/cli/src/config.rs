//! Run configuration: a TOML document with a schema version. Unknown keys are
//! rejected at every level.

use std::path::Path;

use hardy_core::indicial::Location;
use hardy_core::rayleigh::{CollarSettings, DecayWindow, SolverOptions, StudySettings};
use hardy_core::{ClassifyOptions, DomainSpec, Params};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub alpha: f64,
    pub p: f64,
    pub dim: u32,
    pub domain: DomainSpec,
    /// Cutoff sequences and lattice density of the Hardy-constant study. Empty
    /// means the defaults for the domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<StudySettings>,
    #[serde(default)]
    pub collars: CollarConfig,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub classify: ClassifyOptions,
    #[serde(default)]
    pub indicial: IndicialConfig,
    #[serde(default)]
    pub decay: DecayConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct CollarConfig {
    /// Collar widths; empty means defaults scaled to the domain.
    pub widths: Vec<f64>,
    pub settings: CollarSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IndicialConfig {
    /// Values `μ` to solve for; empty means 11 equally spaced points on `[0, c]`.
    pub mu: Vec<f64>,
    pub locations: Vec<Location>,
}

impl Default for IndicialConfig {
    fn default() -> Self {
        Self { mu: Vec::new(), locations: vec![Location::Boundary, Location::Infinity] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DecayConfig {
    /// Fit windows; empty means the defaults derived from the cutoffs.
    pub windows: Vec<DecayWindow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Suite {
    Indicial,
    #[serde(rename = "appendix_b")]
    #[value(name = "appendix_b", alias = "appendixB")]
    AppendixB,
    ChainRule,
    Agmon,
    Integrability,
    Signs,
    Scale,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Indicial,
        Suite::AppendixB,
        Suite::ChainRule,
        Suite::Agmon,
        Suite::Integrability,
        Suite::Signs,
        Suite::Scale,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub suites: Vec<Suite>,
    /// Random tuples drawn by the cross-term suite.
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { suites: Suite::ALL.to_vec(), samples: 100_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub alpha: Vec<f64>,
    pub p: Vec<f64>,
    /// Dimensions to sweep; empty means the top-level `dim`.
    pub dim: Vec<u32>,
    /// Domains to sweep; empty means the top-level `domain`.
    pub domains: Vec<DomainSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            alpha: 0.0,
            p: 2.0,
            dim: 3,
            domain: DomainSpec::Interval { b: 1.0, half_line: true },
            mesh: None,
            collars: CollarConfig::default(),
            solver: SolverOptions::default(),
            classify: ClassifyOptions::default(),
            indicial: IndicialConfig::default(),
            decay: DecayConfig::default(),
            verify: VerifyConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn emit(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.params()?;
        self.domain.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn params(&self) -> Result<Params, CliError> {
        Params::new(self.alpha, self.p, self.dim).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Study settings with the configured solver options.
    pub fn study_settings(&self) -> StudySettings {
        self.study_settings_for(&self.domain)
    }

    /// As [`Self::study_settings`], with the defaults of `spec` when no mesh
    /// table is given.
    pub fn study_settings_for(&self, spec: &DomainSpec) -> StudySettings {
        let mut s = self.mesh.clone().unwrap_or_else(|| StudySettings::for_domain(spec));
        s.solver = self.solver;
        s
    }

    pub fn collar_settings(&self) -> CollarSettings {
        let mut s = self.collars.settings.clone();
        s.solver = self.solver;
        s
    }
}

/// Parses `kind:a[,b]`, e.g. `annulus:1,2`, `ball:1`, `exterior:1`,
/// `half-line:1`, `interval:1`.
pub fn parse_domain(text: &str) -> Result<DomainSpec, CliError> {
    let (kind, args) = text.split_once(':').unwrap_or((text, "1"));
    let nums = args
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| CliError::Config(format!("domain '{text}': {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let one = |n: &[f64]| -> Result<f64, CliError> {
        match n {
            [x] => Ok(*x),
            _ => Err(CliError::Config(format!("domain '{text}' takes one length"))),
        }
    };
    let spec = match kind.trim() {
        "ball" => DomainSpec::Ball { radius: one(&nums)? },
        "exterior" | "exterior_ball" => DomainSpec::ExteriorBall { radius: one(&nums)? },
        "half-line" | "half_line" => DomainSpec::Interval { b: one(&nums)?, half_line: true },
        "interval" => DomainSpec::Interval { b: one(&nums)?, half_line: false },
        "annulus" => match nums[..] {
            [r0, r1] => DomainSpec::Annulus { r0, r1 },
            _ => return Err(CliError::Config(format!("domain '{text}' takes two radii"))),
        },
        other => return Err(CliError::Config(format!("unknown domain kind '{other}'"))),
    };
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(spec)
}
