//! Scenario files and their merge with command-line flags.
//!
//! Precedence, lowest first: built-in defaults, `physical` (nondimensionalised),
//! `model`, then flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use welander::continuation::FreeParam;
use welander::{IntegrationConfig, ModelParams, PalConfig, PhysicalParams, State, Window};

use crate::args::{Common, Format};
use crate::error::ConfigError;

pub const DEFAULT_KAPPA1: f64 = 0.1;
pub const DEFAULT_KAPPA2: f64 = 1.0;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub mu: Option<f64>,
    pub eta: Option<f64>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_mu: Option<usize>,
    pub n_eta: Option<usize>,
    /// Initial conditions per side of the census grid.
    pub n_ic: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuationSection {
    pub free: Option<FreeParam>,
    pub range: Option<(f64, f64)>,
    pub backward: Option<bool>,
    pub guess: Option<[f64; 2]>,
    #[serde(default)]
    pub pal: Option<PalConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub step: Option<f64>,
    pub count: Option<usize>,
    pub seed_epsilon: Option<f64>,
    pub epsilon_range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub model: ModelSection,
    pub physical: Option<PhysicalParams>,
    pub window: Option<Window>,
    #[serde(default)]
    pub grid: GridSection,
    pub initial_conditions: Option<Vec<[f64; 2]>>,
    pub duration: Option<f64>,
    pub integration: Option<IntegrationConfig>,
    #[serde(default)]
    pub continuation: ContinuationSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }
}

/// Settings shared by every command after merging.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: ModelParams,
    pub window: Window,
    pub integration: IntegrationConfig,
    pub pal: PalConfig,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub scenario: ScenarioConfig,
}

impl Resolved {
    pub fn initial_conditions(&self) -> Option<Vec<State>> {
        self.scenario
            .initial_conditions
            .as_ref()
            .map(|v| v.iter().map(|&[x, y]| State::new(x, y)).collect())
    }
}

pub fn resolve(common: &Common, default_epsilon: f64) -> anyhow::Result<Resolved> {
    let scenario = match &common.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    let base = match &scenario.physical {
        Some(phys) => {
            let eps = scenario.model.epsilon.or(common.epsilon).unwrap_or(default_epsilon);
            welander::model::nondimensionalize(phys, eps)?
        }
        None => ModelParams {
            mu: 0.0,
            eta: 0.0,
            kappa1: DEFAULT_KAPPA1,
            kappa2: DEFAULT_KAPPA2,
            epsilon: default_epsilon,
        },
    };
    let m = &scenario.model;
    let pick = |flag: Option<f64>, file: Option<f64>, dflt: f64| flag.or(file).unwrap_or(dflt);
    let params = ModelParams::new(
        pick(common.mu, m.mu, base.mu),
        pick(common.eta, m.eta, base.eta),
        pick(common.kappa1, m.kappa1, base.kappa1),
        pick(common.kappa2, m.kappa2, base.kappa2),
        pick(common.epsilon, m.epsilon, base.epsilon),
    )?;
    let window = scenario.window.unwrap_or_default();
    window.validate()?;
    let integration = scenario.integration.unwrap_or_default();
    integration.validate()?;
    let pal = scenario.continuation.pal.unwrap_or_default();
    pal.validate()?;
    Ok(Resolved {
        params,
        window,
        integration,
        pal,
        out: common.out.clone().or_else(|| scenario.output.path.clone()),
        format: common.format.or(scenario.output.format),
        scenario,
    })
}
