//! TOML experiment configuration.
//!
//! Every key is optional; defaults are listed on [`ExperimentConfig`] and its
//! sections. Unknown keys are rejected so typos surface as config errors.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bandit::{BasePolicy, EpsSchedule, PolicySchedule};
use crate::distributions::StockDistribution;
use crate::learners::{LossSpec, Predictors};
use crate::measures::PosteriorMeasure;
use crate::processes::StockIncrements;

/// A configuration problem; the CLI maps it to exit code 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config {path}: {reason}")]
    Unreadable { path: String, reason: String },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), reason: reason.into() }
}

/// Top-level configuration shared by every subcommand.
///
/// Defaults: `seed = 0`, `trials = 1000`, `horizon = 100`, `delta = 0.1`,
/// `lambda = 0.5`, `output = "pacmart-out"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub horizon: usize,
    pub delta: f64,
    pub lambda: f64,
    pub output: PathBuf,
    pub model: ModelConfig,
    pub coverage: CoverageConfig,
    pub supermartingale: SupermartingaleConfig,
    pub tightness: TightnessConfig,
    pub bandit: BanditConfig,
    pub online: OnlineConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            trials: 1000,
            horizon: 100,
            delta: 0.1,
            lambda: 0.5,
            output: PathBuf::from("pacmart-out"),
            model: ModelConfig::default(),
            coverage: CoverageConfig::default(),
            supermartingale: SupermartingaleConfig::default(),
            tightness: TightnessConfig::default(),
            bandit: BanditConfig::default(),
            online: OnlineConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Quadratic,
    Absolute,
}

impl LossKind {
    pub fn spec(self) -> LossSpec {
        match self {
            LossKind::Quadratic => LossSpec::Quadratic,
            LossKind::Absolute => LossSpec::Absolute,
        }
    }
}

/// Data, loss and hypothesis space for the learning experiments.
///
/// Defaults: predictors `[-1, 0, 1]`, quadratic loss, lognormal(0, 1) data,
/// uniform prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub predictors: Vec<f64>,
    pub loss: LossKind,
    pub data: StockDistribution,
    /// Prior weights over the predictors; uniform when absent.
    pub prior: Option<Vec<f64>>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            predictors: vec![-1.0, 0.0, 1.0],
            loss: LossKind::Quadratic,
            data: StockDistribution::LogNormal { mu: 0.0, sigma: 1.0 },
            prior: None,
        }
    }
}

impl ModelConfig {
    pub fn predictors(&self) -> Result<Predictors, ConfigError> {
        Predictors::new(self.predictors.clone()).map_err(|e| invalid("model.predictors", e.to_string()))
    }

    pub fn prior(&self, predictors: &Predictors) -> Result<PosteriorMeasure<f64>, ConfigError> {
        let space = predictors.space().clone();
        match &self.prior {
            None => PosteriorMeasure::uniform(space),
            Some(w) if w.len() != predictors.len() => {
                return Err(invalid("model.prior", "needs one weight per predictor"));
            }
            Some(w) => PosteriorMeasure::categorical(space, w.clone()),
        }
        .map_err(|e| invalid("model.prior", e.to_string()))
    }

    fn validate(&self) -> Result<(), ConfigError> {
        self.data.validate().map_err(|e| invalid("model.data", e.to_string()))?;
        let p = self.predictors()?;
        self.prior(&p)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageTarget {
    /// `P(∃m: E_P[exp f_m] > 1/δ) ≤ δ` for the exponential supermartingale itself.
    VilleDirect,
    Martingale,
    Batch,
    Online,
}

impl CoverageTarget {
    pub fn name(self) -> &'static str {
        match self {
            CoverageTarget::VilleDirect => "ville_direct",
            CoverageTarget::Martingale => "martingale",
            CoverageTarget::Batch => "batch",
            CoverageTarget::Online => "online",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosteriorSetMode {
    /// Exact supremum on spaces of size at most 8, registered set otherwise.
    Auto,
    Exact,
    Registered,
}

/// Defaults: `target = "batch"`, `posterior_set = "auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoverageConfig {
    pub target: CoverageTarget,
    pub posterior_set: PosteriorSetMode,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        CoverageConfig { target: CoverageTarget::Batch, posterior_set: PosteriorSetMode::Auto }
    }
}

/// Defaults: rademacher(1), centered lognormal(0, 0.5), centered Pareto(1, 3);
/// `eta = [0.05, 0.1, 0.5]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SupermartingaleConfig {
    pub models: Vec<StockIncrements>,
    pub eta: Vec<f64>,
}

impl Default for SupermartingaleConfig {
    fn default() -> Self {
        SupermartingaleConfig {
            models: vec![
                StockIncrements::Rademacher { scale: 1.0 },
                StockIncrements::CenteredLogNormal { mu: 0.0, sigma: 0.5 },
                StockIncrements::CenteredPareto { scale: 1.0, shape: 3.0 },
            ],
            eta: vec![0.05, 0.1, 0.5],
        }
    }
}

/// Bounded-loss comparison table.
///
/// Defaults: `lambda_grid = [0.05, 0.1, 0.5]`, `m_grid = [10, 100, 1000]`,
/// `alpha = 0.5`. Data uniform on `[0, 1]`, absolute loss, predictors
/// `[0.2, 0.5, 0.8]` so every loss lies in `[0, K]` with `K = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TightnessConfig {
    pub lambda_grid: Vec<f64>,
    pub m_grid: Vec<usize>,
    pub alpha: f64,
    pub predictors: Vec<f64>,
}

impl Default for TightnessConfig {
    fn default() -> Self {
        TightnessConfig {
            lambda_grid: vec![0.05, 0.1, 0.5],
            m_grid: vec![10, 100, 1000],
            alpha: 0.5,
            predictors: vec![0.2, 0.5, 0.8],
        }
    }
}

/// Defaults: two lognormal arms `(−1, 0.75)` and `(−1.2, 0.75)`, uniform base,
/// constant `eps = 0.05`, `m = 2000`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BanditConfig {
    pub arms: Vec<StockDistribution>,
    pub base: BasePolicy,
    pub eps: EpsSchedule,
    pub m: usize,
}

impl Default for BanditConfig {
    fn default() -> Self {
        BanditConfig {
            arms: vec![
                StockDistribution::LogNormal { mu: -1.0, sigma: 0.75 },
                StockDistribution::LogNormal { mu: -1.2, sigma: 0.75 },
            ],
            base: BasePolicy::Uniform,
            eps: EpsSchedule::Constant { eps: 0.05 },
            m: 2000,
        }
    }
}

impl BanditConfig {
    pub fn schedule(&self) -> PolicySchedule {
        PolicySchedule { base: self.base, eps: self.eps }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorRuleKind {
    Fixed,
    PreviousPosterior,
}

/// Default: `prior_rule = "previous_posterior"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OnlineConfig {
    pub prior_rule: PriorRuleKind,
}

impl Default for OnlineConfig {
    fn default() -> Self {
        OnlineConfig { prior_rule: PriorRuleKind::PreviousPosterior }
    }
}

/// Subcommands; each validates the fields it uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Coverage,
    Supermartingale,
    Tightness,
    Bandit,
    Online,
    Batch,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Coverage => "coverage",
            ExperimentKind::Supermartingale => "supermartingale",
            ExperimentKind::Tightness => "tightness",
            ExperimentKind::Bandit => "bandit",
            ExperimentKind::Online => "online",
            ExperimentKind::Batch => "batch",
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Unreadable { path: path.display().to_string(), reason: e.to_string() })?;
        Self::from_toml(&text)
    }

    /// Checks the fields `kind` relies on.
    pub fn validate(&self, kind: ExperimentKind) -> Result<(), ConfigError> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid("delta", format!("must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(invalid("lambda", format!("must be positive, got {}", self.lambda)));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be positive"));
        }
        if self.horizon == 0 {
            return Err(invalid("horizon", "must be positive"));
        }
        match kind {
            ExperimentKind::Coverage => {
                if self.trials < 100 {
                    return Err(invalid(
                        "trials",
                        format!("coverage experiments need at least 100 trials, got {}", self.trials),
                    ));
                }
                self.model.validate()?;
            }
            ExperimentKind::Supermartingale => {
                if self.trials < 100 {
                    return Err(invalid(
                        "trials",
                        format!("supermartingale checks need at least 100 trials, got {}", self.trials),
                    ));
                }
                if self.supermartingale.models.is_empty() {
                    return Err(invalid("supermartingale.models", "must be nonempty"));
                }
                if self.supermartingale.eta.is_empty() {
                    return Err(invalid("supermartingale.eta", "must be nonempty"));
                }
                for m in &self.supermartingale.models {
                    m.validate().map_err(|e| invalid("supermartingale.models", e.to_string()))?;
                }
                if self.supermartingale.eta.iter().any(|e| !e.is_finite()) {
                    return Err(invalid("supermartingale.eta", "entries must be finite"));
                }
            }
            ExperimentKind::Tightness => {
                let t = &self.tightness;
                if t.lambda_grid.is_empty() {
                    return Err(invalid("tightness.lambda_grid", "must be nonempty"));
                }
                if t.lambda_grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
                    return Err(invalid("tightness.lambda_grid", "entries must be positive"));
                }
                if t.m_grid.is_empty() {
                    return Err(invalid("tightness.m_grid", "must be nonempty"));
                }
                if t.m_grid.contains(&0) {
                    return Err(invalid("tightness.m_grid", "entries must be positive"));
                }
                if !(0.0..=1.0).contains(&t.alpha) {
                    return Err(invalid("tightness.alpha", "must lie in [0, 1]"));
                }
                if t.predictors.is_empty() || t.predictors.iter().any(|h| !(0.0..=1.0).contains(h)) {
                    return Err(invalid("tightness.predictors", "must be a nonempty list of values in [0, 1]"));
                }
            }
            ExperimentKind::Bandit => {
                let b = &self.bandit;
                if b.arms.len() < 2 {
                    return Err(invalid("bandit.arms", "needs at least two arms"));
                }
                for a in &b.arms {
                    a.validate().map_err(|e| invalid("bandit.arms", e.to_string()))?;
                }
                if b.m == 0 {
                    return Err(invalid("bandit.m", "must be positive"));
                }
                b.schedule().validate(b.arms.len()).map_err(|e| invalid("bandit.eps", e.to_string()))?;
            }
            ExperimentKind::Online | ExperimentKind::Batch => self.model.validate()?,
        }
        Ok(())
    }
}
