//! Flat JSON experiment config.
//!
//! Common keys: `experiment`, `seed`, `replicas`, `output_dir`. Everything
//! else is experiment-specific and optional where a default is listed in the
//! README. Unknown keys are errors.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::distributions::CModel;
use crate::error::{Error, Result};
use crate::point_process::{standard_beta, PowerLawBox, UniformBox};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Growth,
    Compare,
    DistEq,
    PoissonGof,
    Accumulation,
    Fms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Uniform,
    PowerLaw,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub replicas: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub model: Option<ModelKind>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub horizon: Option<u64>,
    #[serde(default)]
    pub initial_sizes: Option<Vec<u64>>,
    #[serde(default)]
    pub checkpoints: Option<Vec<u64>>,
    #[serde(default)]
    pub baseline_c: Option<f64>,
    #[serde(default)]
    pub permutations: Option<usize>,
    #[serde(default)]
    pub scales: Option<Vec<u64>>,
    #[serde(default)]
    pub time_window: Option<[f64; 2]>,
    #[serde(default)]
    pub c_window: Option<[f64; 2]>,
    #[serde(default)]
    pub locations: Option<Vec<f64>>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub truncation: Option<u64>,
    #[serde(default)]
    pub level: Option<u64>,
}

pub(crate) fn config_error(key: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        message: message.into(),
    }
}

/// Pulls the offending key out of serde's "missing field `x`" style messages.
fn key_from_serde_message(msg: &str) -> String {
    msg.split('`').nth(1).unwrap_or("<document>").to_string()
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            config_error(key_from_serde_message(&msg), msg)
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error("<file>", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks every key the experiment uses and resolves defaults.
    pub fn plan(&self) -> Result<Plan> {
        if self.replicas < 2 {
            return Err(config_error("replicas", "need at least 2 replicas"));
        }
        let plan = match self.experiment {
            ExperimentKind::Growth => {
                let horizon = self.require_horizon()?;
                let initial_sizes = self.initial_sizes.clone().unwrap_or_else(|| vec![1]);
                if initial_sizes.is_empty() || initial_sizes.contains(&0) {
                    return Err(config_error("initial_sizes", "need a non-empty list of positive sizes"));
                }
                Plan::Growth(GrowthPlan {
                    model: self.model_or(ModelKind::Uniform)?,
                    horizon,
                    initial_sizes,
                    checkpoints: self.checkpoints_for(horizon)?,
                })
            }
            ExperimentKind::Compare => {
                let a = self.a.unwrap_or(0.01);
                let model = CModel::uniform(a).map_err(|e| config_error("a", e.to_string()))?;
                let baseline_c = self.baseline_c.unwrap_or(0.005);
                if !(0.0..=1.0).contains(&baseline_c) {
                    return Err(config_error("baseline_c", "must lie in [0, 1]"));
                }
                Plan::Compare(ComparePlan {
                    model,
                    baseline_c,
                    horizon: self.require_horizon()?,
                })
            }
            ExperimentKind::DistEq => {
                let permutations = self.permutations.unwrap_or(1000);
                if permutations < crate::stats::MIN_PERMUTATIONS {
                    return Err(config_error("permutations", "need at least 1000"));
                }
                Plan::DistEq(DistEqPlan {
                    model: self.model_or(ModelKind::Uniform)?,
                    horizon: self.require_horizon()?,
                    permutations,
                })
            }
            ExperimentKind::PoissonGof => Plan::PoissonGof(self.poisson_plan()?),
            ExperimentKind::Accumulation => {
                let model = self.model_or(ModelKind::Uniform)?;
                if !model.has_density() {
                    return Err(config_error("model", "needs a law with a density"));
                }
                let truncation = self.truncation.unwrap_or(100_000);
                let threshold = self.threshold.unwrap_or(0.1);
                if !(threshold > 0.0 && threshold < 1.0) {
                    return Err(config_error("threshold", "must lie in (0, 1)"));
                }
                let early = self.checkpoints.as_ref().and_then(|c| c.first().copied()).unwrap_or(1000);
                if early == 0 || early > truncation {
                    return Err(config_error("checkpoints", "first checkpoint must lie in [1, truncation]"));
                }
                Plan::Accumulation(AccumulationPlan {
                    model,
                    truncation,
                    threshold,
                    early_truncation: early,
                })
            }
            ExperimentKind::Fms => {
                let model = self.model_or(ModelKind::Constant)?;
                Plan::Fms(FmsPlan {
                    model,
                    horizon: self.require_horizon()?,
                    level: match self.level {
                        Some(0) => return Err(config_error("level", "must be positive")),
                        Some(l) => l,
                        None => 1,
                    },
                })
            }
        };
        Ok(plan)
    }

    fn require_horizon(&self) -> Result<u64> {
        self.horizon
            .ok_or_else(|| config_error("horizon", "required for this experiment"))
    }

    fn model_or(&self, default: ModelKind) -> Result<CModel> {
        let kind = self.model.unwrap_or(default);
        let model = match kind {
            ModelKind::Uniform => CModel::uniform(self.a.unwrap_or(1.0))
                .map_err(|e| config_error("a", e.to_string()))?,
            ModelKind::PowerLaw => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| config_error("alpha", "required for model power_law"))?;
                CModel::power_law(alpha).map_err(|e| config_error("alpha", e.to_string()))?
            }
            ModelKind::Constant => {
                let c = self
                    .c
                    .ok_or_else(|| config_error("c", "required for model constant"))?;
                CModel::constant(c).map_err(|e| config_error("c", e.to_string()))?
            }
        };
        Ok(model)
    }

    fn checkpoints_for(&self, horizon: u64) -> Result<Vec<u64>> {
        let mut points = match &self.checkpoints {
            Some(c) => {
                if c.iter().any(|&t| t > horizon) {
                    return Err(config_error("checkpoints", "must not exceed horizon"));
                }
                c.clone()
            }
            None => {
                let mut v: Vec<u64> = std::iter::successors(Some(1u64), |t| t.checked_mul(10))
                    .take_while(|&t| t < horizon)
                    .collect();
                v.push(horizon);
                v
            }
        };
        points.sort_unstable();
        points.dedup();
        Ok(points)
    }

    fn poisson_plan(&self) -> Result<PoissonPlan> {
        let scales = self.scales.clone().unwrap_or_else(|| vec![50, 200, 800]);
        if scales.is_empty() || scales.contains(&0) {
            return Err(config_error("scales", "need a non-empty list of positive scales"));
        }
        let [w, z] = self.time_window.unwrap_or([1.0, 2.0]);
        let kind = self.model.unwrap_or(ModelKind::Uniform);
        let boxes = match kind {
            ModelKind::Uniform => {
                if self.a.is_some_and(|a| a != 1.0) {
                    return Err(config_error("a", "box counts need C uniform on (0, 1)"));
                }
                let [lo, hi] = self.c_window.unwrap_or([1.0, 2.0]);
                let boxes = scales
                    .iter()
                    .map(|&l| {
                        UniformBox::new((w, z), (lo, hi), l)
                            .map_err(|e| config_error("c_window", e.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                BoxFamily::Uniform(boxes)
            }
            ModelKind::PowerLaw => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| config_error("alpha", "required for model power_law"))?;
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(config_error("alpha", "must lie in (0, 1)"));
                }
                let beta = self.beta.unwrap_or_else(|| standard_beta(alpha));
                let locations = self.locations.clone().unwrap_or_else(|| vec![1.0]);
                if locations.is_empty() {
                    return Err(config_error("locations", "need at least one location"));
                }
                let [b, d] = self.c_window.unwrap_or([0.0, 1.0]);
                let mut per_scale = Vec::with_capacity(scales.len());
                for &l in &scales {
                    let boxes = locations
                        .iter()
                        .map(|&loc| {
                            PowerLawBox::with_beta(loc, (w, z), (b, d), l, beta)
                                .map_err(|e| config_error("c_window", e.to_string()))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    per_scale.push(boxes);
                }
                BoxFamily::PowerLaw { alpha, per_scale }
            }
            ModelKind::Constant => {
                return Err(config_error("model", "poisson-gof needs uniform or power_law"))
            }
        };
        Ok(PoissonPlan { scales, boxes })
    }
}

#[derive(Debug, Clone)]
pub enum Plan {
    Growth(GrowthPlan),
    Compare(ComparePlan),
    DistEq(DistEqPlan),
    PoissonGof(PoissonPlan),
    Accumulation(AccumulationPlan),
    Fms(FmsPlan),
}

#[derive(Debug, Clone)]
pub struct GrowthPlan {
    pub model: CModel,
    pub horizon: u64,
    pub initial_sizes: Vec<u64>,
    pub checkpoints: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct ComparePlan {
    pub model: CModel,
    pub baseline_c: f64,
    pub horizon: u64,
}

#[derive(Debug, Clone)]
pub struct DistEqPlan {
    pub model: CModel,
    pub horizon: u64,
    pub permutations: usize,
}

#[derive(Debug, Clone)]
pub enum BoxFamily {
    Uniform(Vec<UniformBox>),
    /// One list of boxes (one per location) for each scale.
    PowerLaw {
        alpha: f64,
        per_scale: Vec<Vec<PowerLawBox>>,
    },
}

#[derive(Debug, Clone)]
pub struct PoissonPlan {
    pub scales: Vec<u64>,
    pub boxes: BoxFamily,
}

#[derive(Debug, Clone)]
pub struct AccumulationPlan {
    pub model: CModel,
    pub truncation: u64,
    pub threshold: f64,
    pub early_truncation: u64,
}

#[derive(Debug, Clone)]
pub struct FmsPlan {
    pub model: CModel,
    pub horizon: u64,
    pub level: u64,
}
