use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use horohopf_core::classifier::{ClassifierParams, DiskAction, StreamSpec, TreeAction};
use horohopf_core::disk::{orbit_ball, preset, PresetName, SchottkyParams, DEFAULT_BALL_CAP};
use horohopf_core::ergodic::ActionSpec;
use horohopf_core::tree::{ReducedWord, StallingsGraph};

use crate::CliError;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn two() -> usize {
    2
}

fn ball_cap() -> usize {
    DEFAULT_BALL_CAP
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeConfig {
    #[serde(default = "two")]
    pub rank: usize,
    /// Subgroup generators as words; `a`, `b`, ... with inverses in upper case.
    #[serde(default)]
    pub generators: Vec<String>,
    /// Use the whole free group instead of `generators`.
    #[serde(default)]
    pub full_group: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskConfig {
    pub preset: PresetName,
    #[serde(default)]
    pub schottky: Option<SchottkyParams>,
    #[serde(default = "ball_cap")]
    pub ball_cap: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelConfig {
    Tree(TreeConfig),
    Disk(DiskConfig),
}

impl TreeConfig {
    pub fn graph(&self) -> Result<StallingsGraph, CliError> {
        if self.full_group {
            if !self.generators.is_empty() {
                return Err(CliError::Config("full_group excludes explicit generators".into()));
            }
            return Ok(StallingsGraph::full_group(self.rank)?);
        }
        let words = self
            .generators
            .iter()
            .map(|g| ReducedWord::parse(g, self.rank))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(StallingsGraph::fold(self.rank, &words)?)
    }
}

/// A model with its orbit enumerated up to some radius.
pub enum Model {
    Tree(TreeAction),
    Disk(DiskAction),
}

impl ModelConfig {
    pub fn build(&self, radius: f64) -> Result<Model, CliError> {
        match self {
            ModelConfig::Tree(t) => {
                if radius.fract() != 0.0 || radius < 0.0 {
                    return Err(CliError::Config(format!("tree radius {radius} is not a word length")));
                }
                Ok(Model::Tree(TreeAction::new(t.graph()?, radius as usize)?))
            }
            ModelConfig::Disk(d) => {
                let group = preset(d.preset, d.schottky.as_ref())?;
                Ok(Model::Disk(DiskAction::new(orbit_ball(&group, radius, d.ball_cap)?)))
            }
        }
    }

    pub fn stream(&self, cfg: &StreamConfig) -> StreamSpec {
        let base = match self {
            ModelConfig::Tree(t) => StreamSpec::tree_uniform(t.rank),
            ModelConfig::Disk(_) => StreamSpec::disk_visual(),
        };
        let mut s = match cfg.reweight_seed {
            Some(seed) => base.reweighted(seed),
            None => base,
        };
        if let Some(c) = cfg.declared_defect {
            s.defect = c;
        }
        s
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamConfig {
    /// Multiply the stream density by a bounded hashed factor.
    #[serde(default)]
    pub reweight_seed: Option<u64>,
    /// Overrides the defect the stream claims; the audit checks the claim.
    #[serde(default)]
    pub declared_defect: Option<f64>,
}

fn audit_pairs() -> usize {
    1000
}

fn audit_len() -> usize {
    12
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    #[serde(default = "audit_pairs")]
    pub pairs: usize,
    /// Longest group word in the tree audit.
    #[serde(default = "audit_len")]
    pub max_len: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            pairs: audit_pairs(),
            max_len: audit_len(),
        }
    }
}

/// A boundary point: a ray such as `"b(a)"` on the tree, an angle on the circle.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Angle(f64),
    Ray(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub stream: StreamConfig,
    #[serde(default)]
    pub params: ClassifierParams,
    /// Explicit points; when absent, `params.sample_count` points are sampled.
    #[serde(default)]
    pub points: Option<Vec<PointSpec>>,
    #[serde(default)]
    pub audit: AuditConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub stream: StreamConfig,
    #[serde(default)]
    pub params: ClassifierParams,
    #[serde(default)]
    pub audit: AuditConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub stream: StreamConfig,
    pub points: Vec<PointSpec>,
    pub radii: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedAction {
    pub name: String,
    pub action: ActionSpec,
}

fn lab_depth() -> usize {
    8
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErgodicLabConfig {
    /// Include the built-in battery of canonical actions.
    #[serde(default)]
    pub battery: bool,
    #[serde(default)]
    pub actions: Vec<NamedAction>,
    /// Stabilizer search radius and window `|pos| <= depth`.
    #[serde(default = "lab_depth")]
    pub depth: usize,
    /// Reweight every action by bounded hashed factors seeded with `seed`.
    #[serde(default)]
    pub reweight: bool,
    #[serde(default)]
    pub seed: u64,
}

fn delta_points() -> usize {
    30
}

fn delta_radius() -> f64 {
    6.0
}

fn delta_triples() -> usize {
    1000
}

fn delta_depth() -> usize {
    20
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaConfig {
    pub model: ModelConfig,
    /// Sample size for the four-point estimate.
    #[serde(default = "delta_points")]
    pub points: usize,
    /// Points are drawn within this distance of the basepoint.
    #[serde(default = "delta_radius")]
    pub radius: f64,
    #[serde(default = "delta_triples")]
    pub triples: usize,
    /// Approach depth of the finite-difference Busemann estimate.
    #[serde(default = "delta_depth")]
    pub depth: usize,
    #[serde(default)]
    pub seed: u64,
}

fn audit_radius() -> f64 {
    12.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditStreamConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub stream: StreamConfig,
    #[serde(default)]
    pub audit: AuditConfig,
    /// Orbit ball radius for disk models.
    #[serde(default = "audit_radius")]
    pub radius: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoldConfig {
    #[serde(default = "two")]
    pub rank: usize,
    pub generators: Vec<String>,
    /// Also list subgroup elements up to this length.
    #[serde(default)]
    pub ball_radius: Option<usize>,
}

/// Keeps the radii `<= max`.
pub fn cap_schedule(params: &mut ClassifierParams, max: f64) -> Result<(), CliError> {
    params.radius_schedule.retain(|&r| r <= max);
    if params.radius_schedule.len() < 2 {
        return Err(CliError::Config(format!(
            "--radius-max {max} leaves fewer than two radii in the schedule"
        )));
    }
    Ok(())
}
