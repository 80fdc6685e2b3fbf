//! Run configuration, read from a TOML file.
//!
//! ```toml
//! seed = 7                       # required when [sample] is present
//!
//! [model]
//! kind = "affine"                # affine | cotangent | pair
//! n = 2                          # cotangent only
//! preset = "hyperkahler"         # pair only
//!
//! [potential]
//! catalog = "split"              # quadratic | split | dilog
//! alpha = 1.0                    # split: coefficient of |q1|^2
//! profile = "quadratic"          # split: quadratic | quartic | dilog
//! c = 2.0                        # dilog: completeness constant
//! # or: expr = "a * |q1|^2 + t * |q2|^2", params = { a = 0.5 }
//!
//! [grid]
//! coords = [{ kind = "polar", r = [0.0, 1.0], r_count = 9, theta_count = 9 }, ...]
//!
//! [[rays]]
//! origin = [[0.0, 0.0], [0.0, 0.0]]
//! direction = [[0.0, 0.0], [1.0, 0.0]]
//! r_max = 1.5
//! samples = 31
//!
//! [sample]
//! count = 1000
//! radius = 0.9
//!
//! [tolerances]                   # all optional
//! star = 1e-8
//! flow_star = 1e-5
//! metric = 1e-8
//! pipeline = 1e-9
//! require_positive = false
//! max_escaped_fraction = 0.0
//!
//! [flow]
//! base = "model"                 # model | zero
//! scale = -0.5                   # multiplies the potential
//! integrator = { step_count = 100, tolerance = 1e-7, jacobian_transport = true }
//!
//! [output]
//! dir = "out"
//! stem = "report"
//!
//! [golden]
//! path = "golden/example.json"
//! command = "verify"
//! tolerance = 1e-12
//! fields = { min_eig = 1e-10 }
//! ```

use chart_core::{GridSpec, Ray};
use flow::IntegratorConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub model: ModelConfig,
    #[serde(default)]
    pub potential: Option<PotentialConfig>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub rays: Vec<Ray>,
    #[serde(default)]
    pub sample: Option<SampleConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub golden: Option<GoldenConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKindConfig {
    Affine,
    Cotangent,
    Pair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKindConfig,
    pub n: Option<usize>,
    pub preset: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CatalogName {
    Quadratic,
    Split,
    Dilog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileName {
    Quadratic,
    Quartic,
    Dilog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub catalog: Option<CatalogName>,
    pub alpha: Option<f64>,
    pub profile: Option<ProfileName>,
    pub c: Option<f64>,
    pub expr: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub count: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub star: f64,
    pub flow_star: f64,
    pub metric: f64,
    pub pipeline: f64,
    pub require_positive: bool,
    pub max_escaped_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { star: 1e-8, flow_star: 1e-5, metric: 1e-8, pipeline: 1e-9, require_positive: false, max_escaped_fraction: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowBase {
    Model,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowConfig {
    pub base: FlowBase,
    pub scale: f64,
    pub integrator: IntegratorConfig,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { base: FlowBase::Model, scale: 1.0, integrator: IntegratorConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub stem: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), stem: "report".into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GoldenCommand {
    Verify,
    Flow,
    Scan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenConfig {
    pub path: PathBuf,
    pub command: GoldenCommand,
    #[serde(default = "default_golden_tol")]
    pub tolerance: f64,
    #[serde(default)]
    pub fields: BTreeMap<String, f64>,
}

fn default_golden_tol() -> f64 {
    1e-12
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::parse_with_seed(text, None)
    }

    /// Parse, letting `seed` replace the config seed before validation.
    pub fn parse_with_seed(text: &str, seed: Option<u64>) -> Result<Self, ConfigError> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.seed = seed.or(cfg.seed);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: &str| Err(ConfigError(m.to_string()));
        if self.sample.is_some() && self.seed.is_none() {
            return err("seed is required when [sample] is present");
        }
        if let Some(s) = &self.sample {
            if !(s.radius > 0.0 && s.radius.is_finite()) {
                return err("sample.radius must be positive");
            }
        }
        match self.model.kind {
            ModelKindConfig::Cotangent if self.model.n.is_none() => return err("model.n is required for the cotangent model"),
            ModelKindConfig::Pair if self.model.preset.as_deref() != Some("hyperkahler") => {
                return err("model.preset must be \"hyperkahler\" for the pair model")
            }
            ModelKindConfig::Affine if self.model.n.is_some_and(|n| n != 2) => return err("the affine model has n = 2"),
            _ => {}
        }
        if let Some(p) = &self.potential {
            if p.catalog.is_some() == p.expr.is_some() {
                return err("potential needs exactly one of catalog and expr");
            }
        }
        if let Some(g) = &self.grid {
            g.validate().map_err(|e| ConfigError(format!("grid: {e}")))?;
        }
        for r in &self.rays {
            r.validate().map_err(|e| ConfigError(format!("ray: {e}")))?;
        }
        self.flow.integrator.validate().map_err(|e| ConfigError(format!("flow.integrator: {e}")))?;
        Ok(())
    }
}
