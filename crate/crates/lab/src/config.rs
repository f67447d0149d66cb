//! Experiment configuration.

use crate::error::{LabError, LabResult};
use anisodrop::anisotropy::{build_wulff, SurfaceTension};
use anisodrop::energy::NonlocalTerm;
use anisodrop::nonlocal::{EnergyParams, QuadratureSpec};
use anisodrop::optimize::{ShapeFamily, SweepVariable, TruncationOptions};
use anisodrop::shapes::{Shape, StarDomain};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

pub const DEFAULT_SEED: u64 = 20240917;

/// A shape given directly or as a dilated Wulff shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShapeInput {
    Wulff {
        wulff: SurfaceTension,
        #[serde(default = "default_wulff_samples")]
        samples: usize,
        #[serde(default = "one")]
        radius: f64,
    },
    Shape(Shape),
}

fn default_wulff_samples() -> usize {
    256
}

fn one() -> f64 {
    1.0
}

impl ShapeInput {
    pub fn build(&self) -> LabResult<Shape> {
        match self {
            ShapeInput::Shape(s) => Ok(s.clone()),
            ShapeInput::Wulff { wulff, samples, radius } => {
                if !(*radius > 0.0) {
                    return Err(LabError::Config("wulff radius must be positive".into()));
                }
                if let Some(v) = wulff.wulff_polygon() {
                    return Ok(Shape::polygon(v.to_vec())?.dilate(*radius));
                }
                let k = build_wulff(wulff, *samples)?;
                Ok(Shape::Star(StarDomain::wulff(k)?.with_transform(*radius, [0.0, 0.0])))
            }
        }
    }
}

/// A labelled shape with a nonlocal exponent and acceptance bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeCheck {
    pub label: String,
    pub shape: ShapeInput,
    pub alpha: f64,
    #[serde(default)]
    pub min_residual: Option<f64>,
    #[serde(default)]
    pub max_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingCase {
    pub n: usize,
    pub alpha: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FugledeSpec {
    pub modes: Vec<u32>,
    pub amplitudes: Vec<f64>,
    #[serde(default = "default_wulff_samples")]
    pub samples: usize,
    /// Resolution factor of the reference run.
    #[serde(default = "default_refine")]
    pub refine: usize,
}

fn default_refine() -> usize {
    4
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    #[serde(default)]
    pub options: TruncationOptions,
    #[serde(default)]
    pub expect_certified: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default = "yes")]
    pub json: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: None, csv: true, json: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<String>,
    #[serde(default = "euclidean_plane")]
    pub tension: SurfaceTension,
    #[serde(default = "default_params")]
    pub params: EnergyParams,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub term: Option<NonlocalTerm>,
    /// Energies requested by the `energy` subcommand.
    #[serde(default)]
    pub terms: Vec<NonlocalTerm>,
    #[serde(default)]
    pub family: Option<ShapeFamily>,
    #[serde(default)]
    pub start: Option<Vec<f64>>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub shape: Option<ShapeInput>,
    #[serde(default)]
    pub checks: Vec<ShapeCheck>,
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
    #[serde(default)]
    pub suites: Vec<String>,
    /// Random cases per verify suite.
    #[serde(default)]
    pub cases: Option<usize>,
    #[serde(default)]
    pub scaling_cases: Vec<ScalingCase>,
    #[serde(default)]
    pub n_max: Option<u64>,
    #[serde(default)]
    pub fuglede: Option<FugledeSpec>,
    #[serde(default)]
    pub truncation: Option<TruncationConfig>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn euclidean_plane() -> SurfaceTension {
    SurfaceTension::euclidean(2).expect("plane")
}

fn default_params() -> EnergyParams {
    EnergyParams::with_epsilon(2, 1.0, 0.0).expect("defaults")
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config")
    }
}

/// Overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub mc_samples: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str, origin: &str) -> LabResult<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            LabError::Config(format!("{origin}: line {}, column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> LabResult<()> {
        self.params.validate()?;
        self.quadrature.validate()?;
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(LabError::Config("sweep.values is empty".into()));
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, o: &Overrides) -> LabResult<()> {
        if let Some(s) = o.seed {
            self.seed = Some(s);
            self.quadrature.seed = s;
        }
        if let Some(t) = o.tol {
            self.quadrature.rel_tol = t;
        }
        if let Some(m) = o.mc_samples {
            self.quadrature.mc_samples = m;
        }
        self.validate()
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn threshold(&self, key: &str, default: f64) -> f64 {
        self.thresholds.get(key).copied().unwrap_or(default)
    }

    /// Hex SHA-256 of the canonical (sorted-key) JSON form.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }
}

/// JSON schema of [`ExperimentConfig`].
pub const SCHEMA: &str = include_str!("../configs/schema.json");

/// Shipped configs, keyed by file stem.
pub const BUILTIN: &[(&str, &str)] = &[
    ("crystal-min", include_str!("../configs/crystal-min.json")),
    ("crystal-scan", include_str!("../configs/crystal-scan.json")),
    ("wulff-noncritical", include_str!("../configs/wulff-noncritical.json")),
    ("wulff-noncritical-euclidean", include_str!("../configs/wulff-noncritical-euclidean.json")),
    ("riesz-constancy", include_str!("../configs/riesz-constancy.json")),
    ("dual-potential-min", include_str!("../configs/dual-potential-min.json")),
    ("nonexistence-slice", include_str!("../configs/nonexistence-slice.json")),
    ("energy-scaling", include_str!("../configs/energy-scaling.json")),
    ("fuglede", include_str!("../configs/fuglede.json")),
    ("truncation", include_str!("../configs/truncation.json")),
    ("box-min", include_str!("../configs/box-min.json")),
    ("verify", include_str!("../configs/verify.json")),
];

pub fn builtin(name: &str) -> Option<LabResult<ExperimentConfig>> {
    BUILTIN.iter().find(|(n, _)| *n == name).map(|(n, t)| ExperimentConfig::from_json(t, &format!("builtin {n}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        for (name, _) in BUILTIN {
            builtin(name).unwrap().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn unknown_field_reports_position() {
        let e = ExperimentConfig::from_json("{\n  \"experimnt\": \"x\"\n}", "t").unwrap_err();
        let m = e.to_string();
        assert!(m.contains("line 2") && m.contains("experimnt"), "{m}");
    }

    #[test]
    fn schema_lists_every_field() {
        let schema: serde_json::Value = serde_json::from_str(SCHEMA).unwrap();
        let props = schema["properties"].as_object().unwrap();
        let cfg = serde_json::to_value(ExperimentConfig::default()).unwrap();
        let fields = cfg.as_object().unwrap();
        assert_eq!(props.keys().collect::<Vec<_>>(), fields.keys().collect::<Vec<_>>());
        for (name, text) in BUILTIN {
            let v: serde_json::Value = serde_json::from_str(text).unwrap();
            for k in v.as_object().unwrap().keys() {
                assert!(props.contains_key(k), "{name}: {k}");
            }
        }
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = Some(1);
        assert_ne!(a.hash(), b.hash());
    }
}
