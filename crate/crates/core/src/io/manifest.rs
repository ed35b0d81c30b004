//! JSON run manifest.
//!
//! ```json
//! {
//!   "walk": { "sites": 8, "steps": 20, "injection_a": 4, "injection_b": 5,
//!             "first_layer_parity": "FullPairs", "embed_dim": 20 },
//!   "noise": { "kind": "Dynamic", "preset": "Strong", "sorted": false },
//!   "ensemble": { "configurations": 100, "seed": 7 },
//!   "output": { "directory": "out", "formats": ["csv"] }
//! }
//! ```
//!
//! Only `walk.sites` and `walk.steps` are required. Unknown keys are
//! rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_to_string, IoError};
use crate::noise::{NoiseKind, NoisePreset, NoiseSpec};
use crate::walk::{LayerParity, PhaseArm, WalkConfig, DEFAULT_EDGE_LEAK_THRESHOLD};

pub const DEFAULT_CONFIGURATIONS: usize = 100;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    walk: RawWalk,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise: Option<RawNoise>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ensemble: Option<RawEnsemble>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<RawOutput>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWalk {
    sites: i64,
    steps: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    injection_a: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    injection_b: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    first_layer_parity: Option<LayerParity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase_arm: Option<PhaseArm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    embed_dim: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edge_leak_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unbounded: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    kind: NoiseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preset: Option<NoisePreset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interval: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sorted: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    configurations: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    directory: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    formats: Option<Vec<String>>,
}

/// A validated manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub walk: WalkConfig,
    pub noise: NoiseSpec,
    pub configurations: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub formats: Vec<String>,
}

/// One-based line of the first occurrence of `"key"`, or 1.
fn key_line(text: &str, key: &str) -> usize {
    let quoted = format!("\"{key}\"");
    text.lines()
        .position(|l| l.contains(&quoted))
        .map_or(1, |i| i + 1)
}

impl RunManifest {
    pub fn from_path(path: &Path) -> Result<Self, IoError> {
        let text = read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses and validates manifest text; `label` names the source in errors.
    pub fn parse(text: &str, label: &str) -> Result<Self, IoError> {
        let raw: RawManifest = serde_json::from_str(text)
            .map_err(|e| IoError::schema(label, e.line(), e.to_string()))?;
        let err = |key: &str, message: String| IoError::schema(label, key_line(text, key), message);

        let w = &raw.walk;
        if w.sites < 2 || w.sites % 2 != 0 {
            return Err(err(
                "sites",
                format!("walk.sites must be an even integer >= 2, got {}", w.sites),
            ));
        }
        if w.steps < 0 {
            return Err(err(
                "steps",
                format!("walk.steps must be a non-negative integer, got {}", w.steps),
            ));
        }
        let sites = w.sites as usize;
        let mut walk = if w.unbounded.unwrap_or(false) {
            WalkConfig::unbounded(sites, w.steps as usize)
        } else {
            WalkConfig::new(sites, w.steps as usize)
        }
        .map_err(|e| err("sites", e.to_string()))?;

        for (key, value) in [("injection_a", w.injection_a), ("injection_b", w.injection_b)] {
            if let Some(v) = value {
                if v < 1 || v > w.sites {
                    return Err(err(
                        key,
                        format!("walk.{key} must be a port in 1..={sites}, got {v}"),
                    ));
                }
            }
        }
        walk.injection_a = w.injection_a.map_or(walk.injection_a, |v| v as usize);
        walk.injection_b = w.injection_b.map_or(walk.injection_b, |v| v as usize);
        if let Some(p) = w.first_layer_parity {
            walk.first_layer_parity = p;
        }
        if let Some(a) = w.phase_arm {
            walk.phase_arm = a;
        }
        if let Some(d) = w.embed_dim {
            if d < w.sites {
                return Err(err(
                    "embed_dim",
                    format!("walk.embed_dim must be >= walk.sites ({sites}), got {d}"),
                ));
            }
            walk.embed_dim = d as usize;
        }
        let threshold = w.edge_leak_threshold.unwrap_or(DEFAULT_EDGE_LEAK_THRESHOLD);
        if !(0.0..=1.0).contains(&threshold) {
            return Err(err(
                "edge_leak_threshold",
                format!("walk.edge_leak_threshold must be a probability, got {threshold}"),
            ));
        }
        walk.edge_leak_threshold = threshold;

        let noise = match &raw.noise {
            None => NoiseSpec::none(),
            Some(n) => {
                let sorted = n.sorted.unwrap_or(false);
                match (n.kind, n.preset, n.interval) {
                    (_, Some(_), Some(_)) => {
                        return Err(err(
                            "interval",
                            "noise.preset and noise.interval are mutually exclusive".into(),
                        ))
                    }
                    (NoiseKind::None, None, None) => NoiseSpec::none(),
                    (NoiseKind::None, _, _) => {
                        return Err(err(
                            "kind",
                            "noise.kind None takes no preset or interval".into(),
                        ))
                    }
                    (NoiseKind::Dynamic, Some(p), None) => NoiseSpec::preset(p, sorted),
                    (NoiseKind::Dynamic, None, Some([lo, hi])) => {
                        if lo > hi {
                            return Err(err(
                                "interval",
                                format!("noise.interval is inverted: p_min {lo} > p_max {hi}"),
                            ));
                        }
                        NoiseSpec::dynamic(lo, hi, sorted)
                            .map_err(|e| err("interval", e.to_string()))?
                    }
                    (NoiseKind::Dynamic, None, None) => {
                        return Err(err(
                            "kind",
                            "noise.kind Dynamic needs a preset or an interval".into(),
                        ))
                    }
                }
            }
        };

        let (configurations, seed) = match &raw.ensemble {
            None => (DEFAULT_CONFIGURATIONS, DEFAULT_SEED),
            Some(e) => {
                let r = e.configurations.unwrap_or(DEFAULT_CONFIGURATIONS as i64);
                if r < 1 {
                    return Err(err(
                        "configurations",
                        format!("ensemble.configurations must be >= 1, got {r}"),
                    ));
                }
                (r as usize, e.seed.unwrap_or(DEFAULT_SEED))
            }
        };

        let (output_dir, formats) = match &raw.output {
            None => (PathBuf::from("out"), vec!["csv".to_string()]),
            Some(o) => {
                let formats = o.formats.clone().unwrap_or_else(|| vec!["csv".into()]);
                if let Some(bad) = formats.iter().find(|f| f.as_str() != "csv") {
                    return Err(err(
                        "formats",
                        format!("output.formats supports only \"csv\", got \"{bad}\""),
                    ));
                }
                (
                    PathBuf::from(o.directory.clone().unwrap_or_else(|| "out".into())),
                    formats,
                )
            }
        };

        Ok(RunManifest {
            walk,
            noise,
            configurations,
            seed,
            output_dir,
            formats,
        })
    }

    /// Fully resolved manifest as pretty JSON, suitable for reparsing.
    pub fn to_json(&self) -> String {
        let noise = match self.noise.kind {
            NoiseKind::None => RawNoise {
                kind: NoiseKind::None,
                preset: None,
                interval: None,
                sorted: None,
            },
            NoiseKind::Dynamic => RawNoise {
                kind: NoiseKind::Dynamic,
                preset: None,
                interval: Some([self.noise.p_min, self.noise.p_max]),
                sorted: Some(self.noise.sorted),
            },
        };
        let raw = RawManifest {
            walk: RawWalk {
                sites: self.walk.sites as i64,
                steps: self.walk.steps as i64,
                injection_a: Some(self.walk.injection_a as i64),
                injection_b: Some(self.walk.injection_b as i64),
                first_layer_parity: Some(self.walk.first_layer_parity),
                phase_arm: Some(self.walk.phase_arm),
                embed_dim: Some(self.walk.embed_dim as i64),
                edge_leak_threshold: Some(self.walk.edge_leak_threshold),
                unbounded: Some(self.walk.unbounded),
            },
            noise: Some(noise),
            ensemble: Some(RawEnsemble {
                configurations: Some(self.configurations as i64),
                seed: Some(self.seed),
            }),
            output: Some(RawOutput {
                directory: Some(self.output_dir.display().to_string()),
                formats: Some(self.formats.clone()),
            }),
        };
        let mut text = serde_json::to_string_pretty(&raw).expect("manifest serializes");
        text.push('\n');
        text
    }
}
