//! Per-event settings loaded from TOML.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::ExtractionSettings;
use crate::geo::{BoundingBox, CandidateSettings};

/// Keys of `[paths]`.
pub mod roles {
    pub const LEXICON_DIR: &str = "lexicon_dir";
    pub const GAZETTEER: &str = "gazetteer";
    pub const GAZETTEER_CACHE: &str = "gazetteer_cache";
    pub const VECTORS_LOCAL: &str = "vectors_local";
    pub const VECTORS_CRISIS: &str = "vectors_pretrained_crisis";
    pub const VECTORS_GENERAL: &str = "vectors_pretrained_general";
    pub const VECTORS_PARAPHRASE: &str = "vectors_paraphrase";
    pub const ANNOTATED: &str = "annotated";
    pub const JUDGMENTS: &str = "judgments";
}

fn default_dedup() -> f64 {
    0.8
}
fn default_similarity() -> f64 {
    0.8
}
fn default_jw() -> f64 {
    0.75
}
fn default_distance() -> usize {
    4
}
fn default_window() -> usize {
    3
}
fn default_k() -> usize {
    5
}
fn default_weight() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventConfig {
    pub event_name: String,
    pub geo_threshold_km: f64,
    #[serde(default = "default_dedup")]
    pub dedup_threshold: f64,
    #[serde(default = "default_similarity")]
    pub similarity_threshold: f64,
    #[serde(default = "default_jw")]
    pub jw_threshold: f64,
    #[serde(default = "default_distance")]
    pub dependency_distance_max: usize,
    #[serde(default = "default_window")]
    pub quantity_window: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_weight")]
    pub resource_weight: f64,
    #[serde(default = "default_weight")]
    pub proximity_weight: f64,
    pub bounding_box: BoundingBox,
    #[serde(default)]
    pub paths: BTreeMap<String, PathBuf>,
    #[cfg(feature = "live")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub live_gazetteer: Option<crate::geo::LiveSettings>,
}

impl EventConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: EventConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a config file; relative paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in cfg.paths.values_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let fractions = [
            ("dedup_threshold", self.dedup_threshold),
            ("similarity_threshold", self.similarity_threshold),
            ("jw_threshold", self.jw_threshold),
        ];
        for (name, v) in fractions {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.geo_threshold_km.is_nan() || self.geo_threshold_km <= 0.0 {
            return Err(Error::Config("geo_threshold_km must be positive".into()));
        }
        let w = self.resource_weight + self.proximity_weight;
        if self.resource_weight < 0.0 || self.proximity_weight < 0.0 || (w - 1.0).abs() > 1e-9 {
            return Err(Error::Config(
                "resource_weight and proximity_weight must be non-negative and sum to 1".into(),
            ));
        }
        self.bounding_box.validate()
    }

    pub fn path(&self, role: &str) -> Option<&Path> {
        self.paths.get(role).map(PathBuf::as_path)
    }

    /// A path that must be configured and present on disk.
    pub fn require(&self, role: &str) -> Result<&Path> {
        let p = self
            .path(role)
            .ok_or_else(|| Error::Config(format!("paths.{role} is not set")))?;
        if !p.exists() {
            return Err(Error::Config(format!("paths.{role} does not exist: {}", p.display())));
        }
        Ok(p)
    }

    pub fn extraction_settings(&self) -> ExtractionSettings {
        ExtractionSettings {
            quantity_window: self.quantity_window,
            candidates: CandidateSettings {
                jw_threshold: self.jw_threshold,
                dependency_distance_max: self.dependency_distance_max,
            },
        }
    }
}
