use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Everything a run depends on. Loaded from TOML, overridden by flags, then
/// resolved so that every default actually used is written out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<String>,
    pub divisor: Option<String>,
    pub point: Option<String>,
    pub ample: Option<String>,
    pub versus: Option<String>,
    pub versus_point: Option<String>,
    pub exclude: Vec<String>,
    /// Coordinate bound, or box radius on the elliptic model.
    pub bound: Option<u64>,
    pub windows: usize,
    pub min_threshold: f64,
    pub height_bound: Option<f64>,
    pub tol: Option<f64>,
    pub curve: Option<PathBuf>,
    pub map: Option<String>,
    pub target_ample: Option<String>,
    pub noise: f64,
    pub count_only: bool,
    pub seedless: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub emit_plot_data: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: None,
            divisor: None,
            point: None,
            ample: None,
            versus: None,
            versus_point: None,
            exclude: Vec::new(),
            bound: None,
            windows: 8,
            min_threshold: 1.0,
            height_bound: None,
            tol: None,
            curve: None,
            map: None,
            target_ample: None,
            noise: 0.0,
            count_only: false,
            seedless: true,
            format: Format::Json,
            out: None,
            emit_plot_data: None,
        }
    }
}

pub const DEFAULT_TOL: f64 = 0.1;
pub const DEFAULT_CANONICAL_TOL: f64 = 1e-8;
pub const DEFAULT_BOUND: u64 = 200;
pub const DEFAULT_RADIUS: u64 = 12;

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid run config")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("serializing run config")
    }

    /// The model a run uses: explicit, else implied by a curve file or map.
    pub fn model_name(&self) -> Option<String> {
        if let Some(m) = &self.model {
            return Some(m.clone());
        }
        if self.curve.is_some() {
            return Some("elliptic".into());
        }
        match self.map.as_deref() {
            Some("segre" | "proj1") => Some("p1xp1".into()),
            Some("blowdown") => Some("blowup_p2".into()),
            _ => None,
        }
    }

    /// Fills every default that depends on the model or command.
    pub fn resolve(mut self, command: &str) -> Result<Self> {
        if self.windows < 2 {
            bail!("--windows must be at least 2, got {}", self.windows);
        }
        if command == "canonical" {
            if self.curve.is_none() {
                bail!("canonical needs --curve");
            }
            self.model = Some("elliptic".into());
            self.tol.get_or_insert(DEFAULT_CANONICAL_TOL);
            return Ok(self);
        }
        let model = self
            .model_name()
            .with_context(|| format!("{command} needs --model (or --curve)"))?;
        let elliptic = model == "elliptic";
        if elliptic && self.curve.is_none() {
            bail!("the elliptic model needs --curve");
        }
        self.model = Some(model.clone());
        self.bound
            .get_or_insert(if elliptic { DEFAULT_RADIUS } else { DEFAULT_BOUND });
        if command != "enumerate" {
            self.tol.get_or_insert(DEFAULT_TOL);
            if self.ample.is_none() {
                self.ample = Some(default_ample(&model).to_string());
            }
        }
        if command == "mu" {
            if self.map.is_none() {
                bail!("mu needs --map");
            }
            self.target_ample.get_or_insert_with(|| "1".into());
        }
        Ok(self)
    }
}

pub fn default_ample(model: &str) -> &'static str {
    match model {
        "p1xp1" => "1,1",
        "blowup_p2" => "3,-1",
        "elliptic" => "1,O",
        _ => "1",
    }
}
