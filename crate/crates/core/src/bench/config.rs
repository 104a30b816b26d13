use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::feature_maps::{FeatureMapFamily, FeatureMapSpec};
use crate::kernel::KernelMode;
use crate::svm::SmoParams;

fn default_feature_map() -> FeatureMapSpec {
    FeatureMapSpec::new(FeatureMapFamily::AngleX, 1)
}
fn default_c() -> f64 {
    1.0
}
fn default_test_fraction() -> f64 {
    0.2
}
fn default_seed() -> u64 {
    42
}
fn default_pca_components() -> usize {
    5
}
fn default_tol() -> f64 {
    SmoParams::default().tol
}
fn default_max_passes() -> usize {
    SmoParams::default().max_passes
}

/// Accepts `"4"` or `4` for label values.
fn string_or_number<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        S(String),
        I(i64),
        F(f64),
    }
    Ok(match Raw::deserialize(d)? {
        Raw::S(s) => s,
        Raw::I(i) => i.to_string(),
        Raw::F(f) => f.to_string(),
    })
}

/// Inputs of one benchmark run. Field names double as the JSON config keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset_path: PathBuf,
    pub label_column: String,
    #[serde(deserialize_with = "string_or_number")]
    pub positive_label: String,
    #[serde(default)]
    pub categorical_columns: Vec<String>,
    /// Columns excluded from the features entirely (e.g. sample identifiers).
    #[serde(default)]
    pub ignore_columns: Vec<String>,
    #[serde(default = "default_feature_map")]
    pub feature_map: FeatureMapSpec,
    #[serde(rename = "C", default = "default_c")]
    pub c: f64,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub kernel_mode: KernelMode,
    #[serde(default = "default_pca_components")]
    pub pca_components: usize,
    /// Fit the scalers and PCA on every row before splitting instead of on
    /// the training partition only.
    #[serde(default)]
    pub fit_on_full_data: bool,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_passes")]
    pub max_passes: usize,
}

impl ExperimentConfig {
    pub fn new(
        dataset_path: impl Into<PathBuf>,
        label_column: impl Into<String>,
        positive_label: impl Into<String>,
    ) -> Self {
        Self {
            dataset_path: dataset_path.into(),
            label_column: label_column.into(),
            positive_label: positive_label.into(),
            categorical_columns: Vec::new(),
            ignore_columns: Vec::new(),
            feature_map: default_feature_map(),
            c: default_c(),
            test_fraction: default_test_fraction(),
            seed: default_seed(),
            kernel_mode: KernelMode::Exact,
            pca_components: default_pca_components(),
            fit_on_full_data: false,
            tol: default_tol(),
            max_passes: default_max_passes(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a JSON config; a relative `dataset_path` is resolved against the
    /// config file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Data {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut config = Self::from_json(&text).map_err(|e| Error::Data {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if config.dataset_path.is_relative() {
            if let Some(dir) = path.parent() {
                config.dataset_path = dir.join(&config.dataset_path);
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.feature_map.validate()?;
        if self.pca_components == 0 {
            return Err(Error::Config("pca_components must be at least 1".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test_fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config(format!("C must be positive, got {}", self.c)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if let KernelMode::Sampled { shots: 0 } = self.kernel_mode {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        Ok(())
    }

    pub fn smo_params(&self) -> SmoParams {
        SmoParams {
            c: self.c,
            tol: self.tol,
            max_passes: self.max_passes,
            seed: self.seed,
        }
    }
}
