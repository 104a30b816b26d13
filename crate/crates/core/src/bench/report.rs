use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::feature_maps::FeatureMapFamily;
use crate::kernel::KernelMode;
use crate::metrics::{ClassMetrics, ConfusionMatrix};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub kernel_seconds: f64,
    pub train_predict_seconds: f64,
}

impl Timing {
    pub fn total_seconds(&self) -> f64 {
        self.kernel_seconds + self.train_predict_seconds
    }
}

/// One row of the feature-map comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub feature_map: String,
    pub family: FeatureMapFamily,
    pub repetitions: usize,
    pub angle_scale: f64,
    pub n_qubits: usize,
    pub kernel_mode: KernelMode,
    pub n_train: usize,
    pub n_test: usize,
    pub dropped_rows: usize,
    pub accuracy: f64,
    pub auroc: f64,
    pub positive_class: ClassMetrics,
    pub negative_class: ClassMetrics,
    pub confusion: ConfusionMatrix,
    pub support_vectors: usize,
    pub solver_converged: bool,
    pub timing: Timing,
}

impl ExperimentReport {
    /// Copy with the wall-clock fields zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> Self {
        Self {
            timing: Timing::default(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteFailure {
    pub feature_map: String,
    pub repetitions: usize,
    pub error: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub reports: Vec<ExperimentReport>,
    pub failures: Vec<SuiteFailure>,
}

impl SuiteReport {
    pub fn without_timings(&self) -> Self {
        Self {
            reports: self.reports.iter().map(|r| r.without_timings()).collect(),
            failures: self.failures.clone(),
        }
    }

    pub fn find(&self, family: FeatureMapFamily) -> Option<&ExperimentReport> {
        self.reports.iter().find(|r| r.family == family)
    }

    /// Fixed-width text table, one line per map plus one per failure.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<18} {:>4} {:>9} {:>7} {:>9} {:>9} {:>11} {:>9}",
            "Feature map", "Reps", "Accuracy", "AUROC", "F1(+)", "F1(-)", "Kernel (s)", "Total (s)"
        );
        let _ = writeln!(out, "{}", "-".repeat(83));
        for r in &self.reports {
            let _ = writeln!(
                out,
                "{:<18} {:>4} {:>9.4} {:>7.4} {:>9.4} {:>9.4} {:>11.3} {:>9.3}",
                r.feature_map,
                r.repetitions,
                r.accuracy,
                r.auroc,
                r.positive_class.f1,
                r.negative_class.f1,
                r.timing.kernel_seconds,
                r.timing.total_seconds()
            );
        }
        for f in &self.failures {
            let _ = writeln!(
                out,
                "{:<18} {:>4}  FAILED: {}",
                f.feature_map, f.repetitions, f.error
            );
        }
        out
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "feature_map",
            "family",
            "repetitions",
            "accuracy",
            "auroc",
            "precision_pos",
            "recall_pos",
            "f1_pos",
            "precision_neg",
            "recall_neg",
            "f1_neg",
            "tp",
            "fp",
            "tn",
            "fn",
            "kernel_seconds",
            "train_predict_seconds",
            "total_seconds",
        ])?;
        for r in &self.reports {
            wtr.write_record([
                r.feature_map.clone(),
                r.family.name().to_string(),
                r.repetitions.to_string(),
                r.accuracy.to_string(),
                r.auroc.to_string(),
                r.positive_class.precision.to_string(),
                r.positive_class.recall.to_string(),
                r.positive_class.f1.to_string(),
                r.negative_class.precision.to_string(),
                r.negative_class.recall.to_string(),
                r.negative_class.f1.to_string(),
                r.confusion.tp.to_string(),
                r.confusion.fp.to_string(),
                r.confusion.tn.to_string(),
                r.confusion.fn_.to_string(),
                r.timing.kernel_seconds.to_string(),
                r.timing.train_predict_seconds.to_string(),
                r.timing.total_seconds().to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Writes `report.json` and `report.csv` into `dir`, creating it if needed.
    pub fn write_files(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let json_path = dir.join("report.json");
        let csv_path = dir.join("report.csv");
        std::fs::write(&json_path, serde_json::to_string_pretty(self)? + "\n")?;
        self.write_csv(std::fs::File::create(&csv_path)?)?;
        Ok((json_path, csv_path))
    }
}
