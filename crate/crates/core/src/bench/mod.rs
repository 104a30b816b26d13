//! End-to-end benchmark: load -> split -> fit preprocessing on the training
//! rows -> kernels -> SMO -> metrics, for one feature map or a whole suite.

mod config;
mod data;
mod report;

use std::time::Instant;

pub use config::ExperimentConfig;
pub use data::{load_csv, LoadedDataset, MISSING_MARKERS};
pub use report::{ExperimentReport, SuiteFailure, SuiteReport, Timing};

use crate::error::{Error, Result};
use crate::feature_maps::{required_qubits, FeatureMapSpec};
use crate::kernel::{kernel_matrix_with_mode, KernelMatrix, KernelMode};
use crate::metrics::{auroc, confusion, summary};
use crate::preprocess::{stratified_split_indices, Pipeline};
use crate::svm::{decision_values, train_smo, LabeledDataset, SvmModel};

/// Offset mixed into the seed for the test-vs-train kernel in sampled mode so
/// its draws are independent of the training Gram matrix.
const CROSS_KERNEL_SEED_OFFSET: u64 = 0x5EED_C0DE;

/// Split and transformed features, shared by every map of a suite.
#[derive(Clone, Debug)]
pub struct PreparedData {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    pub pipeline: Pipeline,
    pub total_rows: usize,
    pub dropped_rows: usize,
}

/// Splits `raw` and fits the preprocessing chain (on the training rows unless
/// `config.fit_on_full_data`). Labels never reach the fitted transforms.
pub fn prepare_dataset(
    raw: &LabeledDataset,
    config: &ExperimentConfig,
) -> Result<(SplitData, Pipeline)> {
    let split = stratified_split_indices(&raw.labels, config.test_fraction, config.seed)?;
    let train_raw = raw.subset(&split.train);
    let test_raw = raw.subset(&split.test);
    let pipeline = if config.fit_on_full_data {
        Pipeline::fit(&raw.features, config.pca_components)?
    } else {
        Pipeline::fit(&train_raw.features, config.pca_components)?
    };
    let train = LabeledDataset::new(pipeline.transform(&train_raw.features)?, train_raw.labels)?;
    let test = LabeledDataset::new(pipeline.transform(&test_raw.features)?, test_raw.labels)?;
    Ok((SplitData { train, test }, pipeline))
}

#[derive(Clone, Debug)]
pub struct SplitData {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
}

pub fn prepare(config: &ExperimentConfig) -> Result<PreparedData> {
    config.validate()?;
    let loaded = load_csv(
        &config.dataset_path,
        &config.label_column,
        &config.positive_label,
        &config.categorical_columns,
        &config.ignore_columns,
    )?;
    let (split, pipeline) = prepare_dataset(&loaded.dataset, config)?;
    Ok(PreparedData {
        train: split.train,
        test: split.test,
        pipeline,
        total_rows: loaded.total_rows,
        dropped_rows: loaded.dropped_rows,
    })
}

/// Training Gram matrix and test-vs-train cross matrix.
#[derive(Clone, Debug)]
pub struct KernelPair {
    pub train: KernelMatrix,
    pub test: KernelMatrix,
}

pub fn build_kernels(
    spec: &FeatureMapSpec,
    train: &[Vec<f64>],
    test: &[Vec<f64>],
    mode: KernelMode,
    seed: u64,
) -> Result<KernelPair> {
    Ok(KernelPair {
        train: kernel_matrix_with_mode(spec, train, None, mode, seed)?,
        test: kernel_matrix_with_mode(
            spec,
            test,
            Some(train),
            mode,
            seed.wrapping_add(CROSS_KERNEL_SEED_OFFSET),
        )?,
    })
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub report: ExperimentReport,
    pub kernels: KernelPair,
    pub model: SvmModel,
}

/// Runs one feature map on already prepared data.
pub fn evaluate(
    prepared: &PreparedData,
    spec: &FeatureMapSpec,
    config: &ExperimentConfig,
) -> Result<Evaluation> {
    spec.validate()?;
    let started = Instant::now();
    let kernels = build_kernels(
        spec,
        &prepared.train.features,
        &prepared.test.features,
        config.kernel_mode,
        config.seed,
    )?;
    let kernel_seconds = started.elapsed().as_secs_f64();

    let started = Instant::now();
    let model = train_smo(&kernels.train, &prepared.train.labels, &config.smo_params())?;
    let scores = decision_values(&model, &kernels.test)?;
    let train_predict_seconds = started.elapsed().as_secs_f64();

    let predicted: Vec<_> = scores
        .iter()
        .map(|&v| crate::svm::Label::from_decision(v))
        .collect();
    let cm = confusion(&prepared.test.labels, &predicted)?;
    let s = summary(&cm)?;
    let area = auroc(&prepared.test.labels, &scores)?;

    let report = ExperimentReport {
        feature_map: spec.label().to_string(),
        family: spec.family,
        repetitions: spec.repetitions,
        angle_scale: spec.angle_scale,
        n_qubits: required_qubits(spec, prepared.train.dim()),
        kernel_mode: config.kernel_mode,
        n_train: prepared.train.len(),
        n_test: prepared.test.len(),
        dropped_rows: prepared.dropped_rows,
        accuracy: s.accuracy,
        auroc: area,
        positive_class: s.positive,
        negative_class: s.negative,
        confusion: cm,
        support_vectors: model.support_indices.len(),
        solver_converged: model.converged,
        timing: Timing {
            kernel_seconds,
            train_predict_seconds,
        },
    };
    Ok(Evaluation {
        report,
        kernels,
        model,
    })
}

/// Single experiment with the map from `config.feature_map`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let prepared = prepare(config)?;
    with_context(
        evaluate(&prepared, &config.feature_map, config),
        &config.feature_map,
    )
    .map(|e| e.report)
}

fn with_context<T>(r: Result<T>, spec: &FeatureMapSpec) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config(m) => {
            Error::Config(format!("{} (reps {}): {m}", spec.label(), spec.repetitions))
        }
        other => other,
    })
}

/// Evaluates every map on one shared split. A map that fails is recorded in
/// `failures` and the suite continues.
pub fn run_suite(base: &ExperimentConfig, maps: &[FeatureMapSpec]) -> Result<SuiteReport> {
    if maps.is_empty() {
        return Ok(SuiteReport::default());
    }
    let prepared = prepare(base)?;
    Ok(run_suite_prepared(&prepared, base, maps, |_| {}))
}

/// Suite over prepared data; `on_evaluation` sees each successful run (used
/// by the CLI to dump kernels).
pub fn run_suite_prepared(
    prepared: &PreparedData,
    base: &ExperimentConfig,
    maps: &[FeatureMapSpec],
    mut on_evaluation: impl FnMut(&Evaluation),
) -> SuiteReport {
    let mut suite = SuiteReport::default();
    for spec in maps {
        match evaluate(prepared, spec, base) {
            Ok(eval) => {
                on_evaluation(&eval);
                suite.reports.push(eval.report);
            }
            Err(e) => suite.failures.push(SuiteFailure {
                feature_map: spec.label().to_string(),
                repetitions: spec.repetitions,
                error: e.to_string(),
            }),
        }
    }
    suite
}
