use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qsvm_core::bench::{self, Evaluation, ExperimentConfig, SuiteReport};
use qsvm_core::{FeatureMapFamily, FeatureMapSpec, KernelMode};

/// Quantum-kernel SVM benchmark runner
#[derive(Parser, Debug)]
#[command(name = "qsvm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a single experiment with one feature map
    Run(RunArgs),
    /// Compare several feature maps on one shared split
    Suite(SuiteArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// JSON config file; flags given on the command line override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset_path: Option<PathBuf>,
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long)]
    positive_label: Option<String>,
    /// Comma-separated categorical columns to one-hot encode
    #[arg(long, value_delimiter = ',')]
    categorical_columns: Option<Vec<String>>,
    /// Comma-separated columns to leave out of the features
    #[arg(long, value_delimiter = ',')]
    ignore_columns: Option<Vec<String>>,
    /// Rotation angle multiplier applied to each feature
    #[arg(long)]
    angle_scale: Option<f64>,
    /// SVM regularization constant
    #[arg(long = "C", alias = "c")]
    c: Option<f64>,
    #[arg(long)]
    test_fraction: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Estimate kernel entries from this many simulated shots instead of exactly
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    pca_components: Option<usize>,
    /// Fit scalers and PCA on all rows before splitting
    #[arg(long)]
    fit_on_full_data: bool,
    /// SMO KKT tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Directory for report.json / report.csv
    #[arg(long, default_value = "reports")]
    out: PathBuf,
    /// Also write the train and test kernel matrices as CSV
    #[arg(long)]
    dump_kernels: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Feature map name, e.g. ANGLE_X, ZZ_FEATURE, PARAM_Y_CY
    #[arg(long)]
    feature_map: Option<String>,
    #[arg(long)]
    repetitions: Option<usize>,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated NAME[:REPS] list; defaults to the nine reference maps
    #[arg(long, value_delimiter = ',')]
    maps: Option<Vec<String>>,
}

fn build_config(args: &CommonArgs) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => {
            let (Some(path), Some(label)) = (&args.dataset_path, &args.label_column) else {
                bail!("either --config or both --dataset-path and --label-column are required");
            };
            let positive = args
                .positive_label
                .clone()
                .context("--positive-label is required without --config")?;
            ExperimentConfig::new(path, label.clone(), positive)
        }
    };
    if let Some(v) = &args.dataset_path {
        config.dataset_path = v.clone();
    }
    if let Some(v) = &args.label_column {
        config.label_column = v.clone();
    }
    if let Some(v) = &args.positive_label {
        config.positive_label = v.clone();
    }
    if let Some(v) = &args.categorical_columns {
        config.categorical_columns = v.clone();
    }
    if let Some(v) = &args.ignore_columns {
        config.ignore_columns = v.clone();
    }
    if let Some(v) = args.angle_scale {
        config.feature_map.angle_scale = v;
    }
    if let Some(v) = args.c {
        config.c = v;
    }
    if let Some(v) = args.test_fraction {
        config.test_fraction = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(shots) = args.shots {
        config.kernel_mode = KernelMode::Sampled { shots };
    }
    if let Some(v) = args.pca_components {
        config.pca_components = v;
    }
    if args.fit_on_full_data {
        config.fit_on_full_data = true;
    }
    if let Some(v) = args.tol {
        config.tol = v;
    }
    config.validate()?;
    Ok(config)
}

fn parse_map(item: &str, angle_scale: f64) -> Result<FeatureMapSpec> {
    let (name, reps) = match item.split_once(':') {
        Some((name, reps)) => (
            name,
            Some(reps.parse::<usize>().context("bad repetitions")?),
        ),
        None => (item, None),
    };
    let family: FeatureMapFamily = name.parse()?;
    let spec = FeatureMapSpec::new(family, reps.unwrap_or(family.reference_repetitions()))
        .with_angle_scale(angle_scale);
    spec.validate()?;
    Ok(spec)
}

fn dump_kernels(dir: &Path, eval: &Evaluation) -> Result<()> {
    let stem = format!(
        "{}_r{}",
        eval.report.family.name().to_ascii_lowercase(),
        eval.report.repetitions
    );
    for (suffix, k) in [("train", &eval.kernels.train), ("test", &eval.kernels.test)] {
        let path = dir.join(format!("kernel_{stem}_{suffix}.csv"));
        k.write_csv(BufWriter::new(File::create(&path)?))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn execute(
    common: &CommonArgs,
    config: &ExperimentConfig,
    maps: &[FeatureMapSpec],
) -> Result<SuiteReport> {
    let prepared = bench::prepare(config)
        .with_context(|| format!("preparing {}", config.dataset_path.display()))?;
    eprintln!(
        "{} rows read, {} dropped for missing values; {} train / {} test",
        prepared.total_rows,
        prepared.dropped_rows,
        prepared.train.len(),
        prepared.test.len()
    );
    std::fs::create_dir_all(&common.out)?;
    let mut dump_error = None;
    let suite = bench::run_suite_prepared(&prepared, config, maps, |eval| {
        if common.dump_kernels && dump_error.is_none() {
            dump_error = dump_kernels(&common.out, eval).err();
        }
    });
    if let Some(e) = dump_error {
        return Err(e);
    }
    print!("{}", suite.render_table());
    let (json, csv) = suite.write_files(&common.out)?;
    eprintln!("wrote {} and {}", json.display(), csv.display());
    Ok(suite)
}

fn main_inner() -> Result<bool> {
    let cli = Cli::parse();
    let suite = match &cli.command {
        Command::Run(args) => {
            let mut config = build_config(&args.common)?;
            if let Some(name) = &args.feature_map {
                let family: FeatureMapFamily = name.parse()?;
                config.feature_map.family = family;
                if args.repetitions.is_none() {
                    config.feature_map.repetitions = family.reference_repetitions();
                }
            }
            if let Some(r) = args.repetitions {
                config.feature_map.repetitions = r;
            }
            config.validate()?;
            execute(&args.common, &config, &[config.feature_map])?
        }
        Command::Suite(args) => {
            let config = build_config(&args.common)?;
            let scale = config.feature_map.angle_scale;
            let maps = match &args.maps {
                Some(items) => items
                    .iter()
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_map(s.trim(), scale))
                    .collect::<Result<Vec<_>>>()?,
                None => FeatureMapSpec::reference_suite()
                    .into_iter()
                    .map(|s| s.with_angle_scale(scale))
                    .collect(),
            };
            if maps.is_empty() {
                let suite = SuiteReport::default();
                print!("{}", suite.render_table());
                suite.write_files(&args.common.out)?;
                return Ok(true);
            }
            execute(&args.common, &config, &maps)?
        }
    };
    Ok(suite.failures.is_empty())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: one or more feature maps failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
