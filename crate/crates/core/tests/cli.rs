use std::path::Path;
use std::process::Command;

use qsvm_core::bench::SuiteReport;
use qsvm_core::KernelMatrix;

fn qsvm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qsvm"))
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn common_args(out: &Path) -> Vec<String> {
    vec![
        "--dataset-path".into(),
        fixture("eight_rows.csv"),
        "--label-column".into(),
        "label".into(),
        "--positive-label".into(),
        "a".into(),
        "--pca-components".into(),
        "3".into(),
        "--out".into(),
        out.display().to_string(),
    ]
}

#[test]
fn run_writes_reports_and_kernels() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsvm()
        .arg("run")
        .args(common_args(dir.path()))
        .args(["--feature-map", "zz_feature", "--dump-kernels"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("ZZFeatureMap"));

    let report: SuiteReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report.reports.len(), 1);
    assert_eq!(report.reports[0].repetitions, 2);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);

    let train = std::fs::File::open(dir.path().join("kernel_zz_feature_r2_train.csv")).unwrap();
    let k = KernelMatrix::read_csv(std::io::BufReader::new(train)).unwrap();
    assert_eq!(k.rows(), report.reports[0].n_train);
    assert!(k.is_symmetric());
    assert!(dir.path().join("kernel_zz_feature_r2_test.csv").exists());
}

#[test]
fn suite_accepts_map_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsvm()
        .arg("suite")
        .args(common_args(dir.path()))
        .args(["--maps", "ANGLE_Y,z_feature:1,amplitude", "--shots", "500"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: SuiteReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    let reps: Vec<usize> = report.reports.iter().map(|r| r.repetitions).collect();
    assert_eq!(reps, vec![1, 1, 1]);
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsvm()
        .args([
            "run",
            "--dataset-path",
            "/nonexistent.csv",
            "--label-column",
            "y",
        ])
        .args(["--positive-label", "1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let out = qsvm()
        .arg("suite")
        .args(common_args(dir.path()))
        .args(["--maps", "not_a_map"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
