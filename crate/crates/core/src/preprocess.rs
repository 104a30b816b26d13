//! Feature conditioning: one-hot encoding, min-max scaling, PCA and a
//! stratified train/test split.
//!
//! [`Pipeline`] chains them as min-max -> PCA(k) -> min-max, so every output
//! row lies in `[0, 1]^k`. Transforms are fitted on the rows passed to `fit`
//! and applied unchanged to any other rows.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::svm::{Label, LabeledDataset};

/// One-hot encoding of a categorical column.
#[derive(Clone, Debug, PartialEq)]
pub struct OneHot {
    /// Distinct values in first-appearance order.
    pub categories: Vec<String>,
    /// One binary column per category.
    pub columns: Vec<Vec<f64>>,
}

pub fn one_hot<S: AsRef<str>>(column: &[S]) -> OneHot {
    let mut categories: Vec<String> = Vec::new();
    let codes: Vec<usize> = column
        .iter()
        .map(|v| {
            let v = v.as_ref();
            match categories.iter().position(|c| c == v) {
                Some(i) => i,
                None => {
                    categories.push(v.to_string());
                    categories.len() - 1
                }
            }
        })
        .collect();
    let columns = (0..categories.len())
        .map(|c| codes.iter().map(|&k| f64::from(u8::from(k == c))).collect())
        .collect();
    OneHot {
        categories,
        columns,
    }
}

fn check_matrix(data: &[Vec<f64>]) -> Result<usize> {
    let d = data
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Shape("no rows".into()))?;
    if d == 0 {
        return Err(Error::Shape("rows have no features".into()));
    }
    if data.iter().any(|r| r.len() != d) {
        return Err(Error::Shape("ragged feature rows".into()));
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(data: &[Vec<f64>]) -> Result<Self> {
        let d = check_matrix(data)?;
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for row in data {
            for (j, &v) in row.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(Self { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    /// Features whose fitted range is empty; they always map to 0.
    pub fn constant_features(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&j| self.max[j] <= self.min[j])
            .collect()
    }

    /// `(x - min) / (max - min)`, clamped to `[0, 1]`.
    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &v)| {
                let range = self.max[j] - self.min[j];
                if range > 0.0 {
                    ((v - self.min[j]) / range).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn transform(&self, data: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if data.iter().any(|r| r.len() != self.dim()) {
            return Err(Error::Shape(format!(
                "scaler fitted on {} features",
                self.dim()
            )));
        }
        Ok(data.iter().map(|r| self.transform_row(r)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pca {
    pub mean: Vec<f64>,
    /// `k` orthonormal directions, one per row, by decreasing variance.
    pub components: Vec<Vec<f64>>,
    /// Sample variance (n - 1 denominator) along each component.
    pub explained_variance: Vec<f64>,
    /// Sum of per-feature sample variances of the fitted data.
    pub total_variance: f64,
}

impl Pca {
    /// Fits the top-`k` principal directions from the eigendecomposition of the
    /// sample covariance. Each component's sign is fixed so that its largest
    /// absolute coordinate is positive.
    pub fn fit(data: &[Vec<f64>], k: usize) -> Result<Self> {
        let d = check_matrix(data)?;
        let n = data.len();
        if n < 2 {
            return Err(Error::Shape("PCA needs at least 2 samples".into()));
        }
        if k == 0 || k > d.min(n) {
            return Err(Error::Shape(format!(
                "cannot extract {k} components from {n} samples x {d} features"
            )));
        }
        let mut mean = vec![0.0; d];
        for row in data {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);

        let centered = DMatrix::from_fn(n, d, |i, j| data[i][j] - mean[j]);
        let cov = centered.transpose() * &centered / (n as f64 - 1.0);
        let total_variance = cov.trace();
        let eig = SymmetricEigen::new(cov);

        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut components = Vec::with_capacity(k);
        let mut explained_variance = Vec::with_capacity(k);
        for &c in order.iter().take(k) {
            let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            let pivot = v
                .iter()
                .copied()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap_or(0.0);
            if pivot < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            components.push(v);
            explained_variance.push(eig.eigenvalues[c].max(0.0));
        }
        Ok(Self {
            mean,
            components,
            explained_variance,
            total_variance,
        })
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| {
                c.iter()
                    .zip(row.iter().zip(&self.mean))
                    .map(|(w, (x, m))| w * (x - m))
                    .sum()
            })
            .collect()
    }

    pub fn transform(&self, data: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if data.iter().any(|r| r.len() != self.mean.len()) {
            return Err(Error::Shape(format!(
                "PCA fitted on {} features",
                self.mean.len()
            )));
        }
        Ok(data.iter().map(|r| self.transform_row(r)).collect())
    }
}

/// Min-max -> PCA -> min-max, fitted once and reused.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pipeline {
    pub input_scaler: MinMaxScaler,
    pub pca: Pca,
    pub output_scaler: MinMaxScaler,
}

impl Pipeline {
    pub fn fit(data: &[Vec<f64>], components: usize) -> Result<Self> {
        let input_scaler = MinMaxScaler::fit(data)?;
        let scaled = input_scaler.transform(data)?;
        let pca = Pca::fit(&scaled, components)?;
        let projected = pca.transform(&scaled)?;
        let output_scaler = MinMaxScaler::fit(&projected)?;
        Ok(Self {
            input_scaler,
            pca,
            output_scaler,
        })
    }

    pub fn transform(&self, data: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let scaled = self.input_scaler.transform(data)?;
        let projected = self.pca.transform(&scaled)?;
        self.output_scaler.transform(&projected)
    }
}

/// Row indices of a stratified split, each list ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Per class, shuffles the member indices with `seed` and sends
/// `round(test_fraction * n_class)` of them (at least 1, at most `n_class - 1`)
/// to the test side.
pub fn stratified_split_indices(
    labels: &[Label],
    test_fraction: f64,
    seed: u64,
) -> Result<SplitIndices> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Config(format!(
            "test_fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [Label::Positive, Label::Negative] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < 2 {
            return Err(Error::DegenerateSplit(format!(
                "class {} has {} member(s); at least 2 required",
                i8::from(class),
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        let n_test =
            ((test_fraction * members.len() as f64).round() as usize).clamp(1, members.len() - 1);
        test.extend_from_slice(&members[..n_test]);
        train.extend_from_slice(&members[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices { train, test })
}

pub fn stratified_split(
    dataset: &LabeledDataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let idx = stratified_split_indices(&dataset.labels, test_fraction, seed)?;
    Ok((dataset.subset(&idx.train), dataset.subset(&idx.test)))
}
