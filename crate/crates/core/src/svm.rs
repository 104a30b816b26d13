//! Soft-margin SVM over a precomputed kernel.
//!
//! Training solves the dual
//!
//! ```text
//! max  sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij
//! s.t. sum_i y_i a_i = 0,  0 <= a_i <= C
//! ```
//!
//! with sequential minimal optimization: each step picks the maximal violating
//! index `i` and the partner `j` with the largest second-order gain, then
//! solves the two-variable subproblem analytically and clips it to the box.
//! Iteration stops once the KKT gap `m(a) - M(a)` drops to `tol`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;

/// Gap the solver keeps optimizing toward once `tol` is met, budget
/// permitting. Meeting only `tol` leaves the dual objective and the bias a
/// few digits short, enough for label-flipped runs to visibly disagree.
const POLISH_GAP: f64 = 1e-10;

/// Dual coefficients above this value mark support vectors.
pub const SUPPORT_EPSILON: f64 = 1e-8;

const TAU: f64 = 1e-12;

/// Binary class label; serialized as `1` / `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    /// Sign of a decision value; zero goes to the positive class.
    pub fn from_decision(value: f64) -> Self {
        if value >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

impl From<Label> for i8 {
    fn from(l: Label) -> i8 {
        match l {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }
}

impl TryFrom<i8> for Label {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Label::Positive),
            -1 => Ok(Label::Negative),
            other => Err(format!("label must be 1 or -1, got {other}")),
        }
    }
}

/// Feature rows with their labels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabeledDataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
}

impl LabeledDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        Ok(Self { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoParams {
    #[serde(rename = "C")]
    pub c: f64,
    pub tol: f64,
    /// Iteration budget in sweeps: training stops after `max_passes * n`
    /// two-coefficient updates even if the KKT gap is still above `tol`.
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SmoParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-3,
            max_passes: 10_000,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub labels: Vec<Label>,
    pub support_indices: Vec<usize>,
    #[serde(rename = "C")]
    pub c: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SvmModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// `sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij`.
pub fn dual_objective(k: &KernelMatrix, y: &[Label], alphas: &[f64]) -> Result<f64> {
    let n = y.len();
    if k.rows() != n || k.cols() != n || alphas.len() != n {
        return Err(Error::Shape(format!(
            "kernel {}x{}, {} labels, {} alphas",
            k.rows(),
            k.cols(),
            n,
            alphas.len()
        )));
    }
    let linear: f64 = alphas.iter().sum();
    let mut quad = 0.0;
    for i in 0..n {
        if alphas[i] == 0.0 {
            continue;
        }
        let ai = alphas[i] * y[i].sign();
        let row = k.row(i);
        let inner: f64 = (0..n).map(|j| alphas[j] * y[j].sign() * row[j]).sum();
        quad += ai * inner;
    }
    Ok(linear - 0.5 * quad)
}

struct Solver<'a> {
    k: &'a KernelMatrix,
    y: Vec<f64>,
    c: f64,
    alpha: Vec<f64>,
    /// Gradient of the minimization form `1/2 a'Qa - e'a`, `Q_ij = y_i y_j K_ij`.
    grad: Vec<f64>,
    /// Scan order; a seeded permutation so ties break reproducibly.
    order: Vec<usize>,
}

impl Solver<'_> {
    fn in_up(&self, t: usize) -> bool {
        if self.y[t] > 0.0 {
            self.alpha[t] < self.c
        } else {
            self.alpha[t] > 0.0
        }
    }

    fn in_low(&self, t: usize) -> bool {
        if self.y[t] > 0.0 {
            self.alpha[t] > 0.0
        } else {
            self.alpha[t] < self.c
        }
    }

    /// Returns the current KKT gap `m - M` and the working pair for the next
    /// update (`None` when no pair can make progress).
    fn select(&self) -> (f64, Option<(usize, usize)>) {
        let mut i = None;
        let mut m = f64::NEG_INFINITY;
        for &t in &self.order {
            if self.in_up(t) {
                let v = -self.y[t] * self.grad[t];
                if v > m {
                    m = v;
                    i = Some(t);
                }
            }
        }
        let Some(i) = i else {
            return (0.0, None);
        };

        let kii = self.k.get(i, i);
        let mut big_m = f64::INFINITY;
        let mut j = None;
        let mut best = f64::INFINITY;
        for &t in &self.order {
            if !self.in_low(t) {
                continue;
            }
            let v = -self.y[t] * self.grad[t];
            big_m = big_m.min(v);
            let b = m - v;
            if b > 0.0 {
                let mut a = kii + self.k.get(t, t) - 2.0 * self.k.get(i, t);
                if a <= 0.0 {
                    a = TAU;
                }
                let gain = -(b * b) / a;
                if gain < best {
                    best = gain;
                    j = Some(t);
                }
            }
        }
        (m - big_m, j.map(|j| (i, j)))
    }

    fn update(&mut self, i: usize, j: usize) {
        let c = self.c;
        let (yi, yj) = (self.y[i], self.y[j]);
        let (old_i, old_j) = (self.alpha[i], self.alpha[j]);
        let mut quad = self.k.get(i, i) + self.k.get(j, j) - 2.0 * self.k.get(i, j);
        if quad <= 0.0 {
            quad = TAU;
        }
        let (mut ai, mut aj) = (old_i, old_j);

        if yi != yj {
            let delta = (-self.grad[i] - self.grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let delta = (self.grad[i] - self.grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }

        ai = ai.clamp(0.0, c);
        aj = aj.clamp(0.0, c);
        self.alpha[i] = ai;
        self.alpha[j] = aj;

        let di = (ai - old_i) * yi;
        let dj = (aj - old_j) * yj;
        let (row_i, row_j) = (self.k.row(i), self.k.row(j));
        for t in 0..self.grad.len() {
            self.grad[t] += self.y[t] * (row_i[t] * di + row_j[t] * dj);
        }
    }

    /// Mean of `y_j - sum_i a_i y_i K_ij` over free vectors, else the midpoint
    /// of the interval of offsets consistent with the bounded ones.
    fn bias(&self) -> f64 {
        let mut free_sum = 0.0;
        let mut free_count = 0usize;
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        for t in 0..self.alpha.len() {
            let r = -self.y[t] * self.grad[t];
            let a = self.alpha[t];
            if a > 0.0 && a < self.c {
                free_sum += r;
                free_count += 1;
            } else {
                let at_upper = a >= self.c;
                // y=+1 at 0 or y=-1 at C bound the offset from below.
                if (self.y[t] > 0.0) != at_upper {
                    lower = lower.max(r);
                } else {
                    upper = upper.min(r);
                }
            }
        }
        if free_count > 0 {
            free_sum / free_count as f64
        } else {
            match (lower.is_finite(), upper.is_finite()) {
                (true, true) => (lower + upper) / 2.0,
                (true, false) => lower,
                (false, true) => upper,
                (false, false) => 0.0,
            }
        }
    }
}

/// Trains on a symmetric Gram matrix.
pub fn train_smo(k: &KernelMatrix, y: &[Label], params: &SmoParams) -> Result<SvmModel> {
    let n = y.len();
    if !k.is_symmetric() {
        return Err(Error::Shape(
            "training kernel must be a symmetric Gram matrix".into(),
        ));
    }
    if k.rows() != n {
        return Err(Error::Shape(format!(
            "{}x{} kernel for {n} labels",
            k.rows(),
            k.cols()
        )));
    }
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(Error::Config(format!(
            "C must be positive, got {}",
            params.c
        )));
    }
    if params.tol.is_nan() || params.tol <= 0.0 {
        return Err(Error::Config(format!(
            "tol must be positive, got {}",
            params.tol
        )));
    }
    let positives = y.iter().filter(|&&l| l == Label::Positive).count();
    if positives == 0 || positives == n {
        return Err(Error::DegenerateTraining(
            "both classes must be present".into(),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(params.seed));
    let mut solver = Solver {
        k,
        y: y.iter().map(|l| l.sign()).collect(),
        c: params.c,
        alpha: vec![0.0; n],
        grad: vec![-1.0; n],
        order,
    };

    let budget = params.max_passes.saturating_mul(n).max(1);
    let stop_gap = params.tol.min(POLISH_GAP);
    let mut iterations = 0;
    let gap = loop {
        match solver.select() {
            (gap, Some((i, j))) if gap > stop_gap && iterations < budget => {
                solver.update(i, j);
                iterations += 1;
            }
            (gap, _) => break gap,
        }
    };
    let converged = gap <= params.tol;

    let bias = solver.bias();
    let support_indices = (0..n)
        .filter(|&i| solver.alpha[i] > SUPPORT_EPSILON)
        .collect();
    Ok(SvmModel {
        alphas: solver.alpha,
        bias,
        labels: y.to_vec(),
        support_indices,
        c: params.c,
        iterations,
        converged,
    })
}

/// `sum_i y_i a_i K[t][i] + b` for each row `t` of the cross kernel.
pub fn decision_values(model: &SvmModel, k_cross: &KernelMatrix) -> Result<Vec<f64>> {
    let n = model.alphas.len();
    if k_cross.cols() != n || model.labels.len() != n {
        return Err(Error::Shape(format!(
            "cross kernel has {} columns, model was trained on {n} points",
            k_cross.cols()
        )));
    }
    let weights: Vec<f64> = model
        .alphas
        .iter()
        .zip(&model.labels)
        .map(|(a, l)| a * l.sign())
        .collect();
    Ok((0..k_cross.rows())
        .map(|t| {
            let row = k_cross.row(t);
            weights
                .iter()
                .zip(row)
                .filter(|(w, _)| **w != 0.0)
                .map(|(w, k)| w * k)
                .sum::<f64>()
                + model.bias
        })
        .collect())
}

pub fn predict(model: &SvmModel, k_cross: &KernelMatrix) -> Result<Vec<Label>> {
    Ok(decision_values(model, k_cross)?
        .into_iter()
        .map(Label::from_decision)
        .collect())
}
