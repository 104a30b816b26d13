//! Binary classification metrics. The positive class is [`Label::Positive`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::svm::Label;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion(y_true: &[Label], y_pred: &[Label]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Shape(format!(
            "{} true labels vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::Shape("no samples to evaluate".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (Label::Positive, Label::Positive) => cm.tp += 1,
            (Label::Negative, Label::Positive) => cm.fp += 1,
            (Label::Negative, Label::Negative) => cm.tn += 1,
            (Label::Positive, Label::Negative) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// Precision, recall and F1 for one class. A ratio with a zero denominator is
/// reported as 0 and its name is listed in `undefined`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undefined: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub accuracy: f64,
    pub positive: ClassMetrics,
    pub negative: ClassMetrics,
}

fn ratio(num: usize, den: usize, name: &str, undefined: &mut Vec<String>) -> f64 {
    if den == 0 {
        undefined.push(name.to_string());
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn class_metrics(hit: usize, false_alarm: usize, miss: usize) -> ClassMetrics {
    let mut undefined = Vec::new();
    let precision = ratio(hit, hit + false_alarm, "precision", &mut undefined);
    let recall = ratio(hit, hit + miss, "recall", &mut undefined);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        undefined.push("f1".to_string());
        0.0
    };
    ClassMetrics {
        precision,
        recall,
        f1,
        support: hit + miss,
        undefined,
    }
}

pub fn summary(cm: &ConfusionMatrix) -> Result<Summary> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::UndefinedMetric("empty confusion matrix".into()));
    }
    Ok(Summary {
        accuracy: (cm.tp + cm.tn) as f64 / total as f64,
        positive: class_metrics(cm.tp, cm.fp, cm.fn_),
        negative: class_metrics(cm.tn, cm.fn_, cm.fp),
    })
}

/// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
/// (positive, negative) pairs in which the positive scores higher, ties
/// counting one half. Computed from mid-ranks in O(n log n).
pub fn auroc(y_true: &[Label], scores: &[f64]) -> Result<f64> {
    if y_true.len() != scores.len() {
        return Err(Error::Shape(format!(
            "{} labels vs {} scores",
            y_true.len(),
            scores.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::UndefinedMetric("NaN score".into()));
    }
    let n_pos = y_true.iter().filter(|&&l| l == Label::Positive).count();
    let n_neg = y_true.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedMetric(
            "AUROC needs both classes in the ground truth".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Sum of 2 * rank over positives, so mid-ranks stay integral.
    let mut twice_rank_sum: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // 1-based ranks start+1 ..= end share the mid-rank (start + 1 + end) / 2.
        let twice_mid = (start + 1 + end) as u128;
        let pos_in_group = order[start..end]
            .iter()
            .filter(|&&i| y_true[i] == Label::Positive)
            .count() as u128;
        twice_rank_sum += twice_mid * pos_in_group;
        start = end;
    }
    let (p, q) = (n_pos as u128, n_neg as u128);
    // 2U = 2R - p(p+1); AUROC = U / (p q)
    let twice_u = twice_rank_sum - p * (p + 1);
    Ok(twice_u as f64 / (2 * p * q) as f64)
}
