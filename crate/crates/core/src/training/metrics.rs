use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::Tensor;

/// Row-wise argmax; ties go to the lowest column.
pub fn argmax_rows<T: Real>(scores: &Tensor<T>) -> Vec<usize> {
    (0..scores.rows())
        .map(|r| {
            let row = scores.row(r);
            let mut best = 0;
            for (c, &v) in row.iter().enumerate().skip(1) {
                if v > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub macro_f1: f64,
}

/// Accuracy and Macro-F1 over the nodes in `mask`. Macro-F1 averages over
/// every class column of `log_probs`, including classes absent from the mask.
pub fn evaluate<T: Real>(log_probs: &Tensor<T>, labels: &[usize], mask: &[usize]) -> Result<Metrics> {
    if mask.is_empty() {
        return Err(Error::Param("evaluate: empty mask".into()));
    }
    let c = log_probs.cols();
    let pred = argmax_rows(log_probs);
    let (mut tp, mut fp, mut fneg) = (vec![0usize; c], vec![0usize; c], vec![0usize; c]);
    let mut correct = 0;
    for &u in mask {
        if u >= pred.len() || u >= labels.len() {
            return Err(Error::Index { what: "mask node", index: u, len: pred.len().min(labels.len()) });
        }
        let (p, y) = (pred[u], labels[u]);
        if y >= c {
            return Err(Error::Index { what: "label", index: y, len: c });
        }
        if p == y {
            correct += 1;
            tp[y] += 1;
        } else {
            fp[p] += 1;
            fneg[y] += 1;
        }
    }
    let f1_sum: f64 = (0..c)
        .map(|k| {
            let precision = ratio(tp[k], tp[k] + fp[k]);
            let recall = ratio(tp[k], tp[k] + fneg[k]);
            if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            }
        })
        .sum();
    Ok(Metrics {
        accuracy: correct as f64 / mask.len() as f64,
        macro_f1: f1_sum / c as f64,
    })
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrimmedStats {
    pub mean: f64,
    /// Sample standard deviation of the retained values.
    pub std: f64,
    pub retained: usize,
    pub dropped_per_end: usize,
}

/// Drops `floor(trim_fraction · n)` values from each end of the sorted list.
pub fn trimmed_stats(values: &[f64], trim_fraction: f64) -> Result<TrimmedStats> {
    if !(0.0..0.5).contains(&trim_fraction) {
        return Err(Error::Param(format!("trim fraction {trim_fraction} outside [0, 0.5)")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("trimmed_stats input".into()));
    }
    let n = values.len();
    // The epsilon keeps e.g. 0.1 · 30 from rounding down to 2.
    let k = (trim_fraction * n as f64 + 1e-9).floor() as usize;
    if n < 2 * k + 3 {
        return Err(Error::Param(format!("{n} values leave fewer than 3 after trimming {k} per end")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let kept = &sorted[k..n - k];
    let m = kept.len() as f64;
    let mean = kept.iter().sum::<f64>() / m;
    let var = kept.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(TrimmedStats {
        mean,
        std: var.sqrt(),
        retained: kept.len(),
        dropped_per_end: k,
    })
}
