//! Ranking metrics for binary scores.
//!
//! Ties matter: fraud probabilities are frequently identical for many claims.
//! AUROC gives tied positive/negative pairs half credit, AUPR treats a block
//! of tied scores as a single threshold, and the top-decile cut breaks ties by
//! input order.

use serde::Serialize;

use crate::error::{Error, Result};

fn counts(y: &[u8]) -> (usize, usize) {
    let pos = y.iter().filter(|&&t| t == 1).count();
    (pos, y.len() - pos)
}

fn check(scores: &[f64], y: &[u8]) -> Result<()> {
    if scores.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: y.len(), found: scores.len() });
    }
    Ok(())
}

/// Indices sorted by descending score; equal scores keep input order.
fn descending(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    idx
}

/// Mann–Whitney estimate of P(score of a positive > score of a negative),
/// ties counted one half.
pub fn auroc(scores: &[f64], y: &[u8]) -> Result<f64> {
    check(scores, y)?;
    let (pos, neg) = counts(y);
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // count, for each positive, the negatives strictly below plus half the tied ones
    let mut twice_concordant: u64 = 0;
    let mut neg_below: u64 = 0;
    let mut start = 0;
    while start < idx.len() {
        let mut end = start;
        while end < idx.len() && scores[idx[end]] == scores[idx[start]] {
            end += 1;
        }
        let block = &idx[start..end];
        let p = block.iter().filter(|&&i| y[i] == 1).count() as u64;
        let n = block.len() as u64 - p;
        twice_concordant += p * (2 * neg_below + n);
        neg_below += n;
        start = end;
    }
    Ok(twice_concordant as f64 / (2.0 * pos as f64 * neg as f64))
}

/// Average precision: sum over distinct score thresholds of recall gain
/// times precision at that threshold.
pub fn aupr(scores: &[f64], y: &[u8]) -> Result<f64> {
    check(scores, y)?;
    let (pos, neg) = counts(y);
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let idx = descending(scores);
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut ap = 0.0;
    let mut start = 0;
    while start < idx.len() {
        let mut end = start;
        while end < idx.len() && scores[idx[end]] == scores[idx[start]] {
            end += 1;
        }
        let block_pos = idx[start..end].iter().filter(|&&i| y[i] == 1).count();
        tp += block_pos;
        fp += end - start - block_pos;
        if block_pos > 0 {
            ap += block_pos as f64 * (tp as f64 / (tp + fp) as f64);
        }
        start = end;
    }
    Ok(ap / pos as f64)
}

/// Rows in the top `fraction` of a ranking of `n`: `ceil(fraction * n)`.
pub fn top_count(n: usize, fraction: f64) -> usize {
    // guard against 0.1 * n landing a hair above an integer
    let raw = fraction * n as f64;
    let k = if (raw - raw.round()).abs() < 1e-9 { raw.round() } else { raw.ceil() };
    (k as usize).clamp(1, n.max(1))
}

/// Positive rate among the top `fraction` of rows by score, divided by the
/// overall positive rate.
pub fn tdl(scores: &[f64], y: &[u8], fraction: f64) -> Result<f64> {
    check(scores, y)?;
    let (pos, _) = counts(y);
    if y.is_empty() || pos == 0 {
        return Err(Error::SingleClass);
    }
    let n = y.len();
    let k = top_count(n, fraction);
    let idx = descending(scores);
    let hits = idx[..k].iter().filter(|&&i| y[i] == 1).count();
    Ok((hits as f64 / k as f64) / (pos as f64 / n as f64))
}

/// ROC curve points (false positive rate, true positive rate), one per
/// distinct threshold, starting at (0, 0).
pub fn roc_curve(scores: &[f64], y: &[u8]) -> Result<Vec<(f64, f64)>> {
    check(scores, y)?;
    let (pos, neg) = counts(y);
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let idx = descending(scores);
    let mut pts = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut start = 0;
    while start < idx.len() {
        let mut end = start;
        while end < idx.len() && scores[idx[end]] == scores[idx[start]] {
            end += 1;
        }
        for &i in &idx[start..end] {
            if y[i] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        pts.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
        start = end;
    }
    Ok(pts)
}

/// Precision–recall points (recall, precision), one per distinct threshold.
pub fn pr_curve(scores: &[f64], y: &[u8]) -> Result<Vec<(f64, f64)>> {
    check(scores, y)?;
    let (pos, neg) = counts(y);
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let idx = descending(scores);
    let mut pts = Vec::new();
    let mut tp = 0usize;
    let mut start = 0;
    while start < idx.len() {
        let mut end = start;
        while end < idx.len() && scores[idx[end]] == scores[idx[start]] {
            end += 1;
        }
        tp += idx[start..end].iter().filter(|&&i| y[i] == 1).count();
        pts.push((tp as f64 / pos as f64, tp as f64 / end as f64));
        start = end;
    }
    Ok(pts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub auroc: f64,
    pub aupr: f64,
    pub tdl: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub roc: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pr: Vec<(f64, f64)>,
}

impl MetricsReport {
    pub fn compute(scores: &[f64], y: &[u8]) -> Result<Self> {
        Ok(MetricsReport {
            auroc: auroc(scores, y)?,
            aupr: aupr(scores, y)?,
            tdl: tdl(scores, y, 0.1)?,
            roc: Vec::new(),
            pr: Vec::new(),
        })
    }

    pub fn with_curves(scores: &[f64], y: &[u8]) -> Result<Self> {
        let mut r = Self::compute(scores, y)?;
        r.roc = roc_curve(scores, y)?;
        r.pr = pr_curve(scores, y)?;
        Ok(r)
    }
}
