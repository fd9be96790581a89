//! SMOTE rebalancing: oversample the minority class by interpolation, then
//! undersample the majority class until the minority share hits the target.
//!
//! The ratio pair works like this. With `m` minority rows, `n` majority rows
//! and target share `r`, the minority side grows to
//! `m' = min(m * (1 + oversample), round(r * n / (1 - r)))` and the majority
//! side is cut to `round(m' * (1 - r) / r)` (never more than `n`).

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::LabeledDataset;
use super::rng_stream;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoteConfig {
    /// Minority share of the output.
    pub target_ratio: f64,
    /// Neighbors considered for interpolation.
    pub k: usize,
    /// Synthetic rows per original minority row, before the cap.
    pub oversample: f64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig { target_ratio: 0.15, k: 5, oversample: 2.0 }
    }
}

impl SmoteConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_ratio > 0.0 && self.target_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "smote target ratio must be in (0, 1), got {}",
                self.target_ratio
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("smote k must be positive".into()));
        }
        if !(self.oversample >= 0.0 && self.oversample.is_finite()) {
            return Err(Error::InvalidConfig(format!("smote oversample must be >= 0, got {}", self.oversample)));
        }
        Ok(())
    }
}

/// Where a synthetic row came from: `base + gap * (neighbor - base)`, with
/// `base` and `neighbor` indexing rows of the input dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Synthetic {
    pub base: usize,
    pub neighbor: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoteReport {
    pub minority_class: u8,
    pub minority_in: usize,
    pub majority_in: usize,
    pub synthetic: usize,
    pub majority_kept: usize,
    pub target_ratio: f64,
    pub final_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct SmoteOutput {
    pub data: LabeledDataset,
    /// One entry per synthetic row; synthetic rows come last in `data`.
    pub synthetic: Vec<Synthetic>,
    pub report: SmoteReport,
}

/// Rebalances `ds` so the minority class makes up `cfg.target_ratio` of the
/// rows, to within one instance.
///
/// Output order: retained original rows in input order, then synthetic rows,
/// which get ids `smote-<n>`. If the minority share already meets the
/// target, the data is returned unchanged.
pub fn smote(ds: &LabeledDataset, cfg: &SmoteConfig, seed: u64) -> Result<SmoteOutput> {
    smote_inner(ds, cfg, seed, None)
}

pub(crate) fn smote_inner(
    ds: &LabeledDataset,
    cfg: &SmoteConfig,
    seed: u64,
    fixed_gap: Option<f64>,
) -> Result<SmoteOutput> {
    cfg.validate()?;
    let positives = ds.positives();
    let minority_class = if positives * 2 <= ds.n_rows() { 1u8 } else { 0u8 };
    let minority: Vec<usize> = (0..ds.n_rows()).filter(|&i| ds.y[i] == minority_class).collect();
    let majority: Vec<usize> = (0..ds.n_rows()).filter(|&i| ds.y[i] != minority_class).collect();
    let (m, n) = (minority.len(), majority.len());
    let r = cfg.target_ratio;

    let m_cap = (r * n as f64 / (1.0 - r)).round() as usize;
    if m >= m_cap {
        log::warn!(
            "minority share {:.4} already at or above target {r}; smote skipped",
            m as f64 / ds.n_rows().max(1) as f64
        );
        return Ok(SmoteOutput {
            data: ds.clone(),
            synthetic: Vec::new(),
            report: SmoteReport {
                minority_class,
                minority_in: m,
                majority_in: n,
                synthetic: 0,
                majority_kept: n,
                target_ratio: r,
                final_ratio: ds.class_ratio_of(minority_class),
            },
        });
    }
    if m < cfg.k + 1 {
        return Err(Error::TooFewMinority { found: m, required: cfg.k + 1 });
    }

    let m_new = ((m as f64 * (1.0 + cfg.oversample)).round() as usize).min(m_cap).max(m);
    let n_synth = m_new - m;
    let n_keep = ((m_new as f64 * (1.0 - r) / r).round() as usize).min(n);

    let neighbors = nearest_minority_neighbors(ds, &minority, cfg.k);

    let mut rng = rng_stream(seed, 2);
    let mut synthetic = Vec::with_capacity(n_synth);
    for s in 0..n_synth {
        let b = s % m;
        let nb = neighbors[b][rng.random_range(0..neighbors[b].len())];
        let gap = fixed_gap.unwrap_or_else(|| rng.random::<f64>());
        synthetic.push(Synthetic { base: minority[b], neighbor: nb, gap });
    }

    let mut shuffled = majority.clone();
    shuffled.shuffle(&mut rng);
    let mut keep: Vec<usize> = shuffled[..n_keep].to_vec();
    keep.extend_from_slice(&minority);
    keep.sort_unstable();

    let mut data = ds.subset_rows(&keep);
    let k = ds.n_cols();
    let mut values = Vec::with_capacity(n_synth * k);
    for s in &synthetic {
        let (a, b) = (ds.row(s.base), ds.row(s.neighbor));
        values.extend(a.iter().zip(b).map(|(&x, &z)| x + s.gap * (z - x)));
    }
    let ids = (0..n_synth).map(|i| format!("smote-{i}")).collect();
    let extra = LabeledDataset::new(ids, ds.names.clone(), values, vec![minority_class; n_synth])?;
    data.extend(&extra)?;

    let final_ratio = data.class_ratio_of(minority_class);
    Ok(SmoteOutput {
        data,
        synthetic,
        report: SmoteReport {
            minority_class,
            minority_in: m,
            majority_in: n,
            synthetic: n_synth,
            majority_kept: n_keep,
            target_ratio: r,
            final_ratio,
        },
    })
}

/// For each minority row, the input-row indices of its `k` nearest other
/// minority rows (Euclidean after z-scoring each column over all rows).
/// Distance ties go to the lower index.
pub fn nearest_minority_neighbors(ds: &LabeledDataset, minority: &[usize], k: usize) -> Vec<Vec<usize>> {
    let d = ds.n_cols();
    let (mean, sd) = column_moments(ds);
    let z: Vec<f64> = minority
        .iter()
        .flat_map(|&i| ds.row(i).iter().enumerate().map(|(j, &v)| (v - mean[j]) / sd[j]).collect::<Vec<_>>())
        .collect();
    (0..minority.len())
        .into_par_iter()
        .map(|a| {
            let za = &z[a * d..(a + 1) * d];
            let mut dist: Vec<(f64, usize)> = (0..minority.len())
                .filter(|&b| b != a)
                .map(|b| {
                    let zb = &z[b * d..(b + 1) * d];
                    (za.iter().zip(zb).map(|(x, y)| (x - y) * (x - y)).sum::<f64>(), b)
                })
                .collect();
            let kk = k.min(dist.len());
            dist.select_nth_unstable_by(kk - 1, |x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            dist.truncate(kk);
            dist.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            dist.into_iter().map(|(_, b)| minority[b]).collect()
        })
        .collect()
}

/// Column means and standard deviations; zero spread maps to 1.
fn column_moments(ds: &LabeledDataset) -> (Vec<f64>, Vec<f64>) {
    let (n, d) = (ds.n_rows() as f64, ds.n_cols());
    let mut mean = vec![0.0; d];
    for i in 0..ds.n_rows() {
        for (m, v) in mean.iter_mut().zip(ds.row(i)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; d];
    for i in 0..ds.n_rows() {
        for ((s, v), m) in var.iter_mut().zip(ds.row(i)).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let sd = var.into_iter().map(|s| (s / n).sqrt()).map(|s| if s > 0.0 { s } else { 1.0 }).collect();
    (mean, sd)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn imbalanced(n: usize, n_pos: usize, d: usize) -> LabeledDataset {
        let mut rng = rng_stream(11, 0);
        let ids = (0..n).map(|i| format!("r{i}")).collect();
        let names = (0..d).map(|j| format!("x{j}")).collect();
        let values = (0..n * d).map(|_| rng.random::<f64>()).collect();
        let y = (0..n).map(|i| (i < n_pos) as u8).collect();
        LabeledDataset::new(ids, names, values, y).unwrap()
    }

    #[test]
    fn ratio_pair_counts() {
        // 1.8% minority in 10 000 rows
        let ds = imbalanced(10_000, 180, 2);
        let out = smote(&ds, &SmoteConfig::default(), 5).unwrap();
        assert_eq!(out.report.synthetic, 360);
        assert_eq!(out.report.majority_kept, 3060);
        assert_eq!(out.data.n_rows(), 3600);
        assert_eq!(out.data.positives(), 540);
    }

    #[test]
    fn capped_oversampling_keeps_all_majority() {
        let ds = imbalanced(1000, 100, 2);
        let out = smote(&ds, &SmoteConfig::default(), 5).unwrap();
        // cap: round(0.15 * 900 / 0.85) = 159
        assert_eq!(out.data.positives(), 159);
        assert_eq!(out.report.majority_kept, 900);
        let share = out.data.positives() as f64 - 0.15 * out.data.n_rows() as f64;
        assert!(share.abs() <= 1.0);
    }

    #[test]
    fn zero_gap_duplicates_originals() {
        let ds = imbalanced(500, 20, 3);
        let out = smote_inner(&ds, &SmoteConfig::default(), 1, Some(0.0)).unwrap();
        let first = out.data.n_rows() - out.synthetic.len();
        for (s, syn) in out.synthetic.iter().enumerate() {
            assert_eq!(out.data.row(first + s), ds.row(syn.base));
        }
    }

    #[test]
    fn too_few_minority() {
        let ds = imbalanced(100, 4, 2);
        assert!(matches!(smote(&ds, &SmoteConfig::default(), 0), Err(Error::TooFewMinority { found: 4, required: 6 })));
    }

    #[test]
    fn balanced_input_passes_through() {
        let ds = imbalanced(100, 40, 2);
        let out = smote(&ds, &SmoteConfig::default(), 0).unwrap();
        assert_eq!(out.data, ds);
    }

    #[test]
    fn deterministic_under_seed() {
        let ds = imbalanced(2000, 40, 2);
        let a = smote(&ds, &SmoteConfig::default(), 9).unwrap();
        let b = smote(&ds, &SmoteConfig::default(), 9).unwrap();
        assert_eq!(a.data, b.data);
    }
}
