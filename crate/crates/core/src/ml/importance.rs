use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use super::dataset::LabeledDataset;
use super::logistic::{fit_logistic, ModelFit};
use super::metrics::auroc;
use super::rng_stream;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureImportance {
    pub feature: String,
    /// Mean AUROC drop when the column is shuffled.
    pub importance: f64,
    pub std: f64,
}

fn sort_ranking(v: &mut [FeatureImportance]) {
    v.sort_by(|a, b| b.importance.total_cmp(&a.importance).then_with(|| a.feature.cmp(&b.feature)));
}

/// Mean AUROC drop over `repeats` shuffles of each model feature on
/// `validation`, ranked by descending importance with ties broken by name.
pub fn permutation_importance(
    fit: &ModelFit,
    validation: &LabeledDataset,
    repeats: usize,
    seed: u64,
) -> Result<Vec<FeatureImportance>> {
    let eta = fit.linear_predictor(validation)?;
    let baseline = auroc(&eta, &validation.y)?;
    let repeats = repeats.max(1);
    let mut out = fit
        .coefficients
        .par_iter()
        .enumerate()
        .map(|(f, coef)| -> Result<FeatureImportance> {
            let j = validation.feature_index(&coef.feature)?;
            let col = validation.column(j);
            let w = coef.estimate / coef.sd;
            let mut drops = Vec::with_capacity(repeats);
            for r in 0..repeats {
                let mut rng = rng_stream(seed, ((f as u64) << 20) | r as u64);
                let mut perm = col.clone();
                perm.shuffle(&mut rng);
                let shuffled: Vec<f64> =
                    eta.iter().zip(col.iter().zip(&perm)).map(|(e, (x, xp))| e + w * (xp - x)).collect();
                drops.push(baseline - auroc(&shuffled, &validation.y)?);
            }
            let mean = drops.iter().sum::<f64>() / repeats as f64;
            let std = if repeats > 1 {
                (drops.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (repeats - 1) as f64).sqrt()
            } else {
                0.0
            };
            Ok(FeatureImportance { feature: coef.feature.clone(), importance: mean, std })
        })
        .collect::<Result<Vec<_>>>()?;
    sort_ranking(&mut out);
    Ok(out)
}

/// Ranks the columns `cols` of `train` by fitting a full model on `train`
/// and measuring permutation importance on `eval`. Columns the fit dropped
/// (constant on `train`) are ranked last with zero importance.
pub fn rank_features(
    train: &LabeledDataset,
    eval: &LabeledDataset,
    cols: &[usize],
    repeats: usize,
    seed: u64,
) -> Result<(ModelFit, Vec<FeatureImportance>)> {
    let fit = fit_logistic(train, cols)?;
    let mut ranking = permutation_importance(&fit, eval, repeats, seed)?;
    let mut dropped: Vec<FeatureImportance> = cols
        .iter()
        .map(|&j| &train.names[j])
        .filter(|n| !ranking.iter().any(|r| &r.feature == *n))
        .map(|n| FeatureImportance { feature: n.clone(), importance: 0.0, std: 0.0 })
        .collect();
    dropped.sort_by(|a, b| a.feature.cmp(&b.feature));
    ranking.extend(dropped);
    Ok((fit, ranking))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn informative_feature_ranks_first() {
        let mut rng = rng_stream(21, 0);
        let n = 3000;
        let mut values = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let s: f64 = rng.random::<f64>() * 2.0 - 1.0;
            let z: f64 = rng.random();
            values.extend([z, s]);
            y.push((rng.random::<f64>() < 1.0 / (1.0 + (-3.0 * s).exp())) as u8);
        }
        let ids = (0..n).map(|i| i.to_string()).collect();
        let ds = LabeledDataset::new(ids, vec!["noise".into(), "signal".into()], values, y).unwrap();
        let (_, ranking) = rank_features(&ds, &ds, &[0, 1], 5, 1).unwrap();
        assert_eq!(ranking[0].feature, "signal");
        assert!(ranking[0].importance > 0.1);
        assert!(ranking[1].importance.abs() < 0.01);
    }
}
