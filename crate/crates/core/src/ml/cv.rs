use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::LabeledDataset;
use super::logistic::{fit_logistic, stepwise_select, Criterion, ModelFit};
use super::metrics::MetricsReport;
use super::rng_stream;
use super::smote::{smote, SmoteConfig};
use super::split::stratified_folds;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Selection {
    /// Fit every listed feature.
    Full,
    Stepwise {
        criterion: Criterion,
    },
}

/// What happens inside each training fold.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSpec {
    pub features: Vec<usize>,
    pub smote: Option<SmoteConfig>,
    pub selection: Selection,
}

impl PipelineSpec {
    /// Resamples `train` (when configured) and fits the model.
    pub fn fit(&self, train: &LabeledDataset, seed: u64) -> Result<ModelFit> {
        let resampled;
        let data = match &self.smote {
            Some(cfg) => {
                resampled = smote(train, cfg, seed)?.data;
                &resampled
            }
            None => train,
        };
        match &self.selection {
            Selection::Full => fit_logistic(data, &self.features),
            Selection::Stepwise { criterion } => stepwise_select(data, &self.features, criterion),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSummary {
    pub auroc: f64,
    pub aupr: f64,
    pub tdl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub folds: Vec<MetricsReport>,
    pub mean: MetricSummary,
    pub std: MetricSummary,
}

impl CvReport {
    fn from_folds(folds: Vec<MetricsReport>) -> Self {
        let n = folds.len() as f64;
        let stat = |f: fn(&MetricsReport) -> f64| {
            let mean = folds.iter().map(f).sum::<f64>() / n;
            let var = if folds.len() > 1 {
                folds.iter().map(|r| (f(r) - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            (mean, var.sqrt())
        };
        let (a, sa) = stat(|r| r.auroc);
        let (p, sp) = stat(|r| r.aupr);
        let (t, st) = stat(|r| r.tdl);
        CvReport {
            folds,
            mean: MetricSummary { auroc: a, aupr: p, tdl: t },
            std: MetricSummary { auroc: sa, aupr: sp, tdl: st },
        }
    }

    /// Rows of `fold,auroc,aupr,tdl`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["fold", "auroc", "aupr", "tdl"])?;
        for (i, f) in self.folds.iter().enumerate() {
            wtr.write_record([(i + 1).to_string(), f.auroc.to_string(), f.aupr.to_string(), f.tdl.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Row ids present on both sides of a split, sorted.
pub fn detect_leakage(train_ids: &[String], test_ids: &[String]) -> Vec<String> {
    let train: HashSet<&str> = train_ids.iter().map(String::as_str).collect();
    let mut shared: Vec<String> = test_ids.iter().filter(|id| train.contains(id.as_str())).cloned().collect();
    shared.sort();
    shared.dedup();
    shared
}

/// Seed for fold `fold`, derived from the master seed.
pub fn fold_seed(seed: u64, fold: usize) -> u64 {
    rng_stream(seed, 1000 + fold as u64).random()
}

/// Stratified k-fold cross-validation. Resampling and standardization are
/// fit on each training fold only; a train/test row-id overlap aborts with
/// [`Error::Leakage`].
pub fn cross_validate(ds: &LabeledDataset, k: usize, spec: &PipelineSpec, seed: u64) -> Result<CvReport> {
    let folds = stratified_folds(&ds.y, k, seed)?;
    let reports = folds
        .par_iter()
        .enumerate()
        .map(|(f, test_rows)| -> Result<MetricsReport> {
            let mut in_test = vec![false; ds.n_rows()];
            for &i in test_rows {
                in_test[i] = true;
            }
            let train_rows: Vec<usize> = (0..ds.n_rows()).filter(|&i| !in_test[i]).collect();
            let train = ds.subset_rows(&train_rows);
            let test = ds.subset_rows(test_rows);
            let leaked = detect_leakage(&train.row_ids, &test.row_ids);
            if !leaked.is_empty() {
                return Err(Error::Leakage(leaked));
            }
            let pos = test.positives();
            if pos == 0 || pos == test.n_rows() {
                return Err(Error::DegenerateFold { fold: f });
            }
            let fit = spec.fit(&train, fold_seed(seed, f))?;
            MetricsReport::compute(&fit.predict_proba(&test)?, &test.y)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CvReport::from_folds(reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perfect(n: usize) -> LabeledDataset {
        let y: Vec<u8> = (0..n).map(|i| (i % 10 == 0) as u8).collect();
        let mut rng = rng_stream(8, 0);
        let values: Vec<f64> = y.iter().flat_map(|&t| [t as f64 + 0.1 * rng.random::<f64>(), rng.random()]).collect();
        LabeledDataset::new((0..n).map(|i| format!("c{i}")).collect(), vec!["leak".into(), "noise".into()], values, y)
            .unwrap()
    }

    #[test]
    fn perfect_feature_scores_one() {
        let ds = perfect(500);
        let spec = PipelineSpec { features: vec![0], smote: Some(SmoteConfig::default()), selection: Selection::Full };
        let r = cross_validate(&ds, 10, &spec, 3).unwrap();
        assert_eq!(r.folds.len(), 10);
        assert_eq!(r.mean.auroc, 1.0);
        let again = cross_validate(&ds, 10, &spec, 3).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn duplicated_rows_are_flagged() {
        let ds = perfect(200);
        let mut doubled = ds.clone();
        doubled.extend(&ds).unwrap();
        let spec = PipelineSpec { features: vec![0, 1], smote: None, selection: Selection::Full };
        assert!(matches!(cross_validate(&doubled, 5, &spec, 1), Err(Error::Leakage(_))));
    }

    #[test]
    fn leakage_detector() {
        let a = vec!["x".to_string(), "y".to_string()];
        let b = vec!["y".to_string(), "z".to_string()];
        assert_eq!(detect_leakage(&a, &b), ["y"]);
        assert!(detect_leakage(&a, &["q".to_string()]).is_empty());
    }

    #[test]
    fn metrics_csv_layout() {
        let ds = perfect(200);
        let spec = PipelineSpec { features: vec![0], smote: None, selection: Selection::Full };
        let r = cross_validate(&ds, 2, &spec, 0).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("fold,auroc,aupr,tdl\n1,1,1,"), "{text}");
        assert_eq!(text.lines().count(), 3);
    }
}
