//! Logistic regression fit by iteratively reweighted least squares on
//! z-standardized features, plus bidirectional stepwise selection.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::dataset::LabeledDataset;
use crate::error::{Error, Result};

const CONDITION_LIMIT: f64 = 1e12;
const SEPARATION_ETA: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iter: usize,
    /// Stop when the relative change in log-likelihood drops below this.
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_iter: 100, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitWarning {
    ConstantColumn { feature: String },
    PerfectSeparation,
    Collinear { condition_number: f64 },
    NotConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub feature: String,
    /// Coefficient on the standardized feature.
    pub estimate: f64,
    pub std_error: f64,
    pub z: f64,
    pub p_value: f64,
    /// Training mean and standard deviation used for standardization.
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepAction {
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    pub step: usize,
    pub action: StepAction,
    pub feature: String,
    /// AIC after the move, or the p-value that triggered it.
    pub criterion: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Criterion {
    #[default]
    Aic,
    PValue {
        enter: f64,
        remove: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub intercept: f64,
    pub intercept_std_error: f64,
    pub coefficients: Vec<Coefficient>,
    pub log_likelihood: f64,
    pub aic: f64,
    pub n_rows: usize,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<FitWarning>,
    pub selection_trace: Vec<SelectionStep>,
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

impl ModelFit {
    pub fn features(&self) -> Vec<&str> {
        self.coefficients.iter().map(|c| c.feature.as_str()).collect()
    }

    /// Intercept followed by the standardized coefficients.
    pub fn beta(&self) -> Vec<f64> {
        std::iter::once(self.intercept).chain(self.coefficients.iter().map(|c| c.estimate)).collect()
    }

    fn columns_in(&self, ds: &LabeledDataset) -> Result<Vec<usize>> {
        self.coefficients.iter().map(|c| ds.feature_index(&c.feature)).collect()
    }

    /// Standardized design rows for `ds`: leading 1 then one z-score per coefficient.
    pub fn design_row(&self, x: &[f64], cols: &[usize]) -> Vec<f64> {
        std::iter::once(1.0).chain(self.coefficients.iter().zip(cols).map(|(c, &j)| (x[j] - c.mean) / c.sd)).collect()
    }

    pub fn linear_predictor(&self, ds: &LabeledDataset) -> Result<Vec<f64>> {
        let cols = self.columns_in(ds)?;
        Ok((0..ds.n_rows())
            .map(|i| {
                let x = ds.row(i);
                self.coefficients
                    .iter()
                    .zip(&cols)
                    .fold(self.intercept, |acc, (c, &j)| acc + c.estimate * (x[j] - c.mean) / c.sd)
            })
            .collect())
    }

    pub fn predict_proba(&self, ds: &LabeledDataset) -> Result<Vec<f64>> {
        Ok(self.linear_predictor(ds)?.into_iter().map(sigmoid).collect())
    }

    pub fn log_likelihood_on(&self, ds: &LabeledDataset) -> Result<f64> {
        let eta = self.linear_predictor(ds)?;
        Ok(eta.iter().zip(&ds.y).map(|(&e, &t)| t as f64 * e - softplus(e)).sum())
    }

    /// Gradient of the log-likelihood on `ds` with respect to [`ModelFit::beta`].
    pub fn gradient_on(&self, ds: &LabeledDataset) -> Result<Vec<f64>> {
        let cols = self.columns_in(ds)?;
        let eta = self.linear_predictor(ds)?;
        let mut g = vec![0.0; cols.len() + 1];
        for i in 0..ds.n_rows() {
            let r = ds.y[i] as f64 - sigmoid(eta[i]);
            for (gj, zj) in g.iter_mut().zip(self.design_row(ds.row(i), &cols)) {
                *gj += r * zj;
            }
        }
        Ok(g)
    }

    pub fn has_warning(&self, pred: impl Fn(&FitWarning) -> bool) -> bool {
        self.warnings.iter().any(pred)
    }
}

/// Standardized candidate columns of a dataset, shared by every fit in a
/// selection run.
struct Design {
    names: Vec<String>,
    means: Vec<f64>,
    sds: Vec<f64>,
    /// Column-major z-scores.
    z: Vec<Vec<f64>>,
    y: Vec<f64>,
    warnings: Vec<FitWarning>,
}

impl Design {
    fn new(ds: &LabeledDataset, cols: &[usize]) -> Result<Self> {
        let n = ds.n_rows();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let pos = ds.positives();
        if pos == 0 || pos == n {
            return Err(Error::SingleClass);
        }
        let mut d = Design {
            names: Vec::new(),
            means: Vec::new(),
            sds: Vec::new(),
            z: Vec::new(),
            y: ds.y.iter().map(|&t| t as f64).collect(),
            warnings: Vec::new(),
        };
        for &j in cols {
            let col = ds.column(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            let var =
                if n > 1 { col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
            let sd = var.sqrt();
            if !(sd > 1e-12 * mean.abs().max(1.0)) {
                log::warn!("dropping constant column `{}`", ds.names[j]);
                d.warnings.push(FitWarning::ConstantColumn { feature: ds.names[j].clone() });
                continue;
            }
            d.names.push(ds.names[j].clone());
            d.means.push(mean);
            d.sds.push(sd);
            d.z.push(col.into_iter().map(|v| (v - mean) / sd).collect());
        }
        Ok(d)
    }

    fn n(&self) -> usize {
        self.y.len()
    }

    fn eta(&self, set: &[usize], beta: &[f64]) -> Vec<f64> {
        let mut eta = vec![beta[0]; self.n()];
        for (b, &c) in beta[1..].iter().zip(set) {
            for (e, z) in eta.iter_mut().zip(&self.z[c]) {
                *e += b * z;
            }
        }
        eta
    }

    fn loglik(&self, eta: &[f64]) -> f64 {
        eta.iter().zip(&self.y).map(|(&e, &t)| t * e - softplus(e)).sum()
    }

    /// Score vector and Fisher information at `eta`.
    fn score_info(&self, set: &[usize], eta: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let p = set.len() + 1;
        let n = self.n();
        let mu: Vec<f64> = eta.iter().map(|&e| sigmoid(e)).collect();
        let w: Vec<f64> = mu.iter().map(|m| m * (1.0 - m)).collect();
        let resid: Vec<f64> = self.y.iter().zip(&mu).map(|(t, m)| t - m).collect();
        let col = |a: usize| -> Option<&[f64]> { (a > 0).then(|| self.z[set[a - 1]].as_slice()) };

        let mut g = DVector::zeros(p);
        let mut h = DMatrix::zeros(p, p);
        let mut wa = vec![0.0; n];
        for a in 0..p {
            match col(a) {
                None => {
                    g[a] = resid.iter().sum();
                    wa.copy_from_slice(&w);
                }
                Some(za) => {
                    g[a] = resid.iter().zip(za).map(|(r, z)| r * z).sum();
                    for ((o, wi), zi) in wa.iter_mut().zip(&w).zip(za) {
                        *o = wi * zi;
                    }
                }
            }
            for b in a..p {
                let v = match col(b) {
                    None => wa.iter().sum(),
                    Some(zb) => wa.iter().zip(zb).map(|(x, z)| x * z).sum(),
                };
                h[(a, b)] = v;
                h[(b, a)] = v;
            }
        }
        (g, h)
    }

    fn separated(&self, eta: &[f64]) -> bool {
        let mut min_pos = f64::INFINITY;
        let mut max_neg = f64::NEG_INFINITY;
        for (&e, &t) in eta.iter().zip(&self.y) {
            if t == 1.0 {
                min_pos = min_pos.min(e);
            } else {
                max_neg = max_neg.max(e);
            }
        }
        min_pos > max_neg && eta.iter().any(|e| e.abs() > SEPARATION_ETA)
    }

    fn irls(&self, set: &[usize], start: Vec<f64>, opts: &FitOptions) -> Irls {
        let mut beta = start;
        let mut eta = self.eta(set, &beta);
        let mut ll = self.loglik(&eta);
        let mut out = Irls { beta: Vec::new(), ll, iterations: 0, converged: false, separated: false, ridged: false };
        for it in 1..=opts.max_iter {
            let Some((next, next_eta, next_ll, ridged)) = self.newton_step(set, &beta, &eta, ll) else {
                out.converged = true;
                break;
            };
            out.ridged |= ridged;
            let change = (next_ll - ll).abs() / ll.abs().max(f64::MIN_POSITIVE);
            beta = next;
            eta = next_eta;
            ll = next_ll;
            out.iterations = it;
            if change < opts.tol {
                out.converged = true;
                break;
            }
            if self.separated(&eta) {
                out.separated = true;
                break;
            }
        }
        if out.converged {
            // one more step to polish the gradient once the likelihood has flattened
            if let Some((next, _, next_ll, _)) = self.newton_step(set, &beta, &eta, ll) {
                if next_ll >= ll {
                    beta = next;
                    ll = next_ll;
                }
            }
        }
        out.beta = beta;
        out.ll = ll;
        out
    }

    /// Newton step with step halving. `None` when the step is exactly zero.
    fn newton_step(
        &self,
        set: &[usize],
        beta: &[f64],
        eta: &[f64],
        ll: f64,
    ) -> Option<(Vec<f64>, Vec<f64>, f64, bool)> {
        let (g, h) = self.score_info(set, eta);
        let (delta, ridged) = solve_spd(&h, &g);
        if delta.iter().all(|&d| d == 0.0) {
            return None;
        }
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = beta.iter().zip(delta.iter()).map(|(b, d)| b + t * d).collect();
            let cand_eta = self.eta(set, &cand);
            let cand_ll = self.loglik(&cand_eta);
            if cand_ll >= ll - 1e-12 * ll.abs() || t < 1e-10 {
                return Some((cand, cand_eta, cand_ll, ridged));
            }
            t *= 0.5;
        }
    }

    fn finish(&self, set: &[usize], irls: Irls, mut warnings: Vec<FitWarning>) -> ModelFit {
        let eta = self.eta(set, &irls.beta);
        let (_, info) = self.score_info(set, &eta);
        let p = set.len() + 1;
        let cov = invert_spd(&info);
        let se: Vec<f64> = (0..p).map(|a| cov[(a, a)].max(0.0).sqrt()).collect();

        let eig = SymmetricEigen::new(info).eigenvalues;
        let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if irls.ridged || condition > CONDITION_LIMIT {
            log::warn!("design is close to collinear (condition number {condition:.3e})");
            warnings.push(FitWarning::Collinear { condition_number: condition });
        }
        if irls.separated {
            log::warn!("perfect separation; coefficients are unbounded");
            warnings.push(FitWarning::PerfectSeparation);
        } else if !irls.converged {
            log::warn!("logistic fit did not converge in {} iterations", irls.iterations);
            warnings.push(FitWarning::NotConverged);
        }

        let coefficients = set
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let estimate = irls.beta[k + 1];
                let std_error = se[k + 1];
                let z = estimate / std_error;
                Coefficient {
                    feature: self.names[c].clone(),
                    estimate,
                    std_error,
                    z,
                    p_value: two_sided_p(z),
                    mean: self.means[c],
                    sd: self.sds[c],
                }
            })
            .collect();
        ModelFit {
            intercept: irls.beta[0],
            intercept_std_error: se[0],
            coefficients,
            log_likelihood: irls.ll,
            aic: aic(irls.ll, p),
            n_rows: self.n(),
            iterations: irls.iterations,
            converged: irls.converged,
            warnings,
            selection_trace: Vec::new(),
        }
    }

    fn intercept_start(&self) -> f64 {
        let ybar = self.y.iter().sum::<f64>() / self.n() as f64;
        (ybar / (1.0 - ybar)).ln()
    }
}

struct Irls {
    beta: Vec<f64>,
    ll: f64,
    iterations: usize,
    converged: bool,
    separated: bool,
    ridged: bool,
}

fn aic(ll: f64, params: usize) -> f64 {
    -2.0 * ll + 2.0 * params as f64
}

fn two_sided_p(z: f64) -> f64 {
    if z.is_finite() {
        libm::erfc(z.abs() / std::f64::consts::SQRT_2)
    } else {
        f64::NAN
    }
}

/// Solves `h x = g` by Cholesky, adding a growing ridge when `h` is not
/// numerically positive definite.
fn solve_spd(h: &DMatrix<f64>, g: &DVector<f64>) -> (DVector<f64>, bool) {
    if let Some(ch) = h.clone().cholesky() {
        return (ch.solve(g), false);
    }
    let p = h.nrows();
    let scale = (h.trace() / p as f64).max(1e-300);
    let mut lambda = 1e-10 * scale;
    loop {
        let mut hr = h.clone();
        for a in 0..p {
            hr[(a, a)] += lambda;
        }
        if let Some(ch) = hr.cholesky() {
            return (ch.solve(g), true);
        }
        lambda *= 10.0;
        if !lambda.is_finite() {
            return (DVector::zeros(p), true);
        }
    }
}

fn invert_spd(h: &DMatrix<f64>) -> DMatrix<f64> {
    let p = h.nrows();
    let mut inv = DMatrix::zeros(p, p);
    for a in 0..p {
        let mut e = DVector::zeros(p);
        e[a] = 1.0;
        inv.set_column(a, &solve_spd(h, &e).0);
    }
    inv
}

/// Maximum-likelihood fit on the columns `cols` of `ds`. Constant columns are
/// dropped with a warning.
pub fn fit_logistic(ds: &LabeledDataset, cols: &[usize]) -> Result<ModelFit> {
    fit_logistic_with(ds, cols, &FitOptions::default())
}

pub fn fit_logistic_with(ds: &LabeledDataset, cols: &[usize], opts: &FitOptions) -> Result<ModelFit> {
    let design = Design::new(ds, cols)?;
    let set: Vec<usize> = (0..design.names.len()).collect();
    if ds.n_rows() <= set.len() + 1 {
        return Err(Error::Fit(format!("{} rows cannot support {} parameters", ds.n_rows(), set.len() + 1)));
    }
    let mut start = vec![0.0; set.len() + 1];
    start[0] = design.intercept_start();
    let irls = design.irls(&set, start, opts);
    Ok(design.finish(&set, irls, design.warnings.clone()))
}

/// Greedy bidirectional selection over `candidates`. Each round considers
/// every single addition and removal and applies the best one, until no move
/// improves the criterion.
pub fn stepwise_select(ds: &LabeledDataset, candidates: &[usize], criterion: &Criterion) -> Result<ModelFit> {
    if candidates.is_empty() {
        return Err(Error::InvalidConfig("stepwise selection needs at least one candidate".into()));
    }
    let design = Design::new(ds, candidates)?;
    let opts = FitOptions::default();
    let k = design.names.len();
    let max_params = ds.n_rows().saturating_sub(2);

    let mut set: Vec<usize> = Vec::new();
    let mut current = design.irls(&set, vec![design.intercept_start()], &opts);
    let mut trace = Vec::new();
    let max_steps = 4 * k + 4;

    let fit_with = |set: &[usize], beta: &[f64], add: Option<usize>, drop: Option<usize>| -> (Vec<usize>, Irls) {
        let mut s = Vec::with_capacity(set.len() + 1);
        let mut b = vec![beta[0]];
        for (pos, &c) in set.iter().enumerate() {
            if Some(pos) != drop {
                s.push(c);
                b.push(beta[pos + 1]);
            }
        }
        if let Some(c) = add {
            s.push(c);
            b.push(0.0);
        }
        let fit = design.irls(&s, b, &opts);
        (s, fit)
    };

    while trace.len() < max_steps {
        let outside: Vec<usize> = (0..k).filter(|c| !set.contains(c)).collect();
        let mut moved = false;
        match criterion {
            Criterion::Aic => {
                let cur_aic = aic(current.ll, set.len() + 1);
                let mut best: Option<(f64, StepAction, usize, Vec<usize>, Irls)> = None;
                if set.len() + 1 < max_params {
                    for &c in &outside {
                        let (s, fit) = fit_with(&set, &current.beta, Some(c), None);
                        let a = aic(fit.ll, s.len() + 1);
                        if best.as_ref().is_none_or(|b| a < b.0) {
                            best = Some((a, StepAction::Add, c, s, fit));
                        }
                    }
                }
                for pos in 0..set.len() {
                    let (s, fit) = fit_with(&set, &current.beta, None, Some(pos));
                    let a = aic(fit.ll, s.len() + 1);
                    if best.as_ref().is_none_or(|b| a < b.0) {
                        best = Some((a, StepAction::Remove, set[pos], s, fit));
                    }
                }
                if let Some((a, action, c, s, fit)) = best {
                    if a < cur_aic - 1e-9 {
                        trace.push(SelectionStep {
                            step: trace.len() + 1,
                            action,
                            feature: design.names[c].clone(),
                            criterion: a,
                        });
                        set = s;
                        current = fit;
                        moved = true;
                    }
                }
            }
            Criterion::PValue { enter, remove } => {
                let mut best: Option<(f64, usize, Vec<usize>, Irls)> = None;
                if set.len() + 1 < max_params {
                    for &c in &outside {
                        let (s, fit) = fit_with(&set, &current.beta, Some(c), None);
                        let p = design
                            .finish(&s, clone_irls(&fit), Vec::new())
                            .coefficients
                            .last()
                            .map_or(1.0, |c| c.p_value);
                        let p = if p.is_nan() { 1.0 } else { p };
                        if best.as_ref().is_none_or(|b| p < b.0) {
                            best = Some((p, c, s, fit));
                        }
                    }
                }
                if let Some((p, c, s, fit)) = best {
                    if p < *enter {
                        trace.push(SelectionStep {
                            step: trace.len() + 1,
                            action: StepAction::Add,
                            feature: design.names[c].clone(),
                            criterion: p,
                        });
                        set = s;
                        current = fit;
                        moved = true;
                    }
                }
                if !set.is_empty() {
                    let fit = design.finish(&set, clone_irls(&current), Vec::new());
                    let (pos, p) = fit
                        .coefficients
                        .iter()
                        .enumerate()
                        .map(|(pos, c)| (pos, if c.p_value.is_nan() { 1.0 } else { c.p_value }))
                        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
                    if p > *remove {
                        let (s, fit) = fit_with(&set, &current.beta, None, Some(pos));
                        trace.push(SelectionStep {
                            step: trace.len() + 1,
                            action: StepAction::Remove,
                            feature: design.names[set[pos]].clone(),
                            criterion: p,
                        });
                        set = s;
                        current = fit;
                        moved = true;
                    }
                }
            }
        }
        if !moved {
            break;
        }
    }

    let mut fit = design.finish(&set, current, design.warnings.clone());
    fit.selection_trace = trace;
    Ok(fit)
}

fn clone_irls(f: &Irls) -> Irls {
    Irls { beta: f.beta.clone(), ..*f }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::rng_stream;
    use rand::Rng;

    fn dataset(cols: Vec<Vec<f64>>, y: Vec<u8>) -> LabeledDataset {
        let n = y.len();
        let names = (0..cols.len()).map(|j| format!("x{j}")).collect();
        let mut values = Vec::with_capacity(n * cols.len());
        for i in 0..n {
            values.extend(cols.iter().map(|c| c[i]));
        }
        LabeledDataset::new((0..n).map(|i| format!("r{i}")).collect(), names, values, y).unwrap()
    }

    #[test]
    fn intercept_only_is_logit_of_base_rate() {
        let y: Vec<u8> = (0..400).map(|i| (i % 4 == 0) as u8).collect();
        let ds = dataset(vec![], y);
        let fit = fit_logistic(&ds, &[]).unwrap();
        assert!((fit.intercept - (0.25f64 / 0.75).ln()).abs() < 1e-8);
        assert!(fit.converged);
    }

    #[test]
    fn flipped_binary_feature_is_flagged() {
        let x: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
        let y: Vec<u8> = x.iter().map(|&v| (v == 0.0) as u8).collect();
        let fit = fit_logistic(&dataset(vec![x], y), &[0]).unwrap();
        assert!(fit.coefficients[0].estimate < 0.0);
        assert!(fit.has_warning(|w| *w == FitWarning::PerfectSeparation));
    }

    #[test]
    fn constant_column_dropped() {
        let mut rng = rng_stream(3, 0);
        let x: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
        let y: Vec<u8> = x.iter().map(|&v| (v + rng.random::<f64>() > 1.0) as u8).collect();
        let fit = fit_logistic(&dataset(vec![vec![2.0; 200], x], y), &[0, 1]).unwrap();
        assert_eq!(fit.features(), ["x1"]);
        assert!(matches!(&fit.warnings[0], FitWarning::ConstantColumn { feature } if feature == "x0"));
    }

    #[test]
    fn gradient_vanishes_and_mean_matches_rate() {
        let mut rng = rng_stream(4, 0);
        let cols: Vec<Vec<f64>> = (0..3).map(|_| (0..200).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect()).collect();
        let y: Vec<u8> =
            (0..200).map(|i| (rng.random::<f64>() < sigmoid(0.8 * cols[0][i] - 0.5 * cols[1][i])) as u8).collect();
        let ds = dataset(cols, y);
        let fit = fit_logistic(&ds, &[0, 1, 2]).unwrap();
        let g = fit.gradient_on(&ds).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-6), "{g:?}");
        let p = fit.predict_proba(&ds).unwrap();
        assert!((p.iter().sum::<f64>() / 200.0 - ds.class_ratio()).abs() < 1e-8);
    }

    #[test]
    fn stepwise_picks_informative_feature() {
        let mut rng = rng_stream(5, 0);
        let n = 2000;
        let signal: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let noise: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<u8> = signal.iter().map(|&s| (rng.random::<f64>() < sigmoid(2.0 * s)) as u8).collect();
        let ds = dataset(vec![signal.clone(), noise, signal], y);
        let fit = stepwise_select(&ds, &[0, 1, 2], &Criterion::Aic).unwrap();
        let f = fit.features();
        assert_eq!(f.iter().filter(|n| **n == "x0" || **n == "x2").count(), 1, "{f:?}");
        assert_eq!(fit.selection_trace[0].action, StepAction::Add);
    }

    #[test]
    fn stepwise_without_signal_is_intercept_only() {
        let mut rng = rng_stream(6, 0);
        let y: Vec<u8> = (0..300).map(|i| (i % 3 == 0) as u8).collect();
        let noise: Vec<f64> = (0..300).map(|_| rng.random::<f64>()).collect();
        let ds = dataset(vec![vec![1.0; 300], noise], y);
        let fit = stepwise_select(&ds, &[0], &Criterion::Aic).unwrap();
        assert!(fit.coefficients.is_empty());
        assert!(fit.selection_trace.is_empty());
    }

    #[test]
    fn p_value_mode_selects_signal() {
        let mut rng = rng_stream(7, 0);
        let n = 1000;
        let signal: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<u8> = signal.iter().map(|&s| (rng.random::<f64>() < s) as u8).collect();
        let ds = dataset(vec![signal], y);
        let fit = stepwise_select(&ds, &[0], &Criterion::PValue { enter: 0.05, remove: 0.1 }).unwrap();
        assert_eq!(fit.features(), ["x0"]);
        assert!(fit.coefficients[0].p_value < 0.05);
    }

    #[test]
    fn model_json_round_trip() {
        let y: Vec<u8> = (0..50).map(|i| (i % 5 == 0) as u8).collect();
        let x: Vec<f64> = (0..50).map(|i| (i % 7) as f64).collect();
        let fit = fit_logistic(&dataset(vec![x], y), &[0]).unwrap();
        let text = serde_json::to_string(&fit).unwrap();
        let back: ModelFit = serde_json::from_str(&text).unwrap();
        assert_eq!(back, fit);
    }
}
