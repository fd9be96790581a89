//! File-driven stages from raw edges to evaluated fraud models.
//!
//! Every stage reads its inputs from the configured paths or from the output
//! directory and writes its results back there, so each intermediate can be
//! inspected and each stage rerun on its own. A run writes one
//! `manifest.<stage>.json` (deterministic) and one `timings.<stage>.json`.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::birank::{birank, build_query_vector, read_scores_csv, write_scores_csv, BiRankConfig, QueryMode, ScoreSet};
use crate::error::{Error, Result};
use crate::features::{featurize_claims, NEIGHBORHOOD_FEATURES, SCORE_FEATURES};
use crate::graph::{load_edge_csv, load_graph, save_graph, BipartiteGraph, NodeId};
use crate::intrinsic::IntrinsicTable;
use crate::labels::{read_labels_csv, ClaimLabel, ClaimLabels, LabelRecord};
use crate::ml::cv::{cross_validate, CvReport, PipelineSpec, Selection};
use crate::ml::dataset::{make_targets, FeatureGroup, LabeledDataset};
use crate::ml::importance::rank_features;
use crate::ml::logistic::{stepwise_select, Criterion};
use crate::ml::metrics::MetricsReport;
use crate::ml::rng_stream;
use crate::ml::smote::{smote, SmoteConfig, SmoteReport};
use crate::ml::split::stratified_split;
use crate::motifs::{enumerate_4cycles, enumerate_6cycles, homophily_report, write_cycles_csv, MotifConfig};
use crate::synth::{generate, SynthConfig, SynthSummary};

pub const GRAPH_FILE: &str = "graph.bin";
pub const SCORES_FILE: &str = "scores.csv";
pub const FEATURES_FILE: &str = "network_features.csv";
pub const CYCLES_FILE: &str = "cycles.csv";
pub const HOMOPHILY_FILE: &str = "homophily.txt";
pub const HOMOPHILY_CSV: &str = "homophily.csv";
pub const SUMMARY_FILE: &str = "experiment/summary.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputPaths {
    pub edges: PathBuf,
    pub intrinsic: PathBuf,
    pub labels: PathBuf,
}

impl Default for InputPaths {
    fn default() -> Self {
        InputPaths { edges: "edges.csv".into(), intrinsic: "intrinsic.csv".into(), labels: "labels.csv".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub importance_repeats: usize,
    pub criterion: Criterion,
    /// Longest prefix of the importance ranking evaluated in the
    /// add-one-feature CV curve; `None` runs the whole ranking.
    pub curve_max_features: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { importance_repeats: 5, criterion: Criterion::Aic, curve_max_features: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: InputPaths,
    /// Last day of the historic period. Defaults to one year before the
    /// latest filing day.
    pub cutoff_day: Option<i64>,
    pub birank: BiRankConfig,
    /// Unlabeled target-period claims sampled into the datasets.
    pub sample_size: usize,
    pub smote: SmoteConfig,
    pub cv_folds: usize,
    pub test_fraction: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub motif_degree_cap: usize,
    pub experiment: ExperimentConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: InputPaths::default(),
            cutoff_day: None,
            birank: BiRankConfig::default(),
            sample_size: 20_000,
            smote: SmoteConfig::default(),
            cv_folds: 10,
            test_fraction: 0.3,
            seed: 42,
            output_dir: "out".into(),
            motif_degree_cap: MotifConfig::default().degree_cap,
            experiment: ExperimentConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Reads TOML (or JSON for a `.json` path). Relative input paths are
    /// resolved against the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg: PipelineConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?
        } else {
            toml::from_str(&text)?
        };
        if let Some(dir) = path.parent() {
            for p in [&mut cfg.input.edges, &mut cfg.input.intrinsic, &mut cfg.input.labels] {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.birank.validate()?;
        self.smote.validate()?;
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!("test_fraction must be in (0, 1), got {}", self.test_fraction)));
        }
        if self.cv_folds < 2 {
            return Err(Error::InvalidConfig("cv_folds must be at least 2".into()));
        }
        if self.motif_degree_cap == 0 {
            return Err(Error::InvalidConfig("motif_degree_cap must be positive".into()));
        }
        Ok(())
    }

    fn out(&self, rel: &str) -> PathBuf {
        self.output_dir.join(rel)
    }

    /// Config as recorded in manifests. The output directory is left out so
    /// runs into different directories stay comparable.
    fn echo(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).unwrap_or(serde_json::Value::Null);
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output_dir");
        }
        v
    }
}

/// Seeds for each randomized step, derived from the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageSeeds {
    pub master: u64,
    pub sample: u64,
    pub split: u64,
    pub smote: u64,
    pub importance: u64,
    pub cv: u64,
}

impl StageSeeds {
    pub fn derive(master: u64) -> Self {
        let s = |k: u64| rng_stream(master, 100 + k).random::<u64>();
        StageSeeds { master, sample: s(1), split: s(2), smote: s(3), importance: s(4), cv: s(5) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Convergence {
    pub iterations: usize,
    pub first_residual: f64,
    pub final_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalSplit {
    pub cutoff_day: i64,
    pub first_day: i64,
    pub last_day: i64,
    pub query_sources: usize,
    /// Latest filing day among query sources; never after the cutoff.
    pub latest_source_day: Option<i64>,
    pub target_claims: usize,
    /// Earliest filing day among target claims; always after the cutoff.
    pub earliest_target_day: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetInfo {
    pub name: String,
    pub rows: usize,
    pub positives: usize,
    pub class_ratio: f64,
    pub labeled_rows: usize,
    pub sampled_unlabeled: usize,
    pub train_rows: usize,
    pub test_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub stage: String,
    pub library_version: String,
    pub config: serde_json::Value,
    pub seeds: StageSeeds,
    /// SHA-256 of each input file read.
    pub inputs: BTreeMap<String, String>,
    pub graph: Option<GraphInfo>,
    pub convergence: Option<Convergence>,
    pub temporal: Option<TemporalSplit>,
    pub datasets: Vec<DatasetInfo>,
    /// Oversample/undersample outcome of each final-model SMOTE run.
    pub smote: BTreeMap<String, SmoteReport>,
    /// SHA-256 of each file written, keyed by path relative to the output directory.
    pub outputs: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphInfo {
    pub claims: usize,
    pub parties: usize,
    pub edges: usize,
    pub weighted: bool,
}

/// Collects manifest entries and timings for one invocation.
pub struct Run<'a> {
    cfg: &'a PipelineConfig,
    pub manifest: RunManifest,
    pub timings: BTreeMap<String, f64>,
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

impl<'a> Run<'a> {
    pub fn new(cfg: &'a PipelineConfig, stage: &str) -> Result<Self> {
        cfg.validate()?;
        std::fs::create_dir_all(&cfg.output_dir)?;
        Ok(Run {
            cfg,
            manifest: RunManifest {
                stage: stage.to_string(),
                library_version: crate::VERSION.to_string(),
                config: cfg.echo(),
                seeds: StageSeeds::derive(cfg.seed),
                inputs: BTreeMap::new(),
                graph: None,
                convergence: None,
                temporal: None,
                datasets: Vec::new(),
                smote: BTreeMap::new(),
                outputs: BTreeMap::new(),
                notes: Vec::new(),
            },
            timings: BTreeMap::new(),
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        self.cfg
    }

    fn timed<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self)?;
        *self.timings.entry(name.to_string()).or_default() += start.elapsed().as_secs_f64();
        Ok(out)
    }

    fn input(&mut self, name: &str, path: &Path) -> Result<()> {
        self.manifest.inputs.insert(name.to_string(), sha256_file(path)?);
        Ok(())
    }

    fn write(&mut self, rel: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let path = self.cfg.out(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut w = BufWriter::new(File::create(&path)?);
        f(&mut w)?;
        w.flush()?;
        drop(w);
        self.manifest.outputs.insert(rel.to_string(), sha256_file(&path)?);
        Ok(())
    }

    fn note(&mut self, text: impl Into<String>) {
        let text = text.into();
        log::info!("{text}");
        self.manifest.notes.push(text);
    }

    /// Writes the manifest and timings files and returns the manifest.
    pub fn finish(self) -> Result<RunManifest> {
        let stage = &self.manifest.stage;
        let m = serde_json::to_string_pretty(&self.manifest)?;
        std::fs::write(self.cfg.out(&format!("manifest.{stage}.json")), m + "\n")?;
        let t = serde_json::to_string_pretty(&self.timings)?;
        std::fs::write(self.cfg.out(&format!("timings.{stage}.json")), t + "\n")?;
        Ok(self.manifest)
    }

    /// Whether every iterative solver in this run converged.
    pub fn converged(&self) -> bool {
        self.manifest.convergence.as_ref().is_none_or(|c| c.converged)
    }
}

// ---------------------------------------------------------------- stages

/// Builds the graph from the edge file and stores a snapshot.
pub fn stage_build(run: &mut Run) -> Result<BipartiteGraph> {
    let edges = run.cfg.input.edges.clone();
    run.input("edges", &edges)?;
    let g = run.timed("build", |_| load_edge_csv(&edges))?;
    record_graph(run, &g);
    let path = run.cfg.out(GRAPH_FILE);
    save_graph(&g, &path)?;
    run.manifest.outputs.insert(GRAPH_FILE.into(), sha256_file(&path)?);
    Ok(g)
}

fn record_graph(run: &mut Run, g: &BipartiteGraph) {
    run.manifest.graph =
        Some(GraphInfo { claims: g.n_claims(), parties: g.n_parties(), edges: g.n_edges(), weighted: g.is_weighted() });
}

/// The snapshot from a previous build stage, or a fresh build from the edge
/// file when there is none.
pub fn load_or_build_graph(run: &mut Run) -> Result<BipartiteGraph> {
    let snap = run.cfg.out(GRAPH_FILE);
    let g = if snap.exists() {
        run.input(GRAPH_FILE, &snap)?;
        run.timed("load_graph", |_| load_graph(&snap))?
    } else {
        let edges = run.cfg.input.edges.clone();
        run.input("edges", &edges)?;
        run.timed("build", |_| load_edge_csv(&edges))?
    };
    record_graph(run, &g);
    Ok(g)
}

fn read_label_records(run: &mut Run) -> Result<Vec<LabelRecord>> {
    let path = run.cfg.input.labels.clone();
    run.input("labels", &path)?;
    read_labels_csv(BufReader::new(File::open(&path)?))
}

/// Cutoff day and the data's filing-day range. The cutoff must leave at
/// least one day on each side.
pub fn resolve_cutoff(cfg: &PipelineConfig, labels: &ClaimLabels) -> Result<(i64, i64, i64)> {
    let (lo, hi) = labels.time_range().ok_or(Error::MissingFilingTime("no claim has a filing day".into()))?;
    let cutoff = cfg.cutoff_day.unwrap_or(hi - 365);
    if cutoff < lo || cutoff >= hi {
        return Err(Error::CutoffOutOfRange { cutoff, min: lo, max: hi });
    }
    Ok((cutoff, lo, hi))
}

/// Labels with everything filed after `cutoff` (or undated) hidden. Used
/// wherever features may only see the historic period.
pub fn historic_labels(labels: &ClaimLabels, cutoff: i64) -> ClaimLabels {
    let mut out = labels.clone();
    for i in 0..labels.len() {
        if labels.filed_day(i).is_none_or(|d| d > cutoff) {
            out.set(i, ClaimLabel::Unknown, labels.filed_day(i));
        }
    }
    out
}

/// Claims filed after the cutoff, in claim-index order.
pub fn target_claims(labels: &ClaimLabels, cutoff: i64) -> Vec<usize> {
    (0..labels.len()).filter(|&i| labels.filed_day(i).is_some_and(|d| d > cutoff)).collect()
}

/// Personalized ranking seeded by fraud filed on or before the cutoff.
pub fn stage_birank(run: &mut Run, g: &BipartiteGraph, labels: &ClaimLabels) -> Result<ScoreSet> {
    let (cutoff, lo, hi) = resolve_cutoff(run.cfg, labels)?;
    let q = build_query_vector(labels, Some(cutoff), QueryMode::BinaryHistoricFraud)?;
    let latest = q.sources.iter().filter_map(|&i| labels.filed_day(i)).max();
    if latest.is_some_and(|d| d > cutoff) {
        return Err(Error::TemporalLeakage(format!(
            "query source filed on day {} after cutoff {cutoff}",
            latest.unwrap_or(0)
        )));
    }
    if q.all_zero {
        run.note("no historic fraud before the cutoff; all scores are zero");
    }
    let targets = target_claims(labels, cutoff);
    run.manifest.temporal = Some(TemporalSplit {
        cutoff_day: cutoff,
        first_day: lo,
        last_day: hi,
        query_sources: q.sources.len(),
        latest_source_day: latest,
        target_claims: targets.len(),
        earliest_target_day: targets.iter().filter_map(|&i| labels.filed_day(i)).min(),
    });
    let cfg = run.cfg.birank;
    let scores = run.timed("birank", |_| birank(g, &q.query, &cfg))?;
    if !scores.converged {
        log::warn!("ranking stopped after {} iterations without converging", scores.iterations_used);
    }
    run.manifest.convergence = Some(Convergence {
        iterations: scores.iterations_used,
        first_residual: scores.first_residual,
        final_residual: scores.final_residual,
        converged: scores.converged,
    });
    run.write(SCORES_FILE, |w| write_scores_csv(w, g, &scores))?;
    Ok(scores)
}

pub fn load_scores(run: &mut Run, g: &BipartiteGraph) -> Result<ScoreSet> {
    let path = run.cfg.out(SCORES_FILE);
    run.input(SCORES_FILE, &path)?;
    read_scores_csv(BufReader::new(File::open(&path)?), g)
}

/// Network features for the given claims. Neighborhood label features see
/// historic labels only when a cutoff is given.
pub fn stage_featurize(
    run: &mut Run,
    g: &BipartiteGraph,
    scores: &ScoreSet,
    labels: &ClaimLabels,
    targets: &[usize],
    cutoff: Option<i64>,
) -> Result<()> {
    let visible = match cutoff {
        Some(c) => historic_labels(labels, c),
        None => labels.clone(),
    };
    let nodes: Vec<NodeId> = targets.iter().map(|&i| NodeId::claim(i as u32)).collect();
    let frame = run.timed("featurize", |_| featurize_claims(g, scores, &visible, &nodes))?;
    run.write(FEATURES_FILE, |w| frame.write_csv(w))?;
    Ok(())
}

/// Cycle listing (optional) and the homophily report.
pub fn stage_motifs(run: &mut Run, g: &BipartiteGraph, labels: Option<&ClaimLabels>, list_cycles: bool) -> Result<()> {
    let cfg = MotifConfig { degree_cap: run.cfg.motif_degree_cap };
    if list_cycles {
        let (c4, c6) = run.timed("cycles", |_| Ok((enumerate_4cycles(g, &cfg), enumerate_6cycles(g, &cfg))))?;
        if c4.skipped_hubs > 0 {
            run.note(format!("{} parties above the degree cap were skipped", c4.skipped_hubs));
        }
        run.write(CYCLES_FILE, |w| write_cycles_csv(w, g, c4.cycles.iter().chain(&c6.cycles)))?;
    }
    if let Some(labels) = labels {
        let report = run.timed("homophily", |_| Ok(homophily_report(g, labels, &cfg)))?;
        run.write(HOMOPHILY_FILE, |w| report.write_text(w))?;
        run.write(HOMOPHILY_CSV, |w| report.write_histograms_csv(w))?;
    }
    Ok(())
}

// ------------------------------------------------------------- datasets

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Target {
    Known,
    Fraud,
}

impl Target {
    pub const ALL: [Target; 2] = [Target::Known, Target::Fraud];

    pub fn name(self) -> &'static str {
        match self {
            Target::Known => "d_known",
            Target::Fraud => "d_fraud",
        }
    }

    pub fn file(self) -> String {
        format!("{}.csv", self.name())
    }
}

fn read_network_features(path: &Path) -> Result<HashMap<String, Vec<f64>>> {
    let mut rdr = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let headers = rdr.headers()?.clone();
    let expected: Vec<&str> = std::iter::once("claim_id").chain(SCORE_FEATURES).chain(NEIGHBORHOOD_FEATURES).collect();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::InvalidRecord { row: 0, message: "unexpected network feature header".into() });
    }
    let mut out = HashMap::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let vals = rec
            .iter()
            .skip(1)
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidRecord { row: n + 1, message: e.to_string() })?;
        out.insert(rec[0].to_string(), vals);
    }
    Ok(out)
}

/// Assembles D_known and D_fraud from target-period claims: every labeled
/// one plus a seeded sample of unlabeled ones. Both share rows and differ
/// in the target. Each gets its own stratified train/test split.
pub fn stage_make_datasets(run: &mut Run) -> Result<BTreeMap<Target, (LabeledDataset, Vec<bool>)>> {
    let records = read_label_records(run)?;
    let intrinsic_path = run.cfg.input.intrinsic.clone();
    run.input("intrinsic", &intrinsic_path)?;
    let intrinsic = IntrinsicTable::load(&intrinsic_path)?;
    let feat_path = run.cfg.out(FEATURES_FILE);
    run.input(FEATURES_FILE, &feat_path)?;
    let network = read_network_features(&feat_path)?;

    let days: Vec<i64> = records.iter().filter_map(|r| r.filed_day).collect();
    let (lo, hi) = match (days.iter().min(), days.iter().max()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(Error::MissingFilingTime("no claim has a filing day".into())),
    };
    let cutoff = run.cfg.cutoff_day.unwrap_or(hi - 365);
    if cutoff < lo || cutoff >= hi {
        return Err(Error::CutoffOutOfRange { cutoff, min: lo, max: hi });
    }

    let target: Vec<&LabelRecord> = records.iter().filter(|r| r.filed_day.is_some_and(|d| d > cutoff)).collect();
    let labeled: Vec<&LabelRecord> = target.iter().copied().filter(|r| r.label.is_known()).collect();
    if labeled.is_empty() {
        return Err(Error::NoLabeledClaims);
    }
    let unlabeled: Vec<&LabelRecord> = target.iter().copied().filter(|r| !r.label.is_known()).collect();
    let take = run.cfg.sample_size.min(unlabeled.len());
    if take < run.cfg.sample_size {
        run.note(format!(
            "only {} unlabeled target claims available; sample_size {} capped",
            unlabeled.len(),
            run.cfg.sample_size
        ));
    }
    let seeds = run.manifest.seeds;
    let mut rng = rng_stream(seeds.sample, 0);
    let mut picked = sample(&mut rng, unlabeled.len(), take).into_vec();
    picked.sort_unstable();
    let mut rows: Vec<&LabelRecord> = labeled.clone();
    rows.extend(picked.iter().map(|&k| unlabeled[k]));
    // keep file order: stable by position in the labels file
    let pos: HashMap<&str, usize> = records.iter().enumerate().map(|(i, r)| (r.claim_id.as_str(), i)).collect();
    rows.sort_by_key(|r| pos[r.claim_id.as_str()]);

    if let Some(r) = rows.iter().find(|r| r.filed_day.is_none_or(|d| d <= cutoff)) {
        return Err(Error::TemporalLeakage(format!("dataset row {} is not in the target period", r.claim_id)));
    }

    let mut names: Vec<String> = intrinsic.names.clone();
    names.extend(SCORE_FEATURES.iter().chain(NEIGHBORHOOD_FEATURES.iter()).map(|s| s.to_string()));
    let mut values = Vec::with_capacity(rows.len() * names.len());
    for r in &rows {
        let intr = intrinsic.row_for(&r.claim_id).ok_or_else(|| Error::UnknownClaimId(r.claim_id.clone()))?;
        let net = network.get(&r.claim_id).ok_or_else(|| Error::UnknownClaimId(r.claim_id.clone()))?;
        values.extend_from_slice(intr);
        values.extend_from_slice(net);
    }
    let ids: Vec<String> = rows.iter().map(|r| r.claim_id.clone()).collect();
    let labels: Vec<ClaimLabel> = rows.iter().map(|r| r.label).collect();
    let (y_known, y_fraud) = make_targets(&labels);
    let base = LabeledDataset::new(ids, names, values, y_known.clone())?;

    let mut out = BTreeMap::new();
    for (t, y) in [(Target::Known, y_known), (Target::Fraud, y_fraud)] {
        let pos = y.iter().filter(|&&v| v == 1).count();
        if pos == 0 || pos == y.len() {
            return Err(Error::DegenerateTarget(format!("{} has {pos} positives out of {} rows", t.name(), y.len())));
        }
        let ds = base.with_target(y)?;
        let (train, test) = stratified_split(&ds.y, run.cfg.test_fraction, seeds.split)?;
        let mut is_test = vec![false; ds.n_rows()];
        for &i in &test {
            is_test[i] = true;
        }
        let split: Vec<&str> = is_test.iter().map(|&b| if b { "test" } else { "train" }).collect();
        run.write(&t.file(), |w| ds.write_csv(w, Some(&split)))?;
        run.manifest.datasets.push(DatasetInfo {
            name: t.name().into(),
            rows: ds.n_rows(),
            positives: ds.positives(),
            class_ratio: ds.class_ratio(),
            labeled_rows: labeled.len(),
            sampled_unlabeled: take,
            train_rows: train.len(),
            test_rows: test.len(),
        });
        out.insert(t, (ds, is_test));
    }
    run.note("datasets hold target-period claims only; earlier labeled claims never enter them");
    Ok(out)
}

// ----------------------------------------------------------- experiment

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Group {
    Intrinsic,
    Score,
    Neighborhood,
    /// Score and neighborhood features together.
    Network,
    All,
}

impl Group {
    pub const ALL: [Group; 5] = [Group::Intrinsic, Group::Score, Group::Neighborhood, Group::Network, Group::All];

    pub fn name(self) -> &'static str {
        match self {
            Group::Intrinsic => "intr",
            Group::Score => "score",
            Group::Neighborhood => "nbh",
            Group::Network => "network",
            Group::All => "all",
        }
    }

    pub fn members(self) -> &'static [FeatureGroup] {
        match self {
            Group::Intrinsic => &[FeatureGroup::Intrinsic],
            Group::Score => &[FeatureGroup::Score],
            Group::Neighborhood => &[FeatureGroup::Neighborhood],
            Group::Network => &[FeatureGroup::Score, FeatureGroup::Neighborhood],
            Group::All => &[FeatureGroup::Intrinsic, FeatureGroup::Score, FeatureGroup::Neighborhood],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub group: String,
    pub candidates: usize,
    pub selected: usize,
    pub cv_auroc: f64,
    pub cv_aupr: f64,
    pub cv_tdl: f64,
    pub test_auroc: f64,
    pub test_aupr: f64,
    pub test_tdl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<SummaryRow>,
}

impl ExperimentReport {
    pub fn get(&self, dataset: Target, group: Group) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.dataset == dataset.name() && r.group == group.name())
    }
}

#[derive(Serialize)]
struct ModelDocument<'a> {
    dataset: &'a str,
    group: &'a str,
    seed: u64,
    smote: &'a SmoteReport,
    model: &'a crate::ml::ModelFit,
    test: &'a MetricsReport,
    cv: Option<&'a CvReport>,
}

fn load_dataset(run: &mut Run, t: Target) -> Result<(LabeledDataset, Vec<bool>)> {
    let path = run.cfg.out(&t.file());
    run.input(&t.file(), &path)?;
    let (ds, split) = LabeledDataset::load(&path)?;
    let split =
        split.ok_or_else(|| Error::InvalidRecord { row: 0, message: format!("{} has no split column", t.file()) })?;
    let is_test = split.iter().map(|s| s == "test").collect();
    Ok((ds, is_test))
}

/// Per dataset and feature group: importance ranking, add-one-feature CV
/// curve, stepwise final model and held-out test metrics.
pub fn stage_experiment(run: &mut Run) -> Result<ExperimentReport> {
    let mut rows = Vec::new();
    let seeds = run.manifest.seeds;
    let exp = run.cfg.experiment.clone();
    let smote_cfg = run.cfg.smote.clone();
    let folds = run.cfg.cv_folds;
    for t in Target::ALL {
        let (ds, is_test) = load_dataset(run, t)?;
        let train_idx: Vec<usize> = (0..ds.n_rows()).filter(|&i| !is_test[i]).collect();
        let test_idx: Vec<usize> = (0..ds.n_rows()).filter(|&i| is_test[i]).collect();
        let train = ds.subset_rows(&train_idx);
        let test = ds.subset_rows(&test_idx);
        let resampled = run.timed("smote", |_| smote(&train, &smote_cfg, seeds.smote))?;
        run.manifest.smote.insert(t.name().to_string(), resampled.report.clone());

        for group in Group::ALL {
            let cols = ds.columns_in(group.members());
            if cols.is_empty() {
                run.note(format!("{}: no {} features", t.name(), group.name()));
                continue;
            }
            let prefix = format!("experiment/{}_{}", t.name(), group.name());

            let (_, ranking) = run.timed("importance", |_| {
                rank_features(&resampled.data, &train, &cols, exp.importance_repeats, seeds.importance)
            })?;
            run.write(&format!("{prefix}_importance.csv"), |w| {
                let mut wtr = csv::Writer::from_writer(w);
                wtr.write_record(["rank", "feature", "importance", "std"])?;
                for (k, r) in ranking.iter().enumerate() {
                    wtr.write_record([
                        (k + 1).to_string(),
                        r.feature.clone(),
                        r.importance.to_string(),
                        r.std.to_string(),
                    ])?;
                }
                wtr.flush()?;
                Ok(())
            })?;

            let ordered: Vec<usize> =
                ranking.iter().map(|r| ds.feature_index(&r.feature)).collect::<Result<Vec<_>>>()?;
            let max_len = exp.curve_max_features.unwrap_or(ordered.len()).clamp(1, ordered.len());
            let mut curve = Vec::with_capacity(max_len);
            for m in 1..=max_len {
                let spec = PipelineSpec {
                    features: ordered[..m].to_vec(),
                    smote: Some(smote_cfg.clone()),
                    selection: Selection::Full,
                };
                let report = run.timed("cv", |_| cross_validate(&train, folds, &spec, seeds.cv))?;
                curve.push((ranking[m - 1].feature.clone(), report));
            }
            let cv_last = curve.last().map(|(_, r)| r.clone());
            run.write(&format!("{prefix}_curve.csv"), |w| {
                let mut wtr = csv::Writer::from_writer(w);
                wtr.write_record([
                    "n_features",
                    "feature_added",
                    "auroc_mean",
                    "auroc_std",
                    "aupr_mean",
                    "aupr_std",
                    "tdl_mean",
                    "tdl_std",
                ])?;
                for (k, (f, r)) in curve.iter().enumerate() {
                    wtr.write_record([
                        (k + 1).to_string(),
                        f.clone(),
                        r.mean.auroc.to_string(),
                        r.std.auroc.to_string(),
                        r.mean.aupr.to_string(),
                        r.std.aupr.to_string(),
                        r.mean.tdl.to_string(),
                        r.std.tdl.to_string(),
                    ])?;
                }
                wtr.flush()?;
                Ok(())
            })?;
            if let Some(r) = &cv_last {
                run.write(&format!("{prefix}_metrics.csv"), |w| r.write_csv(w))?;
            }

            let fit = run.timed("stepwise", |_| stepwise_select(&resampled.data, &cols, &exp.criterion))?;
            let scores = fit.predict_proba(&test)?;
            let metrics = MetricsReport::with_curves(&scores, &test.y)?;
            run.write(&format!("{prefix}_model.json"), |w| {
                let doc = ModelDocument {
                    dataset: t.name(),
                    group: group.name(),
                    seed: seeds.master,
                    smote: &resampled.report,
                    model: &fit,
                    test: &metrics,
                    cv: cv_last.as_ref(),
                };
                serde_json::to_writer_pretty(&mut *w, &doc)?;
                writeln!(w)?;
                Ok(())
            })?;
            run.write(&format!("{prefix}_roc.csv"), |w| write_points(w, ["fpr", "tpr"], &metrics.roc))?;
            run.write(&format!("{prefix}_pr.csv"), |w| write_points(w, ["recall", "precision"], &metrics.pr))?;

            let cv = cv_last.as_ref().map(|r| r.mean);
            rows.push(SummaryRow {
                dataset: t.name().into(),
                group: group.name().into(),
                candidates: cols.len(),
                selected: fit.coefficients.len(),
                cv_auroc: cv.map_or(f64::NAN, |m| m.auroc),
                cv_aupr: cv.map_or(f64::NAN, |m| m.aupr),
                cv_tdl: cv.map_or(f64::NAN, |m| m.tdl),
                test_auroc: metrics.auroc,
                test_aupr: metrics.aupr,
                test_tdl: metrics.tdl,
            });
        }
    }
    run.write(SUMMARY_FILE, |w| {
        let mut wtr = csv::Writer::from_writer(w);
        for r in &rows {
            wtr.serialize(r)?;
        }
        wtr.flush()?;
        Ok(())
    })?;
    Ok(ExperimentReport { rows })
}

fn write_points<W: Write>(w: W, header: [&str; 2], pts: &[(f64, f64)]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header)?;
    for (a, b) in pts {
        wtr.write_record([a.to_string(), b.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

// ------------------------------------------------------------ full runs

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutcome {
    pub manifest: RunManifest,
    pub report: ExperimentReport,
}

/// All stages in order, recorded in a single manifest.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    let mut run = Run::new(cfg, "pipeline")?;
    let g = stage_build(&mut run)?;
    let records = read_label_records(&mut run)?;
    let labels = ClaimLabels::from_records(&g, &records)?;
    let scores = stage_birank(&mut run, &g, &labels)?;
    let cutoff = run.manifest.temporal.as_ref().map(|t| t.cutoff_day);
    let targets = cutoff.map(|c| target_claims(&labels, c)).unwrap_or_default();
    stage_featurize(&mut run, &g, &scores, &labels, &targets, cutoff)?;
    stage_motifs(&mut run, &g, Some(&labels), false)?;
    stage_make_datasets(&mut run)?;
    let report = stage_experiment(&mut run)?;
    let manifest = run.finish()?;
    Ok(PipelineOutcome { manifest, report })
}

/// Labels aligned to `g`, recording the input digest.
pub fn load_labels(run: &mut Run, g: &BipartiteGraph) -> Result<ClaimLabels> {
    let records = read_label_records(run)?;
    ClaimLabels::from_records(g, &records)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerateManifest {
    pub stage: &'static str,
    pub library_version: String,
    pub config: SynthConfig,
    pub summary: SynthSummary,
    pub outputs: BTreeMap<String, String>,
}

/// Writes a synthetic dataset plus `manifest.generate.json` into `dir`.
pub fn generate_dataset(cfg: &SynthConfig, dir: impl AsRef<Path>) -> Result<GenerateManifest> {
    let dir = dir.as_ref();
    let out = generate(cfg)?;
    out.write_dir(dir)?;
    let mut outputs = BTreeMap::new();
    for f in ["edges.csv", "intrinsic.csv", "labels.csv"] {
        outputs.insert(f.to_string(), sha256_file(&dir.join(f))?);
    }
    let manifest = GenerateManifest {
        stage: "generate",
        library_version: crate::VERSION.to_string(),
        config: cfg.clone(),
        summary: out.summary,
        outputs,
    };
    std::fs::write(dir.join("manifest.generate.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_echo() {
        let cfg: PipelineConfig = toml::from_str("seed = 7\ncutoff_day = 100\n[birank]\nalpha = 0.5\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.birank.alpha, 0.5);
        assert_eq!(cfg.sample_size, 20_000);
        assert!(cfg.echo().get("output_dir").is_none());
        assert!(toml::from_str::<PipelineConfig>("bogus = 1").is_err());
    }

    #[test]
    fn invalid_fractions_rejected() {
        let cfg = PipelineConfig { test_fraction: 1.0, ..Default::default() };
        assert!(cfg.validate().unwrap_err().is_config_error());
    }

    #[test]
    fn historic_mask() {
        let mut l = ClaimLabels::unknown(3);
        l.set(0, ClaimLabel::Fraud, Some(5));
        l.set(1, ClaimLabel::Fraud, Some(50));
        l.set(2, ClaimLabel::NonFraud, None);
        let h = historic_labels(&l, 10);
        assert_eq!(h.labels(), &[ClaimLabel::Fraud, ClaimLabel::Unknown, ClaimLabel::Unknown]);
        assert_eq!(target_claims(&l, 10), [1]);
    }

    #[test]
    fn seeds_are_stable() {
        assert_eq!(StageSeeds::derive(42), StageSeeds::derive(42));
        assert_ne!(StageSeeds::derive(42).split, StageSeeds::derive(43).split);
    }
}
