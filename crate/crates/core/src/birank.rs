//! Fraud propagation scores on the claim–party network.
//!
//! Scores are the fixed point of
//!
//! ```text
//! c = alpha * S p + (1 - alpha) * c0
//! p = S^T c
//! ```
//!
//! with `S = D_C^{-1/2} W D_P^{-1/2}` (claims by parties). Only claims carry
//! prior mass; parties are driven purely by the network. For `alpha < 1` the
//! fixed point is unique and equals `(1 - alpha) (I - alpha S S^T)^{-1} c0`.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, NodeId};
use crate::labels::{ClaimLabel, ClaimLabels};

/// Largest node count accepted by [`birank_direct`].
pub const DIRECT_SOLVE_LIMIT: usize = 5000;

/// Row count above which the operator products are split across threads.
const PARALLEL_ROWS: usize = 1 << 14;

/// Prior fraud mass per claim.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryVector {
    values: Vec<f64>,
}

impl QueryVector {
    /// Validates entries (finite, non-negative). An all-zero vector is rejected
    /// unless `allow_zero` is set.
    pub fn new(values: Vec<f64>, allow_zero: bool) -> Result<Self> {
        if let Some(bad) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidConfig(format!("query entry {bad} is negative or not finite")));
        }
        if !allow_zero && values.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidConfig("query vector is all zero".into()));
        }
        Ok(QueryVector { values })
    }

    /// Unit mass on each listed claim.
    pub fn indicator(n_claims: usize, sources: &[usize]) -> Result<Self> {
        let mut values = vec![0.0; n_claims];
        for &s in sources {
            if s >= n_claims {
                return Err(Error::UnknownNode(NodeId::claim(s as u32)));
            }
            values[s] = 1.0;
        }
        Self::new(values, true)
    }

    pub fn zeros(n_claims: usize) -> Self {
        QueryVector { values: vec![0.0; n_claims] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Every claim and party starts at `1 / (n_claims + n_parties)`.
    #[default]
    UniformDeterministic,
    SeededRandom(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BiRankConfig {
    pub alpha: f64,
    /// Threshold on the relative L1 change of the stacked (c, p) vector.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub init: Init,
    /// Rescale the query vector to sum to one before iterating.
    pub normalize_query: bool,
}

impl Default for BiRankConfig {
    fn default() -> Self {
        BiRankConfig {
            alpha: 0.85,
            tolerance: 1e-8,
            max_iterations: 1000,
            init: Init::UniformDeterministic,
            normalize_query: false,
        }
    }
}

impl BiRankConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        BiRankConfig { alpha, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!("alpha {} not in [0, 1]", self.alpha)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSet {
    pub claim_scores: Vec<f64>,
    pub party_scores: Vec<f64>,
    pub iterations_used: usize,
    pub first_residual: f64,
    pub final_residual: f64,
    pub converged: bool,
}

/// `S` and `S^T` as sparse linear maps, sharing the graph's adjacency.
pub struct NormalizedOperator<'g> {
    graph: &'g BipartiteGraph,
    /// `S` entries in claim-major edge order.
    by_claim: Vec<f64>,
    /// `S` entries in party-major edge order.
    by_party: Vec<f64>,
}

impl<'g> NormalizedOperator<'g> {
    pub fn new(graph: &'g BipartiteGraph) -> Result<Self> {
        let inv_sqrt = |d: f64, node: NodeId| {
            if d > 0.0 {
                Ok(1.0 / d.sqrt())
            } else {
                Err(Error::ZeroDegree(node))
            }
        };
        let claim_scale = graph
            .claim_degrees()
            .iter()
            .enumerate()
            .map(|(i, &d)| inv_sqrt(d, NodeId::claim(i as u32)))
            .collect::<Result<Vec<_>>>()?;
        let party_scale = graph
            .party_degrees()
            .iter()
            .enumerate()
            .map(|(j, &d)| inv_sqrt(d, NodeId::party(j as u32)))
            .collect::<Result<Vec<_>>>()?;

        let mut by_claim = Vec::with_capacity(graph.n_edges());
        for i in 0..graph.n_claims() {
            let (parties, weights) = graph.claim_parties(i);
            for (&j, &w) in parties.iter().zip(weights) {
                by_claim.push(w * claim_scale[i] * party_scale[j as usize]);
            }
        }
        let mut by_party = Vec::with_capacity(graph.n_edges());
        for j in 0..graph.n_parties() {
            let (claims, weights) = graph.party_claims(j);
            for (&i, &w) in claims.iter().zip(weights) {
                by_party.push(w * claim_scale[i as usize] * party_scale[j]);
            }
        }
        Ok(NormalizedOperator { graph, by_claim, by_party })
    }

    /// Entry `S[claim, party]`, zero when the edge is absent.
    pub fn entry(&self, claim: usize, party: usize) -> f64 {
        let (parties, _) = self.graph.claim_parties(claim);
        match parties.binary_search(&(party as u32)) {
            Ok(pos) => self.by_claim[self.graph.claim_edge_range(claim).start + pos],
            Err(_) => 0.0,
        }
    }

    /// `out = S p` (length n_claims).
    pub fn apply(&self, p: &[f64], out: &mut [f64]) {
        let g = self.graph;
        fill(out, |i| {
            let (parties, _) = g.claim_parties(i);
            let s = &self.by_claim[g.claim_edge_range(i)];
            parties.iter().zip(s).map(|(&j, &sij)| sij * p[j as usize]).sum()
        });
    }

    /// `out = S^T c` (length n_parties).
    pub fn apply_transpose(&self, c: &[f64], out: &mut [f64]) {
        let g = self.graph;
        fill(out, |j| {
            let (claims, _) = g.party_claims(j);
            let s = &self.by_party[g.party_edge_range(j)];
            claims.iter().zip(s).map(|(&i, &sij)| sij * c[i as usize]).sum()
        });
    }
}

fn fill<F: Fn(usize) -> f64 + Sync>(out: &mut [f64], row: F) {
    if out.len() >= PARALLEL_ROWS {
        out.par_iter_mut().enumerate().for_each(|(i, o)| *o = row(i));
    } else {
        out.iter_mut().enumerate().for_each(|(i, o)| *o = row(i));
    }
}

/// Iterates the update rules until the relative L1 change of (c, p) drops
/// below `cfg.tolerance` or `cfg.max_iterations` is reached. Non-convergence
/// is reported through [`ScoreSet::converged`].
pub fn birank(g: &BipartiteGraph, query: &QueryVector, cfg: &BiRankConfig) -> Result<ScoreSet> {
    cfg.validate()?;
    if query.len() != g.n_claims() {
        return Err(Error::DimensionMismatch { expected: g.n_claims(), found: query.len() });
    }
    let op = NormalizedOperator::new(g)?;
    let (n_c, n_p) = (g.n_claims(), g.n_parties());
    let alpha = cfg.alpha;

    let mut prior = query.values().to_vec();
    if cfg.normalize_query {
        let total: f64 = prior.iter().sum();
        if total > 0.0 {
            prior.iter_mut().for_each(|v| *v /= total);
        }
    }

    // with no prior mass the unique fixed point is zero
    if alpha < 1.0 && query.is_zero() {
        return Ok(ScoreSet {
            claim_scores: vec![0.0; n_c],
            party_scores: vec![0.0; n_p],
            iterations_used: 0,
            first_residual: 0.0,
            final_residual: 0.0,
            converged: true,
        });
    }

    let (mut c, mut p) = match cfg.init {
        Init::UniformDeterministic => {
            let v = 1.0 / (n_c + n_p) as f64;
            (vec![v; n_c], vec![v; n_p])
        }
        Init::SeededRandom(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = (0..n_c).map(|_| rng.random::<f64>()).collect();
            let p = (0..n_p).map(|_| rng.random::<f64>()).collect();
            (c, p)
        }
    };
    let mut c_next = vec![0.0; n_c];
    let mut p_next = vec![0.0; n_p];

    let mut first_residual = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        iterations += 1;
        op.apply(&p, &mut c_next);
        for (cn, &q) in c_next.iter_mut().zip(&prior) {
            *cn = alpha * *cn + (1.0 - alpha) * q;
        }
        op.apply_transpose(&c_next, &mut p_next);

        let diff = l1_diff(&c_next, &c) + l1_diff(&p_next, &p);
        let norm = l1(&c) + l1(&p);
        residual = if norm > 0.0 {
            diff / norm
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if iterations == 1 {
            first_residual = residual;
        }
        std::mem::swap(&mut c, &mut c_next);
        std::mem::swap(&mut p, &mut p_next);
        if residual < cfg.tolerance {
            converged = true;
            break;
        }
    }

    Ok(ScoreSet {
        claim_scores: c,
        party_scores: p,
        iterations_used: iterations,
        first_residual,
        final_residual: residual,
        converged,
    })
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn l1_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Solves the fixed point directly with a dense LU factorization. Intended
/// as a reference for small graphs.
pub fn birank_direct(g: &BipartiteGraph, query: &QueryVector, alpha: f64) -> Result<ScoreSet> {
    let nodes = g.n_claims() + g.n_parties();
    if nodes > DIRECT_SOLVE_LIMIT {
        return Err(Error::TooLarge { nodes, limit: DIRECT_SOLVE_LIMIT });
    }
    if query.len() != g.n_claims() {
        return Err(Error::DimensionMismatch { expected: g.n_claims(), found: query.len() });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!("alpha {alpha} not in [0, 1]")));
    }
    if alpha == 1.0 {
        return Err(Error::SingularSystem);
    }
    let (n_c, n_p) = (g.n_claims(), g.n_parties());
    let mut s = DMatrix::<f64>::zeros(n_c, n_p);
    for (i, j, w) in g.edges() {
        s[(i, j)] = w / (g.claim_degrees()[i].sqrt() * g.party_degrees()[j].sqrt());
    }
    let system = DMatrix::<f64>::identity(n_c, n_c) - (&s * s.transpose()) * alpha;
    let rhs = DVector::from_iterator(n_c, query.values().iter().map(|&v| (1.0 - alpha) * v));
    let c = system.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    let p = s.transpose() * &c;
    Ok(ScoreSet {
        claim_scores: c.iter().copied().collect(),
        party_scores: p.iter().copied().collect(),
        iterations_used: 0,
        first_residual: 0.0,
        final_residual: 0.0,
        converged: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryMode {
    /// Unit mass on every claim labeled fraud and filed no later than the cutoff.
    #[default]
    BinaryHistoricFraud,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryBuild {
    pub query: QueryVector,
    /// Claim indices carrying prior mass.
    pub sources: Vec<usize>,
    /// Set when no claim qualified as a source.
    pub all_zero: bool,
}

/// Builds the fraud query vector from labels. With `cutoff = None` every
/// fraud label counts; otherwise fraud claims need a filing day `<= cutoff`.
pub fn build_query_vector(labels: &ClaimLabels, cutoff: Option<i64>, mode: QueryMode) -> Result<QueryBuild> {
    let QueryMode::BinaryHistoricFraud = mode;
    let mut sources = Vec::new();
    for i in 0..labels.len() {
        if labels.label(i) != ClaimLabel::Fraud {
            continue;
        }
        let historic = match (cutoff, labels.filed_day(i)) {
            (None, _) => true,
            (Some(cut), Some(day)) => day <= cut,
            (Some(_), None) => return Err(Error::MissingFilingTime(format!("claim#{i}"))),
        };
        if historic {
            sources.push(i);
        }
    }
    let all_zero = sources.is_empty();
    if all_zero {
        log::warn!("query vector has no fraud sources; all scores will be zero");
    }
    let query = QueryVector::indicator(labels.len(), &sources)?;
    Ok(QueryBuild { query, sources, all_zero })
}

/// Writes `node_kind,node_id,score`, claims first then parties.
pub fn write_scores_csv<W: Write>(writer: W, g: &BipartiteGraph, scores: &ScoreSet) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["node_kind", "node_id", "score"])?;
    for (i, s) in scores.claim_scores.iter().enumerate() {
        wtr.write_record(["claim", g.claim_id(i), &s.to_string()])?;
    }
    for (j, s) in scores.party_scores.iter().enumerate() {
        wtr.write_record(["party", g.party_id(j), &s.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a scores file back against `g`. Every node must be present; the
/// returned set is marked converged with zeroed diagnostics.
pub fn read_scores_csv<R: Read>(reader: R, g: &BipartiteGraph) -> Result<ScoreSet> {
    let mut claims = vec![f64::NAN; g.n_claims()];
    let mut parties = vec![f64::NAN; g.n_parties()];
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = n + 1;
        let bad = |message: String| Error::InvalidRecord { row, message };
        let (kind, id, score) = match (rec.get(0), rec.get(1), rec.get(2)) {
            (Some(k), Some(i), Some(s)) => (k, i, s),
            _ => return Err(bad("expected node_kind,node_id,score".into())),
        };
        let score: f64 = score.parse().map_err(|_| bad(format!("bad score `{score}`")))?;
        match kind {
            "claim" => {
                let i = g.claim_index(id).ok_or_else(|| Error::UnknownClaimId(id.into()))?;
                claims[i] = score;
            }
            "party" => {
                let j = g.party_index(id).ok_or_else(|| bad(format!("unknown party `{id}`")))?;
                parties[j] = score;
            }
            other => return Err(bad(format!("bad node kind `{other}`"))),
        }
    }
    if let Some(i) = claims.iter().position(|v| v.is_nan()) {
        return Err(Error::InvalidRecord { row: 0, message: format!("missing score for claim `{}`", g.claim_id(i)) });
    }
    if let Some(j) = parties.iter().position(|v| v.is_nan()) {
        return Err(Error::InvalidRecord { row: 0, message: format!("missing score for party `{}`", g.party_id(j)) });
    }
    Ok(ScoreSet {
        claim_scores: claims,
        party_scores: parties,
        iterations_used: 0,
        first_residual: 0.0,
        final_residual: 0.0,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::example_network;
    use crate::graph::{build_graph, EdgeRecord, PartyKind};

    fn c4_query(g: &BipartiteGraph) -> QueryVector {
        QueryVector::indicator(g.n_claims(), &[g.claim_index("C4").unwrap()]).unwrap()
    }

    #[test]
    fn normalized_entry_matches_hand_value() {
        let g = example_network();
        let op = NormalizedOperator::new(&g).unwrap();
        // d(C1) = 3, d(P1) = 2
        assert!((op.entry(0, 0) - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        assert!((op.entry(0, 0) - 0.40825).abs() < 1e-5);
        assert_eq!(op.entry(1, 1), 0.0);
    }

    #[test]
    fn one_edge_operator_is_identity() {
        let g = build_graph([EdgeRecord::new("c", "p", PartyKind::Garage)]).unwrap();
        let op = NormalizedOperator::new(&g).unwrap();
        assert_eq!(op.entry(0, 0), 1.0);
    }

    #[test]
    fn star_entries_are_uniform() {
        let m = 7;
        let g = build_graph((0..m).map(|k| EdgeRecord::new("c", format!("p{k}"), PartyKind::Policyholder))).unwrap();
        let op = NormalizedOperator::new(&g).unwrap();
        for j in 0..m {
            assert!((op.entry(0, j) - 1.0 / (m as f64).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn c1_score_on_example_network() {
        let g = example_network();
        let cfg = BiRankConfig { tolerance: 1e-10, ..BiRankConfig::with_alpha(0.85) };
        let s = birank(&g, &c4_query(&g), &cfg).unwrap();
        assert!(s.converged);
        assert!((s.claim_scores[0] - 0.1440).abs() <= 5e-4, "{}", s.claim_scores[0]);
        assert!(s.final_residual <= s.first_residual);
    }

    #[test]
    fn alpha_zero_returns_prior() {
        let g = example_network();
        let q = c4_query(&g);
        let s = birank(&g, &q, &BiRankConfig::with_alpha(0.0)).unwrap();
        assert_eq!(s.claim_scores, q.values());
        let op = NormalizedOperator::new(&g).unwrap();
        let mut expect = vec![0.0; g.n_parties()];
        op.apply_transpose(q.values(), &mut expect);
        assert_eq!(s.party_scores, expect);
    }

    #[test]
    fn zero_prior_gives_zero_scores() {
        let g = example_network();
        let s = birank(&g, &QueryVector::zeros(g.n_claims()), &BiRankConfig::default()).unwrap();
        assert!(s.claim_scores.iter().chain(&s.party_scores).all(|&v| v == 0.0));
        assert!(s.converged);
    }

    #[test]
    fn four_cycle_direct_solution() {
        let g = build_graph([
            EdgeRecord::new("a", "x", PartyKind::Broker),
            EdgeRecord::new("a", "y", PartyKind::Broker),
            EdgeRecord::new("b", "x", PartyKind::Broker),
            EdgeRecord::new("b", "y", PartyKind::Broker),
        ])
        .unwrap();
        let q = QueryVector::indicator(2, &[0]).unwrap();
        let direct = birank_direct(&g, &q, 0.5).unwrap();
        // 0.5 * (I - 0.5 * [[.5,.5],[.5,.5]])^-1 e1 = 0.5 * [[1.5, .5], [.5, 1.5]] e1
        assert!((direct.claim_scores[0] - 0.75).abs() < 1e-12);
        assert!((direct.claim_scores[1] - 0.25).abs() < 1e-12);
        // brute-force fixed-point iteration of c = a S S^T c + (1 - a) c0
        let mut c = [0.0f64, 0.0];
        for _ in 0..200 {
            let m = 0.5 * (c[0] + c[1]);
            c = [0.5 * m + 0.5, 0.5 * m];
        }
        assert!((c[0] - direct.claim_scores[0]).abs() < 1e-12);
        assert!((c[1] - direct.claim_scores[1]).abs() < 1e-12);
    }

    #[test]
    fn direct_guards() {
        let g = example_network();
        let q = c4_query(&g);
        assert!(matches!(birank_direct(&g, &q, 1.0), Err(Error::SingularSystem)));
        let s = birank_direct(&g, &q, 0.0).unwrap();
        assert_eq!(s.claim_scores, q.values());
        let short = QueryVector::indicator(3, &[0]).unwrap();
        assert!(matches!(birank(&g, &short, &BiRankConfig::default()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn config_validation() {
        let g = example_network();
        let q = c4_query(&g);
        for cfg in [
            BiRankConfig::with_alpha(1.5),
            BiRankConfig { tolerance: 0.0, ..Default::default() },
            BiRankConfig { max_iterations: 0, ..Default::default() },
        ] {
            assert!(matches!(birank(&g, &q, &cfg), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let g = example_network();
        let cfg = BiRankConfig { max_iterations: 2, tolerance: 1e-14, ..Default::default() };
        let s = birank(&g, &c4_query(&g), &cfg).unwrap();
        assert!(!s.converged);
        assert_eq!(s.iterations_used, 2);
    }

    #[test]
    fn normalized_query_rescales_scores() {
        let g = example_network();
        let q = QueryVector::indicator(5, &[1, 3]).unwrap();
        let cfg = BiRankConfig { tolerance: 1e-12, ..Default::default() };
        let raw = birank(&g, &q, &cfg).unwrap();
        let norm = birank(&g, &q, &BiRankConfig { normalize_query: true, ..cfg }).unwrap();
        for (a, b) in raw.claim_scores.iter().zip(&norm.claim_scores) {
            assert!((a / 2.0 - b).abs() < 1e-9);
        }
    }

    #[test]
    fn query_vector_from_labels() {
        let g = example_network();
        let mut labels = ClaimLabels::unknown(5);
        let c4 = g.claim_index("C4").unwrap();
        let c2 = g.claim_index("C2").unwrap();
        labels.set(c4, ClaimLabel::Fraud, Some(3));
        labels.set(c2, ClaimLabel::NonFraud, Some(5));
        let qb = build_query_vector(&labels, Some(10), QueryMode::BinaryHistoricFraud).unwrap();
        assert_eq!(qb.query.values(), &[0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(!qb.all_zero);

        let before = build_query_vector(&labels, Some(2), QueryMode::BinaryHistoricFraud).unwrap();
        assert!(before.all_zero && before.query.is_zero());

        let all = ClaimLabels::from_labels(vec![ClaimLabel::Fraud; 5]);
        let qb = build_query_vector(&all, None, QueryMode::BinaryHistoricFraud).unwrap();
        assert_eq!(qb.query.values(), &[1.0; 5]);

        assert!(matches!(
            build_query_vector(&all, Some(0), QueryMode::BinaryHistoricFraud),
            Err(Error::MissingFilingTime(_))
        ));
    }

    #[test]
    fn query_vector_validation() {
        assert!(QueryVector::new(vec![0.0, -1.0], true).is_err());
        assert!(QueryVector::new(vec![0.0, 0.0], false).is_err());
        assert!(QueryVector::new(vec![0.0, 0.0], true).is_ok());
    }

    #[test]
    fn scores_csv_round_trip() {
        let g = example_network();
        let s = birank(&g, &c4_query(&g), &BiRankConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_scores_csv(&mut buf, &g, &s).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("node_kind,node_id,score\nclaim,C1,"));
        let back = read_scores_csv(buf.as_slice(), &g).unwrap();
        assert_eq!(back.claim_scores, s.claim_scores);
        assert_eq!(back.party_scores, s.party_scores);
    }
}
