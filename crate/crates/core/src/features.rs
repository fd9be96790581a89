//! Per-claim network features: statistics of propagated fraud scores over the
//! first and second order neighborhoods, and label-based neighborhood counts.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::birank::ScoreSet;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, NodeId};
use crate::labels::{ClaimLabel, ClaimLabels};

pub const SCORE_FEATURES: [&str; 7] = ["scores0", "n1.q1", "n1.med", "n1.max", "n2.q1", "n2.med", "n2.max"];
pub const NEIGHBORHOOD_FEATURES: [&str; 5] = ["n1.size", "n2.size", "n2.ratioFraud", "n2.ratioNonFraud", "n2.binFraud"];

/// Empirical quantile with linear interpolation between order statistics at
/// position `(n - 1) * prob` (zero-based) of the sorted sample. `sorted` must
/// be ascending; an empty sample yields 0.
pub fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    match sorted.len() {
        0 => 0.0,
        1 => sorted[0],
        n => {
            let pos = (n - 1) as f64 * prob.clamp(0.0, 1.0);
            let lo = pos.floor() as usize;
            let frac = pos - lo as f64;
            if lo + 1 >= n {
                sorted[n - 1]
            } else {
                sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ScoreFeatures {
    pub scores0: f64,
    pub n1_q1: f64,
    pub n1_med: f64,
    pub n1_max: f64,
    pub n2_q1: f64,
    pub n2_med: f64,
    pub n2_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct NeighborhoodFeatures {
    pub n1_size: usize,
    pub n2_size: usize,
    pub n2_ratio_fraud: f64,
    pub n2_ratio_non_fraud: f64,
    pub n2_bin_fraud: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetworkFeatureRow {
    pub claim: NodeId,
    pub score: ScoreFeatures,
    pub neighborhood: NeighborhoodFeatures,
}

impl NetworkFeatureRow {
    /// Values in `SCORE_FEATURES` then `NEIGHBORHOOD_FEATURES` order.
    pub fn values(&self) -> [f64; 12] {
        let s = &self.score;
        let n = &self.neighborhood;
        [
            s.scores0,
            s.n1_q1,
            s.n1_med,
            s.n1_max,
            s.n2_q1,
            s.n2_med,
            s.n2_max,
            n.n1_size as f64,
            n.n2_size as f64,
            n.n2_ratio_fraud,
            n.n2_ratio_non_fraud,
            n.n2_bin_fraud as f64,
        ]
    }
}

fn summarize(values: &mut [f64]) -> (f64, f64, f64) {
    values.sort_by(f64::total_cmp);
    (quantile_sorted(values, 0.25), quantile_sorted(values, 0.5), values.last().copied().unwrap_or(0.0))
}

fn claim_index(g: &BipartiteGraph, claim: NodeId) -> Result<usize> {
    if claim.is_claim() && g.contains(claim) {
        Ok(claim.index as usize)
    } else {
        Err(Error::UnknownNode(claim))
    }
}

fn score_features_with(g: &BipartiteGraph, scores: &ScoreSet, i: usize, n2: &[u32]) -> ScoreFeatures {
    let mut n1_scores: Vec<f64> = g.claim_parties(i).0.iter().map(|&j| scores.party_scores[j as usize]).collect();
    let mut n2_scores: Vec<f64> = n2.iter().map(|&k| scores.claim_scores[k as usize]).collect();
    let (n1_q1, n1_med, n1_max) = summarize(&mut n1_scores);
    let (n2_q1, n2_med, n2_max) = summarize(&mut n2_scores);
    ScoreFeatures { scores0: scores.claim_scores[i], n1_q1, n1_med, n1_max, n2_q1, n2_med, n2_max }
}

fn neighborhood_features_with(g: &BipartiteGraph, labels: &ClaimLabels, i: usize, n2: &[u32]) -> NeighborhoodFeatures {
    let fraud = n2.iter().filter(|&&k| labels.label(k as usize) == ClaimLabel::Fraud).count();
    let non_fraud = n2.iter().filter(|&&k| labels.label(k as usize) == ClaimLabel::NonFraud).count();
    let size = n2.len();
    let ratio = |count: usize| if size == 0 { 0.0 } else { count as f64 / size as f64 };
    NeighborhoodFeatures {
        n1_size: g.claim_parties(i).0.len(),
        n2_size: size,
        n2_ratio_fraud: ratio(fraud),
        n2_ratio_non_fraud: ratio(non_fraud),
        n2_bin_fraud: (fraud > 0) as u8,
    }
}

fn second_order(g: &BipartiteGraph, i: usize) -> Vec<u32> {
    let mut mark = vec![false; g.n_claims()];
    let mut out = Vec::new();
    g.second_order_claims_into(i, &mut mark, &mut out);
    out
}

/// Score statistics for one claim: its own score, then first quartile,
/// median and maximum of party scores in N1 and claim scores in N2.
/// Statistics over an empty neighborhood are 0.
pub fn score_features(g: &BipartiteGraph, scores: &ScoreSet, claim: NodeId) -> Result<ScoreFeatures> {
    let i = claim_index(g, claim)?;
    check_scores(g, scores)?;
    if !scores.converged {
        log::warn!("score features computed from non-converged scores");
    }
    Ok(score_features_with(g, scores, i, &second_order(g, i)))
}

/// Neighborhood sizes and label ratios. Ratios divide by the full N2 size,
/// unknown claims included; an empty N2 gives ratios of 0.
pub fn neighborhood_features(g: &BipartiteGraph, labels: &ClaimLabels, claim: NodeId) -> Result<NeighborhoodFeatures> {
    let i = claim_index(g, claim)?;
    check_labels(g, labels)?;
    Ok(neighborhood_features_with(g, labels, i, &second_order(g, i)))
}

fn check_scores(g: &BipartiteGraph, scores: &ScoreSet) -> Result<()> {
    if scores.claim_scores.len() != g.n_claims() {
        return Err(Error::DimensionMismatch { expected: g.n_claims(), found: scores.claim_scores.len() });
    }
    if scores.party_scores.len() != g.n_parties() {
        return Err(Error::DimensionMismatch { expected: g.n_parties(), found: scores.party_scores.len() });
    }
    Ok(())
}

fn check_labels(g: &BipartiteGraph, labels: &ClaimLabels) -> Result<()> {
    if labels.len() != g.n_claims() {
        return Err(Error::DimensionMismatch { expected: g.n_claims(), found: labels.len() });
    }
    Ok(())
}

/// Feature rows for a set of target claims, in the order given.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureFrame {
    pub claim_ids: Vec<String>,
    pub rows: Vec<NetworkFeatureRow>,
    /// False when the scores came from a run that hit its iteration cap.
    pub scores_converged: bool,
}

impl FeatureFrame {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_names() -> impl Iterator<Item = &'static str> {
        SCORE_FEATURES.into_iter().chain(NEIGHBORHOOD_FEATURES)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["claim_id"];
        header.extend(Self::column_names());
        wtr.write_record(&header)?;
        for (id, row) in self.claim_ids.iter().zip(&self.rows) {
            let v = row.values();
            let mut fields = vec![id.clone()];
            fields.extend(v[..7].iter().map(|x| x.to_string()));
            fields.push(row.neighborhood.n1_size.to_string());
            fields.push(row.neighborhood.n2_size.to_string());
            fields.push(v[9].to_string());
            fields.push(v[10].to_string());
            fields.push(row.neighborhood.n2_bin_fraud.to_string());
            wtr.write_record(&fields)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Extracts score and neighborhood features for each target claim. Rows are
/// computed in parallel and returned in target order.
pub fn featurize_claims(
    g: &BipartiteGraph,
    scores: &ScoreSet,
    labels: &ClaimLabels,
    targets: &[NodeId],
) -> Result<FeatureFrame> {
    check_scores(g, scores)?;
    check_labels(g, labels)?;
    for &t in targets {
        claim_index(g, t)?;
    }
    if !scores.converged {
        log::warn!("featurizing with non-converged scores");
    }
    let rows: Vec<NetworkFeatureRow> = targets
        .par_iter()
        .map_init(
            || (vec![false; g.n_claims()], Vec::new()),
            |(mark, n2), &claim| {
                let i = claim.index as usize;
                g.second_order_claims_into(i, mark, n2);
                NetworkFeatureRow {
                    claim,
                    score: score_features_with(g, scores, i, n2),
                    neighborhood: neighborhood_features_with(g, labels, i, n2),
                }
            },
        )
        .collect();
    Ok(FeatureFrame {
        claim_ids: targets.iter().map(|t| g.claim_id(t.index as usize).to_string()).collect(),
        rows,
        scores_converged: scores.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::birank::{birank, BiRankConfig, QueryVector};
    use crate::graph::tests::example_network;
    use crate::graph::{build_graph, EdgeRecord, PartyKind};

    fn example() -> (BipartiteGraph, ScoreSet, ClaimLabels) {
        let g = example_network();
        let c4 = g.claim_index("C4").unwrap();
        let q = QueryVector::indicator(g.n_claims(), &[c4]).unwrap();
        let cfg = BiRankConfig { tolerance: 1e-10, ..BiRankConfig::with_alpha(0.85) };
        let s = birank(&g, &q, &cfg).unwrap();
        let mut labels = ClaimLabels::unknown(g.n_claims());
        labels.set(c4, ClaimLabel::Fraud, None);
        labels.set(g.claim_index("C2").unwrap(), ClaimLabel::NonFraud, None);
        (g, s, labels)
    }

    #[test]
    fn quantile_convention() {
        assert_eq!(quantile_sorted(&[], 0.25), 0.0);
        assert_eq!(quantile_sorted(&[4.0], 0.25), 4.0);
        // position 0.5 between the first two of three
        assert!((quantile_sorted(&[1.0, 2.0, 10.0], 0.25) - 1.5).abs() < 1e-15);
        assert_eq!(quantile_sorted(&[1.0, 2.0, 3.0, 4.0], 0.5), 2.5);
        assert!((quantile_sorted(&[1.0, 2.0, 3.0, 4.0], 0.25) - 1.75).abs() < 1e-15);
        assert_eq!(quantile_sorted(&[1.0, 2.0, 3.0, 4.0], 1.0), 4.0);
    }

    #[test]
    fn c1_row_matches_reference_values() {
        let (g, s, labels) = example();
        let f = score_features(&g, &s, NodeId::claim(0)).unwrap();
        let expect = [0.1440, 0.1140, 0.1250, 0.2630, 0.1160, 0.1285, 0.2620];
        let got = [f.scores0, f.n1_q1, f.n1_med, f.n1_max, f.n2_q1, f.n2_med, f.n2_max];
        for (name, (e, v)) in SCORE_FEATURES.iter().zip(expect.iter().zip(got)) {
            assert!((e - v).abs() <= 5e-4, "{name}: expected {e}, got {v}");
        }
        let n = neighborhood_features(&g, &labels, NodeId::claim(0)).unwrap();
        assert_eq!(
            n,
            NeighborhoodFeatures {
                n1_size: 3,
                n2_size: 4,
                n2_ratio_fraud: 0.25,
                n2_ratio_non_fraud: 0.25,
                n2_bin_fraud: 1
            }
        );
    }

    #[test]
    fn singleton_first_order() {
        let g =
            build_graph([EdgeRecord::new("a", "x", PartyKind::Garage), EdgeRecord::new("b", "x", PartyKind::Garage)])
                .unwrap();
        let s = ScoreSet {
            claim_scores: vec![0.3, 0.7],
            party_scores: vec![0.42],
            iterations_used: 1,
            first_residual: 0.0,
            final_residual: 0.0,
            converged: true,
        };
        let f = score_features(&g, &s, NodeId::claim(0)).unwrap();
        assert_eq!((f.n1_q1, f.n1_med, f.n1_max), (0.42, 0.42, 0.42));
        assert_eq!((f.n2_q1, f.n2_med, f.n2_max), (0.7, 0.7, 0.7));
    }

    #[test]
    fn empty_second_order_is_all_zero() {
        let g = build_graph([
            EdgeRecord::new("a", "x", PartyKind::Garage),
            EdgeRecord::new("a", "y", PartyKind::Broker),
            EdgeRecord::new("b", "z", PartyKind::Garage),
        ])
        .unwrap();
        let s = ScoreSet {
            claim_scores: vec![0.5, 0.1],
            party_scores: vec![0.2, 0.3, 0.1],
            iterations_used: 1,
            first_residual: 0.0,
            final_residual: 0.0,
            converged: true,
        };
        let f = score_features(&g, &s, NodeId::claim(0)).unwrap();
        assert_eq!((f.n2_q1, f.n2_med, f.n2_max), (0.0, 0.0, 0.0));
        let n = neighborhood_features(&g, &ClaimLabels::unknown(2), NodeId::claim(0)).unwrap();
        assert_eq!(n, NeighborhoodFeatures { n1_size: 2, ..Default::default() });
    }

    #[test]
    fn all_unknown_neighborhood() {
        let mut recs = vec![EdgeRecord::new("c", "hub", PartyKind::Broker)];
        recs.extend((0..10).map(|k| EdgeRecord::new(format!("o{k}"), "hub", PartyKind::Broker)));
        let g = build_graph(recs).unwrap();
        let n = neighborhood_features(&g, &ClaimLabels::unknown(g.n_claims()), NodeId::claim(0)).unwrap();
        assert_eq!(n, NeighborhoodFeatures { n1_size: 1, n2_size: 10, ..Default::default() });
    }

    #[test]
    fn frame_for_targets() {
        let (g, s, labels) = example();
        let empty = featurize_claims(&g, &s, &labels, &[]).unwrap();
        assert!(empty.is_empty());
        let mut buf = Vec::new();
        empty.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "claim_id,scores0,n1.q1,n1.med,n1.max,n2.q1,n2.med,n2.max,n1.size,n2.size,n2.ratioFraud,n2.ratioNonFraud,n2.binFraud\n"
        );

        let all: Vec<NodeId> = (0..5).map(NodeId::claim).collect();
        let frame = featurize_claims(&g, &s, &labels, &all).unwrap();
        assert_eq!(frame.len(), 5);
        let c4 = g.claim_index("C4").unwrap();
        let top = (0..5).max_by(|&a, &b| frame.rows[a].score.scores0.total_cmp(&frame.rows[b].score.scores0));
        assert_eq!(top, Some(c4));
        assert_eq!(frame.claim_ids[0], "C1");

        let one = featurize_claims(&g, &s, &labels, &[NodeId::claim(0)]).unwrap();
        assert_eq!(one.rows[0], frame.rows[0]);
        assert!(featurize_claims(&g, &s, &labels, &[NodeId::party(0)]).is_err());
    }
}
