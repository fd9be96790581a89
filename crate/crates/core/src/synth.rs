//! Synthetic claim–party networks with planted fraud rings.
//!
//! Background edges attach each claim to a random number of parties of each
//! kind, chosen with Zipf weights so brokers and experts become hubs. Rings
//! are groups of claims that all attach to the same dedicated parties, which
//! plants 4- and 6-cycles among them. Ring claims are fraudulent with
//! probability `h + (1 - h) b`, other claims with probability `b`, where `h`
//! is the homophily strength and `b` is solved so the expected fraud count is
//! `fraud_rate * n_claims`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{write_edge_csv, EdgeRecord, PartyKind};
use crate::intrinsic::INTRINSIC_COLUMNS;
use crate::labels::{write_labels_csv, ClaimLabel, LabelRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KindConfig {
    /// Number of background parties of this kind.
    pub count: usize,
    /// Mean number of parties of this kind per claim (Poisson).
    pub per_claim: f64,
    /// Zipf exponent of the party popularity weights; 0 is uniform.
    pub zipf_exponent: f64,
    pub max_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartyMix {
    pub policyholder: KindConfig,
    pub broker: KindConfig,
    pub expert: KindConfig,
    pub garage: KindConfig,
}

impl Default for PartyMix {
    fn default() -> Self {
        PartyMix {
            policyholder: KindConfig { count: 18_500, per_claim: 1.7, zipf_exponent: 0.0, max_degree: 50 },
            broker: KindConfig { count: 150, per_claim: 0.9, zipf_exponent: 1.0, max_degree: 4000 },
            expert: KindConfig { count: 150, per_claim: 0.6, zipf_exponent: 1.1, max_degree: 4000 },
            garage: KindConfig { count: 1200, per_claim: 0.4, zipf_exponent: 0.8, max_degree: 1000 },
        }
    }
}

impl PartyMix {
    fn get(&self, kind: PartyKind) -> &KindConfig {
        match kind {
            PartyKind::Policyholder => &self.policyholder,
            PartyKind::Broker => &self.broker,
            PartyKind::Expert => &self.expert,
            PartyKind::Garage => &self.garage,
        }
    }

    pub fn total(&self) -> usize {
        PartyKind::ALL.iter().map(|&k| self.get(k).count).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    /// Required; generation refuses to run without it.
    pub seed: Option<u64>,
    pub n_claims: usize,
    pub parties: PartyMix,
    pub n_rings: usize,
    pub ring_size: usize,
    pub ring_shared_parties: usize,
    pub fraud_rate: f64,
    /// Probability that a fraudulent claim carries a fraud label.
    pub label_known_rate: f64,
    /// Probability that a non-fraudulent claim was investigated and labeled.
    pub investigation_rate: f64,
    pub homophily_strength: f64,
    /// Effect size of fraud on the predictive intrinsic columns; 0 makes
    /// every intrinsic column pure noise.
    pub intrinsic_signal: f64,
    /// Filing days are uniform over `years * 365` days.
    pub years: u32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: None,
            n_claims: 100_000,
            parties: PartyMix::default(),
            n_rings: 160,
            ring_size: 8,
            ring_shared_parties: 2,
            fraud_rate: 0.015,
            label_known_rate: 0.9,
            investigation_rate: 0.02,
            homophily_strength: 0.9,
            intrinsic_signal: 0.25,
            years: 6,
        }
    }
}

impl SynthConfig {
    pub fn with_seed(seed: u64) -> Self {
        SynthConfig { seed: Some(seed), ..Default::default() }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Ok(serde_json::from_str(&text)?)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::InvalidConfig("synth config requires a seed".into()))
    }

    pub fn ring_claims(&self) -> usize {
        self.n_rings * self.ring_size
    }

    /// Background fraud probability `b` for claims outside rings.
    pub fn base_fraud_probability(&self) -> f64 {
        let n = self.n_claims as f64;
        let rh = self.ring_claims() as f64 * self.homophily_strength;
        if n - rh <= 0.0 {
            0.0
        } else {
            (self.fraud_rate * n - rh) / (n - rh)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.seed()?;
        for (name, v) in [
            ("fraud_rate", self.fraud_rate),
            ("label_known_rate", self.label_known_rate),
            ("investigation_rate", self.investigation_rate),
            ("homophily_strength", self.homophily_strength),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must be in [0, 1], got {v}")));
            }
        }
        if self.n_claims == 0 || self.years == 0 {
            return Err(Error::InvalidConfig("n_claims and years must be positive".into()));
        }
        if !(self.intrinsic_signal >= 0.0 && self.intrinsic_signal.is_finite()) {
            return Err(Error::InvalidConfig("intrinsic_signal must be >= 0".into()));
        }
        for kind in PartyKind::ALL {
            let k = self.parties.get(kind);
            if !(k.per_claim >= 0.0 && k.per_claim.is_finite() && k.zipf_exponent >= 0.0) {
                return Err(Error::InvalidConfig(format!("bad degree parameters for {}", kind.as_str())));
            }
            if k.per_claim > 0.0 && (k.count == 0 || k.max_degree == 0) {
                return Err(Error::InvalidConfig(format!("{} needs positive count and max_degree", kind.as_str())));
            }
            if kind == PartyKind::Policyholder && k.count == 0 {
                return Err(Error::InvalidConfig("every claim needs a policyholder".into()));
            }
            // leave headroom so rejection sampling against the cap terminates
            let demand =
                self.n_claims as f64 * k.per_claim.max(if kind == PartyKind::Policyholder { 1.0 } else { 0.0 });
            if demand > 0.8 * (k.count * k.max_degree) as f64 {
                return Err(Error::InfeasibleConfig(format!(
                    "{} capacity {} x {} is too small for about {demand:.0} edges",
                    kind.as_str(),
                    k.count,
                    k.max_degree
                )));
            }
        }
        if self.n_rings > 0 && (self.ring_size < 2 || self.ring_shared_parties == 0) {
            return Err(Error::InfeasibleConfig("rings need at least 2 claims and 1 shared party".into()));
        }
        if self.ring_claims() > self.n_claims {
            return Err(Error::InfeasibleConfig(format!(
                "{} rings of {} claims exceed {} claims",
                self.n_rings, self.ring_size, self.n_claims
            )));
        }
        if self.base_fraud_probability() < 0.0 {
            return Err(Error::InfeasibleConfig(format!(
                "fraud_rate {} is below what {} ring claims at strength {} already imply",
                self.fraud_rate,
                self.ring_claims(),
                self.homophily_strength
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthSummary {
    pub n_claims: usize,
    pub n_parties: usize,
    pub n_edges: usize,
    pub mean_claim_degree: f64,
    pub max_party_degree: Vec<(PartyKind, usize)>,
    pub n_fraud: usize,
    pub n_labeled_fraud: usize,
    pub n_labeled_non_fraud: usize,
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub edges: Vec<EdgeRecord>,
    pub labels: Vec<LabelRecord>,
    /// Ground truth per claim, before labeling.
    pub fraud: Vec<bool>,
    /// Claim indices of each planted ring.
    pub rings: Vec<Vec<usize>>,
    /// Intrinsic values per claim, formatted, in [`INTRINSIC_COLUMNS`] order.
    pub intrinsic: Vec<Vec<String>>,
    pub summary: SynthSummary,
}

pub fn claim_name(i: usize) -> String {
    format!("C{i}")
}

fn party_name(kind: PartyKind, j: usize) -> String {
    let prefix = match kind {
        PartyKind::Policyholder => "PH",
        PartyKind::Broker => "B",
        PartyKind::Expert => "E",
        PartyKind::Garage => "G",
    };
    format!("{prefix}{j}")
}

const RING_KINDS: [PartyKind; 4] = [PartyKind::Garage, PartyKind::Expert, PartyKind::Policyholder, PartyKind::Broker];

fn is_company(kind: PartyKind, rng: &mut ChaCha8Rng) -> bool {
    match kind {
        PartyKind::Broker | PartyKind::Garage => true,
        PartyKind::Expert => false,
        PartyKind::Policyholder => rng.random::<f64>() < 0.05,
    }
}

struct KindSampler {
    weights: WeightedIndex<f64>,
    degree: Vec<usize>,
    company: Vec<bool>,
}

/// Generates a network, labels and intrinsic features. Output is a pure
/// function of the config, including the seed.
pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed()?);
    let n = cfg.n_claims;

    let mut samplers = Vec::with_capacity(4);
    for kind in PartyKind::ALL {
        let k = cfg.parties.get(kind);
        let weights: Vec<f64> = (0..k.count.max(1)).map(|r| ((r + 1) as f64).powf(-k.zipf_exponent)).collect();
        let company = (0..k.count).map(|_| is_company(kind, &mut rng)).collect();
        samplers.push(KindSampler {
            weights: WeightedIndex::new(&weights).map_err(|e| Error::InvalidConfig(e.to_string()))?,
            degree: vec![0; k.count],
            company,
        });
    }

    let mut edges = Vec::with_capacity((n as f64 * 4.0) as usize);
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..n {
        let claim = claim_name(i);
        for (s, kind) in PartyKind::ALL.into_iter().enumerate() {
            let k = cfg.parties.get(kind);
            let mut m = if k.per_claim > 0.0 {
                Poisson::new(k.per_claim).map_err(|e| Error::InvalidConfig(e.to_string()))?.sample(&mut rng) as usize
            } else {
                0
            };
            if kind == PartyKind::Policyholder {
                m = m.max(1);
            }
            m = m.min(k.count);
            chosen.clear();
            let sampler = &mut samplers[s];
            for _ in 0..m {
                let mut pick = None;
                for _ in 0..1000 {
                    let j = sampler.weights.sample(&mut rng);
                    if sampler.degree[j] < k.max_degree && !chosen.contains(&j) {
                        pick = Some(j);
                        break;
                    }
                }
                let Some(j) = pick else { continue };
                sampler.degree[j] += 1;
                chosen.push(j);
                edges.push(EdgeRecord {
                    claim_id: claim.clone(),
                    party_id: party_name(kind, j),
                    party_kind: kind,
                    weight: None,
                    is_company: Some(sampler.company[j]),
                });
            }
        }
    }

    // rings: disjoint claim groups sharing dedicated parties
    let members = sample(&mut rng, n, cfg.ring_claims()).into_vec();
    let rings: Vec<Vec<usize>> = members
        .chunks(cfg.ring_size.max(1))
        .map(|c| {
            let mut c = c.to_vec();
            c.sort_unstable();
            c
        })
        .collect();
    let mut in_ring = vec![false; n];
    for (r, ring) in rings.iter().enumerate() {
        for k in 0..cfg.ring_shared_parties {
            let kind = RING_KINDS[k % RING_KINDS.len()];
            let company = is_company(kind, &mut rng);
            for &i in ring {
                in_ring[i] = true;
                edges.push(EdgeRecord {
                    claim_id: claim_name(i),
                    party_id: format!("R{r}.{k}"),
                    party_kind: kind,
                    weight: None,
                    is_company: Some(company),
                });
            }
        }
    }

    let b = cfg.base_fraud_probability();
    let h = cfg.homophily_strength;
    let fraud: Vec<bool> =
        (0..n).map(|i| rng.random::<f64>() < if in_ring[i] { h + (1.0 - h) * b } else { b }).collect();

    let horizon = i64::from(cfg.years) * 365;
    let mut labels = Vec::with_capacity(n);
    for (i, &f) in fraud.iter().enumerate() {
        let day = rng.random_range(0..horizon);
        let label = if f {
            if rng.random::<f64>() < cfg.label_known_rate {
                ClaimLabel::Fraud
            } else {
                ClaimLabel::Unknown
            }
        } else if rng.random::<f64>() < cfg.investigation_rate {
            ClaimLabel::NonFraud
        } else {
            ClaimLabel::Unknown
        };
        labels.push(LabelRecord { claim_id: claim_name(i), label, filed_day: Some(day) });
    }

    let intrinsic =
        fraud.iter().map(|&f| intrinsic_row(&mut rng, f, cfg.intrinsic_signal)).collect::<Result<Vec<_>>>()?;

    let mut claim_degree = vec![0usize; n];
    for e in &edges {
        let i: usize = e.claim_id[1..].parse().unwrap_or(0);
        claim_degree[i] += 1;
    }
    let ring_parties = rings.len() * cfg.ring_shared_parties;
    let summary = SynthSummary {
        n_claims: n,
        n_parties: samplers.iter().map(|s| s.degree.iter().filter(|&&d| d > 0).count()).sum::<usize>() + ring_parties,
        n_edges: edges.len(),
        mean_claim_degree: edges.len() as f64 / n as f64,
        max_party_degree: PartyKind::ALL
            .into_iter()
            .zip(&samplers)
            .map(|(k, s)| (k, s.degree.iter().copied().max().unwrap_or(0)))
            .collect(),
        n_fraud: fraud.iter().filter(|&&f| f).count(),
        n_labeled_fraud: labels.iter().filter(|l| l.label == ClaimLabel::Fraud).count(),
        n_labeled_non_fraud: labels.iter().filter(|l| l.label == ClaimLabel::NonFraud).count(),
    };
    Ok(SynthOutput { edges, labels, fraud, rings, intrinsic, summary })
}

/// One claim's intrinsic values. The first block of columns shifts with the
/// fraud flag in proportion to `signal`; the rest ignore it.
fn intrinsic_row(rng: &mut ChaCha8Rng, fraud: bool, signal: f64) -> Result<Vec<String>> {
    let s = if fraud { signal } else { 0.0 };
    let bad = |e: rand_distr::PoissonError| Error::InvalidConfig(e.to_string());
    let pois = |rng: &mut ChaCha8Rng, lambda: f64| -> Result<u64> {
        Ok(Poisson::new(lambda).map_err(bad)?.sample(rng) as u64)
    };

    let age = rng.random_range(18..=80u32);
    let code = {
        let u: f64 = rng.random();
        if rng.random::<f64>() < 0.4 * s {
            "full_right"
        } else if u < 0.4 {
            "at_fault"
        } else if u < 0.6 {
            "shared"
        } else {
            "full_right"
        }
    };
    let num_contracts = 1 + pois(rng, 1.5)?;
    let claim_age = rng.random_range(0..=240u32);
    let n_claims1 = pois(rng, 0.3 * (1.0 + 2.0 * s))?;
    let n_claims5 = n_claims1 + pois(rng, 1.0 * (1.0 + 1.5 * s))?;
    let last_claim = rng.random_range(0..=120u32);
    let amount1 = if n_claims1 > 0 { cents(lognormal(rng, 6.0, 1.0)?) } else { 0.0 };
    let amount5 = amount1 + if n_claims5 > n_claims1 { cents(lognormal(rng, 7.0, 1.0)?) } else { 0.0 };
    let refused1 = pois(rng, 0.05 * (1.0 + 4.0 * s))?;
    let refused5 = refused1 + pois(rng, 0.15 * (1.0 + 3.0 * s))?;
    let atfault1 = pois(rng, 0.1)?;
    let atfault5 = atfault1 + pois(rng, 0.3)?;
    let samesits1 = pois(rng, 0.1)?;
    let samesits5 = samesits1 + pois(rng, 0.3)?;
    let people = 1 + pois(rng, 0.5)?;
    let company = pois(rng, 0.7)?;
    let police = (rng.random::<f64>() < 0.3 * (1.0 - 0.8 * s.min(1.0))) as u8;
    let days_report: f64 =
        Exp::new(1.0 / (5.0 * (1.0 + 2.0 * s))).map_err(|e| Error::InvalidConfig(e.to_string()))?.sample(rng);
    let days_report = days_report.round();
    let amount = cents(lognormal(rng, 7.0 + 0.8 * s, 0.8)?);

    let row = vec![
        age.to_string(),
        code.to_string(),
        num_contracts.to_string(),
        claim_age.to_string(),
        n_claims1.to_string(),
        n_claims5.to_string(),
        last_claim.to_string(),
        amount1.to_string(),
        amount5.to_string(),
        refused1.to_string(),
        refused5.to_string(),
        atfault1.to_string(),
        atfault5.to_string(),
        samesits1.to_string(),
        samesits5.to_string(),
        people.to_string(),
        company.to_string(),
        police.to_string(),
        days_report.to_string(),
        amount.to_string(),
    ];
    debug_assert_eq!(row.len(), INTRINSIC_COLUMNS.len());
    Ok(row)
}

fn lognormal(rng: &mut ChaCha8Rng, mu: f64, sigma: f64) -> Result<f64> {
    let d: LogNormal<f64> = LogNormal::new(mu, sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(d.sample(rng))
}

fn cents(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

impl SynthOutput {
    pub fn write_edges<W: Write>(&self, w: W) -> Result<()> {
        write_edge_csv(w, &self.edges)
    }

    pub fn write_labels<W: Write>(&self, w: W) -> Result<()> {
        write_labels_csv(w, &self.labels)
    }

    /// `claim_id,fraud,<intrinsic columns>`, with `fraud` the observed label.
    pub fn write_intrinsic<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["claim_id", "fraud"];
        header.extend(INTRINSIC_COLUMNS);
        wtr.write_record(&header)?;
        for (l, row) in self.labels.iter().zip(&self.intrinsic) {
            let mut rec = vec![l.claim_id.as_str(), l.label.as_str()];
            rec.extend(row.iter().map(String::as_str));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Writes `edges.csv`, `intrinsic.csv` and `labels.csv` into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        self.write_edges(BufWriter::new(File::create(dir.join("edges.csv"))?))?;
        self.write_intrinsic(BufWriter::new(File::create(dir.join("intrinsic.csv"))?))?;
        self.write_labels(BufWriter::new(File::create(dir.join("labels.csv"))?))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn small(seed: u64) -> SynthConfig {
        SynthConfig {
            seed: Some(seed),
            n_claims: 2000,
            parties: PartyMix {
                policyholder: KindConfig { count: 1500, per_claim: 1.7, zipf_exponent: 0.0, max_degree: 50 },
                broker: KindConfig { count: 20, per_claim: 0.9, zipf_exponent: 1.0, max_degree: 400 },
                expert: KindConfig { count: 20, per_claim: 0.6, zipf_exponent: 1.1, max_degree: 400 },
                garage: KindConfig { count: 100, per_claim: 0.4, zipf_exponent: 0.8, max_degree: 100 },
            },
            n_rings: 5,
            ring_size: 4,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn seed_is_required() {
        assert!(matches!(generate(&SynthConfig::default()), Err(Error::InvalidConfig(_))));
        assert!(SynthConfig::from_toml("n_claims = 10").unwrap().seed.is_none());
    }

    #[test]
    fn infeasible_rings() {
        let cfg = SynthConfig { n_rings: 600, ring_size: 4, ..small(1) };
        assert!(matches!(generate(&cfg), Err(Error::InfeasibleConfig(_))));
    }

    #[test]
    fn deterministic_bytes() {
        let out = |seed| {
            let o = generate(&small(seed)).unwrap();
            let mut buf = Vec::new();
            o.write_edges(&mut buf).unwrap();
            o.write_intrinsic(&mut buf).unwrap();
            o.write_labels(&mut buf).unwrap();
            buf
        };
        assert_eq!(out(3), out(3));
        assert_ne!(out(3), out(4));
    }

    #[test]
    fn degrees_respect_caps() {
        let cfg = small(5);
        let o = generate(&cfg).unwrap();
        for (kind, max) in &o.summary.max_party_degree {
            assert!(*max <= cfg.parties.get(*kind).max_degree);
        }
        assert!((o.summary.mean_claim_degree - 3.8).abs() < 0.3, "{}", o.summary.mean_claim_degree);
    }

    #[test]
    fn rings_are_fully_connected() {
        let cfg = SynthConfig { homophily_strength: 1.0, label_known_rate: 1.0, ..small(6) };
        let o = generate(&cfg).unwrap();
        let g = build_graph(o.edges.iter().cloned()).unwrap();
        for ring in &o.rings {
            for &i in ring {
                assert!(o.fraud[i]);
                let node = |i: usize| crate::NodeId::claim(g.claim_index(&claim_name(i)).unwrap() as u32);
                let n2 = g.neighborhood(node(i), 2).unwrap();
                for &j in ring.iter().filter(|&&j| j != i) {
                    assert!(n2.members.contains(&node(j)));
                }
            }
        }
    }

    #[test]
    fn intrinsic_round_trips_through_reader() {
        let o = generate(&small(7)).unwrap();
        let mut buf = Vec::new();
        o.write_intrinsic(&mut buf).unwrap();
        let t = crate::intrinsic::read_intrinsic_csv(buf.as_slice()).unwrap();
        assert_eq!(t.n_rows(), 2000);
        assert!(t.names.iter().any(|n| n.starts_with("responsibilityCode=")));
        assert!(!t.names.iter().any(|n| n == "fraud"));
    }
}
