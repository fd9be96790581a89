//! Exact 4-cycle and 6-cycle enumeration and label homophily statistics.
//!
//! A cycle is reported once, in canonical form: the walk starts at its
//! smallest claim index and runs in the direction whose first party index is
//! smaller than its last. Parties above the degree cap are treated as absent,
//! so a hub never contributes a cycle; the number of such parties is reported.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{BipartiteGraph, NodeId, NodeKind};
use crate::labels::{ClaimLabel, ClaimLabels};

pub const DEFAULT_DEGREE_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MotifConfig {
    /// Parties with more incident edges than this are skipped.
    pub degree_cap: usize,
}

impl Default for MotifConfig {
    fn default() -> Self {
        MotifConfig { degree_cap: DEFAULT_DEGREE_CAP }
    }
}

/// Canonical cycle `claims[0], parties[0], claims[1], parties[1], ...`,
/// closing from the last party back to `claims[0]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CycleRecord {
    pub claims: Vec<u32>,
    pub parties: Vec<u32>,
}

impl CycleRecord {
    pub fn length(&self) -> usize {
        self.claims.len() * 2
    }

    /// Node sequence in walk order.
    pub fn nodes(&self) -> Vec<NodeId> {
        self.claims.iter().zip(&self.parties).flat_map(|(&c, &p)| [NodeId::claim(c), NodeId::party(p)]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleEnumeration {
    /// Sorted by canonical key.
    pub cycles: Vec<CycleRecord>,
    pub skipped_hubs: usize,
}

struct Filter<'a> {
    party_ok: Vec<bool>,
    claim_ok: Option<&'a (dyn Fn(usize) -> bool + Sync)>,
    skipped_hubs: usize,
}

impl<'a> Filter<'a> {
    fn new(g: &BipartiteGraph, cfg: &MotifConfig, claim_ok: Option<&'a (dyn Fn(usize) -> bool + Sync)>) -> Self {
        let party_ok: Vec<bool> = (0..g.n_parties()).map(|j| g.party_claims(j).0.len() <= cfg.degree_cap).collect();
        let skipped_hubs = party_ok.iter().filter(|ok| !**ok).count();
        if skipped_hubs > 0 {
            log::info!("cycle enumeration skips {skipped_hubs} parties above degree cap {}", cfg.degree_cap);
        }
        Filter { party_ok, claim_ok, skipped_hubs }
    }

    fn claim(&self, i: usize) -> bool {
        self.claim_ok.is_none_or(|f| f(i))
    }
}

fn four_cycles_from(g: &BipartiteGraph, f: &Filter, a: usize, out: &mut Vec<CycleRecord>) {
    if !f.claim(a) {
        return;
    }
    let mut shared: Vec<(u32, u32)> = Vec::new();
    for &p in g.claim_parties(a).0 {
        if !f.party_ok[p as usize] {
            continue;
        }
        for &b in g.party_claims(p as usize).0 {
            if b as usize > a && f.claim(b as usize) {
                shared.push((b, p));
            }
        }
    }
    shared.sort_unstable();
    for group in shared.chunk_by(|x, y| x.0 == y.0) {
        for (k, &(b, p1)) in group.iter().enumerate() {
            for &(_, p2) in &group[k + 1..] {
                out.push(CycleRecord { claims: vec![a as u32, b], parties: vec![p1, p2] });
            }
        }
    }
}

fn six_cycles_from(g: &BipartiteGraph, f: &Filter, a: usize, out: &mut Vec<CycleRecord>) {
    if !f.claim(a) {
        return;
    }
    let a_parties = g.claim_parties(a).0;
    for &p1 in a_parties {
        if !f.party_ok[p1 as usize] {
            continue;
        }
        for &b in g.party_claims(p1 as usize).0 {
            if b as usize <= a || !f.claim(b as usize) {
                continue;
            }
            for &p2 in g.claim_parties(b as usize).0 {
                if p2 == p1 || !f.party_ok[p2 as usize] {
                    continue;
                }
                for &c in g.party_claims(p2 as usize).0 {
                    if c as usize <= a || c == b || !f.claim(c as usize) {
                        continue;
                    }
                    let c_parties = g.claim_parties(c as usize).0;
                    for &p3 in a_parties {
                        if p3 <= p1 || p3 == p2 || !f.party_ok[p3 as usize] {
                            continue;
                        }
                        if c_parties.binary_search(&p3).is_ok() {
                            out.push(CycleRecord { claims: vec![a as u32, b, c], parties: vec![p1, p2, p3] });
                        }
                    }
                }
            }
        }
    }
}

fn run(
    g: &BipartiteGraph,
    f: &Filter,
    step: fn(&BipartiteGraph, &Filter, usize, &mut Vec<CycleRecord>),
) -> Vec<CycleRecord> {
    // anchors are processed in index order and each anchor emits cycles whose
    // smallest claim is the anchor, so sorting per anchor gives a global order
    let per_anchor: Vec<Vec<CycleRecord>> = (0..g.n_claims())
        .into_par_iter()
        .map(|a| {
            let mut v = Vec::new();
            step(g, f, a, &mut v);
            v.sort_unstable();
            v
        })
        .collect();
    per_anchor.into_iter().flatten().collect()
}

pub fn enumerate_4cycles(g: &BipartiteGraph, cfg: &MotifConfig) -> CycleEnumeration {
    let f = Filter::new(g, cfg, None);
    CycleEnumeration { cycles: run(g, &f, four_cycles_from), skipped_hubs: f.skipped_hubs }
}

pub fn enumerate_6cycles(g: &BipartiteGraph, cfg: &MotifConfig) -> CycleEnumeration {
    let f = Filter::new(g, cfg, None);
    CycleEnumeration { cycles: run(g, &f, six_cycles_from), skipped_hubs: f.skipped_hubs }
}

/// Cycles restricted to claims accepted by `claim_ok`. Equivalent to
/// filtering the full enumeration, without visiting rejected claims.
pub fn enumerate_cycles_where(
    g: &BipartiteGraph,
    cfg: &MotifConfig,
    length: usize,
    claim_ok: &(dyn Fn(usize) -> bool + Sync),
) -> CycleEnumeration {
    let f = Filter::new(g, cfg, Some(claim_ok));
    let step = match length {
        4 => four_cycles_from,
        6 => six_cycles_from,
        other => panic!("cycle length {other} is not supported"),
    };
    CycleEnumeration { cycles: run(g, &f, step), skipped_hubs: f.skipped_hubs }
}

/// Writes `length,claim_1,claim_2,claim_3,party_1,party_2,party_3` using
/// external ids; unused columns of 4-cycles are left empty.
pub fn write_cycles_csv<'a, W, I>(writer: W, g: &BipartiteGraph, cycles: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a CycleRecord>,
{
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["length", "claim_1", "claim_2", "claim_3", "party_1", "party_2", "party_3"])?;
    for cyc in cycles {
        let mut fields = vec![cyc.length().to_string()];
        for k in 0..3 {
            fields.push(cyc.claims.get(k).map(|&c| g.claim_id(c as usize).to_string()).unwrap_or_default());
        }
        for k in 0..3 {
            fields.push(cyc.parties.get(k).map(|&p| g.party_id(p as usize).to_string()).unwrap_or_default());
        }
        wtr.write_record(&fields)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Counts of cycles by number of fraud claims (index = fraud count).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelHistogram {
    pub counts: Vec<u64>,
}

impl LabelHistogram {
    fn new(bins: usize) -> Self {
        LabelHistogram { counts: vec![0; bins] }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Relative frequencies, or `None` when no cycle qualified.
    pub fn frequencies(&self) -> Option<Vec<f64>> {
        let total = self.total();
        (total > 0).then(|| self.counts.iter().map(|&c| c as f64 / total as f64).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartyComposition {
    TwoPeople,
    PersonAndCompany,
    TwoCompanies,
}

impl PartyComposition {
    pub fn as_str(self) -> &'static str {
        match self {
            PartyComposition::TwoPeople => "two_people",
            PartyComposition::PersonAndCompany => "person_and_company",
            PartyComposition::TwoCompanies => "two_companies",
        }
    }
}

/// Mean label ratios over the k-th order neighborhoods of labeled claims.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborhoodRatio {
    pub order: usize,
    pub origin_label: ClaimLabel,
    /// Labeled claims of this kind with a non-empty neighborhood at this order.
    pub origins: usize,
    pub mean_fraud_ratio: f64,
    pub mean_non_fraud_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomophilyReport {
    /// 4-cycles whose two claims are both labeled, by fraud count 0..=2.
    pub cycle4: LabelHistogram,
    /// Same, split by party composition; present only when company flags exist.
    pub cycle4_by_composition: Option<BTreeMap<PartyComposition, LabelHistogram>>,
    /// 6-cycles whose three claims are labeled, by fraud count 0..=3.
    pub cycle6: LabelHistogram,
    pub neighborhood_ratios: Vec<NeighborhoodRatio>,
    pub skipped_hubs: usize,
}

/// Cycle label histograms over fully labeled cycles, and mean fraud /
/// non-fraud ratios in the 2nd and 4th order neighborhoods of labeled claims
/// (denominators include unknown claims; claims whose shell is empty are left
/// out of the mean).
pub fn homophily_report(g: &BipartiteGraph, labels: &ClaimLabels, cfg: &MotifConfig) -> HomophilyReport {
    let labeled = |i: usize| labels.label(i).is_known();
    let is_fraud = |c: &u32| labels.label(*c as usize) == ClaimLabel::Fraud;

    let c4 = enumerate_cycles_where(g, cfg, 4, &labeled);
    let mut cycle4 = LabelHistogram::new(3);
    let mut by_comp: BTreeMap<PartyComposition, LabelHistogram> = BTreeMap::new();
    let with_flags = g.has_company_flags();
    for cyc in &c4.cycles {
        let k = cyc.claims.iter().filter(|c| is_fraud(c)).count();
        cycle4.counts[k] += 1;
        if with_flags {
            let flags: Option<Vec<bool>> = cyc.parties.iter().map(|&p| g.party_is_company(p as usize)).collect();
            if let Some(flags) = flags {
                let comp = match flags.iter().filter(|&&b| b).count() {
                    0 => PartyComposition::TwoPeople,
                    1 => PartyComposition::PersonAndCompany,
                    _ => PartyComposition::TwoCompanies,
                };
                by_comp.entry(comp).or_insert_with(|| LabelHistogram::new(3)).counts[k] += 1;
            }
        }
    }

    let c6 = enumerate_cycles_where(g, cfg, 6, &labeled);
    let mut cycle6 = LabelHistogram::new(4);
    for cyc in &c6.cycles {
        cycle6.counts[cyc.claims.iter().filter(|c| is_fraud(c)).count()] += 1;
    }

    let origins: Vec<usize> = (0..g.n_claims()).filter(|&i| labeled(i)).collect();
    // per labeled claim: its label and (fraud, non-fraud) ratios at orders 2 and 4
    let per_claim: Vec<(ClaimLabel, [Option<(f64, f64)>; 2])> = origins
        .par_iter()
        .map(|&i| {
            let shells = g.bfs_shells(NodeId::claim(i as u32), 4);
            let ratio = |shell: &Vec<NodeId>| {
                if shell.is_empty() {
                    return None;
                }
                let n = shell.len() as f64;
                let count = |want: ClaimLabel| {
                    shell.iter().filter(|m| m.kind == NodeKind::Claim && labels.label(m.index as usize) == want).count()
                        as f64
                };
                Some((count(ClaimLabel::Fraud) / n, count(ClaimLabel::NonFraud) / n))
            };
            (labels.label(i), [ratio(&shells[1]), ratio(&shells[3])])
        })
        .collect();

    let mut neighborhood_ratios = Vec::new();
    for (slot, order) in [(0usize, 2usize), (1, 4)] {
        for origin_label in [ClaimLabel::NonFraud, ClaimLabel::Fraud] {
            let vals: Vec<(f64, f64)> =
                per_claim.iter().filter(|(l, _)| *l == origin_label).filter_map(|(_, r)| r[slot]).collect();
            let n = vals.len();
            let mean = |sel: fn(&(f64, f64)) -> f64| {
                if n == 0 {
                    0.0
                } else {
                    vals.iter().map(sel).sum::<f64>() / n as f64
                }
            };
            neighborhood_ratios.push(NeighborhoodRatio {
                order,
                origin_label,
                origins: n,
                mean_fraud_ratio: mean(|v| v.0),
                mean_non_fraud_ratio: mean(|v| v.1),
            });
        }
    }

    HomophilyReport {
        cycle4,
        cycle4_by_composition: with_flags.then_some(by_comp),
        cycle6,
        neighborhood_ratios,
        skipped_hubs: c4.skipped_hubs,
    }
}

impl HomophilyReport {
    /// Key/value text form.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let hist = |w: &mut W, key: &str, h: &LabelHistogram| -> std::io::Result<()> {
            writeln!(w, "{key}.total = {}", h.total())?;
            let freqs = h.frequencies();
            for (k, c) in h.counts.iter().enumerate() {
                writeln!(w, "{key}.fraud_{k}.count = {c}")?;
                match &freqs {
                    Some(f) => writeln!(w, "{key}.fraud_{k}.frequency = {}", f[k])?,
                    None => writeln!(w, "{key}.fraud_{k}.frequency = empty")?,
                }
            }
            Ok(())
        };
        hist(&mut w, "cycle4", &self.cycle4)?;
        if let Some(by) = &self.cycle4_by_composition {
            for (comp, h) in by {
                hist(&mut w, &format!("cycle4.{}", comp.as_str()), h)?;
            }
        }
        hist(&mut w, "cycle6", &self.cycle6)?;
        for r in &self.neighborhood_ratios {
            let key = format!("n{}.{}", r.order, label_key(r.origin_label));
            writeln!(w, "{key}.origins = {}", r.origins)?;
            writeln!(w, "{key}.mean_fraud_ratio = {}", r.mean_fraud_ratio)?;
            writeln!(w, "{key}.mean_non_fraud_ratio = {}", r.mean_non_fraud_ratio)?;
        }
        writeln!(w, "skipped_hubs = {}", self.skipped_hubs)?;
        Ok(())
    }

    /// `cycle,composition,fraud_claims,count,frequency`.
    pub fn write_histograms_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["cycle", "composition", "fraud_claims", "count", "frequency"])?;
        let mut emit = |cycle: &str, comp: &str, h: &LabelHistogram| -> Result<()> {
            let freqs = h.frequencies();
            for (k, c) in h.counts.iter().enumerate() {
                let f = freqs.as_ref().map(|f| f[k].to_string()).unwrap_or_default();
                wtr.write_record([cycle, comp, &k.to_string(), &c.to_string(), &f])?;
            }
            Ok(())
        };
        emit("4", "all", &self.cycle4)?;
        if let Some(by) = &self.cycle4_by_composition {
            for (comp, h) in by {
                emit("4", comp.as_str(), h)?;
            }
        }
        emit("6", "all", &self.cycle6)?;
        wtr.flush()?;
        Ok(())
    }
}

fn label_key(l: ClaimLabel) -> &'static str {
    match l {
        ClaimLabel::Fraud => "fraud",
        ClaimLabel::NonFraud => "non_fraud",
        ClaimLabel::Unknown => "unknown",
    }
}
