//! Immutable bipartite claim–party network.
//!
//! Claims and parties live in separate index spaces. Edges are stored twice,
//! once in claim-major and once in party-major compressed sparse row form, so
//! both orientations of the weight matrix can be traversed without a
//! transpose. Degrees are the sum of incident weights (the incident edge count
//! for unweighted input).

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Claim,
    Party,
}

/// Dense index of a node within its kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId {
    pub kind: NodeKind,
    pub index: u32,
}

impl NodeId {
    pub fn claim(index: u32) -> Self {
        NodeId { kind: NodeKind::Claim, index }
    }

    pub fn party(index: u32) -> Self {
        NodeId { kind: NodeKind::Party, index }
    }

    pub fn is_claim(self) -> bool {
        self.kind == NodeKind::Claim
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NodeKind::Claim => write!(f, "claim#{}", self.index),
            NodeKind::Party => write!(f, "party#{}", self.index),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartyKind {
    Policyholder,
    Broker,
    Expert,
    Garage,
}

impl PartyKind {
    pub const ALL: [PartyKind; 4] = [PartyKind::Policyholder, PartyKind::Broker, PartyKind::Expert, PartyKind::Garage];

    pub fn as_str(self) -> &'static str {
        match self {
            PartyKind::Policyholder => "policyholder",
            PartyKind::Broker => "broker",
            PartyKind::Expert => "expert",
            PartyKind::Garage => "garage",
        }
    }

    fn code(self) -> u8 {
        self as u8
    }

    fn from_code(code: u8) -> Option<Self> {
        PartyKind::ALL.get(code as usize).copied()
    }
}

impl fmt::Display for PartyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PartyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "policyholder" => Ok(PartyKind::Policyholder),
            "broker" => Ok(PartyKind::Broker),
            "expert" => Ok(PartyKind::Expert),
            "garage" => Ok(PartyKind::Garage),
            other => Err(format!("unknown party kind `{other}`")),
        }
    }
}

/// One row of edge input.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub claim_id: String,
    pub party_id: String,
    pub party_kind: PartyKind,
    pub weight: Option<f64>,
    pub is_company: Option<bool>,
}

impl EdgeRecord {
    pub fn new(claim_id: impl Into<String>, party_id: impl Into<String>, kind: PartyKind) -> Self {
        EdgeRecord {
            claim_id: claim_id.into(),
            party_id: party_id.into(),
            party_kind: kind,
            weight: None,
            is_company: None,
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = Some(weight);
        self
    }
}

/// Compressed adjacency for one orientation.
#[derive(Debug, Clone, PartialEq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

impl Csr {
    fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (lo, hi) = (self.offsets[i], self.offsets[i + 1]);
        (&self.targets[lo..hi], &self.weights[lo..hi])
    }

    fn len(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    weighted: bool,
    by_claim: Csr,
    by_party: Csr,
    claim_degrees: Vec<f64>,
    party_degrees: Vec<f64>,
    claim_ids: Vec<String>,
    party_ids: Vec<String>,
    claim_lookup: HashMap<String, u32>,
    party_lookup: HashMap<String, u32>,
    party_kinds: Vec<PartyKind>,
    party_company: Vec<Option<bool>>,
}

/// Nodes at exactly `order` hops from `origin`, as disjoint BFS shells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    pub origin: NodeId,
    pub order: usize,
    pub members: Vec<NodeId>,
}

impl Neighborhood {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Accumulates edge records; [`GraphBuilder::finish`] produces the immutable graph.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    claim_ids: Vec<String>,
    party_ids: Vec<String>,
    claim_lookup: HashMap<String, u32>,
    party_lookup: HashMap<String, u32>,
    party_kinds: Vec<PartyKind>,
    party_company: Vec<Option<bool>>,
    edges: Vec<(u32, u32, f64)>,
    weighted: bool,
    rows: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: EdgeRecord) -> Result<()> {
        self.rows += 1;
        let row = self.rows;
        let weight = match record.weight {
            Some(w) if !(w.is_finite() && w > 0.0) => return Err(Error::NonPositiveWeight { row }),
            Some(w) => {
                self.weighted = true;
                w
            }
            None => 1.0,
        };
        if record.claim_id.is_empty() || record.party_id.is_empty() {
            return Err(Error::InvalidRecord { row, message: "empty node id".into() });
        }

        let claim = match self.claim_lookup.get(&record.claim_id) {
            Some(&i) => i,
            None => {
                let i = self.claim_ids.len() as u32;
                self.claim_lookup.insert(record.claim_id.clone(), i);
                self.claim_ids.push(record.claim_id);
                i
            }
        };
        let party = match self.party_lookup.get(&record.party_id) {
            Some(&j) => {
                let j_us = j as usize;
                if self.party_kinds[j_us] != record.party_kind {
                    return Err(Error::ConflictingPartyKind(record.party_id));
                }
                match (self.party_company[j_us], record.is_company) {
                    (Some(a), Some(b)) if a != b => return Err(Error::ConflictingCompanyFlag(record.party_id)),
                    (None, Some(b)) => self.party_company[j_us] = Some(b),
                    _ => {}
                }
                j
            }
            None => {
                let j = self.party_ids.len() as u32;
                self.party_lookup.insert(record.party_id.clone(), j);
                self.party_ids.push(record.party_id);
                self.party_kinds.push(record.party_kind);
                self.party_company.push(record.is_company);
                j
            }
        };
        self.edges.push((claim, party, weight));
        Ok(())
    }

    pub fn finish(self) -> Result<BipartiteGraph> {
        if self.edges.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(BipartiteGraph::assemble(
            self.weighted,
            self.edges,
            self.claim_ids,
            self.party_ids,
            self.party_kinds,
            self.party_company,
        ))
    }
}

/// Builds a graph from a stream of edge records, merging repeated
/// (claim, party) pairs by summing their weights.
pub fn build_graph<I>(records: I) -> Result<BipartiteGraph>
where
    I: IntoIterator<Item = EdgeRecord>,
{
    let mut builder = GraphBuilder::new();
    for record in records {
        builder.push(record)?;
    }
    builder.finish()
}

impl BipartiteGraph {
    fn assemble(
        weighted: bool,
        mut edges: Vec<(u32, u32, f64)>,
        claim_ids: Vec<String>,
        party_ids: Vec<String>,
        party_kinds: Vec<PartyKind>,
        party_company: Vec<Option<bool>>,
    ) -> Self {
        let n_claims = claim_ids.len();
        let n_parties = party_ids.len();

        // stable so that duplicate weights are summed in input order
        edges.sort_by_key(|&(c, p, _)| (c, p));
        let mut merged: Vec<(u32, u32, f64)> = Vec::with_capacity(edges.len());
        for (c, p, w) in edges {
            match merged.last_mut() {
                Some(last) if last.0 == c && last.1 == p => last.2 += w,
                _ => merged.push((c, p, w)),
            }
        }

        let mut claim_offsets = vec![0usize; n_claims + 1];
        let mut party_offsets = vec![0usize; n_parties + 1];
        for &(c, p, _) in &merged {
            claim_offsets[c as usize + 1] += 1;
            party_offsets[p as usize + 1] += 1;
        }
        for i in 0..n_claims {
            claim_offsets[i + 1] += claim_offsets[i];
        }
        for j in 0..n_parties {
            party_offsets[j + 1] += party_offsets[j];
        }

        let by_claim = Csr {
            offsets: claim_offsets,
            targets: merged.iter().map(|e| e.1).collect(),
            weights: merged.iter().map(|e| e.2).collect(),
        };

        let mut cursor = party_offsets.clone();
        let mut party_targets = vec![0u32; merged.len()];
        let mut party_weights = vec![0f64; merged.len()];
        for &(c, p, w) in &merged {
            let slot = &mut cursor[p as usize];
            party_targets[*slot] = c;
            party_weights[*slot] = w;
            *slot += 1;
        }
        let by_party = Csr { offsets: party_offsets, targets: party_targets, weights: party_weights };

        let claim_degrees = (0..n_claims).map(|i| by_claim.row(i).1.iter().sum()).collect();
        let party_degrees = (0..n_parties).map(|j| by_party.row(j).1.iter().sum()).collect();

        let claim_lookup = claim_ids.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        let party_lookup = party_ids.iter().enumerate().map(|(j, s)| (s.clone(), j as u32)).collect();

        BipartiteGraph {
            weighted,
            by_claim,
            by_party,
            claim_degrees,
            party_degrees,
            claim_ids,
            party_ids,
            claim_lookup,
            party_lookup,
            party_kinds,
            party_company,
        }
    }

    pub fn n_claims(&self) -> usize {
        self.claim_ids.len()
    }

    pub fn n_parties(&self) -> usize {
        self.party_ids.len()
    }

    pub fn n_edges(&self) -> usize {
        self.by_claim.targets.len()
    }

    /// True when at least one input record carried an explicit weight.
    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn contains(&self, node: NodeId) -> bool {
        match node.kind {
            NodeKind::Claim => (node.index as usize) < self.n_claims(),
            NodeKind::Party => (node.index as usize) < self.n_parties(),
        }
    }

    fn check(&self, node: NodeId) -> Result<()> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(Error::UnknownNode(node))
        }
    }

    pub fn degree(&self, node: NodeId) -> Result<f64> {
        self.check(node)?;
        Ok(match node.kind {
            NodeKind::Claim => self.claim_degrees[node.index as usize],
            NodeKind::Party => self.party_degrees[node.index as usize],
        })
    }

    /// Number of incident edges, regardless of weights.
    pub fn edge_count(&self, node: NodeId) -> Result<usize> {
        self.check(node)?;
        Ok(match node.kind {
            NodeKind::Claim => self.by_claim.len(node.index as usize),
            NodeKind::Party => self.by_party.len(node.index as usize),
        })
    }

    pub fn claim_degrees(&self) -> &[f64] {
        &self.claim_degrees
    }

    pub fn party_degrees(&self) -> &[f64] {
        &self.party_degrees
    }

    /// Parties of claim `i` (sorted by index) and the matching edge weights.
    pub fn claim_parties(&self, i: usize) -> (&[u32], &[f64]) {
        self.by_claim.row(i)
    }

    /// Claims of party `j` (sorted by index) and the matching edge weights.
    pub fn party_claims(&self, j: usize) -> (&[u32], &[f64]) {
        self.by_party.row(j)
    }

    pub fn neighbors(&self, node: NodeId) -> Result<Vec<NodeId>> {
        self.check(node)?;
        Ok(match node.kind {
            NodeKind::Claim => self.claim_parties(node.index as usize).0.iter().map(|&j| NodeId::party(j)).collect(),
            NodeKind::Party => self.party_claims(node.index as usize).0.iter().map(|&i| NodeId::claim(i)).collect(),
        })
    }

    /// Positions of claim `i`'s edges in claim-major edge order.
    pub fn claim_edge_range(&self, i: usize) -> std::ops::Range<usize> {
        self.by_claim.range(i)
    }

    /// Positions of party `j`'s edges in party-major edge order.
    pub fn party_edge_range(&self, j: usize) -> std::ops::Range<usize> {
        self.by_party.range(j)
    }

    /// Weight of the (claim, party) edge, zero when absent.
    pub fn weight(&self, claim: usize, party: usize) -> f64 {
        let (parties, weights) = self.claim_parties(claim);
        match parties.binary_search(&(party as u32)) {
            Ok(pos) => weights[pos],
            Err(_) => 0.0,
        }
    }

    /// Iterates all edges as (claim, party, weight) in claim-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_claims()).flat_map(move |i| {
            let (ps, ws) = self.claim_parties(i);
            ps.iter().zip(ws).map(move |(&j, &w)| (i, j as usize, w))
        })
    }

    pub fn claim_id(&self, i: usize) -> &str {
        &self.claim_ids[i]
    }

    pub fn party_id(&self, j: usize) -> &str {
        &self.party_ids[j]
    }

    pub fn external_id(&self, node: NodeId) -> Result<&str> {
        self.check(node)?;
        Ok(match node.kind {
            NodeKind::Claim => self.claim_id(node.index as usize),
            NodeKind::Party => self.party_id(node.index as usize),
        })
    }

    pub fn claim_index(&self, id: &str) -> Option<usize> {
        self.claim_lookup.get(id).map(|&i| i as usize)
    }

    pub fn party_index(&self, id: &str) -> Option<usize> {
        self.party_lookup.get(id).map(|&j| j as usize)
    }

    pub fn party_kind(&self, j: usize) -> PartyKind {
        self.party_kinds[j]
    }

    pub fn party_is_company(&self, j: usize) -> Option<bool> {
        self.party_company[j]
    }

    pub fn has_company_flags(&self) -> bool {
        self.party_company.iter().any(Option::is_some)
    }

    /// Distinct claims sharing at least one party with claim `i`, excluding `i`.
    /// `mark` must have length `n_claims` and be all false; it is restored on return.
    pub fn second_order_claims_into(&self, i: usize, mark: &mut [bool], out: &mut Vec<u32>) {
        out.clear();
        mark[i] = true;
        for &j in self.claim_parties(i).0 {
            for &k in self.party_claims(j as usize).0 {
                if !mark[k as usize] {
                    mark[k as usize] = true;
                    out.push(k);
                }
            }
        }
        mark[i] = false;
        for &k in out.iter() {
            mark[k as usize] = false;
        }
        out.sort_unstable();
    }

    /// Nodes at exactly `k` hops from `origin`, `k` in 1..=4. Shells are
    /// disjoint: a node in an earlier same-parity shell, or the origin itself,
    /// is never a member.
    pub fn neighborhood(&self, origin: NodeId, k: usize) -> Result<Neighborhood> {
        self.check(origin)?;
        if !(1..=4).contains(&k) {
            return Err(Error::UnsupportedOrder(k));
        }
        let shells = self.bfs_shells(origin, k);
        Ok(Neighborhood { origin, order: k, members: shells.into_iter().nth(k - 1).unwrap_or_default() })
    }

    /// BFS shells 1..=k from `origin`; shell `s` holds nodes at distance exactly `s`.
    pub fn bfs_shells(&self, origin: NodeId, k: usize) -> Vec<Vec<NodeId>> {
        let mut seen_claims = vec![false; self.n_claims()];
        let mut seen_parties = vec![false; self.n_parties()];
        match origin.kind {
            NodeKind::Claim => seen_claims[origin.index as usize] = true,
            NodeKind::Party => seen_parties[origin.index as usize] = true,
        }
        let mut frontier = vec![origin];
        let mut shells = Vec::with_capacity(k);
        for _ in 0..k {
            let mut next = Vec::new();
            for node in &frontier {
                match node.kind {
                    NodeKind::Claim => {
                        for &j in self.claim_parties(node.index as usize).0 {
                            if !seen_parties[j as usize] {
                                seen_parties[j as usize] = true;
                                next.push(NodeId::party(j));
                            }
                        }
                    }
                    NodeKind::Party => {
                        for &i in self.party_claims(node.index as usize).0 {
                            if !seen_claims[i as usize] {
                                seen_claims[i as usize] = true;
                                next.push(NodeId::claim(i));
                            }
                        }
                    }
                }
            }
            next.sort_unstable();
            frontier = next.clone();
            shells.push(next);
        }
        shells
    }
}

// ---------------------------------------------------------------------------
// Edge CSV
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct EdgeRow {
    claim_id: String,
    party_id: String,
    party_kind: String,
    #[serde(default)]
    weight: Option<String>,
    #[serde(default)]
    is_company: Option<String>,
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => Some(true),
        "0" | "false" | "no" => Some(false),
        _ => None,
    }
}

/// Reads `claim_id,party_id,party_kind[,weight][,is_company]`.
pub fn read_edge_csv<R: Read>(reader: R) -> Result<Vec<EdgeRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (n, row) in rdr.deserialize::<EdgeRow>().enumerate() {
        let row_no = n + 1;
        let row = row?;
        let party_kind =
            row.party_kind.parse::<PartyKind>().map_err(|message| Error::InvalidRecord { row: row_no, message })?;
        let weight = match row.weight.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(s) => Some(
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidRecord { row: row_no, message: format!("bad weight `{s}`") })?,
            ),
        };
        let is_company =
            match row.is_company.as_deref().map(str::trim) {
                None | Some("") => None,
                Some(s) => Some(parse_bool(s).ok_or_else(|| Error::InvalidRecord {
                    row: row_no,
                    message: format!("bad is_company flag `{s}`"),
                })?),
            };
        out.push(EdgeRecord { claim_id: row.claim_id, party_id: row.party_id, party_kind, weight, is_company });
    }
    Ok(out)
}

pub fn load_edge_csv(path: impl AsRef<Path>) -> Result<BipartiteGraph> {
    let file = File::open(path)?;
    let records = read_edge_csv(BufReader::new(file))?;
    build_graph(records)
}

pub fn write_edge_csv<W: Write>(writer: W, records: &[EdgeRecord]) -> Result<()> {
    let with_weight = records.iter().any(|r| r.weight.is_some());
    let with_company = records.iter().any(|r| r.is_company.is_some());
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["claim_id", "party_id", "party_kind"];
    if with_weight {
        header.push("weight");
    }
    if with_company {
        header.push("is_company");
    }
    wtr.write_record(&header)?;
    for r in records {
        let mut fields = vec![r.claim_id.clone(), r.party_id.clone(), r.party_kind.to_string()];
        if with_weight {
            fields.push(r.weight.map(|w| w.to_string()).unwrap_or_default());
        }
        if with_company {
            fields.push(r.is_company.map(|b| if b { "1" } else { "0" }.to_string()).unwrap_or_default());
        }
        wtr.write_record(&fields)?;
    }
    wtr.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Binary snapshot
// ---------------------------------------------------------------------------

const MAGIC: &[u8; 8] = b"FNGRAPH\0";
const SNAPSHOT_VERSION: u32 = 1;
const CHECKSUM_LEN: usize = 32;

/// Layout: magic, version, body, SHA-256 of everything before the checksum.
pub fn save_graph(g: &BipartiteGraph, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::with_capacity(64 + g.n_edges() * 16);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    buf.push(g.weighted as u8);
    buf.extend_from_slice(&(g.n_claims() as u64).to_le_bytes());
    buf.extend_from_slice(&(g.n_parties() as u64).to_le_bytes());
    for id in &g.claim_ids {
        put_str(&mut buf, id);
    }
    for j in 0..g.n_parties() {
        put_str(&mut buf, &g.party_ids[j]);
        buf.push(g.party_kinds[j].code());
        buf.push(match g.party_company[j] {
            None => 0,
            Some(false) => 1,
            Some(true) => 2,
        });
    }
    buf.extend_from_slice(&(g.n_edges() as u64).to_le_bytes());
    for (i, j, w) in g.edges() {
        buf.extend_from_slice(&(i as u32).to_le_bytes());
        buf.extend_from_slice(&(j as u32).to_le_bytes());
        buf.extend_from_slice(&w.to_le_bytes());
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);

    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<BipartiteGraph> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    decode_snapshot(&bytes)
}

fn decode_snapshot(bytes: &[u8]) -> Result<BipartiteGraph> {
    if bytes.len() < MAGIC.len() + 4 + CHECKSUM_LEN {
        return Err(Error::CorruptFile("truncated".into()));
    }
    if &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::CorruptFile("bad magic".into()));
    }
    let (body, checksum) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
    if Sha256::digest(body).as_slice() != checksum {
        return Err(Error::CorruptFile("checksum mismatch".into()));
    }
    let mut cur = Cursor { bytes: body, pos: MAGIC.len() };
    let version = cur.u32()?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::CorruptFile(format!("unsupported version {version}")));
    }
    let weighted = cur.u8()? != 0;
    let n_claims = cur.u64()? as usize;
    let n_parties = cur.u64()? as usize;
    let mut claim_ids = Vec::with_capacity(n_claims.min(body.len()));
    for _ in 0..n_claims {
        claim_ids.push(cur.string()?);
    }
    let mut party_ids = Vec::with_capacity(n_parties.min(body.len()));
    let mut party_kinds = Vec::with_capacity(n_parties.min(body.len()));
    let mut party_company = Vec::with_capacity(n_parties.min(body.len()));
    for _ in 0..n_parties {
        party_ids.push(cur.string()?);
        let kind = cur.u8()?;
        party_kinds
            .push(PartyKind::from_code(kind).ok_or_else(|| Error::CorruptFile(format!("bad party kind {kind}")))?);
        party_company.push(match cur.u8()? {
            0 => None,
            1 => Some(false),
            2 => Some(true),
            x => return Err(Error::CorruptFile(format!("bad company flag {x}"))),
        });
    }
    let n_edges = cur.u64()? as usize;
    let mut edges = Vec::with_capacity(n_edges.min(body.len() / 16 + 1));
    for _ in 0..n_edges {
        let i = cur.u32()?;
        let j = cur.u32()?;
        let w = cur.f64()?;
        if i as usize >= n_claims || j as usize >= n_parties || !(w > 0.0) {
            return Err(Error::CorruptFile("edge out of range".into()));
        }
        edges.push((i, j, w));
    }
    if cur.pos != body.len() {
        return Err(Error::CorruptFile("trailing bytes".into()));
    }
    if edges.is_empty() {
        return Err(Error::CorruptFile("no edges".into()));
    }
    Ok(BipartiteGraph::assemble(weighted, edges, claim_ids, party_ids, party_kinds, party_company))
}

fn put_str(buf: &mut Vec<u8>, s: &str) {
    buf.extend_from_slice(&(s.len() as u32).to_le_bytes());
    buf.extend_from_slice(s.as_bytes());
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::CorruptFile("truncated".into())),
        }
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| Error::CorruptFile("invalid utf-8 id".into()))
    }
}
