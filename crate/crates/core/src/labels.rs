//! Investigation labels and filing times, aligned to a graph's claim indices.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimLabel {
    Fraud,
    NonFraud,
    #[default]
    Unknown,
}

impl ClaimLabel {
    pub fn is_known(self) -> bool {
        self != ClaimLabel::Unknown
    }

    /// Spelling used in the `fraud` column of label and intrinsic files.
    pub fn as_str(self) -> &'static str {
        match self {
            ClaimLabel::Fraud => "yes",
            ClaimLabel::NonFraud => "no",
            ClaimLabel::Unknown => "unknown",
        }
    }
}

impl fmt::Display for ClaimLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "yes" | "fraud" | "1" => Ok(ClaimLabel::Fraud),
            "no" | "nonfraud" | "non-fraud" | "0" => Ok(ClaimLabel::NonFraud),
            "unknown" | "" => Ok(ClaimLabel::Unknown),
            other => Err(format!("unknown label `{other}`")),
        }
    }
}

/// One line of a labels file: `claim_id,fraud,filed_day`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelRecord {
    pub claim_id: String,
    pub label: ClaimLabel,
    /// Filing time as a day offset from the start of the observation window.
    pub filed_day: Option<i64>,
}

#[derive(Debug, Deserialize)]
struct LabelRow {
    claim_id: String,
    #[serde(default)]
    fraud: Option<String>,
    #[serde(default)]
    filed_day: Option<String>,
}

pub fn read_labels_csv<R: Read>(reader: R) -> Result<Vec<LabelRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (n, row) in rdr.deserialize::<LabelRow>().enumerate() {
        let row_no = n + 1;
        let row = row?;
        let label = row
            .fraud
            .as_deref()
            .unwrap_or("")
            .parse::<ClaimLabel>()
            .map_err(|message| Error::InvalidRecord { row: row_no, message })?;
        let filed_day = match row.filed_day.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(s) => Some(
                s.parse::<i64>()
                    .map_err(|_| Error::InvalidRecord { row: row_no, message: format!("bad filed_day `{s}`") })?,
            ),
        };
        out.push(LabelRecord { claim_id: row.claim_id, label, filed_day });
    }
    Ok(out)
}

pub fn write_labels_csv<W: Write>(writer: W, records: &[LabelRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["claim_id", "fraud", "filed_day"])?;
    for r in records {
        wtr.write_record([
            r.claim_id.as_str(),
            r.label.as_str(),
            &r.filed_day.map(|d| d.to_string()).unwrap_or_default(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Per-claim labels indexed like the graph's claims. Claims absent from the
/// input are `Unknown` with no filing time.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimLabels {
    labels: Vec<ClaimLabel>,
    filed: Vec<Option<i64>>,
}

impl ClaimLabels {
    pub fn unknown(n_claims: usize) -> Self {
        ClaimLabels { labels: vec![ClaimLabel::Unknown; n_claims], filed: vec![None; n_claims] }
    }

    pub fn from_records(g: &BipartiteGraph, records: &[LabelRecord]) -> Result<Self> {
        let mut out = Self::unknown(g.n_claims());
        for r in records {
            let i = g.claim_index(&r.claim_id).ok_or_else(|| Error::UnknownClaimId(r.claim_id.clone()))?;
            out.labels[i] = r.label;
            out.filed[i] = r.filed_day;
        }
        Ok(out)
    }

    pub fn load(g: &BipartiteGraph, path: impl AsRef<Path>) -> Result<Self> {
        let records = read_labels_csv(BufReader::new(File::open(path)?))?;
        Self::from_records(g, &records)
    }

    /// Builds from labels in claim-index order; filing times unset.
    pub fn from_labels(labels: Vec<ClaimLabel>) -> Self {
        let n = labels.len();
        ClaimLabels { labels, filed: vec![None; n] }
    }

    pub fn set(&mut self, claim: usize, label: ClaimLabel, filed_day: Option<i64>) {
        self.labels[claim] = label;
        self.filed[claim] = filed_day;
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, claim: usize) -> ClaimLabel {
        self.labels[claim]
    }

    pub fn filed_day(&self, claim: usize) -> Option<i64> {
        self.filed[claim]
    }

    pub fn labels(&self) -> &[ClaimLabel] {
        &self.labels
    }

    /// Earliest and latest filing day over claims that have one.
    pub fn time_range(&self) -> Option<(i64, i64)> {
        let mut it = self.filed.iter().flatten().copied();
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::example_network;

    #[test]
    fn parse_and_align() {
        let g = example_network();
        let text = "claim_id,fraud,filed_day\nC4,yes,10\nC2,no,\nC3,unknown,400\n";
        let recs = read_labels_csv(text.as_bytes()).unwrap();
        let labels = ClaimLabels::from_records(&g, &recs).unwrap();
        let c4 = g.claim_index("C4").unwrap();
        assert_eq!(labels.label(c4), ClaimLabel::Fraud);
        assert_eq!(labels.filed_day(c4), Some(10));
        assert_eq!(labels.label(g.claim_index("C2").unwrap()), ClaimLabel::NonFraud);
        assert_eq!(labels.label(g.claim_index("C1").unwrap()), ClaimLabel::Unknown);
        assert_eq!(labels.time_range(), Some((10, 400)));

        let mut out = Vec::new();
        write_labels_csv(&mut out, &recs).unwrap();
        assert_eq!(read_labels_csv(out.as_slice()).unwrap(), recs);
    }

    #[test]
    fn unknown_claim_rejected() {
        let g = example_network();
        let recs = vec![LabelRecord { claim_id: "C99".into(), label: ClaimLabel::Fraud, filed_day: None }];
        assert!(matches!(ClaimLabels::from_records(&g, &recs), Err(Error::UnknownClaimId(id)) if id == "C99"));
    }

    #[test]
    fn bad_label_value() {
        let text = "claim_id,fraud\nC1,maybe\n";
        assert!(matches!(read_labels_csv(text.as_bytes()), Err(Error::InvalidRecord { row: 1, .. })));
    }
}
