//! Precomputed per-claim intrinsic features (`claim_id,<columns...>`).
//!
//! Numeric columns are taken as-is. A column with any non-numeric value is
//! treated as categorical and one-hot encoded against its alphabetically
//! first level. The `fraud` column is the target and never becomes a feature.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};

/// Intrinsic columns in the order the generator writes them.
pub const INTRINSIC_COLUMNS: [&str; 20] = [
    "age",
    "responsibilityCode",
    "numContracts",
    "claimAge",
    "nClaims1",
    "nClaims5",
    "lastClaim",
    "amount1",
    "amount5",
    "refused1",
    "refused5",
    "atfault1",
    "atfault5",
    "samesits1",
    "samesits5",
    "people",
    "company",
    "police",
    "daysReport",
    "amount",
];

#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicTable {
    pub claim_ids: Vec<String>,
    pub names: Vec<String>,
    /// Row-major, `claim_ids.len() * names.len()`.
    values: Vec<f64>,
    lookup: HashMap<String, usize>,
}

impl IntrinsicTable {
    pub fn n_rows(&self) -> usize {
        self.claim_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.n_cols();
        &self.values[i * k..(i + 1) * k]
    }

    pub fn row_for(&self, claim_id: &str) -> Option<&[f64]> {
        self.lookup.get(claim_id).map(|&i| self.row(i))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        read_intrinsic_csv(BufReader::new(File::open(path)?))
    }
}

pub fn read_intrinsic_csv<R: Read>(reader: R) -> Result<IntrinsicTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let id_col = headers
        .iter()
        .position(|h| h == "claim_id")
        .ok_or_else(|| Error::InvalidRecord { row: 0, message: "missing claim_id column".into() })?;
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&c| c != id_col && &headers[c] != "fraud").collect();
    let fraud_col = headers.iter().position(|h| h == "fraud");

    let mut ids = Vec::new();
    let mut raw: Vec<Vec<String>> = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = n + 1;
        if let Some(fc) = fraud_col {
            let v = rec.get(fc).unwrap_or("");
            if !matches!(v.to_ascii_lowercase().as_str(), "yes" | "no" | "unknown") {
                return Err(Error::InvalidRecord { row, message: format!("fraud must be yes/no/unknown, got `{v}`") });
            }
        }
        let mut cells = Vec::with_capacity(feature_cols.len());
        for &c in &feature_cols {
            let v = rec.get(c).unwrap_or("");
            if v.is_empty() {
                return Err(Error::InvalidRecord { row, message: format!("missing value for `{}`", &headers[c]) });
            }
            cells.push(v.to_string());
        }
        ids.push(rec.get(id_col).unwrap_or("").to_string());
        raw.push(cells);
    }

    // decide per column: numeric or categorical levels
    let mut names = Vec::new();
    let mut encoders: Vec<ColumnEncoding> = Vec::new();
    for (k, &c) in feature_cols.iter().enumerate() {
        let name = headers[c].to_string();
        let numeric = raw.iter().all(|r| r[k].parse::<f64>().is_ok_and(f64::is_finite));
        if numeric {
            if name == "police" {
                if let Some((n, r)) = raw.iter().enumerate().find(|(_, r)| r[k] != "0" && r[k] != "1") {
                    return Err(Error::InvalidRecord {
                        row: n + 1,
                        message: format!("police must be 0 or 1, got `{}`", r[k]),
                    });
                }
            }
            names.push(name);
            encoders.push(ColumnEncoding::Numeric);
        } else {
            let levels: Vec<String> = raw.iter().map(|r| r[k].clone()).collect::<BTreeSet<_>>().into_iter().collect();
            for level in &levels[1..] {
                names.push(format!("{name}={level}"));
            }
            encoders.push(ColumnEncoding::OneHot(levels));
        }
    }

    let mut values = Vec::with_capacity(raw.len() * names.len());
    for r in &raw {
        for (k, enc) in encoders.iter().enumerate() {
            match enc {
                ColumnEncoding::Numeric => values.push(r[k].parse::<f64>().unwrap_or(f64::NAN)),
                ColumnEncoding::OneHot(levels) => {
                    for level in &levels[1..] {
                        values.push((r[k] == *level) as u8 as f64);
                    }
                }
            }
        }
    }

    let mut lookup = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if lookup.insert(id.clone(), i).is_some() {
            return Err(Error::InvalidRecord { row: i + 1, message: format!("duplicate claim_id `{id}`") });
        }
    }
    Ok(IntrinsicTable { claim_ids: ids, names, values, lookup })
}

enum ColumnEncoding {
    Numeric,
    OneHot(Vec<String>),
}
