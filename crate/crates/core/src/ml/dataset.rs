use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{NEIGHBORHOOD_FEATURES, SCORE_FEATURES};
use crate::labels::ClaimLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureGroup {
    Intrinsic,
    Score,
    Neighborhood,
}

impl FeatureGroup {
    /// Group implied by a column name: the network feature names are fixed,
    /// everything else is intrinsic.
    pub fn of(name: &str) -> Self {
        if SCORE_FEATURES.contains(&name) {
            FeatureGroup::Score
        } else if NEIGHBORHOOD_FEATURES.contains(&name) {
            FeatureGroup::Neighborhood
        } else {
            FeatureGroup::Intrinsic
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureGroup::Intrinsic => "intr",
            FeatureGroup::Score => "score",
            FeatureGroup::Neighborhood => "nbh",
        }
    }
}

/// Binary targets `(y_known, y_fraud)`: known is 1 for any investigated
/// claim, fraud is 1 only for claims labeled fraud.
pub fn make_targets(labels: &[ClaimLabel]) -> (Vec<u8>, Vec<u8>) {
    let known = labels.iter().map(|l| l.is_known() as u8).collect();
    let fraud = labels.iter().map(|&l| (l == ClaimLabel::Fraud) as u8).collect();
    (known, fraud)
}

/// Dense feature matrix with a binary target.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub row_ids: Vec<String>,
    pub names: Vec<String>,
    pub groups: Vec<FeatureGroup>,
    values: Vec<f64>,
    pub y: Vec<u8>,
}

impl LabeledDataset {
    /// `values` is row-major with `names.len()` columns. Groups are derived
    /// from the column names.
    pub fn new(row_ids: Vec<String>, names: Vec<String>, values: Vec<f64>, y: Vec<u8>) -> Result<Self> {
        let k = names.len();
        if values.len() != row_ids.len() * k {
            return Err(Error::DimensionMismatch { expected: row_ids.len() * k, found: values.len() });
        }
        if y.len() != row_ids.len() {
            return Err(Error::DimensionMismatch { expected: row_ids.len(), found: y.len() });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidRecord {
                row: pos / k.max(1) + 1,
                message: "missing or non-finite value".into(),
            });
        }
        if let Some(pos) = y.iter().position(|&t| t > 1) {
            return Err(Error::InvalidRecord { row: pos + 1, message: "target must be 0 or 1".into() });
        }
        let groups = names.iter().map(|n| FeatureGroup::of(n)).collect();
        Ok(LabeledDataset { row_ids, names, groups, values, y })
    }

    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.n_cols();
        &self.values[i * k..(i + 1) * k]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.n_cols();
        self.values[i * k + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.get(i, j)).collect()
    }

    pub fn positives(&self) -> usize {
        self.y.iter().filter(|&&t| t == 1).count()
    }

    /// Fraction of rows with target 1.
    pub fn class_ratio(&self) -> f64 {
        if self.y.is_empty() {
            0.0
        } else {
            self.positives() as f64 / self.n_rows() as f64
        }
    }

    pub fn class_ratio_of(&self, class: u8) -> f64 {
        let r = self.class_ratio();
        if class == 1 || self.y.is_empty() {
            r
        } else {
            1.0 - r
        }
    }

    pub fn feature_index(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }

    pub fn columns_in(&self, groups: &[FeatureGroup]) -> Vec<usize> {
        (0..self.n_cols()).filter(|&j| groups.contains(&self.groups[j])).collect()
    }

    pub fn subset_rows(&self, rows: &[usize]) -> LabeledDataset {
        let k = self.n_cols();
        let mut values = Vec::with_capacity(rows.len() * k);
        for &i in rows {
            values.extend_from_slice(self.row(i));
        }
        LabeledDataset {
            row_ids: rows.iter().map(|&i| self.row_ids[i].clone()).collect(),
            names: self.names.clone(),
            groups: self.groups.clone(),
            values,
            y: rows.iter().map(|&i| self.y[i]).collect(),
        }
    }

    /// Appends rows from `other`, which must have the same columns.
    pub fn extend(&mut self, other: &LabeledDataset) -> Result<()> {
        if other.names != self.names {
            return Err(Error::DimensionMismatch { expected: self.n_cols(), found: other.n_cols() });
        }
        self.row_ids.extend(other.row_ids.iter().cloned());
        self.values.extend_from_slice(&other.values);
        self.y.extend_from_slice(&other.y);
        Ok(())
    }

    pub fn with_target(&self, y: Vec<u8>) -> Result<LabeledDataset> {
        LabeledDataset::new(self.row_ids.clone(), self.names.clone(), self.values.clone(), y)
    }

    /// Writes `claim_id,<features...>,y[,split]`.
    pub fn write_csv<W: Write>(&self, writer: W, split: Option<&[&str]>) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = vec!["claim_id"];
        header.extend(self.names.iter().map(String::as_str));
        header.push("y");
        if split.is_some() {
            header.push("split");
        }
        wtr.write_record(&header)?;
        for i in 0..self.n_rows() {
            let mut fields = Vec::with_capacity(self.n_cols() + 3);
            fields.push(self.row_ids[i].clone());
            fields.extend(self.row(i).iter().map(|v| v.to_string()));
            fields.push(self.y[i].to_string());
            if let Some(s) = split {
                fields.push(s[i].to_string());
            }
            wtr.write_record(&fields)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads a file written by [`LabeledDataset::write_csv`]. Returns the
    /// split column when present.
    pub fn read_csv<R: Read>(reader: R) -> Result<(LabeledDataset, Option<Vec<String>>)> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        if cols.first() != Some(&"claim_id") {
            return Err(Error::InvalidRecord { row: 0, message: "first column must be claim_id".into() });
        }
        let has_split = cols.last() == Some(&"split");
        let y_col = if has_split { cols.len() - 2 } else { cols.len() - 1 };
        if cols.get(y_col) != Some(&"y") {
            return Err(Error::InvalidRecord { row: 0, message: "missing y column".into() });
        }
        let names: Vec<String> = cols[1..y_col].iter().map(|s| s.to_string()).collect();
        let mut ids = Vec::new();
        let mut values = Vec::new();
        let mut y = Vec::new();
        let mut split = Vec::new();
        for (n, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = n + 1;
            ids.push(rec[0].to_string());
            for c in 1..y_col {
                values.push(rec[c].parse::<f64>().map_err(|_| Error::InvalidRecord {
                    row,
                    message: format!("bad value `{}` in `{}`", &rec[c], cols[c]),
                })?);
            }
            y.push(rec[y_col].parse::<u8>().map_err(|_| Error::InvalidRecord { row, message: "bad target".into() })?);
            if has_split {
                split.push(rec[y_col + 1].to_string());
            }
        }
        let ds = LabeledDataset::new(ids, names, values, y)?;
        Ok((ds, has_split.then_some(split)))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(LabeledDataset, Option<Vec<String>>)> {
        Self::read_csv(BufReader::new(File::open(path)?))
    }
}
