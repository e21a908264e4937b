use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{Family, FeatureSchema};
use crate::lexicon::Category;

/// Labeled feature matrix, one row per OOV word.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub ids: Vec<String>,
    pub schema: FeatureSchema,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn new(ids: Vec<String>, schema: FeatureSchema, rows: Vec<Vec<f64>>, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if ids.len() != rows.len() || labels.len() != rows.len() {
            return Err(Error::Invalid("ids, rows and labels differ in length".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::Invalid(format!(
                    "row {i} has {} values, schema has {}",
                    row.len(),
                    schema.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Invalid(format!("row {i} feature `{}` is not finite", schema.names[j])));
            }
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::Invalid(format!("label {l} out of range for {} classes", class_names.len())));
        }
        Ok(Dataset {
            ids,
            schema,
            rows,
            labels,
            class_names,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.schema.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.num_classes()];
        for &l in &self.labels {
            c[l] += 1;
        }
        c
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            schema: self.schema.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<Dataset> {
        if cols.is_empty() {
            return Err(Error::Invalid("column filter removes every feature".into()));
        }
        let schema = FeatureSchema::from_names(cols.iter().map(|&c| self.schema.names[c].clone()).collect())?;
        Ok(Dataset {
            ids: self.ids.clone(),
            schema,
            rows: self.rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect(),
            labels: self.labels.clone(),
            class_names: self.class_names.clone(),
        })
    }

    pub fn select_families(&self, families: &[Family]) -> Result<Dataset> {
        self.select_columns(&self.schema.columns_of(families))
    }

    /// `word,<features...>,label` with shortest round-trip float formatting.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["word".to_string()];
        header.extend(self.schema.names.iter().cloned());
        header.push("label".into());
        w.write_record(&header).map_err(csv_err)?;
        for ((id, row), &l) in self.ids.iter().zip(&self.rows).zip(&self.labels) {
            let mut rec = vec![id.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            rec.push(self.class_names[l].clone());
            w.write_record(&rec).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Parses [`Dataset::to_csv`] output. Class order follows the category
    /// scheme when every label is a known category, lexicographic otherwise.
    pub fn from_csv(text: &str) -> Result<Dataset> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        if header.len() < 3 || header[0] != "word" || header[header.len() - 1] != "label" {
            return Err(Error::parse("dataset header", "expected `word,<features...>,label`"));
        }
        let schema = FeatureSchema::from_names(header[1..header.len() - 1].to_vec())?;
        let mut ids = Vec::new();
        let mut rows = Vec::new();
        let mut raw_labels = Vec::new();
        for (n, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let loc = format!("dataset row {}", n + 2);
            if rec.len() != header.len() {
                return Err(Error::parse(loc, format!("expected {} fields, found {}", header.len(), rec.len())));
            }
            ids.push(rec[0].to_string());
            let row = (1..rec.len() - 1)
                .map(|i| {
                    rec[i]
                        .parse::<f64>()
                        .map_err(|_| Error::parse(&loc, format!("bad number `{}`", &rec[i])))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
            let label = rec[rec.len() - 1].to_string();
            if label.is_empty() {
                return Err(Error::parse(loc, "missing label"));
            }
            raw_labels.push(label);
        }
        let distinct: BTreeSet<&str> = raw_labels.iter().map(String::as_str).collect();
        let class_names: Vec<String> = if distinct.iter().all(|l| l.parse::<Category>().is_ok()) {
            Category::ALL
                .iter()
                .map(|c| c.as_str())
                .filter(|c| distinct.contains(c))
                .map(str::to_string)
                .collect()
        } else {
            distinct.iter().map(|s| s.to_string()).collect()
        };
        let labels = raw_labels
            .iter()
            .map(|l| class_names.iter().position(|c| c == l).expect("label collected above"))
            .collect();
        Dataset::new(ids, schema, rows, labels, class_names)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Dataset> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::parse("dataset", e.to_string())
}
