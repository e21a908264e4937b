use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::corpus::Tweet;
use crate::lexicon::{is_oov, Category, Dictionary, LabelSet, OovInventory};

use super::profile::is_occurrence;

/// Mean number of other OOV tokens per tweet, by category and month.
/// A cell is `None` when the category has no tweets in that month.
#[derive(Debug, Clone, PartialEq)]
pub struct Timeseries {
    pub months: Vec<String>,
    pub rows: BTreeMap<Category, Vec<Option<f64>>>,
}

/// Every (tweet, distinct labeled inventory word in it) pair contributes
/// one sample: the number of OOV tokens in the tweet other than that word.
pub fn cooccurrence_timeseries(inventory: &OovInventory, labels: &LabelSet, tweets: &[Tweet], dict: &Dictionary) -> Timeseries {
    let months = inventory.months.clone();
    let month_idx: BTreeMap<&str, usize> = months.iter().enumerate().map(|(i, m)| (m.as_str(), i)).collect();
    let mut sums: BTreeMap<Category, Vec<(f64, usize)>> = BTreeMap::new();

    for t in tweets {
        let Some(&m) = month_idx.get(t.month.as_str()) else { continue };
        let oov: Vec<&crate::corpus::Token> = t.tokens.iter().filter(|k| is_oov(k, dict)).collect();
        let mut seen: HashSet<String> = HashSet::new();
        for tok in &oov {
            let w = tok.lower();
            if !seen.insert(w.clone()) || !inventory.entries.contains_key(&w) {
                continue;
            }
            let Some(cat) = labels.get(&w) else { continue };
            let others = oov.iter().filter(|k| !is_occurrence(k, &w)).count();
            let cell = &mut sums.entry(cat).or_insert_with(|| vec![(0.0, 0); months.len()])[m];
            cell.0 += others as f64;
            cell.1 += 1;
        }
    }

    let rows = sums
        .into_iter()
        .map(|(c, cells)| {
            let row = cells.into_iter().map(|(s, n)| (n > 0).then(|| s / n as f64)).collect();
            (c, row)
        })
        .collect();
    Timeseries { months, rows }
}

impl Timeseries {
    /// Category × month grid; empty cells are left blank.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("category");
        for m in &self.months {
            s.push(',');
            s.push_str(m);
        }
        s.push('\n');
        for (c, row) in &self.rows {
            s.push_str(c.as_str());
            for v in row {
                s.push(',');
                if let Some(v) = v {
                    let _ = write!(s, "{v}");
                }
            }
            s.push('\n');
        }
        s
    }
}
