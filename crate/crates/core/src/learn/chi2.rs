use std::fmt::Write as _;

use super::Dataset;
use crate::error::{Error, Result};

/// Pearson χ² of a contingency table. Rows or columns with a zero marginal
/// contribute nothing.
pub fn chi_square_statistic(table: &[Vec<f64>]) -> f64 {
    let cols = table.first().map_or(0, Vec::len);
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<f64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let total: f64 = row_sums.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut chi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let expected = row_sums[i] * col_sums[j] / total;
            if expected > 0.0 {
                chi += (obs - expected).powi(2) / expected;
            }
        }
    }
    chi
}

/// Bin index per value using at most `bins` equal-frequency bins. Cut points
/// are data values, duplicates collapsed, so the binning depends only on the
/// order of the values.
pub fn equal_frequency_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut cuts: Vec<f64> = (1..bins).map(|i| sorted[i * n / bins]).collect();
    cuts.dedup();
    cuts.retain(|&c| c > sorted[0]);
    values.iter().map(|v| cuts.partition_point(|c| c <= v)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking {
    pub entries: Vec<(String, f64)>,
}

impl FeatureRanking {
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("rank\tfeature\tchi2\n");
        for (i, (name, v)) in self.entries.iter().enumerate() {
            let _ = writeln!(s, "{}\t{name}\t{v}", i + 1);
        }
        s
    }
}

/// Ranks every feature by the χ² of its binned values against the class.
pub fn chi_square_rank(data: &Dataset, bins: usize) -> Result<FeatureRanking> {
    if bins < 2 {
        return Err(Error::Config(format!("bins must be at least 2, got {bins}")));
    }
    if data.is_empty() {
        return Err(Error::Invalid("cannot rank features of an empty dataset".into()));
    }
    let c = data.num_classes();
    let mut entries: Vec<(String, f64)> = (0..data.num_features())
        .map(|j| {
            let column: Vec<f64> = data.rows.iter().map(|r| r[j]).collect();
            let assigned = equal_frequency_bins(&column, bins);
            let mut table = vec![vec![0.0; c]; bins];
            for (&b, &l) in assigned.iter().zip(&data.labels) {
                table[b][l] += 1.0;
            }
            (data.schema.names[j].clone(), chi_square_statistic(&table))
        })
        .collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(FeatureRanking { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form() {
        let v = chi_square_statistic(&[vec![10.0, 20.0], vec![20.0, 10.0]]);
        assert!((v - 60.0 * 300f64.powi(2) / 30f64.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn bins_collapse_duplicates() {
        assert_eq!(equal_frequency_bins(&[5.0; 7], 10), vec![0; 7]);
        let b = equal_frequency_bins(&[1.0, 2.0, 3.0, 4.0], 2);
        assert_eq!(b, [0, 0, 1, 1]);
        let b = equal_frequency_bins(&[0.0, 0.0, 0.0, 1.0], 4);
        assert_eq!(b, [0, 0, 0, 1]);
    }
}
