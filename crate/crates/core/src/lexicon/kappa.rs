use crate::error::{Error, Result};

/// Fleiss' kappa for `ratings[item][category]` counts, each row summing to
/// `annotators`.
pub fn fleiss_kappa(ratings: &[Vec<usize>], annotators: usize) -> Result<f64> {
    if ratings.len() < 2 {
        return Err(Error::Invalid("fleiss kappa needs at least 2 items".into()));
    }
    let categories = ratings[0].len();
    if categories < 2 {
        return Err(Error::Invalid("fleiss kappa needs at least 2 categories".into()));
    }
    if annotators < 2 {
        return Err(Error::Invalid("fleiss kappa needs at least 2 annotators".into()));
    }
    for (row, r) in ratings.iter().enumerate() {
        if r.len() != categories {
            return Err(Error::Invalid(format!(
                "row {row} has {} categories, expected {categories}",
                r.len()
            )));
        }
        let sum: usize = r.iter().sum();
        if sum != annotators {
            return Err(Error::RowSumMismatch {
                row,
                sum,
                expected: annotators,
            });
        }
    }
    let n = annotators as f64;
    let items = ratings.len() as f64;
    let p_bar = ratings
        .iter()
        .map(|r| {
            let sq: f64 = r.iter().map(|&c| (c * c) as f64).sum();
            (sq - n) / (n * (n - 1.0))
        })
        .sum::<f64>()
        / items;
    let p_e: f64 = (0..categories)
        .map(|j| {
            let pj = ratings.iter().map(|r| r[j] as f64).sum::<f64>() / (items * n);
            pj * pj
        })
        .sum();
    if (1.0 - p_e).abs() < 1e-15 {
        // every rating in one category: agreement is perfect
        return Ok(1.0);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}
