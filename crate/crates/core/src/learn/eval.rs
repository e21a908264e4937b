use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::{argmax, Dataset, ModelConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub name: String,
    pub support: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub roc_area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub size: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: String,
    /// Percent.
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub roc_area: f64,
    pub per_class: Vec<ClassMetrics>,
    pub confusion: Vec<Vec<u64>>,
    pub folds: Vec<FoldResult>,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Area under the ROC curve via the rank statistic with midranks for ties.
/// `None` when one side is empty.
pub fn auc(scores: &[f64], positive: &[bool]) -> Option<f64> {
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += order[i..=j].iter().filter(|&&k| positive[k]).count() as f64 * midrank;
        i = j + 1;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    Some((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Aggregate metrics from a confusion matrix (rows = truth) and per-instance
/// class scores. `labels` gives each scored instance's true class.
pub fn metrics(confusion: &[Vec<u64>], scores: &[Vec<f64>], labels: &[usize], class_names: &[String]) -> Result<EvalReport> {
    let c = confusion.len();
    let total: u64 = confusion.iter().flatten().sum();
    if c == 0 || total == 0 {
        return Err(Error::Invalid("empty confusion matrix".into()));
    }
    if confusion.iter().any(|r| r.len() != c) || class_names.len() != c {
        return Err(Error::Invalid("confusion matrix is not square over the classes".into()));
    }
    if scores.len() != labels.len() || (!scores.is_empty() && scores.len() as u64 != total) {
        return Err(Error::Invalid("scores disagree with the confusion matrix instance count".into()));
    }
    let trace: u64 = (0..c).map(|i| confusion[i][i]).sum();
    let mut per_class = Vec::with_capacity(c);
    for k in 0..c {
        let tp = confusion[k][k] as f64;
        let support: u64 = confusion[k].iter().sum();
        let predicted: u64 = confusion.iter().map(|r| r[k]).sum();
        let precision = ratio(tp, predicted as f64);
        let recall = ratio(tp, support as f64);
        let f_score = ratio(2.0 * precision * recall, precision + recall);
        let roc_area = if scores.is_empty() {
            f64::NAN
        } else {
            let s: Vec<f64> = scores.iter().map(|s| s[k]).collect();
            let pos: Vec<bool> = labels.iter().map(|&l| l == k).collect();
            auc(&s, &pos).unwrap_or(f64::NAN)
        };
        per_class.push(ClassMetrics {
            name: class_names[k].clone(),
            support,
            precision,
            recall,
            f_score,
            roc_area,
        });
    }
    let weighted = |f: fn(&ClassMetrics) -> f64| -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for m in &per_class {
            let v = f(m);
            if !v.is_nan() {
                num += m.support as f64 * v;
                den += m.support as f64;
            }
        }
        ratio(num, den)
    };
    Ok(EvalReport {
        classifier: String::new(),
        accuracy: 100.0 * trace as f64 / total as f64,
        precision: weighted(|m| m.precision),
        recall: weighted(|m| m.recall),
        f_score: weighted(|m| m.f_score),
        roc_area: weighted(|m| m.roc_area),
        per_class,
        confusion: confusion.to_vec(),
        folds: Vec::new(),
    })
}

pub fn confusion_matrix(truth: &[usize], predicted: &[usize], classes: usize) -> Vec<Vec<u64>> {
    let mut m = vec![vec![0u64; classes]; classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        m[t][p] += 1;
    }
    m
}

/// Fold id per instance: each class's members are shuffled and dealt
/// round-robin, continuing where the previous class stopped.
pub fn stratified_folds(labels: &[usize], class_names: &[String], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Config(format!("folds must be at least 2, got {folds}")));
    }
    let mut members = vec![Vec::new(); class_names.len()];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }
    for (k, m) in members.iter().enumerate() {
        if !m.is_empty() && m.len() < folds {
            return Err(Error::TooFewMembers {
                class: class_names[k].clone(),
                count: m.len(),
                folds,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for m in &mut members {
        m.shuffle(&mut rng);
        for &i in m.iter() {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

/// A held-out instance's prediction and per-class scores.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub index: usize,
    pub predicted: usize,
    pub scores: Vec<f64>,
}

/// Stratified k-fold driver. `run_fold(fold, train, test)` trains on the
/// `train` indices and predicts every `test` index; folds run in parallel
/// and are pooled in fold order.
pub fn cross_validate_with<F>(
    labels: &[usize],
    class_names: &[String],
    folds: usize,
    seed: u64,
    classifier: &str,
    run_fold: F,
) -> Result<EvalReport>
where
    F: Fn(usize, &[usize], &[usize]) -> Result<Vec<Prediction>> + Sync,
{
    let assignment = stratified_folds(labels, class_names, folds, seed)?;
    let results = (0..folds)
        .into_par_iter()
        .map(|f| {
            let train: Vec<usize> = (0..labels.len()).filter(|&i| assignment[i] != f).collect();
            let test: Vec<usize> = (0..labels.len()).filter(|&i| assignment[i] == f).collect();
            let out = run_fold(f, &train, &test)?;
            if out.len() != test.len() {
                return Err(Error::Invalid(format!(
                    "fold {f} returned {} predictions for {} instances",
                    out.len(),
                    test.len()
                )));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut truth = Vec::new();
    let mut pred = Vec::new();
    let mut scores = Vec::new();
    let mut fold_results = Vec::new();
    for (f, out) in results.into_iter().enumerate() {
        let correct = out.iter().filter(|p| labels[p.index] == p.predicted).count();
        fold_results.push(FoldResult {
            fold: f,
            size: out.len(),
            accuracy: 100.0 * ratio(correct as f64, out.len() as f64),
        });
        for p in out {
            truth.push(labels[p.index]);
            pred.push(p.predicted);
            scores.push(p.scores);
        }
    }
    let mut report = metrics(&confusion_matrix(&truth, &pred, class_names.len()), &scores, &truth, class_names)?;
    report.classifier = classifier.to_string();
    report.folds = fold_results;
    Ok(report)
}

/// Per-fold seed derived from the run seed.
pub fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed ^ (fold as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Stratified k-fold cross-validation. Standardization and calibration are
/// fitted inside each training fold; predictions are pooled.
pub fn cross_validate(data: &Dataset, cfg: &ModelConfig, folds: usize, seed: u64) -> Result<EvalReport> {
    cross_validate_with(
        &data.labels,
        &data.class_names,
        folds,
        seed,
        cfg.kind().as_str(),
        |f, train, test| {
            let model = cfg.train(&data.subset(train), fold_seed(seed, f))?;
            Ok(test
                .iter()
                .map(|&i| {
                    let row = &data.rows[i];
                    Prediction {
                        index: i,
                        predicted: argmax(&model.decision(row)),
                        scores: model.class_scores(row),
                    }
                })
                .collect())
        },
    )
}

impl EvalReport {
    /// Table-style text: headline row, per-class detail, confusion matrix,
    /// per-fold accuracy.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "classifier\t{}", self.classifier);
        let _ = writeln!(s, "accuracy\tprecision\trecall\tf_score\troc_area");
        let _ = writeln!(
            s,
            "{:.2}\t{:.3}\t{:.3}\t{:.3}\t{:.3}",
            self.accuracy, self.precision, self.recall, self.f_score, self.roc_area
        );
        s.push_str("\nclass\tsupport\tprecision\trecall\tf_score\troc_area\n");
        for m in &self.per_class {
            let _ = writeln!(
                s,
                "{}\t{}\t{:.3}\t{:.3}\t{:.3}\t{:.3}",
                m.name, m.support, m.precision, m.recall, m.f_score, m.roc_area
            );
        }
        s.push_str("\nconfusion (rows = true, columns = predicted)\n");
        let names: Vec<&str> = self.per_class.iter().map(|m| m.name.as_str()).collect();
        let _ = writeln!(s, "\t{}", names.join("\t"));
        for (name, row) in names.iter().zip(&self.confusion) {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            let _ = writeln!(s, "{name}\t{}", cells.join("\t"));
        }
        if !self.folds.is_empty() {
            s.push_str("\nfold\tsize\taccuracy\n");
            for f in &self.folds {
                let _ = writeln!(s, "{}\t{}\t{:.2}", f.fold, f.size, f.accuracy);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    #[test]
    fn golden_two_class_confusion() {
        let r = metrics(&[vec![8, 2], vec![3, 7]], &[], &[], &names(2)).unwrap();
        assert_eq!(r.accuracy, 75.0);
        assert!((r.per_class[0].precision - 8.0 / 11.0).abs() < 1e-12);
        assert!((r.per_class[0].recall - 0.8).abs() < 1e-12);
        assert!((r.per_class[1].precision - 7.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn majority_predictor_on_balanced_classes() {
        let truth: Vec<usize> = (0..40).map(|i| i % 4).collect();
        let r = metrics(&confusion_matrix(&truth, &[0; 40], 4), &[], &[], &names(4)).unwrap();
        assert_eq!(r.accuracy, 25.0);
        assert_eq!(r.per_class[1].precision, 0.0);
    }

    #[test]
    fn auc_with_ties() {
        assert_eq!(auc(&[0.1, 0.4, 0.35, 0.8], &[false, false, true, true]), Some(0.75));
        assert_eq!(auc(&[0.5, 0.5], &[false, true]), Some(0.5));
        assert_eq!(auc(&[0.5], &[true]), None);
    }

    #[test]
    fn empty_confusion_is_error() {
        assert!(metrics(&[], &[], &[], &[]).is_err());
        assert!(metrics(&[vec![0, 0], vec![0, 0]], &[], &[], &names(2)).is_err());
    }

    #[test]
    fn folds_are_stratified_and_seeded() {
        let labels: Vec<usize> = (0..53).map(|i| i % 3).collect();
        let a = stratified_folds(&labels, &names(3), 5, 9).unwrap();
        assert_eq!(a, stratified_folds(&labels, &names(3), 5, 9).unwrap());
        for f in 0..5 {
            for k in 0..3 {
                let n = (0..53).filter(|&i| a[i] == f && labels[i] == k).count();
                let total = labels.iter().filter(|&&l| l == k).count();
                assert!((n as f64 - total as f64 / 5.0).abs() <= 1.0);
            }
        }
        let err = stratified_folds(&[0, 0, 0, 1], &names(2), 2, 0).unwrap_err();
        assert!(err.to_string().contains("c1"));
    }
}
