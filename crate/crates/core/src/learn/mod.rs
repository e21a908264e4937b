//! Classifiers, cross-validation, metrics and feature ranking.

mod chi2;
mod dataset;
mod eval;
mod linear;

pub use chi2::{chi_square_rank, chi_square_statistic, equal_frequency_bins, FeatureRanking};
pub use dataset::Dataset;
pub use eval::{
    auc, confusion_matrix, cross_validate, cross_validate_with, fold_seed, metrics, stratified_folds, ClassMetrics, EvalReport, FoldResult,
    Prediction,
};
pub use linear::{
    argmax, fit_platt, logistic_loss_grad, softmax, svm_objective, train_binary_svm, train_logistic, train_svm, Calibration,
    LogisticConfig, ModelConfig, ModelKind, Standardizer, SvmConfig, TrainedModel,
};

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::features::Family;

/// Cross-validation restricted to the columns of `families`.
pub fn ablate_families(data: &Dataset, families: &[Family], cfg: &ModelConfig, folds: usize, seed: u64) -> Result<EvalReport> {
    if families.is_empty() {
        return Err(Error::Config("ablation needs at least one feature family".into()));
    }
    cross_validate(&data.select_families(families)?, cfg, folds, seed)
}

/// Every non-empty family combination, singles first.
pub fn family_combinations() -> Vec<Vec<Family>> {
    use Family::*;
    vec![
        vec![Lexical],
        vec![Content],
        vec![Context],
        vec![Lexical, Content],
        vec![Lexical, Context],
        vec![Content, Context],
        vec![Lexical, Content, Context],
    ]
}

#[derive(Debug, Clone)]
pub struct AblationRow {
    pub families: Vec<Family>,
    pub report: EvalReport,
}

pub fn ablation_table(data: &Dataset, cfg: &ModelConfig, folds: usize, seed: u64) -> Result<Vec<AblationRow>> {
    family_combinations()
        .into_iter()
        .filter(|fams| !data.schema.columns_of(fams).is_empty())
        .map(|families| {
            let report = ablate_families(data, &families, cfg, folds, seed)?;
            Ok(AblationRow { families, report })
        })
        .collect()
}

pub fn ablation_to_text(rows: &[AblationRow]) -> String {
    let mut s = String::from("features\tclassifier\taccuracy\tprecision\trecall\tf_score\troc_area\n");
    for r in rows {
        let name: Vec<&str> = r.families.iter().map(|f| f.as_str()).collect();
        let e = &r.report;
        let _ = writeln!(
            s,
            "{}\t{}\t{:.2}\t{:.3}\t{:.3}\t{:.3}\t{:.3}",
            name.join("+"),
            e.classifier,
            e.accuracy,
            e.precision,
            e.recall,
            e.f_score,
            e.roc_area
        );
    }
    s
}
