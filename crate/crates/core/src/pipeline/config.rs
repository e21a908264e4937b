use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::learn::{LogisticConfig, ModelConfig, ModelKind, SvmConfig};
use crate::topics::LdaConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LdaSettings {
    pub iterations: usize,
    pub burn_in: usize,
    pub lag: usize,
    /// Defaults to `50 / K`.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub vocab_min_count: u64,
    pub fold_in_iterations: usize,
}

impl Default for LdaSettings {
    fn default() -> Self {
        LdaSettings {
            iterations: 1000,
            burn_in: 200,
            lag: 10,
            alpha: None,
            beta: 0.01,
            vocab_min_count: 1,
            fold_in_iterations: 50,
        }
    }
}

impl LdaSettings {
    pub fn for_k(&self, k: usize, seed: u64) -> LdaConfig {
        LdaConfig {
            k,
            alpha: self.alpha,
            beta: self.beta,
            iterations: self.iterations,
            burn_in: self.burn_in,
            lag: self.lag,
            seed,
        }
    }
}

/// Every knob of a full run. Relative paths in a config file are resolved
/// against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Corpus file; exclusive with `synth`.
    pub corpus: Option<PathBuf>,
    /// `jsonl` or `tsv`; inferred from the extension when absent.
    pub corpus_format: Option<String>,
    /// Generator config; the run starts by writing a synthetic corpus and
    /// its labels into the output directory.
    pub synth: Option<PathBuf>,
    pub dictionary: PathBuf,
    pub liwc: PathBuf,
    pub gazetteer: PathBuf,
    /// Gold labels (`word<TAB>category`); optional with `synth`.
    pub labels: Option<PathBuf>,
    pub output: PathBuf,
    pub sample_cap: usize,
    /// Keep the most frequent stable OOV words only; 0 keeps all.
    pub top_n: usize,
    pub k_values: Vec<usize>,
    pub classifiers: Vec<ModelKind>,
    pub folds: usize,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub chi_square_bins: usize,
    /// K used for the ranking and ablation tables; defaults to the last K.
    pub ablation_k: Option<usize>,
    /// POS tags to use as features; empty uses the tags observed in the corpus.
    pub tagset: Vec<String>,
    /// Refit topic models inside every training fold instead of once.
    pub refit_per_fold: bool,
    pub lda: LdaSettings,
    pub logistic: LogisticConfig,
    pub svm: SvmConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus: None,
            corpus_format: None,
            synth: None,
            dictionary: PathBuf::from("data/dict.txt"),
            liwc: PathBuf::from("data/liwc_demo.txt"),
            gazetteer: PathBuf::from("data/gazetteer.txt"),
            labels: None,
            output: PathBuf::from("out"),
            sample_cap: 5000,
            top_n: 0,
            k_values: vec![10, 20, 30, 40, 50],
            classifiers: vec![ModelKind::Logistic, ModelKind::LinearSvm],
            folds: 10,
            seed: 42,
            workers: 0,
            chi_square_bins: 10,
            ablation_k: None,
            tagset: Vec::new(),
            refit_per_fold: false,
            lda: LdaSettings::default(),
            logistic: LogisticConfig::default(),
            svm: SvmConfig::default(),
        }
    }
}

fn rebase(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses a config file and resolves its relative paths.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        for p in [&mut self.dictionary, &mut self.liwc, &mut self.gazetteer, &mut self.output] {
            rebase(base, p);
        }
        for p in [&mut self.corpus, &mut self.synth, &mut self.labels].into_iter().flatten() {
            rebase(base, p);
        }
    }

    pub fn model_config(&self, kind: ModelKind) -> ModelConfig {
        match kind {
            ModelKind::Logistic => ModelConfig::Logistic(self.logistic),
            ModelKind::LinearSvm => ModelConfig::LinearSvm(self.svm),
        }
    }

    pub fn ablation_k(&self) -> usize {
        self.ablation_k.or(self.k_values.last().copied()).unwrap_or(10)
    }

    /// Checks values and that every referenced input exists.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match (&self.corpus, &self.synth) {
            (Some(_), Some(_)) => return bad("set either `corpus` or `synth`, not both".into()),
            (None, None) => return bad("no corpus: set `corpus` or `synth`".into()),
            _ => {}
        }
        if self.synth.is_none() && self.labels.is_none() {
            return bad("`labels` is required with a corpus file".into());
        }
        let inputs = [
            Some(&self.dictionary),
            Some(&self.liwc),
            Some(&self.gazetteer),
            self.corpus.as_ref(),
            self.synth.as_ref(),
            self.labels.as_ref(),
        ];
        for p in inputs.into_iter().flatten() {
            if !p.is_file() {
                return bad(format!("input file {} does not exist", p.display()));
            }
        }
        if let Some(f) = &self.corpus_format {
            f.parse::<crate::corpus::CorpusFormat>().map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            return bad("k_values must be non-empty and every K at least 1".into());
        }
        if let Some(k) = self.ablation_k {
            if !self.k_values.contains(&k) {
                return bad(format!("ablation_k {k} is not among k_values"));
            }
        }
        if self.folds < 2 {
            return bad(format!("folds must be at least 2, got {}", self.folds));
        }
        if self.classifiers.is_empty() {
            return bad("no classifiers selected".into());
        }
        if self.sample_cap == 0 {
            return bad("sample_cap must be at least 1".into());
        }
        if self.chi_square_bins < 2 {
            return bad("chi_square_bins must be at least 2".into());
        }
        if self.lda.iterations <= self.lda.burn_in {
            return bad("lda.iterations must exceed lda.burn_in".into());
        }
        if !(self.lda.beta.is_finite() && self.lda.beta > 0.0) || self.lda.alpha.is_some_and(|a| !(a.is_finite() && a > 0.0)) {
            return bad("LDA priors must be positive".into());
        }
        if !(self.svm.c.is_finite() && self.svm.c > 0.0) || !(self.logistic.l2.is_finite() && self.logistic.l2 >= 0.0) {
            return bad("classifier regularization out of range".into());
        }
        Ok(())
    }
}
