//! End-to-end driver: ingest, OOV inventory, rule stage, profiles, topic
//! models, features, evaluation, ranking and ablation, with a manifest that
//! allows exact reruns.

mod config;
mod manifest;

pub use config::{LdaSettings, PipelineConfig};
pub use manifest::{sha256_file, FileDigest, Manifest, MANIFEST_FILE};

use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::corpus::synth::{generate_synthetic_corpus, SynthConfig};
use crate::corpus::{load_corpus, write_corpus, CorpusFormat, Tweet};
use crate::error::{Error, Result};
use crate::features::{
    cooccurrence_timeseries, featurize, occurrence_index, sample_from_candidates, stable_hash, ClarityIndex, Family, FeatureContext,
    FeatureSchema, OovProfile, SchemaSpec,
};
use crate::learn::{
    ablation_table, ablation_to_text, argmax, chi_square_rank, cross_validate, cross_validate_with, fold_seed, Dataset, EvalReport,
    ModelKind, Prediction,
};
use crate::lexicon::{build_oov_inventory, select_stable_oov, Category, CategoryLexicon, Dictionary, LabelSet};
use crate::rules::{evaluate_rules, rule_stage, RuleVerdict};
use crate::tagger::tag_corpus;
use crate::topics::{build_documents, gibbs_train, LdaModel};

/// A pipeline failure tagged with the stage that raised it.
#[derive(Debug)]
pub struct StageError {
    pub stage: String,
    pub error: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage `{}` failed: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl StageError {
    pub fn new(stage: &str, error: Error) -> Self {
        StageError {
            stage: stage.to_string(),
            error,
        }
    }

    /// Configuration and validation problems, as opposed to runtime failures.
    pub fn is_config(&self) -> bool {
        matches!(self.error, Error::Config(_))
    }
}

trait StageExt<T> {
    fn stage(self, name: &str) -> std::result::Result<T, StageError>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, name: &str) -> std::result::Result<T, StageError> {
        self.map_err(|e| StageError::new(name, e))
    }
}

type StageResult<T> = std::result::Result<T, StageError>;

struct Run<'c> {
    cfg: &'c PipelineConfig,
    manifest: Manifest,
}

impl Run<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.cfg.output.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.record(name)
    }

    fn record(&mut self, name: &str) -> Result<()> {
        let sha256 = sha256_file(&self.cfg.output.join(name))?;
        self.manifest.artifacts.push(FileDigest {
            path: PathBuf::from(name),
            sha256,
        });
        Ok(())
    }

    fn done(&mut self, stage: &str) {
        log::info!("stage {stage} done");
        self.manifest.stages.push(stage.to_string());
    }
}

/// Seed for the topic model with `k` topics.
pub fn lda_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add(k as u64)
}

/// Runs every stage and writes the artifacts plus `manifest.json` into the
/// output directory. On failure the manifest is still written, marked
/// incomplete with the failing stage.
pub fn run_pipeline(cfg: &PipelineConfig) -> StageResult<Manifest> {
    cfg.validate().stage("validate")?;
    fs::create_dir_all(&cfg.output)
        .map_err(|e| Error::io(&cfg.output, e))
        .stage("validate")?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
        .stage("validate")?;
    let mut run = Run {
        cfg,
        manifest: Manifest::new(cfg.clone()),
    };
    let result = pool.install(|| execute(&mut run));
    match result {
        Ok(()) => {
            run.manifest.complete = true;
            run.manifest.save(&cfg.output).stage("manifest")?;
            Ok(run.manifest)
        }
        Err(e) => {
            run.manifest.failed_stage = Some(e.stage.clone());
            run.manifest.error = Some(e.error.to_string());
            if let Err(save_err) = run.manifest.save(&cfg.output) {
                log::error!("could not write manifest: {save_err}");
            }
            Err(e)
        }
    }
}

/// Reruns the configuration recorded in a manifest after checking that
/// its inputs are unchanged. `output` redirects the artifacts.
pub fn rerun_from_manifest(manifest_path: &Path, output: Option<&Path>) -> StageResult<Manifest> {
    let recorded = Manifest::load(manifest_path).stage("validate")?;
    let changed = recorded.changed_inputs();
    if !changed.is_empty() {
        let list: Vec<String> = changed.iter().map(|p| p.display().to_string()).collect();
        return Err(StageError::new(
            "validate",
            Error::Config(format!("inputs changed since the recorded run: {}", list.join(", "))),
        ));
    }
    let mut cfg = recorded.config.clone();
    if let Some(out) = output {
        cfg.output = out.to_path_buf();
    }
    run_pipeline(&cfg)
}

fn load_inputs(run: &mut Run) -> StageResult<(Dictionary, CategoryLexicon, CategoryLexicon)> {
    let cfg = run.cfg;
    let dict = Dictionary::load(&cfg.dictionary).stage("load")?;
    let liwc = CategoryLexicon::load(&cfg.liwc).stage("load")?;
    let gazetteer = CategoryLexicon::load(&cfg.gazetteer).stage("load")?;
    for p in [&cfg.dictionary, &cfg.liwc, &cfg.gazetteer] {
        run.manifest.add_input(p).stage("load")?;
    }
    Ok((dict, liwc, gazetteer))
}

fn load_tweets(run: &mut Run, dict: &Dictionary) -> StageResult<(Vec<Tweet>, LabelSet)> {
    let cfg = run.cfg;
    if let Some(synth_path) = &cfg.synth {
        run.manifest.add_input(synth_path).stage("synth")?;
        let scfg = SynthConfig::load(synth_path).stage("synth")?;
        run.manifest.seeds.insert("synth".into(), scfg.seed);
        let out = generate_synthetic_corpus(&scfg, scfg.seed, Some(dict)).stage("synth")?;
        write_corpus(&cfg.output.join("corpus.jsonl"), &out.tweets).stage("synth")?;
        run.record("corpus.jsonl").stage("synth")?;
        run.write("labels.tsv", &out.labels.to_tsv()).stage("synth")?;
        run.done("synth");
        Ok((out.tweets, out.labels))
    } else {
        let path = cfg.corpus.as_ref().expect("validated");
        let format = match &cfg.corpus_format {
            Some(f) => f.parse::<CorpusFormat>().stage("load")?,
            None => CorpusFormat::from_path(path),
        };
        let loaded = load_corpus(path, format).stage("load")?;
        if loaded.skipped > 0 {
            log::warn!("{}: skipped {} malformed lines", path.display(), loaded.skipped);
        }
        let labels_path = cfg.labels.as_ref().expect("validated");
        let labels = LabelSet::load(labels_path).stage("load")?;
        run.manifest.add_input(path).stage("load")?;
        run.manifest.add_input(labels_path).stage("load")?;
        Ok((loaded.tweets, labels))
    }
}

/// Selects the stable OOV words left to the classifier: no rule verdict and
/// a gold label from the learned categories. Classes keep category order.
pub fn learned_words(stable: &[String], verdicts: &BTreeMap<String, RuleVerdict>, labels: &LabelSet) -> Result<LabeledWords> {
    let words: Vec<String> = stable
        .iter()
        .filter(|w| verdicts.get(*w).is_none_or(|v| v.category.is_none()))
        .filter(|w| labels.get(w).is_some_and(Category::is_learned))
        .cloned()
        .collect();
    if words.is_empty() {
        return Err(Error::Invalid("no labeled stable OOV words left for the classifier".into()));
    }
    let present: BTreeSet<Category> = words.iter().filter_map(|w| labels.get(w)).collect();
    let class_names: Vec<String> = Category::LEARNED
        .iter()
        .filter(|c| present.contains(c))
        .map(|c| c.to_string())
        .collect();
    let ids = words
        .iter()
        .map(|w| {
            let name = labels.get(w).expect("filtered").to_string();
            class_names.iter().position(|c| *c == name).expect("present")
        })
        .collect();
    Ok(LabeledWords {
        words,
        class_names,
        labels: ids,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledWords {
    pub words: Vec<String>,
    pub class_names: Vec<String>,
    pub labels: Vec<usize>,
}

/// Profiles for `words` in order, each sampled with its own seed.
pub fn build_profiles<'a>(tweets: &'a [Tweet], words: &[String], cap: usize, seed: u64) -> Result<Vec<OovProfile<'a>>> {
    let index = occurrence_index(tweets, words);
    words
        .par_iter()
        .map(|w| sample_from_candidates(w, tweets, index[w].iter().copied(), cap, seed ^ stable_hash(w)))
        .collect()
}

/// Read-only inputs shared by every featurization of a set of profiles.
pub struct FeatureInputs<'a> {
    pub dict: &'a Dictionary,
    pub liwc: &'a CategoryLexicon,
    pub gazetteer: &'a CategoryLexicon,
    pub clarity: &'a ClarityIndex,
    pub profiles: &'a [OovProfile<'a>],
    pub labels: &'a LabeledWords,
    pub tagset: Vec<String>,
}

impl FeatureInputs<'_> {
    pub fn spec(&self, k: usize) -> SchemaSpec {
        SchemaSpec {
            tagset: self.tagset.clone(),
            ne_categories: self.gazetteer.categories().to_vec(),
            liwc_categories: self.liwc.categories().to_vec(),
            topics: k,
            families: Family::ALL.to_vec(),
        }
    }

    /// Feature rows for the profiles at `which` under `lda`; profiles the
    /// model was not trained on are folded in.
    pub fn featurize(&self, lda: &LdaModel, which: &[usize], fold_in_iterations: usize, seed: u64) -> Result<Dataset> {
        let spec = self.spec(lda.k());
        let ctx = FeatureContext {
            dict: self.dict,
            gazetteer: Some(self.gazetteer),
            liwc: Some(self.liwc),
            clarity: Some(self.clarity),
            lda: Some(lda),
            fold_in: true,
            fold_in_iterations,
            seed,
        };
        let rows = which
            .par_iter()
            .map(|&i| featurize(&self.profiles[i], &ctx, &spec).map(|v| v.values))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(
            which.iter().map(|&i| self.profiles[i].word.clone()).collect(),
            FeatureSchema::new(&spec),
            rows,
            which.iter().map(|&i| self.labels.labels[i]).collect(),
            self.labels.class_names.clone(),
        )
    }

    pub fn train_lda(&self, which: &[usize], k: usize, lda: &LdaSettings, seed: u64) -> Result<LdaModel> {
        let subset: Vec<OovProfile> = which.iter().map(|&i| self.profiles[i].clone()).collect();
        let docs = build_documents(&subset, lda.vocab_min_count)?;
        gibbs_train(&docs, &lda.for_k(k, lda_seed(seed, k)))
    }
}

/// POS tags present in the corpus, sorted.
pub fn observed_tagset(tweets: &[Tweet]) -> Vec<String> {
    let tags: BTreeSet<&str> = tweets.iter().flat_map(|t| &t.tokens).filter_map(|k| k.pos.as_deref()).collect();
    tags.into_iter().map(str::to_string).collect()
}

/// Cross-validation with topic models refitted on every training fold;
/// held-out profiles get their topic mixtures by fold-in.
fn refit_cross_validate(shared: &FeatureInputs, k: usize, kind: ModelKind, cfg: &PipelineConfig) -> Result<EvalReport> {
    let model_cfg = cfg.model_config(kind);
    cross_validate_with(
        &shared.labels.labels,
        &shared.labels.class_names,
        cfg.folds,
        cfg.seed,
        kind.as_str(),
        |f, train, test| {
            let lda = shared.train_lda(train, k, &cfg.lda, cfg.seed)?;
            let train_ds = shared.featurize(&lda, train, cfg.lda.fold_in_iterations, cfg.seed)?;
            let test_ds = shared.featurize(&lda, test, cfg.lda.fold_in_iterations, cfg.seed)?;
            let model = model_cfg.train(&train_ds, fold_seed(cfg.seed, f))?;
            Ok(test
                .iter()
                .zip(&test_ds.rows)
                .map(|(&i, row)| Prediction {
                    index: i,
                    predicted: argmax(&model.decision(row)),
                    scores: model.class_scores(row),
                })
                .collect())
        },
    )
}

fn execute(run: &mut Run) -> StageResult<()> {
    let cfg = run.cfg;
    let (dict, liwc, gazetteer) = load_inputs(run)?;
    let (mut tweets, labels) = load_tweets(run, &dict)?;
    tag_corpus(&mut tweets);
    let tweets = tweets;
    run.done("load");

    let inventory = build_oov_inventory(&tweets, &dict);
    run.write("oov_inventory.tsv", &inventory.to_tsv()).stage("inventory")?;
    let top_n = if cfg.top_n == 0 { usize::MAX } else { cfg.top_n };
    let stable = select_stable_oov(&inventory, top_n);
    run.write("stable_oov.txt", &(stable.join("\n") + "\n")).stage("inventory")?;
    run.done("inventory");

    let verdicts = rule_stage(&stable, &dict);
    let mut vt = String::from("word\tcategory\tnormalized\tcapped\n");
    for (w, v) in &verdicts {
        let cat = v.category.map_or("", |c| c.as_str());
        let _ = writeln!(vt, "{w}\t{cat}\t{}\t{}", v.normalized_form.as_deref().unwrap_or(""), v.capped);
    }
    run.write("rule_verdicts.tsv", &vt).stage("rules")?;
    run.write("rule_report.txt", &evaluate_rules(&verdicts, &labels).to_text())
        .stage("rules")?;
    run.done("rules");

    let series = cooccurrence_timeseries(&inventory, &labels, &tweets, &dict);
    run.write("timeseries.csv", &series.to_csv()).stage("timeseries")?;
    run.done("timeseries");

    let labeled = learned_words(&stable, &verdicts, &labels).stage("profiles")?;
    run.manifest.seeds.insert("profiles".into(), cfg.seed);
    let profiles = build_profiles(&tweets, &labeled.words, cfg.sample_cap, cfg.seed).stage("profiles")?;
    let clarity = ClarityIndex::build(&tweets).stage("profiles")?;
    let tagset = if cfg.tagset.is_empty() {
        observed_tagset(&tweets)
    } else {
        cfg.tagset.clone()
    };
    run.done("profiles");

    let shared = FeatureInputs {
        dict: &dict,
        liwc: &liwc,
        gazetteer: &gazetteer,
        clarity: &clarity,
        profiles: &profiles,
        labels: &labeled,
        tagset,
    };
    let all: Vec<usize> = (0..profiles.len()).collect();

    for &k in &cfg.k_values {
        run.manifest.seeds.insert(format!("lda_k{k}"), lda_seed(cfg.seed, k));
    }
    let per_k: Vec<(usize, LdaModel, Dataset)> = cfg
        .k_values
        .par_iter()
        .map(|&k| {
            let stage = format!("topics_k{k}");
            let lda = shared.train_lda(&all, k, &cfg.lda, cfg.seed).stage(&stage)?;
            let ds = shared
                .featurize(&lda, &all, cfg.lda.fold_in_iterations, cfg.seed)
                .stage(&format!("features_k{k}"))?;
            Ok((k, lda, ds))
        })
        .collect::<StageResult<_>>()?;
    for (k, lda, ds) in &per_k {
        run.write(&format!("lda_k{k}.txt"), &lda.to_text()).stage("topics")?;
        run.write(&format!("features_k{k}.csv"), &ds.to_csv().stage("features")?)
            .stage("features")?;
    }
    run.done("features");

    run.manifest.seeds.insert("cv".into(), cfg.seed);
    let mut summary = String::from("k\tclassifier\taccuracy\tprecision\trecall\tf_score\troc_area\n");
    for (k, _, ds) in &per_k {
        for &kind in &cfg.classifiers {
            let stage = format!("evaluate_k{k}_{}", kind.as_str());
            let mc = cfg.model_config(kind);
            let report = if cfg.refit_per_fold {
                refit_cross_validate(&shared, *k, kind, cfg)
            } else {
                cross_validate(ds, &mc, cfg.folds, cfg.seed)
            }
            .stage(&stage)?;
            let _ = writeln!(
                summary,
                "{k}\t{}\t{:.2}\t{:.3}\t{:.3}\t{:.3}\t{:.3}",
                kind.as_str(),
                report.accuracy,
                report.precision,
                report.recall,
                report.f_score,
                report.roc_area
            );
            run.write(&format!("eval_k{k}_{}.txt", kind.as_str()), &report.to_text())
                .stage(&stage)?;
            let model = mc.train(ds, cfg.seed).stage(&stage)?;
            run.write(&format!("model_k{k}_{}.txt", kind.as_str()), &model.to_text())
                .stage(&stage)?;
        }
    }
    run.write("eval_summary.tsv", &summary).stage("evaluate")?;
    run.done("evaluate");

    let ak = cfg.ablation_k();
    let (_, _, ablation_ds) = per_k.iter().find(|(k, _, _)| *k == ak).expect("ablation_k validated");
    let ranking = chi_square_rank(ablation_ds, cfg.chi_square_bins).stage("rank")?;
    run.write("chi2_ranking.tsv", &ranking.to_tsv()).stage("rank")?;
    run.done("rank");

    let mut rows = Vec::new();
    for &kind in &cfg.classifiers {
        rows.extend(ablation_table(ablation_ds, &cfg.model_config(kind), cfg.folds, cfg.seed).stage("ablate")?);
    }
    run.write("ablation.tsv", &ablation_to_text(&rows)).stage("ablate")?;
    run.done("ablate");
    Ok(())
}
