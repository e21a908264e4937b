use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use oovcat_core::corpus::synth::{generate_synthetic_corpus, SynthConfig};
use oovcat_core::corpus::{load_corpus, tokenize, write_corpus, CorpusFormat, Tweet};
use oovcat_core::features::{cooccurrence_timeseries, parse_families, ClarityIndex};
use oovcat_core::learn::{
    ablate_families, ablation_table, ablation_to_text, chi_square_rank, confusion_matrix, cross_validate, metrics, Dataset, LogisticConfig,
    ModelConfig, ModelKind, SvmConfig, TrainedModel,
};
use oovcat_core::lexicon::{build_oov_inventory, select_stable_oov, CategoryLexicon, Dictionary, LabelSet};
use oovcat_core::pipeline::{
    build_profiles, learned_words, observed_tagset, rerun_from_manifest, run_pipeline, FeatureInputs, LabeledWords, LdaSettings, Manifest,
    PipelineConfig, StageError,
};
use oovcat_core::rules::{evaluate_rules, rule_stage};
use oovcat_core::tagger::tag_corpus;
use oovcat_core::topics::LdaModel;
use oovcat_core::Error;

/// Detect and categorize out-of-vocabulary words in short social-media messages.
#[derive(Parser)]
#[command(name = "oovcat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize a string or a corpus file.
    Tokenize(TokenizeArgs),
    /// Build the monthly OOV inventory and the stable-OOV list.
    DetectOov(DetectArgs),
    /// Apply the emoticon and lengthening rules to a word list.
    RuleClassify(RuleArgs),
    /// Compute the per-word feature matrix.
    Featurize(FeaturizeArgs),
    /// Train a topic model over per-word documents.
    LdaTrain(LdaArgs),
    /// Train a classifier on a feature matrix.
    Train(TrainArgs),
    /// Cross-validate a classifier, or score a saved model on a matrix.
    Evaluate(EvaluateArgs),
    /// Rank features by chi-square against the class.
    RankFeatures(RankArgs),
    /// Cross-validate on feature-family subsets.
    Ablate(AblateArgs),
    /// Mean other-OOV count per tweet by category and month.
    Timeseries(TimeseriesArgs),
    /// Generate a synthetic corpus and its gold labels.
    Synth(SynthArgs),
    /// Run the whole pipeline from a config file or a manifest.
    Run(RunArgs),
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus file (JSONL or TSV records).
    #[arg(long)]
    corpus: PathBuf,
    /// `jsonl` or `tsv`; inferred from the extension by default.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct TokenizeArgs {
    /// Text to tokenize; prints one `token<TAB>kind` line per token.
    #[arg(long, conflicts_with = "input")]
    text: Option<String>,
    /// Corpus file; writes one JSON object per tweet.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    /// Output file; stdout by default.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    dictionary: PathBuf,
    /// Keep the N most frequent stable OOVs; 0 keeps all.
    #[arg(long, default_value_t = 0)]
    top_n: usize,
    /// Directory for `oov_inventory.tsv` and `stable_oov.txt`.
    #[arg(long)]
    output_dir: PathBuf,
}

#[derive(Args)]
struct RuleArgs {
    /// One word per line.
    #[arg(long)]
    words: PathBuf,
    #[arg(long)]
    dictionary: PathBuf,
    /// Gold labels for the rule report.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Directory for `rule_verdicts.tsv` and `rule_report.txt`.
    #[arg(long)]
    output_dir: PathBuf,
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    dictionary: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, default_value_t = 5000)]
    sample_cap: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct LdaFlags {
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    #[arg(long, default_value_t = 200)]
    burn_in: usize,
    #[arg(long, default_value_t = 10)]
    lag: usize,
    /// Defaults to 50/K.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
}

impl LdaFlags {
    fn settings(&self) -> LdaSettings {
        LdaSettings {
            iterations: self.iterations,
            burn_in: self.burn_in,
            lag: self.lag,
            alpha: self.alpha,
            beta: self.beta,
            ..LdaSettings::default()
        }
    }
}

#[derive(Args)]
struct LdaArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    lda: LdaFlags,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct FeaturizeArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    #[arg(long)]
    liwc: PathBuf,
    #[arg(long)]
    gazetteer: PathBuf,
    /// Saved topic model; trained on the profiles when absent.
    #[arg(long)]
    lda: Option<PathBuf>,
    /// Topics when training inline.
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[command(flatten)]
    lda_flags: LdaFlags,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct ClassifierFlags {
    /// `logistic` or `linear_svm`.
    #[arg(long, default_value = "logistic")]
    classifier: String,
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
}

impl ClassifierFlags {
    fn config(&self) -> Result<ModelConfig> {
        Ok(match self.classifier.parse::<ModelKind>()? {
            ModelKind::Logistic => ModelConfig::Logistic(LogisticConfig {
                l2: self.l2,
                learning_rate: self.learning_rate,
                epochs: self.epochs,
                ..LogisticConfig::default()
            }),
            ModelKind::LinearSvm => ModelConfig::LinearSvm(SvmConfig {
                c: self.c,
                epochs: self.epochs,
                ..SvmConfig::default()
            }),
        })
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    features: PathBuf,
    #[command(flatten)]
    model: ClassifierFlags,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    features: PathBuf,
    /// Score this model instead of cross-validating.
    #[arg(long)]
    model: Option<PathBuf>,
    #[command(flatten)]
    classifier: ClassifierFlags,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AblateArgs {
    #[arg(long)]
    features: PathBuf,
    /// Families joined by `+`, e.g. `content+context`; all combinations by default.
    #[arg(long)]
    families: Option<String>,
    #[command(flatten)]
    classifier: ClassifierFlags,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TimeseriesArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    dictionary: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Generator config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Reject generated words found in this dictionary.
    #[arg(long)]
    dictionary: Option<PathBuf>,
    /// Corpus output (JSONL).
    #[arg(long, short)]
    output: PathBuf,
    /// Gold label output (TSV).
    #[arg(long)]
    labels_output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Pipeline config (TOML).
    #[arg(long, required_unless_present = "manifest", conflicts_with = "manifest")]
    config: Option<PathBuf>,
    /// Rerun exactly what a previous manifest records.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// With --manifest: fail unless every artifact matches the recorded digest.
    #[arg(long, requires = "manifest")]
    verify: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    /// Comma-separated topic counts.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Repeatable; `logistic` or `linear_svm`.
    #[arg(long)]
    classifier: Vec<String>,
    #[arg(long)]
    sample_cap: Option<usize>,
    #[arg(long)]
    refit_per_fold: bool,
}

fn require_file(p: &Path) -> Result<()> {
    if !p.is_file() {
        return Err(Error::Config(format!("input file {} does not exist", p.display())).into());
    }
    Ok(())
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_corpus(path: &Path, format: Option<&str>) -> Result<Vec<Tweet>> {
    require_file(path)?;
    let format = match format {
        Some(f) => f.parse::<CorpusFormat>()?,
        None => CorpusFormat::from_path(path),
    };
    let loaded = load_corpus(path, format)?;
    if loaded.skipped > 0 {
        log::warn!("{}: skipped {} malformed lines", path.display(), loaded.skipped);
    }
    Ok(loaded.tweets)
}

fn load_dict(path: &Path) -> Result<Dictionary> {
    require_file(path)?;
    Ok(Dictionary::load(path)?)
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    require_file(path)?;
    Ok(Dataset::load(path)?)
}

fn tokenize_cmd(a: TokenizeArgs) -> Result<()> {
    if let Some(text) = a.text {
        let out: String = tokenize(&text)
            .iter()
            .map(|t| format!("{}\t{}\n", t.text, t.kind.as_str()))
            .collect();
        return write_out(a.output.as_deref(), &out);
    }
    let Some(input) = a.input else {
        return Err(Error::Config("give --text or --input".into()).into());
    };
    let tweets = read_corpus(&input, a.format.as_deref())?;
    let mut out = String::new();
    for t in &tweets {
        out.push_str(&serde_json::to_string(
            &serde_json::json!({"id": t.id, "month": t.month, "tokens": t.tokens}),
        )?);
        out.push('\n');
    }
    write_out(a.output.as_deref(), &out)
}

fn detect_cmd(a: DetectArgs) -> Result<()> {
    let dict = load_dict(&a.dictionary)?;
    let tweets = read_corpus(&a.corpus.corpus, a.corpus.format.as_deref())?;
    let inv = build_oov_inventory(&tweets, &dict);
    let top = if a.top_n == 0 { usize::MAX } else { a.top_n };
    let stable = select_stable_oov(&inv, top);
    fs::create_dir_all(&a.output_dir)?;
    fs::write(a.output_dir.join("oov_inventory.tsv"), inv.to_tsv())?;
    fs::write(a.output_dir.join("stable_oov.txt"), stable.join("\n") + "\n")?;
    eprintln!(
        "{} OOV types, {} stable across {} months",
        inv.entries.len(),
        stable.len(),
        inv.months.len()
    );
    Ok(())
}

fn read_words(path: &Path) -> Result<Vec<String>> {
    require_file(path)?;
    Ok(fs::read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_lowercase)
        .collect())
}

fn rule_cmd(a: RuleArgs) -> Result<()> {
    let dict = load_dict(&a.dictionary)?;
    let words = read_words(&a.words)?;
    let verdicts = rule_stage(&words, &dict);
    fs::create_dir_all(&a.output_dir)?;
    let mut vt = String::from("word\tcategory\tnormalized\tcapped\n");
    for (w, v) in &verdicts {
        let cat = v.category.map_or("", |c| c.as_str());
        vt.push_str(&format!(
            "{w}\t{cat}\t{}\t{}\n",
            v.normalized_form.as_deref().unwrap_or(""),
            v.capped
        ));
    }
    fs::write(a.output_dir.join("rule_verdicts.tsv"), vt)?;
    let labels = match &a.labels {
        Some(p) => {
            require_file(p)?;
            LabelSet::load(p)?
        }
        None => LabelSet::default(),
    };
    fs::write(a.output_dir.join("rule_report.txt"), evaluate_rules(&verdicts, &labels).to_text())?;
    Ok(())
}

struct Prepared {
    dict: Dictionary,
    tweets: Vec<Tweet>,
    labeled: LabeledWords,
}

/// Loads, tags and selects the learnable stable OOVs, as the full pipeline does.
fn prepare(a: &ProfileArgs) -> Result<Prepared> {
    let dict = load_dict(&a.dictionary)?;
    require_file(&a.labels)?;
    let labels = LabelSet::load(&a.labels)?;
    let mut tweets = read_corpus(&a.corpus.corpus, a.corpus.format.as_deref())?;
    tag_corpus(&mut tweets);
    let inv = build_oov_inventory(&tweets, &dict);
    let stable = select_stable_oov(&inv, usize::MAX);
    let verdicts = rule_stage(&stable, &dict);
    let labeled = learned_words(&stable, &verdicts, &labels)?;
    Ok(Prepared { dict, tweets, labeled })
}

fn lda_cmd(a: LdaArgs) -> Result<()> {
    let p = prepare(&a.profile)?;
    let profiles = build_profiles(&p.tweets, &p.labeled.words, a.profile.sample_cap, a.profile.seed)?;
    let docs = oovcat_core::topics::build_documents(&profiles, 1)?;
    let cfg = a.lda.settings().for_k(a.k, oovcat_core::pipeline::lda_seed(a.profile.seed, a.k));
    let model = oovcat_core::topics::gibbs_train(&docs, &cfg)?;
    model.save(&a.output)?;
    eprintln!(
        "{} documents, vocabulary {}, K={}",
        model.num_docs(),
        model.vocabulary.len(),
        model.k()
    );
    Ok(())
}

fn featurize_cmd(a: FeaturizeArgs) -> Result<()> {
    let p = prepare(&a.profile)?;
    require_file(&a.liwc)?;
    require_file(&a.gazetteer)?;
    let liwc = CategoryLexicon::load(&a.liwc)?;
    let gazetteer = CategoryLexicon::load(&a.gazetteer)?;
    let profiles = build_profiles(&p.tweets, &p.labeled.words, a.profile.sample_cap, a.profile.seed)?;
    let clarity = ClarityIndex::build(&p.tweets)?;
    let inputs = FeatureInputs {
        dict: &p.dict,
        liwc: &liwc,
        gazetteer: &gazetteer,
        clarity: &clarity,
        profiles: &profiles,
        labels: &p.labeled,
        tagset: observed_tagset(&p.tweets),
    };
    let all: Vec<usize> = (0..profiles.len()).collect();
    let settings = a.lda_flags.settings();
    let lda = match &a.lda {
        Some(path) => {
            require_file(path)?;
            LdaModel::load(path)?
        }
        None => inputs.train_lda(&all, a.k, &settings, a.profile.seed)?,
    };
    let ds = inputs.featurize(&lda, &all, settings.fold_in_iterations, a.profile.seed)?;
    ds.save(&a.output)?;
    eprintln!("{} words x {} features", ds.len(), ds.num_features());
    Ok(())
}

fn train_cmd(a: TrainArgs) -> Result<()> {
    let ds = load_dataset(&a.features)?;
    let model = a.model.config()?.train(&ds, a.seed)?;
    model.save(&a.output)?;
    Ok(())
}

fn evaluate_cmd(a: EvaluateArgs) -> Result<()> {
    let ds = load_dataset(&a.features)?;
    let report = match &a.model {
        Some(path) => {
            require_file(path)?;
            let model = TrainedModel::load(path)?;
            model.check_schema(&ds)?;
            if model.class_names != ds.class_names {
                bail!(
                    "model classes {:?} differ from dataset classes {:?}",
                    model.class_names,
                    ds.class_names
                );
            }
            let pred: Vec<usize> = ds.rows.iter().map(|r| model.predict(r)).collect();
            let scores: Vec<Vec<f64>> = ds.rows.iter().map(|r| model.class_scores(r)).collect();
            let mut r = metrics(
                &confusion_matrix(&ds.labels, &pred, ds.num_classes()),
                &scores,
                &ds.labels,
                &ds.class_names,
            )?;
            r.classifier = model.kind.as_str().to_string();
            r
        }
        None => cross_validate(&ds, &a.classifier.config()?, a.folds, a.seed)?,
    };
    write_out(a.output.as_deref(), &report.to_text())
}

fn rank_cmd(a: RankArgs) -> Result<()> {
    let ds = load_dataset(&a.features)?;
    write_out(a.output.as_deref(), &chi_square_rank(&ds, a.bins)?.to_tsv())
}

fn ablate_cmd(a: AblateArgs) -> Result<()> {
    let ds = load_dataset(&a.features)?;
    let cfg = a.classifier.config()?;
    let rows = match &a.families {
        Some(f) => {
            let families = parse_families(f)?;
            let report = ablate_families(&ds, &families, &cfg, a.folds, a.seed)?;
            vec![oovcat_core::learn::AblationRow { families, report }]
        }
        None => ablation_table(&ds, &cfg, a.folds, a.seed)?,
    };
    write_out(a.output.as_deref(), &ablation_to_text(&rows))
}

fn timeseries_cmd(a: TimeseriesArgs) -> Result<()> {
    let dict = load_dict(&a.dictionary)?;
    require_file(&a.labels)?;
    let labels = LabelSet::load(&a.labels)?;
    let tweets = read_corpus(&a.corpus.corpus, a.corpus.format.as_deref())?;
    let inv = build_oov_inventory(&tweets, &dict);
    write_out(
        a.output.as_deref(),
        &cooccurrence_timeseries(&inv, &labels, &tweets, &dict).to_csv(),
    )
}

fn synth_cmd(a: SynthArgs) -> Result<()> {
    require_file(&a.config)?;
    let cfg = SynthConfig::load(&a.config)?;
    let dict = a.dictionary.as_deref().map(load_dict).transpose()?;
    let out = generate_synthetic_corpus(&cfg, a.seed.unwrap_or(cfg.seed), dict.as_ref())?;
    write_corpus(&a.output, &out.tweets)?;
    if let Some(l) = &a.labels_output {
        fs::write(l, out.labels.to_tsv())?;
    }
    eprintln!("{} tweets, {} labeled words", out.tweets.len(), out.labels.len());
    Ok(())
}

fn run_cmd(a: RunArgs) -> Result<()> {
    let manifest = if let Some(m) = &a.manifest {
        require_file(m)?;
        let recorded = Manifest::load(m)?;
        let fresh = rerun_from_manifest(m, a.output.as_deref())?;
        if a.verify {
            let diff = recorded.artifact_mismatches(&fresh);
            if !diff.is_empty() {
                let list: Vec<String> = diff.iter().map(|p| p.display().to_string()).collect();
                bail!("rerun differs from the recorded run: {}", list.join(", "));
            }
            eprintln!("all {} artifacts match the recorded run", fresh.artifacts.len());
        }
        fresh
    } else {
        let path = a.config.as_ref().expect("clap enforces config or manifest");
        let mut cfg = PipelineConfig::load(path)?;
        if let Some(o) = a.output {
            cfg.output = o;
        }
        if let Some(s) = a.seed {
            cfg.seed = s;
        }
        if let Some(w) = a.workers {
            cfg.workers = w;
        }
        if let Some(f) = a.folds {
            cfg.folds = f;
        }
        if let Some(k) = a.k {
            cfg.k_values = k;
        }
        if !a.classifier.is_empty() {
            cfg.classifiers = a.classifier.iter().map(|c| c.parse()).collect::<oovcat_core::Result<_>>()?;
        }
        if let Some(c) = a.sample_cap {
            cfg.sample_cap = c;
        }
        if a.refit_per_fold {
            cfg.refit_per_fold = true;
        }
        run_pipeline(&cfg)?
    };
    eprintln!(
        "wrote {} artifacts to {}",
        manifest.artifacts.len(),
        manifest.config.output.display()
    );
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(s) = e.downcast_ref::<StageError>() {
        return if s.is_config() { 2 } else { 1 };
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Config(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Tokenize(a) => tokenize_cmd(a),
        Command::DetectOov(a) => detect_cmd(a),
        Command::RuleClassify(a) => rule_cmd(a),
        Command::Featurize(a) => featurize_cmd(a),
        Command::LdaTrain(a) => lda_cmd(a),
        Command::Train(a) => train_cmd(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::RankFeatures(a) => rank_cmd(a),
        Command::Ablate(a) => ablate_cmd(a),
        Command::Timeseries(a) => timeseries_cmd(a),
        Command::Synth(a) => synth_cmd(a),
        Command::Run(a) => run_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
