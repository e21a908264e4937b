//! Seeded generator for corpora with planted per-category OOV signatures.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use super::Tweet;
use crate::error::{Error, Result};
use crate::lexicon::{Category, Dictionary, LabelSet};
use crate::rules::{classify_emoticon, classify_lengthening};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WordStyle {
    /// Consonant-vowel syllables.
    #[default]
    Syllable,
    /// Mostly consonants, like initialisms.
    Initialism,
    /// One syllable repeated, like laughter.
    Repeat,
    /// Concatenated dictionary words.
    Merge,
    /// Eye, optional nose and mouth characters.
    Emoticon,
    /// A base word with one letter stretched.
    Lengthening,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicSpec {
    pub name: String,
    pub words: Vec<String>,
    /// Defaults to `#<name>`.
    #[serde(default)]
    pub hashtags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CategorySpec {
    pub name: String,
    /// Planted words used verbatim.
    pub words: Vec<String>,
    /// Additional words generated in `style`.
    pub count: usize,
    pub style: WordStyle,
    pub length: [usize; 2],
    pub capitalize: bool,
    /// Dictionary words stretched by the lengthening style.
    pub bases: Vec<String>,
    /// Mean normalized position of the planted word.
    pub position: f64,
    /// Per-word uniform offset applied to `position`.
    pub position_jitter: f64,
    /// Per-tweet Gaussian noise on the position.
    pub position_noise: f64,
    /// Mean count of other OOV tokens per tweet.
    pub other_oov: f64,
    pub other_oov_jitter: f64,
    pub topic: Option<String>,
    /// Share of body tokens drawn from the topic pool.
    pub topic_share: f64,
    pub hashtag_rate: f64,
    pub mention_rate: f64,
    pub retweet_rate: f64,
}

impl Default for CategorySpec {
    fn default() -> Self {
        CategorySpec {
            name: String::new(),
            words: Vec::new(),
            count: 0,
            style: WordStyle::Syllable,
            length: [4, 7],
            capitalize: false,
            bases: Vec::new(),
            position: 0.5,
            position_jitter: 0.0,
            position_noise: 0.05,
            other_oov: 0.0,
            other_oov_jitter: 0.0,
            topic: None,
            topic_share: 0.0,
            hashtag_rate: 0.0,
            mention_rate: 0.0,
            retweet_rate: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub seed: u64,
    /// First month, `YYYY-MM`.
    pub start_month: String,
    pub months: usize,
    /// Tweets generated per planted word, spread round-robin over months.
    pub tweets_per_word: usize,
    /// Body length range before planted, entity and noise tokens.
    pub body_tokens: [usize; 2],
    pub filler: Vec<String>,
    /// Size of the pool of unlabeled OOV words used as co-occurring noise.
    pub noise_words: usize,
    pub noise_length: [usize; 2],
    pub topics: Vec<TopicSpec>,
    pub categories: Vec<CategorySpec>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            start_month: "2013-01".into(),
            months: 6,
            tweets_per_word: 12,
            body_tokens: [6, 10],
            filler: Vec::new(),
            noise_words: 40,
            noise_length: [4, 8],
            topics: Vec::new(),
            categories: Vec::new(),
        }
    }
}

impl SynthConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("generator config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.filler.is_empty() {
            return bad("filler word pool is empty".into());
        }
        if self.categories.is_empty() {
            return bad("no categories to plant".into());
        }
        if self.months == 0 {
            return bad("months must be at least 1".into());
        }
        month_offset(&self.start_month, 0)?;
        for range in [self.body_tokens, self.noise_length] {
            if range[0] > range[1] {
                return bad(format!("range {range:?} is reversed"));
            }
        }
        for t in &self.topics {
            if t.words.is_empty() {
                return bad(format!("topic `{}` has an empty word pool", t.name));
            }
        }
        for c in &self.categories {
            if c.words.is_empty() && c.count == 0 {
                return bad(format!("category `{}` has an empty word pool", c.name));
            }
            if c.style == WordStyle::Lengthening && c.count > 0 && c.bases.is_empty() {
                return bad(format!("category `{}` needs bases for lengthening", c.name));
            }
            if c.length[0] > c.length[1] || c.length[0] == 0 {
                return bad(format!("category `{}` has an invalid length range", c.name));
            }
            if let Some(t) = &c.topic {
                if !self.topics.iter().any(|s| &s.name == t) {
                    return bad(format!("category `{}` names unknown topic `{t}`", c.name));
                }
            }
            for (what, v) in [
                ("topic_share", c.topic_share),
                ("hashtag_rate", c.hashtag_rate),
                ("mention_rate", c.mention_rate),
                ("retweet_rate", c.retweet_rate),
                ("position", c.position),
            ] {
                if !(0.0..=1.0).contains(&v) {
                    return bad(format!("category `{}`: {what} must lie in [0, 1]", c.name));
                }
            }
            if c.other_oov < 0.0 || c.other_oov_jitter < 0.0 || c.position_noise < 0.0 || c.position_jitter < 0.0 {
                return bad(format!("category `{}` has a negative rate", c.name));
            }
        }
        Ok(())
    }
}

/// `YYYY-MM` shifted forward by `offset` months.
fn month_offset(start: &str, offset: usize) -> Result<String> {
    let err = || Error::Config(format!("bad start month `{start}` (want YYYY-MM)"));
    let (y, m) = start.split_once('-').ok_or_else(err)?;
    let (y, m): (usize, usize) = (y.parse().map_err(|_| err())?, m.parse().map_err(|_| err())?);
    if !(1..=12).contains(&m) {
        return Err(err());
    }
    let idx = y * 12 + (m - 1) + offset;
    Ok(format!("{:04}-{:02}", idx / 12, idx % 12 + 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub tweets: Vec<Tweet>,
    pub labels: LabelSet,
}

const CONSONANTS: &[u8] = b"bcdfgjklmnprstvwz";
const VOWELS: &[u8] = b"aeiou";

fn has_double_letter(w: &str) -> bool {
    w.as_bytes().windows(2).any(|p| p[0].eq_ignore_ascii_case(&p[1]))
}

fn make_word(rng: &mut ChaCha8Rng, spec: &CategorySpec, filler: &[String]) -> Option<String> {
    let len = rng.random_range(spec.length[0]..=spec.length[1]);
    let pick = |rng: &mut ChaCha8Rng, set: &[u8]| set[rng.random_range(0..set.len())] as char;
    let word: String = match spec.style {
        WordStyle::Syllable => (0..len)
            .map(|i| if i % 2 == 0 { pick(rng, CONSONANTS) } else { pick(rng, VOWELS) })
            .collect(),
        WordStyle::Initialism => (0..len)
            .map(|_| {
                if rng.random_bool(0.8) {
                    pick(rng, CONSONANTS)
                } else {
                    pick(rng, VOWELS)
                }
            })
            .collect(),
        WordStyle::Repeat => {
            let syl = [pick(rng, CONSONANTS), pick(rng, VOWELS)];
            (0..len).map(|i| syl[i % 2]).collect()
        }
        WordStyle::Merge => {
            let mut w = String::new();
            while w.len() < spec.length[0] {
                w.push_str(filler.choose(rng)?);
            }
            w
        }
        WordStyle::Emoticon => {
            const EYES: &[char] = &[':', ';', '='];
            const NOSES: &[&str] = &["", "-", "'", "o"];
            const MOUTHS: &[char] = &[')', '(', 'D', 'P', 'p', '/', '|', ']', '[', 'O'];
            let eye = EYES.choose(rng)?;
            let nose = NOSES.choose(rng)?;
            let mouth = MOUTHS.choose(rng)?;
            let reps = rng.random_range(1..=3);
            format!("{eye}{nose}{}", mouth.to_string().repeat(reps))
        }
        WordStyle::Lengthening => {
            let base = spec.bases.choose(rng)?;
            let chars: Vec<char> = base.chars().collect();
            let at = rng.random_range(0..chars.len());
            let extra = rng.random_range(2..=4);
            let mut w: String = chars[..=at].iter().collect();
            w.extend(std::iter::repeat_n(chars[at], extra));
            w.extend(&chars[at + 1..]);
            w
        }
    };
    if spec.style == WordStyle::Merge && (word.len() < spec.length[0] || word.len() > spec.length[1]) {
        return None;
    }
    let doubles_ok = matches!(spec.style, WordStyle::Emoticon | WordStyle::Lengthening);
    if !doubles_ok && has_double_letter(&word) {
        return None;
    }
    Some(if spec.capitalize { capitalize(&word) } else { word })
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

/// Checks that a generated word is the kind of OOV its style promises.
fn acceptable(word: &str, spec: &CategorySpec, avoid: Option<&Dictionary>, used: &HashSet<String>) -> bool {
    if used.contains(&word.to_lowercase()) || super::tokenize(word).len() != 1 {
        return false;
    }
    let Some(dict) = avoid else {
        return true;
    };
    if dict.contains(word) {
        return false;
    }
    match spec.style {
        WordStyle::Emoticon => classify_emoticon(word),
        WordStyle::Lengthening => classify_lengthening(word, dict).category == Some(Category::Lengthening),
        _ => !classify_emoticon(word) && classify_lengthening(word, dict).category.is_none(),
    }
}

struct Planted<'a> {
    word: String,
    spec: &'a CategorySpec,
    position: f64,
    other_oov: f64,
}

/// Generates the corpus and gold labels for its planted words.
///
/// `avoid` is the reference dictionary: generated words are rejected when
/// they are dictionary words or would be caught by the wrong rule, and
/// filler or topic words missing from it are an error.
pub fn generate_synthetic_corpus(cfg: &SynthConfig, seed: u64, avoid: Option<&Dictionary>) -> Result<SyntheticCorpus> {
    cfg.validate()?;
    if let Some(dict) = avoid {
        let pools = cfg.filler.iter().chain(cfg.topics.iter().flat_map(|t| &t.words));
        if let Some(w) = pools.into_iter().find(|w| !dict.contains(w)) {
            return Err(Error::Config(format!("pool word `{w}` is not in the dictionary")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used: HashSet<String> = cfg
        .filler
        .iter()
        .chain(cfg.topics.iter().flat_map(|t| &t.words))
        .map(|w| w.to_lowercase())
        .collect();
    let mut labels = LabelSet::default();
    let mut planted: Vec<Planted> = Vec::new();

    for spec in &cfg.categories {
        let category: Option<Category> = spec.name.parse().ok();
        let mut words: Vec<String> = spec.words.clone();
        let mut made = 0;
        let mut attempts = 0;
        while made < spec.count {
            attempts += 1;
            if attempts > 1000 * (spec.count + 1) {
                return Err(Error::Config(format!(
                    "could not generate {} distinct words for `{}`",
                    spec.count, spec.name
                )));
            }
            if let Some(w) = make_word(&mut rng, spec, &cfg.filler) {
                if acceptable(&w, spec, avoid, &used) {
                    used.insert(w.to_lowercase());
                    words.push(w);
                    made += 1;
                }
            }
        }
        for w in words {
            used.insert(w.to_lowercase());
            if let Some(c) = category {
                labels.labels.insert(w.to_lowercase(), c);
            }
            let position = (spec.position + rng.random_range(-1.0..=1.0) * spec.position_jitter).clamp(0.0, 1.0);
            let other_oov = (spec.other_oov + rng.random_range(-1.0..=1.0) * spec.other_oov_jitter).max(0.0);
            planted.push(Planted {
                word: w,
                spec,
                position,
                other_oov,
            });
        }
    }

    let noise_spec = CategorySpec {
        length: cfg.noise_length,
        ..CategorySpec::default()
    };
    let mut noise: Vec<String> = Vec::new();
    let mut attempts = 0;
    while noise.len() < cfg.noise_words {
        attempts += 1;
        if attempts > 1000 * (cfg.noise_words + 1) {
            return Err(Error::Config("could not generate the noise OOV pool".into()));
        }
        if let Some(w) = make_word(&mut rng, &noise_spec, &cfg.filler) {
            if acceptable(&w, &noise_spec, avoid, &used) {
                used.insert(w.clone());
                noise.push(w);
            }
        }
    }
    if noise.is_empty() && planted.iter().any(|p| p.other_oov > 0.0) {
        return Err(Error::Config("other_oov > 0 needs a non-empty noise pool".into()));
    }

    let months: Vec<String> = (0..cfg.months).map(|i| month_offset(&cfg.start_month, i)).collect::<Result<_>>()?;
    let mut tweets = Vec::new();
    for (w_idx, p) in planted.iter().enumerate() {
        let topic = p.spec.topic.as_ref().and_then(|t| cfg.topics.iter().find(|s| &s.name == t));
        let hashtags: Vec<String> = match topic {
            Some(t) if !t.hashtags.is_empty() => t.hashtags.clone(),
            Some(t) => vec![format!("#{}", t.name)],
            None => vec![format!("#{}", p.spec.name.replace('_', ""))],
        };
        let noise_dist = Poisson::new(p.other_oov).ok();
        let jitter = Normal::new(0.0, p.spec.position_noise.max(1e-12)).expect("finite deviation");
        for t in 0..cfg.tweets_per_word {
            let month = &months[(t + w_idx) % months.len()];
            let body_len = rng.random_range(cfg.body_tokens[0]..=cfg.body_tokens[1]);
            let mut body: Vec<String> = (0..body_len)
                .map(|_| match topic {
                    Some(tp) if rng.random_bool(p.spec.topic_share) => tp.words.choose(&mut rng).cloned(),
                    _ => cfg.filler.choose(&mut rng).cloned(),
                })
                .collect::<Option<_>>()
                .expect("pools are non-empty");
            let n_noise = noise_dist.map_or(0, |d| d.sample(&mut rng) as usize);
            for _ in 0..n_noise {
                let at = rng.random_range(0..=body.len());
                body.insert(at, noise.choose(&mut rng).cloned().expect("noise pool checked"));
            }
            if rng.random_bool(p.spec.mention_rate) {
                let at = rng.random_range(0..=body.len());
                body.insert(at, format!("@user{}", rng.random_range(0..50)));
            }
            if rng.random_bool(p.spec.hashtag_rate) {
                let at = rng.random_range(0..=body.len());
                body.insert(at, hashtags.choose(&mut rng).cloned().expect("non-empty"));
            }
            let mut prefix = Vec::new();
            if rng.random_bool(p.spec.retweet_rate) {
                prefix.push("RT".to_string());
                prefix.push(format!("@user{}:", rng.random_range(0..50)));
            }
            let total = prefix.len() + body.len() + 1;
            let target = (p.position + jitter.sample(&mut rng)).clamp(0.0, 1.0);
            let at = ((target * total as f64).floor() as usize).clamp(prefix.len(), total - 1) - prefix.len();
            body.insert(at, p.word.clone());
            prefix.extend(body);
            let text = prefix.join(" ");
            let id = format!("s{:06}", tweets.len());
            if let Some(tw) = Tweet::new(id, month.clone(), text) {
                tweets.push(tw);
            }
        }
    }
    // Month-major order, as a collected stream would be.
    tweets.sort_by(|a, b| a.month.cmp(&b.month));
    let mut rng_order = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut by_month: Vec<Vec<Tweet>> = Vec::new();
    let mut current = String::new();
    for t in tweets {
        if t.month != current {
            current = t.month.clone();
            by_month.push(Vec::new());
        }
        by_month.last_mut().expect("pushed above").push(t);
    }
    let mut tweets = Vec::new();
    for mut group in by_month {
        group.shuffle(&mut rng_order);
        tweets.extend(group);
    }
    for (i, t) in tweets.iter_mut().enumerate() {
        t.id = format!("s{i:06}");
    }
    Ok(SyntheticCorpus { tweets, labels })
}

/// Months spanned by the configuration, in order.
pub fn config_months(cfg: &SynthConfig) -> Result<BTreeSet<String>> {
    (0..cfg.months).map(|i| month_offset(&cfg.start_month, i)).collect()
}
