//! Per-OOV feature extraction across the lexical, content and context
//! families.

mod profile;
mod stats;
mod timeseries;

pub use profile::{occurrence_index, sample_from_candidates, sample_profile, stable_hash, OovProfile};
pub use stats::{entropy, entropy_of_counts, hashtag_clarity, kl_divergence, unigram_model, ClarityIndex};
pub use timeseries::{cooccurrence_timeseries, Timeseries};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::corpus::TokenKind;
use crate::error::{Error, Result};
use crate::lexicon::{is_oov, lexicon_fractions, ne_tag_fractions, CategoryLexicon, Dictionary};
use crate::topics::LdaModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Lexical,
    Content,
    Context,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Lexical, Family::Content, Family::Context];

    pub fn prefix(self) -> &'static str {
        match self {
            Family::Lexical => "lex",
            Family::Content => "con",
            Family::Context => "ctx",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Lexical => "lexical",
            Family::Content => "content",
            Family::Context => "context",
        }
    }

    pub fn of_name(name: &str) -> Option<Family> {
        let prefix = name.split('.').next()?;
        Family::ALL.into_iter().find(|f| f.prefix() == prefix)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Invalid(format!("unknown feature family `{s}`")))
    }
}

/// Parses a comma/plus separated family list such as `content+context`.
pub fn parse_families(s: &str) -> Result<Vec<Family>> {
    let mut out: Vec<Family> = s
        .split([',', '+'])
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(Error::Invalid("empty family set".into()));
    }
    Ok(out)
}

/// Everything the feature names depend on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaSpec {
    pub tagset: Vec<String>,
    pub ne_categories: Vec<String>,
    pub liwc_categories: Vec<String>,
    pub topics: usize,
    pub families: Vec<Family>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    pub names: Vec<String>,
    pub families: Vec<Family>,
}

/// CSV-safe feature-name fragment for a POS tag symbol.
pub fn tag_feature_name(tag: &str) -> String {
    let mut out = String::new();
    for c in tag.chars() {
        match c {
            c if c.is_ascii_alphanumeric() || c == '_' => out.push(c),
            ',' => out.push_str("punct"),
            '#' => out.push_str("hash"),
            '@' => out.push_str("at"),
            '!' => out.push_str("intj"),
            '^' => out.push_str("propn"),
            '$' => out.push_str("num"),
            '&' => out.push_str("conj"),
            '~' => out.push_str("disc"),
            other => out.push_str(&format!("u{:04x}", other as u32)),
        }
    }
    out
}

pub const COOC_NAMES: [&str; 5] = [
    "ctx.oov_cooc.0",
    "ctx.oov_cooc.1",
    "ctx.oov_cooc.2",
    "ctx.oov_cooc.3plus",
    "ctx.oov_cooc_mean",
];
pub const PROXIMITY_NAMES: [&str; 6] = [
    "ctx.prox_oov.1",
    "ctx.prox_oov.2",
    "ctx.prox_oov.3plus",
    "ctx.prox_iv.1",
    "ctx.prox_iv.2",
    "ctx.prox_iv.3plus",
];
pub const POSITION_NAMES: [&str; 4] = ["ctx.position", "ctx.position.left", "ctx.position.middle", "ctx.position.right"];
pub const ENTITY_POSITION_NAMES: [&str; 4] = ["ctx.hashtag_pos", "ctx.mention_pos", "ctx.hashtag_present", "ctx.mention_present"];
pub const ENTITY_PRESENCE_NAMES: [&str; 3] = ["con.hashtags_per_tweet", "con.mentions_per_tweet", "con.retweet_frac"];

impl FeatureSchema {
    pub fn new(spec: &SchemaSpec) -> Self {
        let mut names: Vec<String> = Vec::new();
        let has = |f: Family| spec.families.contains(&f);
        if has(Family::Lexical) {
            names.extend(spec.tagset.iter().map(|t| format!("lex.pos.{}", tag_feature_name(t))));
            names.push("lex.pos_div".into());
            names.extend(spec.ne_categories.iter().map(|c| format!("lex.ne.{c}")));
        }
        if has(Family::Content) {
            names.push("con.length".into());
            names.push("con.word_div".into());
            names.push("con.hashtag_clarity".into());
            names.extend(ENTITY_PRESENCE_NAMES.iter().map(|s| s.to_string()));
            names.extend((0..spec.topics).map(|k| format!("con.topic.{k}")));
            names.push("con.topic_div".into());
            names.extend(spec.liwc_categories.iter().map(|c| format!("con.liwc.{c}")));
        }
        if has(Family::Context) {
            for group in [&COOC_NAMES[..], &PROXIMITY_NAMES, &POSITION_NAMES, &ENTITY_POSITION_NAMES] {
                names.extend(group.iter().map(|s| s.to_string()));
            }
        }
        Self::from_names(names).expect("generated names carry family prefixes")
    }

    /// Rebuilds a schema from family-prefixed names (the import path).
    pub fn from_names(names: Vec<String>) -> Result<Self> {
        let families = names
            .iter()
            .map(|n| Family::of_name(n).ok_or_else(|| Error::Invalid(format!("feature `{n}` has no family prefix"))))
            .collect::<Result<Vec<_>>>()?;
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::Invalid(format!("duplicate feature `{dup}`")));
        }
        Ok(FeatureSchema { names, families })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Column indices belonging to any of `families`.
    pub fn columns_of(&self, families: &[Family]) -> Vec<usize> {
        (0..self.names.len()).filter(|&i| families.contains(&self.families[i])).collect()
    }

    /// Hex SHA-256 of the ordered names.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        for n in &self.names {
            h.update(n.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

/// Shared read-only models used by [`featurize`].
#[derive(Clone, Copy)]
pub struct FeatureContext<'a> {
    pub dict: &'a Dictionary,
    pub gazetteer: Option<&'a CategoryLexicon>,
    pub liwc: Option<&'a CategoryLexicon>,
    pub clarity: Option<&'a ClarityIndex>,
    pub lda: Option<&'a LdaModel>,
    /// Infer topic mixtures for profiles the topic model was not trained on.
    pub fold_in: bool,
    pub fold_in_iterations: usize,
    pub seed: u64,
}

impl<'a> FeatureContext<'a> {
    pub fn new(dict: &'a Dictionary) -> Self {
        FeatureContext {
            dict,
            gazetteer: None,
            liwc: None,
            clarity: None,
            lda: None,
            fold_in: true,
            fold_in_iterations: 50,
            seed: 0,
        }
    }
}

fn mean(sum: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn pos_counts(profile: &OovProfile) -> Result<BTreeMap<String, u64>> {
    let mut counts = BTreeMap::new();
    let mut untagged = 0usize;
    for tok in profile.cooccurring() {
        match &tok.pos {
            Some(tag) => *counts.entry(tag.clone()).or_default() += 1,
            None => untagged += 1,
        }
    }
    if counts.is_empty() && untagged > 0 {
        return Err(Error::Untagged(profile.word.clone()));
    }
    Ok(counts)
}

/// Fraction of co-occurring tokens bearing each tag of `tagset`.
pub fn pos_tag_distribution(profile: &OovProfile, tagset: &[String]) -> Result<Vec<f64>> {
    let counts = pos_counts(profile)?;
    let total: u64 = counts.values().sum();
    Ok(tagset
        .iter()
        .map(|t| {
            let c = counts.get(t).copied().unwrap_or(0);
            if total == 0 {
                0.0
            } else {
                c as f64 / total as f64
            }
        })
        .collect())
}

/// Entropy (bits) of the tags observed on co-occurring tokens.
pub fn pos_diversity(profile: &OovProfile) -> Result<f64> {
    let counts = pos_counts(profile)?;
    if counts.is_empty() {
        log::warn!("no tagged co-occurring tokens for `{}`; POS diversity is 0", profile.word);
        return Ok(0.0);
    }
    Ok(entropy_of_counts(counts.into_values()))
}

/// Entropy of the co-occurring word distribution.
pub fn word_diversity(profile: &OovProfile) -> f64 {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for tok in profile.cooccurring().filter(|t| t.is_word()) {
        *counts.entry(tok.lower()).or_default() += 1;
    }
    let mut values: Vec<u64> = counts.into_values().collect();
    values.sort_unstable();
    entropy_of_counts(values)
}

/// Mean clarity over hashtag occurrences in the profile; 0 when none.
pub fn avg_hashtag_clarity(profile: &OovProfile, clarity: &ClarityIndex) -> f64 {
    let mut sum = 0.0;
    let mut n = 0;
    for tok in profile.cooccurring().filter(|t| t.kind == TokenKind::Hashtag) {
        if let Some(c) = clarity.get(&tok.text) {
            sum += c;
            n += 1;
        }
    }
    mean(sum, n)
}

/// Mean hashtags per tweet, mean mentions per tweet, retweet fraction.
pub fn entity_presence(profile: &OovProfile) -> [f64; 3] {
    let n = profile.tweets.len();
    let mut hashtags = 0usize;
    let mut mentions = 0usize;
    let mut retweets = 0usize;
    for t in &profile.tweets {
        hashtags += t.tokens.iter().filter(|k| k.kind == TokenKind::Hashtag).count();
        mentions += t.tokens.iter().filter(|k| k.kind == TokenKind::Mention).count();
        if t.tokens.iter().any(|k| k.kind == TokenKind::RetweetMarker) {
            retweets += 1;
        }
    }
    [mean(hashtags as f64, n), mean(mentions as f64, n), mean(retweets as f64, n)]
}

pub fn length_feature(word: &str) -> f64 {
    word.chars().count() as f64
}

fn topic_document(profile: &OovProfile) -> Vec<String> {
    profile.cooccurring().filter(|t| t.is_word()).map(|t| t.lower()).collect()
}

/// Topic mixture of the profile's document plus its entropy.
pub fn topic_features(profile: &OovProfile, lda: &LdaModel, fold_in: bool, iterations: usize, seed: u64) -> Result<(Vec<f64>, f64)> {
    let theta = match lda.doc_index(&profile.word) {
        Some(d) => lda.doc_topic_distribution(d)?,
        None if fold_in => lda.fold_in(&topic_document(profile), iterations, seed ^ stable_hash(&profile.word)),
        None => return Err(Error::UnknownDocument(profile.word.clone())),
    };
    let div = stats::entropy_unchecked(&theta);
    Ok((theta, div))
}

/// Fractions of tweets with exactly 0, 1, 2 and 3+ other OOV tokens, then the
/// mean count per tweet.
pub fn cooccurring_oov_features(profile: &OovProfile, dict: &Dictionary) -> [f64; 5] {
    let mut bins = [0usize; 4];
    let mut total = 0usize;
    for (t, occ) in profile.tweets.iter().zip(&profile.occurrence_positions) {
        let others = t.tokens.iter().filter(|k| !occ.contains(&k.index) && is_oov(k, dict)).count();
        bins[others.min(3)] += 1;
        total += others;
    }
    let n = profile.tweets.len();
    [
        mean(bins[0] as f64, n),
        mean(bins[1] as f64, n),
        mean(bins[2] as f64, n),
        mean(bins[3] as f64, n),
        mean(total as f64, n),
    ]
}

/// Fraction of tweets with another OOV (then an in-vocabulary word) at
/// distance 1, 2 and 3+ from the nearest occurrence of the word.
pub fn proximity_features(profile: &OovProfile, dict: &Dictionary) -> [f64; 6] {
    let mut hits = [0usize; 6];
    for (t, occ) in profile.tweets.iter().zip(&profile.occurrence_positions) {
        let mut flags = [false; 6];
        for tok in t.tokens.iter().filter(|k| !occ.contains(&k.index)) {
            let d = occ.iter().map(|&i| i.abs_diff(tok.index)).min().unwrap_or(0);
            if d == 0 {
                continue;
            }
            let bucket = d.min(3) - 1;
            if is_oov(tok, dict) {
                flags[bucket] = true;
            } else if tok.is_word() && dict.contains(&tok.text) {
                flags[3 + bucket] = true;
            }
        }
        for (h, f) in hits.iter_mut().zip(flags) {
            *h += usize::from(f);
        }
    }
    let n = profile.tweets.len();
    hits.map(|h| mean(h as f64, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositionBin {
    Left,
    Middle,
    Right,
}

impl PositionBin {
    /// `< 0.3` left, `[0.3, 0.7]` middle, `> 0.7` right.
    pub fn of(value: f64) -> Self {
        if value < 0.3 {
            PositionBin::Left
        } else if value > 0.7 {
            PositionBin::Right
        } else {
            PositionBin::Middle
        }
    }
}

/// Mean normalized position (tokens before / tokens in tweet) over all
/// occurrences, with its bin.
pub fn position_feature(profile: &OovProfile) -> (f64, PositionBin) {
    let mut sum = 0.0;
    let mut n = 0;
    for (t, occ) in profile.tweets.iter().zip(&profile.occurrence_positions) {
        for &i in occ {
            sum += i as f64 / t.len() as f64;
            n += 1;
        }
    }
    let v = mean(sum, n);
    (v, PositionBin::of(v))
}

/// Mean normalized position of hashtags and of mentions, each followed by a
/// presence indicator.
pub fn entity_position_features(profile: &OovProfile) -> [f64; 4] {
    let mut sums = [0.0f64; 2];
    let mut counts = [0usize; 2];
    for t in &profile.tweets {
        for tok in &t.tokens {
            let slot = match tok.kind {
                TokenKind::Hashtag => 0,
                TokenKind::Mention => 1,
                _ => continue,
            };
            sums[slot] += tok.index as f64 / t.len() as f64;
            counts[slot] += 1;
        }
    }
    [
        mean(sums[0], counts[0]),
        mean(sums[1], counts[1]),
        f64::from(u8::from(counts[0] > 0)),
        f64::from(u8::from(counts[1] > 0)),
    ]
}

/// Assembles the full feature vector in schema order.
pub fn featurize(profile: &OovProfile, ctx: &FeatureContext, spec: &SchemaSpec) -> Result<FeatureVector> {
    let schema = FeatureSchema::new(spec);
    let mut values: Vec<f64> = Vec::with_capacity(schema.len());
    let has = |f: Family| spec.families.contains(&f);

    if has(Family::Lexical) {
        let gazetteer = ctx.gazetteer.ok_or(Error::MissingDependency("named-entity gazetteer"))?;
        if gazetteer.categories() != spec.ne_categories.as_slice() {
            return Err(Error::Invalid("gazetteer categories differ from the schema".into()));
        }
        values.extend(pos_tag_distribution(profile, &spec.tagset)?);
        values.push(pos_diversity(profile)?);
        let ne = ne_tag_fractions(profile.cooccurring(), gazetteer);
        values.extend(spec.ne_categories.iter().map(|c| ne[c]));
    }
    if has(Family::Content) {
        let clarity = ctx.clarity.ok_or(Error::MissingDependency("hashtag clarity index"))?;
        let liwc = ctx.liwc.ok_or(Error::MissingDependency("category lexicon"))?;
        let lda = ctx.lda.ok_or(Error::MissingDependency("topic model"))?;
        if lda.k() != spec.topics {
            return Err(Error::Invalid(format!(
                "topic model has K={}, schema expects {}",
                lda.k(),
                spec.topics
            )));
        }
        if liwc.categories() != spec.liwc_categories.as_slice() {
            return Err(Error::Invalid("lexicon categories differ from the schema".into()));
        }
        values.push(length_feature(&profile.word));
        values.push(word_diversity(profile));
        values.push(avg_hashtag_clarity(profile, clarity));
        values.extend(entity_presence(profile));
        let (theta, div) = topic_features(profile, lda, ctx.fold_in, ctx.fold_in_iterations, ctx.seed)?;
        values.extend(theta);
        values.push(div);
        let fr = lexicon_fractions(profile.cooccurring(), liwc);
        values.extend(spec.liwc_categories.iter().map(|c| fr[c]));
    }
    if has(Family::Context) {
        values.extend(cooccurring_oov_features(profile, ctx.dict));
        values.extend(proximity_features(profile, ctx.dict));
        let (pos, bin) = position_feature(profile);
        values.push(pos);
        for b in [PositionBin::Left, PositionBin::Middle, PositionBin::Right] {
            values.push(f64::from(u8::from(bin == b)));
        }
        values.extend(entity_position_features(profile));
    }
    debug_assert_eq!(values.len(), schema.len());
    Ok(FeatureVector {
        names: schema.names,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Tweet;

    fn tweets(texts: &[&str]) -> Vec<Tweet> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| Tweet::new(i.to_string(), "2013-01", *t).unwrap())
            .collect()
    }

    fn profile<'a>(word: &str, ts: &'a [Tweet]) -> OovProfile<'a> {
        OovProfile::from_tweets(word, ts.iter().collect()).unwrap()
    }

    fn dict() -> Dictionary {
        Dictionary::new(["w", "x", "a", "b", "c", "the", "cat"]).unwrap()
    }

    #[test]
    fn schema_count_reference_configuration() {
        let spec = SchemaSpec {
            tagset: (0..21).map(|i| format!("T{i}")).collect(),
            ne_categories: (0..6).map(|i| format!("ne{i}")).collect(),
            liwc_categories: (0..42).map(|i| format!("l{i}")).collect(),
            topics: 50,
            families: Family::ALL.to_vec(),
        };
        let s = FeatureSchema::new(&spec);
        assert_eq!(s.len(), 21 + 1 + 6 + 1 + 1 + 1 + 3 + 50 + 1 + 42 + 5 + 6 + 4 + 4);
        assert_eq!(s.len(), 146);
        assert_eq!(s.columns_of(&[Family::Lexical]).len(), 28);
        assert_eq!(s.columns_of(&[Family::Content]).len(), 99);
        assert_eq!(s.columns_of(&[Family::Context]).len(), 19);
    }

    #[test]
    fn tag_names_are_csv_safe() {
        assert_eq!(tag_feature_name(","), "punct");
        assert_eq!(tag_feature_name("N"), "N");
        assert_eq!(tag_feature_name("é"), "u00e9");
    }

    #[test]
    fn pos_distribution_and_diversity() {
        let mut ts = tweets(&["zz a b"]);
        ts[0].tokens[1].pos = Some("N".into());
        ts[0].tokens[2].pos = Some("V".into());
        let p = profile("zz", &ts);
        let tagset = vec!["N".to_string(), "V".to_string(), "A".to_string()];
        assert_eq!(pos_tag_distribution(&p, &tagset).unwrap(), [0.5, 0.5, 0.0]);
        assert_eq!(pos_diversity(&p).unwrap(), 1.0);

        let untagged = tweets(&["zz a"]);
        let p = profile("zz", &untagged);
        assert!(matches!(pos_tag_distribution(&p, &tagset), Err(Error::Untagged(_))));
    }

    #[test]
    fn diversity_of_words() {
        let ts = tweets(&["zz a a", "b c zz"]);
        assert_eq!(word_diversity(&profile("zz", &ts)), 1.5);
        let ts = tweets(&["zz a", "a zz a"]);
        assert_eq!(word_diversity(&profile("zz", &ts)), 0.0);
    }

    #[test]
    fn entities() {
        let ts = tweets(&["zz #a", "RT zz #b #c #d"]);
        let p = profile("zz", &ts);
        assert_eq!(entity_presence(&p), [2.0, 0.0, 0.5]);
        let e = entity_position_features(&p);
        assert_eq!(e[1], 0.0);
        assert_eq!(e[3], 0.0);
        assert_eq!(e[2], 1.0);
    }

    #[test]
    fn average_clarity() {
        let ts = tweets(&["zz #a", "zz #b"]);
        let idx = ClarityIndex {
            clarity: [("#a".to_string(), 1.0), ("#b".to_string(), 3.0)].into(),
        };
        assert_eq!(avg_hashtag_clarity(&profile("zz", &ts), &idx), 2.0);
        let ts = tweets(&["zz"]);
        assert_eq!(avg_hashtag_clarity(&profile("zz", &ts), &idx), 0.0);
    }

    #[test]
    fn lengths() {
        assert_eq!(length_feature("lol"), 3.0);
        assert_eq!(length_feature(":)"), 2.0);
        assert_eq!(length_feature("followback"), 10.0);
    }

    #[test]
    fn cooccurring_oov_bins() {
        let d = dict();
        let ts = tweets(&["zz qq", "zz qq rr ss"]);
        assert_eq!(cooccurring_oov_features(&profile("zz", &ts), &d), [0.0, 0.5, 0.0, 0.5, 2.0]);
        let ts = tweets(&["zz a", "zz"]);
        assert_eq!(cooccurring_oov_features(&profile("zz", &ts), &d), [1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn proximity() {
        let d = dict();
        let ts = tweets(&["w zz x"]);
        assert_eq!(proximity_features(&profile("zz", &ts), &d), [0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let ts = tweets(&["qq a zz"]);
        assert_eq!(proximity_features(&profile("zz", &ts), &d), [0.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        let ts = tweets(&["zz"]);
        assert_eq!(proximity_features(&profile("zz", &ts), &d), [0.0; 6]);
        // nearest occurrence decides
        let ts = tweets(&["zz a b c zz qq"]);
        assert_eq!(proximity_features(&profile("zz", &ts), &d), [1.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn positions() {
        let ts = tweets(&["zz a b c w"]);
        assert_eq!(position_feature(&profile("zz", &ts)), (0.0, PositionBin::Left));
        let ts = tweets(&["a b c w zz"]);
        let (v, b) = position_feature(&profile("zz", &ts));
        assert!((v - 0.8).abs() < 1e-12);
        assert_eq!(b, PositionBin::Right);
        assert_eq!(PositionBin::of(0.5), PositionBin::Middle);
        assert_eq!(PositionBin::of(0.3), PositionBin::Middle);
        assert_eq!(PositionBin::of(0.7), PositionBin::Middle);
    }

    #[test]
    fn entity_positions() {
        let ts = tweets(&["a b c zz #t"]);
        let e = entity_position_features(&profile("zz", &ts));
        assert!((e[0] - 0.8).abs() < 1e-12);
        let ts = tweets(&["@m zz"]);
        let e = entity_position_features(&profile("zz", &ts));
        assert_eq!((e[1], e[3]), (0.0, 1.0));
    }

    #[test]
    fn families_parse() {
        assert_eq!(parse_families("content+context").unwrap(), [Family::Content, Family::Context]);
        assert!(parse_families("").is_err());
        assert!(parse_families("style").is_err());
    }
}
