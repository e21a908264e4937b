//! Entropy, KL divergence and hashtag clarity.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::corpus::{TokenKind, Tweet};
use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-9;

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(p: &[f64]) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty vector".into()));
    }
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidDistribution(format!("component {bad}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("sums to {sum}")));
    }
    Ok(entropy_unchecked(p))
}

pub(crate) fn entropy_unchecked(p: &[f64]) -> f64 {
    let h: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum();
    h.max(0.0)
}

/// Entropy of the distribution obtained by normalizing `counts`; 0 for no mass.
pub fn entropy_of_counts<I: IntoIterator<Item = u64>>(counts: I) -> f64 {
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / t).collect();
    entropy_unchecked(&p)
}

/// KL(p ‖ q) in bits over aligned vectors. Fails when q has no mass where p does.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidDistribution("length mismatch".into()));
    }
    let mut kl = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::InvalidDistribution("q has zero mass where p > 0".into()));
            }
            kl += pi * (pi / qi).log2();
        }
    }
    Ok(kl.max(0.0))
}

/// Unigram model over lowercased word tokens.
pub fn unigram_model<'a, I>(tweets: I) -> HashMap<String, f64>
where
    I: IntoIterator<Item = &'a Tweet>,
{
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut total = 0u64;
    for t in tweets {
        for tok in t.tokens.iter().filter(|k| k.is_word()) {
            *counts.entry(tok.lower()).or_default() += 1;
            total += 1;
        }
    }
    counts.into_iter().map(|(w, c)| (w, c as f64 / total as f64)).collect()
}

fn has_hashtag(t: &Tweet, tag: &str) -> bool {
    t.tokens
        .iter()
        .any(|k| k.kind == TokenKind::Hashtag && k.text.eq_ignore_ascii_case(tag))
}

fn kl_from_counts(counts: &BTreeMap<String, u64>, corpus_lm: &HashMap<String, f64>) -> Result<f64> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Ok(0.0);
    }
    let mut kl = 0.0;
    for (w, &c) in counts {
        let p = c as f64 / total as f64;
        let q = corpus_lm.get(w).copied().unwrap_or(0.0);
        if q <= 0.0 {
            return Err(Error::InvalidDistribution(format!("collection model has no mass for `{w}`")));
        }
        kl += p * (p / q).log2();
    }
    Ok(kl.max(0.0))
}

/// Clarity of a hashtag: KL divergence (bits) of the unigram model of the
/// tweets containing it from the collection model.
pub fn hashtag_clarity(hashtag: &str, corpus_lm: &HashMap<String, f64>, tweets: &[Tweet]) -> Result<f64> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut found = false;
    for t in tweets.iter().filter(|t| has_hashtag(t, hashtag)) {
        found = true;
        for tok in t.tokens.iter().filter(|k| k.is_word()) {
            *counts.entry(tok.lower()).or_default() += 1;
        }
    }
    if !found {
        return Err(Error::HashtagNotFound(hashtag.to_string()));
    }
    kl_from_counts(&counts, corpus_lm)
}

/// Precomputed clarity for every hashtag in a corpus (keys lowercased).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClarityIndex {
    pub clarity: HashMap<String, f64>,
}

impl ClarityIndex {
    pub fn build(tweets: &[Tweet]) -> Result<Self> {
        let lm = unigram_model(tweets);
        let mut per_tag: HashMap<String, BTreeMap<String, u64>> = HashMap::new();
        for t in tweets {
            let tags: HashSet<String> = t
                .tokens
                .iter()
                .filter(|k| k.kind == TokenKind::Hashtag)
                .map(|k| k.lower())
                .collect();
            if tags.is_empty() {
                continue;
            }
            let words: Vec<String> = t.tokens.iter().filter(|k| k.is_word()).map(|k| k.lower()).collect();
            for tag in tags {
                let counts = per_tag.entry(tag).or_default();
                for w in &words {
                    *counts.entry(w.clone()).or_default() += 1;
                }
            }
        }
        let mut clarity = HashMap::with_capacity(per_tag.len());
        for (tag, counts) in per_tag {
            clarity.insert(tag, kl_from_counts(&counts, &lm)?);
        }
        Ok(ClarityIndex { clarity })
    }

    pub fn get(&self, hashtag: &str) -> Option<f64> {
        self.clarity.get(&hashtag.to_lowercase()).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(entropy(&[1.0]).unwrap(), 0.0);
        assert_eq!(entropy(&[0.25; 4]).unwrap(), 2.0);
        assert!((entropy(&[0.7, 0.3]).unwrap() - 0.881_290_899_230_282).abs() < 1e-12);
        assert!(entropy(&[0.5, 0.6]).is_err());
        assert!(entropy(&[-0.5, 1.5]).is_err());
        assert!(entropy(&[]).is_err());
    }

    #[test]
    fn counts_entropy() {
        assert_eq!(entropy_of_counts([2, 1, 1]), 1.5);
        assert_eq!(entropy_of_counts([5]), 0.0);
        assert_eq!(entropy_of_counts(Vec::<u64>::new()), 0.0);
    }

    #[test]
    fn degenerate_clarity() {
        let tweets = vec![Tweet::new("1", "2013-01", "#tag w").unwrap()];
        let lm: HashMap<String, f64> = [("w".to_string(), 0.01), ("v".to_string(), 0.99)].into();
        let c = hashtag_clarity("#tag", &lm, &tweets).unwrap();
        assert!((c - 100f64.log2()).abs() < 1e-12);
        assert!((c - 6.644).abs() < 1e-3);
        assert!(matches!(hashtag_clarity("#nope", &lm, &tweets), Err(Error::HashtagNotFound(_))));
    }

    #[test]
    fn clarity_zero_when_models_match() {
        let tweets = vec![
            Tweet::new("1", "2013-01", "#all a b").unwrap(),
            Tweet::new("2", "2013-01", "#all a c").unwrap(),
        ];
        let idx = ClarityIndex::build(&tweets).unwrap();
        assert!(idx.get("#ALL").unwrap().abs() < 1e-12);
    }
}
