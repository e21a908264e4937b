use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

use crate::corpus::{Token, TokenKind, Tweet};
use crate::error::{Error, Result};

/// One OOV word with a sample of the tweets it occurs in.
#[derive(Debug, Clone)]
pub struct OovProfile<'a> {
    pub word: String,
    pub tweets: Vec<&'a Tweet>,
    /// Token indices of the word, per sampled tweet.
    pub occurrence_positions: Vec<Vec<usize>>,
}

pub(crate) fn is_occurrence(tok: &Token, word: &str) -> bool {
    matches!(tok.kind, TokenKind::Word | TokenKind::PunctCluster) && tok.text.to_lowercase() == word
}

fn occurrences(tweet: &Tweet, word: &str) -> Vec<usize> {
    tweet.tokens.iter().filter(|t| is_occurrence(t, word)).map(|t| t.index).collect()
}

impl<'a> OovProfile<'a> {
    pub fn from_tweets(word: &str, tweets: Vec<&'a Tweet>) -> Result<Self> {
        let word = word.to_lowercase();
        let mut occurrence_positions = Vec::with_capacity(tweets.len());
        for t in &tweets {
            let occ = occurrences(t, &word);
            if occ.is_empty() {
                return Err(Error::Invalid(format!("tweet {} does not contain `{word}`", t.id)));
            }
            occurrence_positions.push(occ);
        }
        Ok(OovProfile {
            word,
            tweets,
            occurrence_positions,
        })
    }

    /// Tokens of the sampled tweets other than occurrences of the word.
    pub fn cooccurring(&self) -> impl Iterator<Item = &'a Token> + '_ {
        self.tweets
            .iter()
            .zip(&self.occurrence_positions)
            .flat_map(|(t, occ)| t.tokens.iter().filter(move |k| !occ.contains(&k.index)))
    }
}

/// Stable 64-bit FNV-1a, used to derive per-word seeds.
pub fn stable_hash(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn reservoir<I: Iterator<Item = usize>>(candidates: I, cap: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<usize> = Vec::with_capacity(cap);
    for (seen, idx) in candidates.enumerate() {
        if seen < cap {
            chosen.push(idx);
        } else {
            let j = rng.random_range(0..=seen);
            if j < cap {
                chosen[j] = idx;
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Uniform sample without replacement (reservoir) of at most `cap` tweets
/// containing `word`, in corpus order.
pub fn sample_profile<'a>(word: &str, tweets: &'a [Tweet], cap: usize, seed: u64) -> Result<OovProfile<'a>> {
    let word = word.to_lowercase();
    let candidates = tweets
        .iter()
        .enumerate()
        .filter(|(_, t)| t.tokens.iter().any(|k| is_occurrence(k, &word)))
        .map(|(i, _)| i);
    sample_from_candidates(&word, tweets, candidates, cap, seed)
}

/// Same sampling as [`sample_profile`] over a precomputed list of the
/// indices of tweets containing the word.
pub fn sample_from_candidates<'a, I>(word: &str, tweets: &'a [Tweet], candidates: I, cap: usize, seed: u64) -> Result<OovProfile<'a>>
where
    I: IntoIterator<Item = usize>,
{
    if cap == 0 {
        return Err(Error::Invalid("sample cap must be at least 1".into()));
    }
    let chosen = reservoir(candidates.into_iter(), cap, seed);
    if chosen.is_empty() {
        return Err(Error::WordNotFound(word.to_string()));
    }
    OovProfile::from_tweets(word, chosen.into_iter().map(|i| &tweets[i]).collect())
}

/// Maps each word of interest to the indices of the tweets containing it.
pub fn occurrence_index(tweets: &[Tweet], words: &[String]) -> HashMap<String, Vec<usize>> {
    let mut index: HashMap<String, Vec<usize>> = words.iter().map(|w| (w.clone(), Vec::new())).collect();
    for (i, t) in tweets.iter().enumerate() {
        let mut seen: Vec<String> = Vec::new();
        for tok in t
            .tokens
            .iter()
            .filter(|k| matches!(k.kind, TokenKind::Word | TokenKind::PunctCluster))
        {
            let w = tok.lower();
            if seen.contains(&w) {
                continue;
            }
            if let Some(list) = index.get_mut(&w) {
                list.push(i);
            }
            seen.push(w);
        }
    }
    index
}
