//! Message ingestion, social-media tokenization and month bucketing.

mod io;
pub mod synth;
mod token;

pub use io::{load_corpus, parse_month, write_corpus, CorpusFormat, LoadedCorpus};
pub use token::{tokenize, Token, TokenKind};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A tokenized message with its calendar month.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    /// `YYYY-MM`
    pub month: String,
    pub tokens: Vec<Token>,
    pub raw_text: String,
}

impl Tweet {
    /// Tokenizes `raw_text`. Returns `None` when no tokens remain, since
    /// empty tweets are never admitted to the pipeline.
    pub fn new(id: impl Into<String>, month: impl Into<String>, raw_text: impl Into<String>) -> Option<Self> {
        let raw_text = raw_text.into();
        let tokens = tokenize(&raw_text);
        if tokens.is_empty() {
            return None;
        }
        Some(Tweet {
            id: id.into(),
            month: month.into(),
            tokens,
            raw_text,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn has_pos_tags(&self) -> bool {
        self.tokens.iter().all(|t| t.pos.is_some())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total_tweets: usize,
    pub months: Vec<String>,
    pub tweets_per_month: BTreeMap<String, usize>,
    /// Lowercased word-kind tokens only.
    pub vocabulary: BTreeMap<String, u64>,
}

pub fn corpus_stats<'a, I>(tweets: I) -> CorpusStats
where
    I: IntoIterator<Item = &'a Tweet>,
{
    let mut stats = CorpusStats::default();
    for tweet in tweets {
        stats.total_tweets += 1;
        *stats.tweets_per_month.entry(tweet.month.clone()).or_default() += 1;
        for tok in tweet.tokens.iter().filter(|t| t.is_word()) {
            *stats.vocabulary.entry(tok.lower()).or_default() += 1;
        }
    }
    stats.months = stats.tweets_per_month.keys().cloned().collect();
    stats
}

/// Sorted, de-duplicated month labels of a corpus.
pub fn months_of(tweets: &[Tweet]) -> Vec<String> {
    let mut months: Vec<String> = tweets.iter().map(|t| t.month.clone()).collect();
    months.sort();
    months.dedup();
    months
}
