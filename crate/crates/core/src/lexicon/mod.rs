//! Dictionary membership, OOV inventories and word-class lexicons.

mod category;
mod kappa;
mod labels;

pub use category::{lexicon_fractions, ne_tag_fractions, CategoryLexicon, Pattern};
pub use kappa::fleiss_kappa;
pub use labels::{Category, LabelSet};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::corpus::{Token, TokenKind, Tweet};
use crate::error::{Error, Result};

/// Reference word list; every lookup is case-insensitive.
#[derive(Debug, Clone)]
pub struct Dictionary {
    words: HashSet<String>,
}

impl Dictionary {
    pub fn new<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words: HashSet<String> = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        if words.is_empty() {
            return Err(Error::Invalid("dictionary is empty".into()));
        }
        Ok(Dictionary { words })
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::new(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')))
    }

    pub fn contains(&self, word: &str) -> bool {
        if word.is_empty() {
            return false;
        }
        if word.chars().any(char::is_uppercase) {
            self.words.contains(&word.to_lowercase())
        } else {
            self.words.contains(word)
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

/// Words and symbol clusters absent from the dictionary are OOV; entities,
/// URLs, retweet markers and numbers never are.
pub fn is_oov(token: &Token, dict: &Dictionary) -> bool {
    matches!(token.kind, TokenKind::Word | TokenKind::PunctCluster) && !dict.contains(&token.text)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OovEntry {
    /// Aligned with [`OovInventory::months`].
    pub per_month: Vec<u64>,
    pub total: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OovInventory {
    pub months: Vec<String>,
    pub entries: BTreeMap<String, OovEntry>,
}

pub fn build_oov_inventory(tweets: &[Tweet], dict: &Dictionary) -> OovInventory {
    let months = crate::corpus::months_of(tweets);
    let month_index: HashMap<&str, usize> = months.iter().enumerate().map(|(i, m)| (m.as_str(), i)).collect();
    let mut entries: BTreeMap<String, OovEntry> = BTreeMap::new();
    for tweet in tweets {
        let m = month_index[tweet.month.as_str()];
        for tok in tweet.tokens.iter().filter(|t| is_oov(t, dict)) {
            let entry = entries.entry(tok.lower()).or_insert_with(|| OovEntry {
                per_month: vec![0; months.len()],
                total: 0,
            });
            entry.per_month[m] += 1;
            entry.total += 1;
        }
    }
    OovInventory { months, entries }
}

impl OovInventory {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("word\ttotal");
        for m in &self.months {
            out.push('\t');
            out.push_str(m);
        }
        out.push('\n');
        for (word, e) in &self.entries {
            let _ = write!(out, "{word}\t{}", e.total);
            for c in &e.per_month {
                let _ = write!(out, "\t{c}");
            }
            out.push('\n');
        }
        out
    }
}

/// OOV words seen in every month, most frequent first (ties by word),
/// truncated to `top_n`.
pub fn select_stable_oov(inv: &OovInventory, top_n: usize) -> Vec<String> {
    let mut stable: Vec<(&String, u64)> = inv
        .entries
        .iter()
        .filter(|(_, e)| !e.per_month.is_empty() && e.per_month.iter().all(|&c| c >= 1))
        .map(|(w, e)| (w, e.total))
        .collect();
    stable.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    stable.into_iter().take(top_n).map(|(w, _)| w.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dict() -> Dictionary {
        Dictionary::new(["hello", "no", "way", "ok"]).unwrap()
    }

    #[test]
    fn oov_detection() {
        let d = dict();
        assert!(is_oov(&Token::new("noooo", 0), &d));
        assert!(!is_oov(&Token::new("hello", 0), &d));
        assert!(!is_oov(&Token::new("Hello", 0), &d));
        assert!(!is_oov(&Token::new("@bob", 0), &d));
        assert!(!is_oov(&Token::new("#yolo", 0), &d));
        assert!(!is_oov(&Token::new("RT", 0), &d));
        assert!(!is_oov(&Token::new("42", 0), &d));
        assert!(is_oov(&Token::new(":)", 0), &d));
    }

    #[test]
    fn empty_lookup_and_empty_dictionary() {
        assert!(!dict().contains(""));
        assert!(Dictionary::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn inventory_counts() {
        let mut tweets = Vec::new();
        for i in 0..5 {
            tweets.push(Tweet::new(i.to_string(), "2013-01", "lol no way").unwrap());
        }
        tweets.push(Tweet::new("9", "2013-02", "LOL lol smh").unwrap());
        let inv = build_oov_inventory(&tweets, &dict());
        assert_eq!(inv.months, ["2013-01", "2013-02"]);
        assert_eq!(inv.entries["lol"].per_month, [5, 2]);
        assert_eq!(inv.entries["lol"].total, 7);
        assert!(!inv.entries.contains_key("no"));
        for e in inv.entries.values() {
            assert_eq!(e.per_month.iter().sum::<u64>(), e.total);
        }
        assert_eq!(select_stable_oov(&inv, 10), ["lol"]);
    }

    #[test]
    fn stable_selection_order() {
        let mut inv = OovInventory {
            months: vec!["a".into(), "b".into()],
            ..Default::default()
        };
        let mut put = |w: &str, pm: Vec<u64>| {
            let total = pm.iter().sum();
            inv.entries.insert(w.into(), OovEntry { per_month: pm, total });
        };
        put("zz", vec![2, 2]);
        put("aa", vec![3, 1]);
        put("mm", vec![9, 0]);
        put("top", vec![5, 5]);
        assert_eq!(select_stable_oov(&inv, 10), ["top", "aa", "zz"]);
        assert_eq!(select_stable_oov(&inv, 1), ["top"]);
    }
}
