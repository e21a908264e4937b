use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The six-way OOV category scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Emoticon,
    Lengthening,
    Expression,
    ShorteningAbbrev,
    ProperNoun,
    Merging,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::Emoticon,
        Category::Lengthening,
        Category::Expression,
        Category::ShorteningAbbrev,
        Category::ProperNoun,
        Category::Merging,
    ];

    /// Categories left to the learned classifier.
    pub const LEARNED: [Category; 4] = [
        Category::Expression,
        Category::ShorteningAbbrev,
        Category::ProperNoun,
        Category::Merging,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Emoticon => "emoticon",
            Category::Lengthening => "lengthening",
            Category::Expression => "expression",
            Category::ShorteningAbbrev => "shortening_abbrev",
            Category::ProperNoun => "proper_noun",
            Category::Merging => "merging",
        }
    }

    pub fn is_learned(self) -> bool {
        Self::LEARNED.contains(&self)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Category::ALL.into_iter().find(|c| c.as_str() == s).ok_or(Error::UnknownCategory(s))
    }
}

/// Gold category per OOV word.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    pub labels: BTreeMap<String, Category>,
}

impl LabelSet {
    pub fn get(&self, word: &str) -> Option<Category> {
        self.labels.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `word<TAB>category` per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut labels = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, cat) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(format!("line {}", n + 1), "expected word<TAB>category"))?;
            let word = word.trim().to_lowercase();
            if word.is_empty() {
                return Err(Error::parse(format!("line {}", n + 1), "empty word"));
            }
            labels.insert(word, cat.parse()?);
        }
        Ok(LabelSet { labels })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_tsv(&self) -> String {
        self.labels.iter().map(|(w, c)| format!("{w}\t{c}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_validate() {
        let l = LabelSet::parse("lol\tshortening_abbrev\n:)\temoticon\n\nMiley\tproper_noun\n").unwrap();
        assert_eq!(l.get("lol"), Some(Category::ShorteningAbbrev));
        assert_eq!(l.get("miley"), Some(Category::ProperNoun));
        assert_eq!(l.len(), 3);
        assert!(LabelSet::parse("x\tslang\n").is_err());
        assert!(LabelSet::parse("no-tab-here\n").is_err());
    }

    #[test]
    fn round_trip() {
        let l = LabelSet::parse("a\tmerging\nb\texpression\n").unwrap();
        assert_eq!(LabelSet::parse(&l.to_tsv()).unwrap(), l);
    }
}
