use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use crate::corpus::Token;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Literal(String),
    /// `stem*`: any word starting with the stem.
    Prefix(String),
}

impl Pattern {
    pub fn parse(raw: &str) -> Result<Self> {
        let raw = raw.trim().to_lowercase();
        match raw.strip_suffix('*') {
            Some(stem) if stem.is_empty() || stem.contains('*') => Err(Error::Invalid(format!("bad wildcard pattern `{raw}`"))),
            Some(stem) => Ok(Pattern::Prefix(stem.to_string())),
            None if raw.is_empty() || raw.contains('*') => Err(Error::Invalid(format!("bad pattern `{raw}`"))),
            None => Ok(Pattern::Literal(raw)),
        }
    }

    pub fn matches(&self, word: &str) -> bool {
        match self {
            Pattern::Literal(w) => w == word,
            Pattern::Prefix(stem) => word.starts_with(stem.as_str()),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct CategoryPatterns {
    literals: HashSet<String>,
    prefixes: Vec<String>,
}

impl CategoryPatterns {
    fn matches(&self, word: &str) -> bool {
        self.literals.contains(word) || self.prefixes.iter().any(|p| word.starts_with(p.as_str()))
    }
}

/// Named word classes with literal and `stem*` patterns, used for the
/// LIWC-style cognitive features and as a named-entity gazetteer.
///
/// File format: `[category]` header lines, each followed by pattern lines
/// (several whitespace-separated patterns per line are allowed); `#` starts
/// a comment line.
#[derive(Debug, Clone, Default)]
pub struct CategoryLexicon {
    pub name: String,
    names: Vec<String>,
    patterns: Vec<CategoryPatterns>,
}

impl CategoryLexicon {
    pub fn new(name: impl Into<String>) -> Self {
        CategoryLexicon {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn add_category(&mut self, category: &str, patterns: &[&str]) -> Result<()> {
        if self.names.iter().any(|n| n == category) {
            return Err(Error::Invalid(format!("duplicate category `{category}`")));
        }
        self.names.push(category.to_string());
        self.patterns.push(CategoryPatterns::default());
        for p in patterns {
            self.add_pattern(self.names.len() - 1, Pattern::parse(p)?);
        }
        Ok(())
    }

    fn add_pattern(&mut self, idx: usize, p: Pattern) {
        match p {
            Pattern::Literal(w) => {
                self.patterns[idx].literals.insert(w);
            }
            Pattern::Prefix(s) => self.patterns[idx].prefixes.push(s),
        }
    }

    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut lex = CategoryLexicon::new(name);
        let mut current: Option<usize> = None;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(header) = line.strip_prefix('[') {
                let cat = header
                    .strip_suffix(']')
                    .map(str::trim)
                    .filter(|c| !c.is_empty())
                    .ok_or_else(|| Error::parse(format!("{name}:{}", n + 1), "bad category header"))?;
                lex.add_category(cat, &[])?;
                current = Some(lex.names.len() - 1);
                continue;
            }
            let idx = current.ok_or_else(|| Error::parse(format!("{name}:{}", n + 1), "pattern before any [category]"))?;
            for raw in line.split_whitespace() {
                let p = Pattern::parse(raw).map_err(|e| Error::parse(format!("{name}:{}", n + 1), e.to_string()))?;
                lex.add_pattern(idx, p);
            }
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("lexicon");
        Self::parse(name, &text)
    }

    pub fn categories(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Whether `word` (already lowercased) matches category `idx`.
    pub fn matches(&self, idx: usize, word: &str) -> bool {
        self.patterns[idx].matches(word)
    }

    /// First category matching `word`, in file order.
    pub fn first_match(&self, word: &str) -> Option<usize> {
        (0..self.names.len()).find(|&i| self.matches(i, word))
    }

    pub fn index_of(&self, category: &str) -> Option<usize> {
        self.names.iter().position(|n| n == category)
    }
}

/// Per category, the fraction of word tokens matching any of its patterns.
/// A token may count toward several categories.
pub fn lexicon_fractions<'a, I>(tokens: I, lex: &CategoryLexicon) -> BTreeMap<String, f64>
where
    I: IntoIterator<Item = &'a Token>,
{
    let mut counts = vec![0usize; lex.len()];
    let mut total = 0usize;
    for tok in tokens.into_iter().filter(|t| t.is_word()) {
        total += 1;
        let w = tok.lower();
        for (i, c) in counts.iter_mut().enumerate() {
            if lex.matches(i, &w) {
                *c += 1;
            }
        }
    }
    fractions(lex.categories(), &counts, total)
}

fn fractions(names: &[String], counts: &[usize], total: usize) -> BTreeMap<String, f64> {
    names
        .iter()
        .zip(counts)
        .map(|(n, &c)| {
            let f = if total == 0 { 0.0 } else { c as f64 / total as f64 };
            (n.clone(), f)
        })
        .collect()
}

/// Strips BIO prefixes (`B-person` → `person`); `none`/`O` mean "no entity".
fn normalize_ne_tag(tag: &str) -> Option<String> {
    let t = tag.trim();
    let t = t.strip_prefix("B-").or_else(|| t.strip_prefix("I-")).unwrap_or(t).to_lowercase();
    match t.as_str() {
        "" | "o" | "none" => None,
        _ => Some(t),
    }
}

/// Fraction of word tokens per named-entity category. Precomputed tags win;
/// the gazetteer is consulted only for untagged tokens.
pub fn ne_tag_fractions<'a, I>(tokens: I, gazetteer: &CategoryLexicon) -> BTreeMap<String, f64>
where
    I: IntoIterator<Item = &'a Token>,
{
    let mut counts = vec![0usize; gazetteer.len()];
    let mut total = 0usize;
    for tok in tokens.into_iter().filter(|t| t.is_word()) {
        total += 1;
        let hit = match &tok.ne {
            Some(tag) => normalize_ne_tag(tag).and_then(|t| gazetteer.index_of(&t)),
            None => gazetteer.first_match(&tok.lower()),
        };
        if let Some(i) = hit {
            counts[i] += 1;
        }
    }
    fractions(gazetteer.categories(), &counts, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;

    #[test]
    fn wildcard_fraction() {
        let mut lex = CategoryLexicon::new("t");
        lex.add_category("posemo", &["happi*"]).unwrap();
        lex.add_category("empty", &[]).unwrap();
        let toks = tokenize("happiness sad");
        let f = lexicon_fractions(&toks, &lex);
        assert_eq!(f["posemo"], 0.5);
        assert_eq!(f["empty"], 0.0);
    }

    #[test]
    fn no_tokens_no_signal() {
        let lex = CategoryLexicon::parse("t", "[a]\nx\n").unwrap();
        assert_eq!(lexicon_fractions(&[], &lex)["a"], 0.0);
    }

    #[test]
    fn file_format() {
        let lex = CategoryLexicon::parse("t", "# demo\n[ingest]\neat* food\ndrink*\n[assent]\nyes ok\n").unwrap();
        assert_eq!(lex.categories(), ["ingest", "assent"]);
        assert!(lex.matches(0, "eating"));
        assert!(lex.matches(0, "food"));
        assert!(!lex.matches(0, "foods"));
        assert!(lex.matches(1, "ok"));
        assert!(CategoryLexicon::parse("t", "[a]\n[a]\n").is_err());
        assert!(CategoryLexicon::parse("t", "orphan\n").is_err());
        assert!(CategoryLexicon::parse("t", "[a]\n*\n").is_err());
    }

    #[test]
    fn precomputed_ne_tags_win() {
        let gaz = CategoryLexicon::parse("g", "[person]\nmiley\n[location]\nparis\n").unwrap();
        let mut toks = tokenize("paris hilton");
        toks[0].ne = Some("B-person".into());
        toks[1].ne = Some("none".into());
        let f = ne_tag_fractions(&toks, &gaz);
        assert_eq!(f["person"], 0.5);
        assert_eq!(f["location"], 0.0);

        let f = ne_tag_fractions(&tokenize("miley rocks"), &gaz);
        assert_eq!(f["person"], 0.5);

        let empty = CategoryLexicon::new("g");
        assert!(ne_tag_fractions(&tokenize("miley"), &empty).is_empty());
    }
}
