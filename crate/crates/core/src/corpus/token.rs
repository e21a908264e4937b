use serde::{Deserialize, Serialize};
use std::fmt;

use crate::rules::emoticon_prefix_len;

/// Coarse token class assigned by the tokenizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Hashtag,
    Mention,
    Url,
    RetweetMarker,
    PunctCluster,
    Number,
}

impl TokenKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TokenKind::Word => "word",
            TokenKind::Hashtag => "hashtag",
            TokenKind::Mention => "mention",
            TokenKind::Url => "url",
            TokenKind::RetweetMarker => "retweet_marker",
            TokenKind::PunctCluster => "punct_cluster",
            TokenKind::Number => "number",
        }
    }

    /// Derives the kind from the token text and its position in the tweet.
    pub fn classify(text: &str, index: usize) -> TokenKind {
        if is_url(text) {
            TokenKind::Url
        } else if is_entity(text, '#') {
            TokenKind::Hashtag
        } else if is_entity(text, '@') {
            TokenKind::Mention
        } else if index == 0 && text.eq_ignore_ascii_case("rt") {
            TokenKind::RetweetMarker
        } else if text.chars().all(|c| !c.is_alphanumeric()) {
            TokenKind::PunctCluster
        } else if is_number(text) {
            TokenKind::Number
        } else {
            TokenKind::Word
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ne: Option<String>,
    pub index: usize,
}

impl Token {
    pub fn new(text: impl Into<String>, index: usize) -> Self {
        let text = text.into();
        let kind = TokenKind::classify(&text, index);
        Token {
            text,
            kind,
            pos: None,
            ne: None,
            index,
        }
    }

    pub fn lower(&self) -> String {
        self.text.to_lowercase()
    }

    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }
}

const URL_PREFIXES: [&str; 3] = ["http://", "https://", "www."];

fn url_prefix_len(s: &str) -> Option<usize> {
    URL_PREFIXES.iter().find_map(|p| {
        let head = s.get(..p.len())?;
        head.eq_ignore_ascii_case(p).then_some(p.len())
    })
}

fn is_url(text: &str) -> bool {
    match url_prefix_len(text) {
        Some(n) => text.len() > n && !text.chars().any(char::is_whitespace),
        None => false,
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_entity(text: &str, sigil: char) -> bool {
    let Some(rest) = text.strip_prefix(sigil) else {
        return false;
    };
    !rest.is_empty() && rest.chars().all(is_word_char) && rest.chars().any(char::is_alphanumeric)
}

fn is_number(text: &str) -> bool {
    let mut prev_digit = false;
    let mut chars = text.chars().peekable();
    if !matches!(chars.peek(), Some(c) if c.is_ascii_digit()) {
        return false;
    }
    while let Some(c) = chars.next() {
        if c.is_ascii_digit() {
            prev_digit = true;
        } else if (c == '.' || c == ',') && prev_digit {
            if !matches!(chars.peek(), Some(n) if n.is_ascii_digit()) {
                return false;
            }
            prev_digit = false;
        } else {
            return false;
        }
    }
    true
}

/// Splits a raw message into tokens.
///
/// Whitespace separates chunks; inside a chunk a rule cascade applies at
/// every token start: URL (runs to the end of the chunk), `#`/`@` entity,
/// emoticon mixing letters and symbols (`:D`, `D:`, `x(`), word run, and
/// finally a run of symbol characters. Symbol-only emoticons such as `:)`
/// or `:)))` are ordinary symbol runs.
pub fn tokenize(raw: &str) -> Vec<Token> {
    let mut texts: Vec<&str> = Vec::new();
    for chunk in raw.split_whitespace() {
        split_chunk(chunk, &mut texts);
    }
    texts.into_iter().enumerate().map(|(i, t)| Token::new(t, i)).collect()
}

fn split_chunk<'a>(chunk: &'a str, out: &mut Vec<&'a str>) {
    let mut i = 0;
    while i < chunk.len() {
        let rest = &chunk[i..];
        let len = if url_prefix_len(rest).is_some_and(|n| rest.len() > n) {
            rest.len()
        } else if let Some(n) = entity_len(rest) {
            n
        } else if let Some(n) = mixed_emoticon_len(rest) {
            n
        } else if rest.starts_with(is_word_char) {
            word_run_len(rest)
        } else {
            symbol_run_len(rest)
        };
        out.push(&rest[..len]);
        i += len;
    }
}

fn entity_len(s: &str) -> Option<usize> {
    let first = s.chars().next()?;
    if first != '#' && first != '@' {
        return None;
    }
    let body: usize = s[1..].chars().take_while(|&c| is_word_char(c)).map(char::len_utf8).sum();
    let candidate = &s[..1 + body];
    is_entity(candidate, first).then_some(1 + body)
}

/// Emoticon that contains both letters/digits and symbols, followed by
/// the chunk end or a non-alphanumeric character.
fn mixed_emoticon_len(s: &str) -> Option<usize> {
    let n = emoticon_prefix_len(s)?;
    let m = &s[..n];
    let has_alnum = m.chars().any(char::is_alphanumeric);
    let has_symbol = m.chars().any(|c| !c.is_alphanumeric());
    let boundary = s[n..].chars().next().is_none_or(|c| !c.is_alphanumeric());
    (has_alnum && has_symbol && boundary).then_some(n)
}

fn word_run_len(s: &str) -> usize {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut end = 0;
    let mut all_digits = true;
    let mut k = 0;
    while k < chars.len() {
        let (at, c) = chars[k];
        let next = chars.get(k + 1).map(|&(_, n)| n);
        if is_word_char(c) {
            all_digits &= c.is_ascii_digit();
        } else if (c == '\'' || c == '\u{2019}') && k > 0 && chars[k - 1].1.is_alphabetic() && next.is_some_and(char::is_alphabetic) {
            all_digits = false;
        } else if (c == '.' || c == ',') && all_digits && k > 0 && next.is_some_and(|n| n.is_ascii_digit()) {
        } else {
            break;
        }
        end = at + c.len_utf8();
        k += 1;
    }
    end
}

fn symbol_run_len(s: &str) -> usize {
    let mut end = 0;
    for (at, c) in s.char_indices() {
        if c.is_alphanumeric() {
            break;
        }
        if at > 0 {
            let rest = &s[at..];
            if entity_len(rest).is_some() || mixed_emoticon_len(rest).is_some() {
                break;
            }
        }
        end = at + c.len_utf8();
    }
    end
}
