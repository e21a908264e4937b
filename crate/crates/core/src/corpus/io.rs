use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::Tweet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    /// One JSON object per line: `id`, `ts`, `text`, optional `pos`/`ne`.
    Jsonl,
    /// `id<TAB>ts<TAB>text`
    Tsv,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(CorpusFormat::Jsonl),
            "tsv" => Ok(CorpusFormat::Tsv),
            other => Err(Error::Config(format!("unknown corpus format `{other}`"))),
        }
    }
}

impl CorpusFormat {
    pub fn from_path(path: &Path) -> CorpusFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") | Some("txt") => CorpusFormat::Tsv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct Record {
    id: String,
    ts: String,
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pos: Option<Vec<Option<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ne: Option<Vec<Option<String>>>,
}

#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub path: PathBuf,
    pub tweets: Vec<Tweet>,
    pub skipped: usize,
}

/// Validates `YYYY-MM` (a longer ISO timestamp is truncated to its month).
pub fn parse_month(ts: &str) -> Option<String> {
    let month = ts.get(..7)?;
    let b = month.as_bytes();
    let digits = |r: std::ops::Range<usize>| b[r].iter().all(u8::is_ascii_digit);
    if !(digits(0..4) && b[4] == b'-' && digits(5..7)) {
        return None;
    }
    let m: u32 = month[5..7].parse().ok()?;
    if !(1..=12).contains(&m) {
        return None;
    }
    if ts.len() > 7 && !ts[7..].starts_with('-') {
        return None;
    }
    Some(month.to_string())
}

fn parse_line(line: &str, format: CorpusFormat) -> Option<Tweet> {
    let record = match format {
        CorpusFormat::Jsonl => serde_json::from_str::<Record>(line).ok()?,
        CorpusFormat::Tsv => {
            let mut parts = line.splitn(3, '\t');
            Record {
                id: parts.next()?.to_string(),
                ts: parts.next()?.to_string(),
                text: parts.next()?.to_string(),
                pos: None,
                ne: None,
            }
        }
    };
    let month = parse_month(&record.ts)?;
    let mut tweet = Tweet::new(record.id, month, record.text)?;
    if let Some(pos) = record.pos {
        if pos.len() != tweet.tokens.len() {
            return None;
        }
        for (tok, tag) in tweet.tokens.iter_mut().zip(pos) {
            tok.pos = tag;
        }
    }
    if let Some(ne) = record.ne {
        if ne.len() != tweet.tokens.len() {
            return None;
        }
        for (tok, tag) in tweet.tokens.iter_mut().zip(ne) {
            tok.ne = tag;
        }
    }
    Some(tweet)
}

/// Reads a line-per-record corpus. Malformed lines are skipped and counted;
/// more than half malformed is treated as a format mismatch.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<LoadedCorpus> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut tweets = Vec::new();
    let mut skipped = 0;
    let mut total = 0;
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        total += 1;
        match parse_line(line, format) {
            Some(t) => tweets.push(t),
            None => skipped += 1,
        }
    }
    if total == 0 {
        log::warn!("{}: corpus is empty", path.display());
    } else if skipped * 2 > total {
        return Err(Error::MostlyMalformed {
            path: path.to_path_buf(),
            malformed: skipped,
            total,
        });
    }
    if skipped > 0 {
        log::warn!("{}: skipped {skipped} malformed line(s)", path.display());
    }
    Ok(LoadedCorpus {
        path: path.to_path_buf(),
        tweets,
        skipped,
    })
}

/// Writes tweets in the JSON-lines format, including any POS/NE tags.
pub fn write_corpus(path: &Path, tweets: &[Tweet]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for t in tweets {
        let any_pos = t.tokens.iter().any(|k| k.pos.is_some());
        let any_ne = t.tokens.iter().any(|k| k.ne.is_some());
        let rec = Record {
            id: t.id.clone(),
            ts: t.month.clone(),
            text: t.raw_text.clone(),
            pos: any_pos.then(|| t.tokens.iter().map(|k| k.pos.clone()).collect()),
            ne: any_ne.then(|| t.tokens.iter().map(|k| k.ne.clone()).collect()),
        };
        let line = serde_json::to_string(&rec).expect("record serializes");
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn month_parsing() {
        assert_eq!(parse_month("2013-01").as_deref(), Some("2013-01"));
        assert_eq!(parse_month("2013-12-31T10:00:00Z").as_deref(), Some("2013-12"));
        assert_eq!(parse_month("2013-13"), None);
        assert_eq!(parse_month("2013/01"), None);
        assert_eq!(parse_month("201301"), None);
    }

    #[test]
    fn tsv_line() {
        let t = parse_line("7\t2012-05\tnooo way!!", CorpusFormat::Tsv).unwrap();
        assert_eq!(t.month, "2012-05");
        assert_eq!(t.tokens.len(), 3);
    }

    #[test]
    fn json_line_with_tags() {
        let line = r#"{"id":"1","ts":"2013-01","text":"miley rocks","pos":["^","V"],"ne":["person",null]}"#;
        let t = parse_line(line, CorpusFormat::Jsonl).unwrap();
        assert_eq!(t.tokens[0].pos.as_deref(), Some("^"));
        assert_eq!(t.tokens[0].ne.as_deref(), Some("person"));
        assert_eq!(t.tokens[1].ne, None);
    }

    #[test]
    fn misaligned_tags_are_malformed() {
        let line = r#"{"id":"1","ts":"2013-01","text":"miley rocks","pos":["^"]}"#;
        assert!(parse_line(line, CorpusFormat::Jsonl).is_none());
    }
}
