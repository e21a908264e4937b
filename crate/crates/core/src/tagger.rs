//! Baseline part-of-speech tagger emitting tags from the Twitter tagset
//! (`N`, `V`, `A`, `R`, `D`, `P`, `O`, `&`, `!`, `^`, `#`, `@`, `U`, `~`,
//! `E`, `,`, `$`, `L`, `G`). Used when the corpus carries no precomputed
//! tags; a closed-class word list plus suffix heuristics.

use crate::corpus::{Token, TokenKind, Tweet};
use crate::rules::classify_emoticon;

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "my", "your", "his", "her", "its", "our", "their", "some", "any", "every", "each",
    "no", "all", "both",
];
const PRONOUNS: &[&str] = &[
    "i",
    "you",
    "he",
    "she",
    "it",
    "we",
    "they",
    "me",
    "him",
    "us",
    "them",
    "myself",
    "yourself",
    "something",
    "nothing",
    "everything",
    "someone",
    "everyone",
    "anyone",
    "what",
    "who",
    "which",
];
const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "of", "for", "with", "to", "from", "by", "about", "into", "over", "after", "before", "under", "through", "during",
    "without", "like", "than", "up", "down", "off", "out",
];
const CONJUNCTIONS: &[&str] = &["and", "or", "but", "nor", "so", "yet", "because", "if", "while"];
const VERBS: &[&str] = &[
    "is", "am", "are", "was", "were", "be", "been", "being", "have", "has", "had", "do", "does", "did", "will", "would", "can", "could",
    "should", "may", "might", "must", "go", "goes", "went", "get", "gets", "got", "make", "made", "know", "knew", "think", "see", "saw",
    "come", "came", "want", "need", "love", "hate", "feel", "say", "said", "tell", "watch", "play", "eat", "drink", "let", "take", "give",
    "look", "find", "keep", "miss", "wish", "hope", "win", "lose", "lost",
];
const ADVERBS: &[&str] = &[
    "not",
    "very",
    "too",
    "really",
    "just",
    "now",
    "then",
    "here",
    "there",
    "always",
    "never",
    "again",
    "still",
    "already",
    "soon",
    "today",
    "tonight",
    "tomorrow",
    "yesterday",
    "also",
    "even",
    "ever",
    "only",
    "well",
    "much",
    "more",
    "most",
    "away",
    "back",
];
const ADJECTIVES: &[&str] = &[
    "good", "bad", "great", "new", "old", "big", "small", "happy", "sad", "best", "better", "worst", "nice", "cool", "hot", "cold", "long",
    "little", "last", "first", "next", "real", "sure", "funny", "cute", "pretty", "tired", "ready", "free", "late", "early", "amazing",
];
const INTERJECTIONS: &[&str] = &["oh", "wow", "yes", "yeah", "hey", "hi", "hello", "please", "thanks", "ok", "okay"];
const NOMINAL_VERBAL: &[&str] = &[
    "i'm", "you're", "it's", "that's", "he's", "she's", "we're", "they're", "i'll", "i've", "there's",
];

fn suffix_tag(w: &str) -> &'static str {
    if w.len() > 4 && w.ends_with("ly") {
        "R"
    } else if w.len() > 4 && (w.ends_with("ing") || w.ends_with("ed")) {
        "V"
    } else if w.len() > 4
        && ["ous", "ful", "ive", "able", "ible", "less", "ish", "ic"]
            .iter()
            .any(|s| w.ends_with(s))
    {
        "A"
    } else {
        "N"
    }
}

/// Tag a single token from its text and kind.
pub fn baseline_tag(token: &Token) -> &'static str {
    match token.kind {
        TokenKind::Hashtag => "#",
        TokenKind::Mention => "@",
        TokenKind::Url => "U",
        TokenKind::RetweetMarker => "~",
        TokenKind::Number => "$",
        TokenKind::PunctCluster => {
            if classify_emoticon(&token.text) {
                "E"
            } else {
                ","
            }
        }
        TokenKind::Word => {
            if classify_emoticon(&token.text) {
                return "E";
            }
            let w = token.lower();
            let w = w.as_str();
            let lists: [(&[&str], &'static str); 9] = [
                (NOMINAL_VERBAL, "L"),
                (DETERMINERS, "D"),
                (PRONOUNS, "O"),
                (PREPOSITIONS, "P"),
                (CONJUNCTIONS, "&"),
                (VERBS, "V"),
                (ADVERBS, "R"),
                (ADJECTIVES, "A"),
                (INTERJECTIONS, "!"),
            ];
            for (list, tag) in lists {
                if list.contains(&w) {
                    return tag;
                }
            }
            if token.index > 0 && token.text.chars().next().is_some_and(char::is_uppercase) {
                return "^";
            }
            if w.chars().any(|c| !c.is_alphanumeric() && c != '\'') {
                return "G";
            }
            suffix_tag(w)
        }
    }
}

/// Fills in missing POS tags; existing tags are left untouched.
pub fn tag_tweet(tweet: &mut Tweet) {
    for tok in tweet.tokens.iter_mut().filter(|t| t.pos.is_none()) {
        tok.pos = Some(baseline_tag(tok).to_string());
    }
}

pub fn tag_corpus(tweets: &mut [Tweet]) {
    tweets.iter_mut().for_each(tag_tweet);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_by_kind_and_list() {
        let mut t = Tweet::new("1", "2013-01", "RT @amy: the cat is quickly jumping :) #win http://x.co 42 Paris").unwrap();
        tag_tweet(&mut t);
        let tags: Vec<&str> = t.tokens.iter().map(|k| k.pos.as_deref().unwrap()).collect();
        assert_eq!(tags, ["~", "@", ",", "D", "N", "V", "R", "V", "E", "#", "U", "$", "^"]);
    }

    #[test]
    fn keeps_existing_tags() {
        let mut t = Tweet::new("1", "2013-01", "cat").unwrap();
        t.tokens[0].pos = Some("X".into());
        tag_tweet(&mut t);
        assert_eq!(t.tokens[0].pos.as_deref(), Some("X"));
    }
}
