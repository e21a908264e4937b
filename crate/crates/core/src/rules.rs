//! Rule-based detectors for emoticons and letter lengthenings.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::lexicon::{Category, Dictionary, LabelSet};

/// Emoticon building blocks, version 1.
pub const EMOTICON_EYES: &[char] = &[':', ';', '=', '8', 'x', 'X'];
pub const EMOTICON_NOSES: &[char] = &['-', '\'', '^'];
pub const EMOTICON_MOUTHS: &[char] = &[')', '(', '/', '\\', '|', 'D', 'P', 'p', 'O', 'o', '3', '*'];
/// Letters-only emoticons are restricted to these to keep words such as
/// "xo" or "px" out.
pub const LETTER_EMOTICONS: &[&str] = &["xD", "XD", "xP", "XP"];

pub const LENGTHENING_CAP: usize = 4096;

fn mouth_run(chars: &[char]) -> usize {
    match chars.first() {
        Some(&m) if EMOTICON_MOUTHS.contains(&m) => chars.iter().take_while(|&&c| c == m).count(),
        _ => 0,
    }
}

fn byte_len(chars: &[char]) -> usize {
    chars.iter().map(|c| c.len_utf8()).sum()
}

/// Byte length of the longest eye-[nose]-mouth (or mouth-[nose]-eye)
/// emoticon at the start of `s`. A mouth may repeat (`:DDD`).
pub fn emoticon_prefix_len(s: &str) -> Option<usize> {
    let chars: Vec<char> = s.chars().take(32).collect();
    let mut best = 0;

    // eye [nose] mouth+
    if chars.first().is_some_and(|c| EMOTICON_EYES.contains(c)) {
        let mut k = 1;
        if chars.get(k).is_some_and(|c| EMOTICON_NOSES.contains(c)) {
            k += 1;
        }
        let m = mouth_run(&chars[k..]);
        if m > 0 {
            best = best.max(k + m);
        }
    }
    // mouth+ [nose] eye
    let m = mouth_run(&chars);
    if m > 0 {
        let mut k = m;
        if chars.get(k).is_some_and(|c| EMOTICON_NOSES.contains(c)) {
            k += 1;
        }
        if chars.get(k).is_some_and(|c| EMOTICON_EYES.contains(c)) {
            best = best.max(k + 1);
        }
    }
    (best >= 2).then(|| byte_len(&chars[..best]))
}

pub fn classify_emoticon(token_text: &str) -> bool {
    if token_text.chars().count() < 2 {
        return false;
    }
    if token_text.chars().all(|c| !c.is_alphanumeric()) {
        return true;
    }
    if emoticon_prefix_len(token_text) != Some(token_text.len()) {
        return false;
    }
    if token_text.chars().all(char::is_alphanumeric) {
        let base: String = {
            // collapse a repeated mouth: "xDDD" -> "xD"
            let mut chars: Vec<char> = token_text.chars().collect();
            chars.dedup();
            chars.into_iter().collect()
        };
        return LETTER_EMOTICONS.contains(&base.as_str());
    }
    true
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleVerdict {
    pub category: Option<Category>,
    /// Recovered dictionary word, present only for lengthenings.
    pub normalized_form: Option<String>,
    /// Set when lengthening enumeration exceeded the cap.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub capped: bool,
}

impl RuleVerdict {
    fn emoticon() -> Self {
        RuleVerdict {
            category: Some(Category::Emoticon),
            ..Default::default()
        }
    }
}

/// Maximal runs of one repeated letter, as (start, len) over chars.
fn letter_runs(chars: &[char]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let mut j = i + 1;
        while j < chars.len() && chars[j] == chars[i] {
            j += 1;
        }
        if j - i >= 2 && chars[i].is_alphabetic() {
            runs.push((i, j - i));
        }
        i = j;
    }
    runs
}

/// Shrinks repeated-letter runs back toward a dictionary word, preferring
/// the fewest deletions and then the lexicographically smallest form.
pub fn classify_lengthening(token_text: &str, dict: &Dictionary) -> RuleVerdict {
    let lower = token_text.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    if !chars.iter().any(|c| c.is_alphabetic()) {
        return RuleVerdict::default();
    }
    let runs = letter_runs(&chars);
    if runs.is_empty() {
        return RuleVerdict::default();
    }
    let mut combos: usize = 1;
    for &(_, len) in &runs {
        combos = combos.saturating_mul(len);
        if combos > LENGTHENING_CAP {
            return RuleVerdict {
                capped: true,
                ..Default::default()
            };
        }
    }

    let mut best: Option<(usize, String)> = None;
    // mixed-radix counter: keep[r] in 1..=len_r
    let mut keep: Vec<usize> = runs.iter().map(|&(_, len)| len).collect();
    loop {
        let deletions: usize = runs.iter().zip(&keep).map(|(&(_, len), &k)| len - k).sum();
        if deletions > 0 {
            let candidate = rebuild(&chars, &runs, &keep);
            if dict.contains(&candidate) {
                let better = match &best {
                    None => true,
                    Some((d, w)) => deletions < *d || (deletions == *d && candidate < *w),
                };
                if better {
                    best = Some((deletions, candidate));
                }
            }
        }
        // advance
        let mut r = 0;
        loop {
            if r == keep.len() {
                return match best {
                    Some((_, word)) => RuleVerdict {
                        category: Some(Category::Lengthening),
                        normalized_form: Some(word),
                        capped: false,
                    },
                    None => RuleVerdict::default(),
                };
            }
            if keep[r] > 1 {
                keep[r] -= 1;
                break;
            }
            keep[r] = runs[r].1;
            r += 1;
        }
    }
}

fn rebuild(chars: &[char], runs: &[(usize, usize)], keep: &[usize]) -> String {
    let mut out = String::with_capacity(chars.len());
    let mut i = 0;
    let mut r = 0;
    while i < chars.len() {
        if r < runs.len() && runs[r].0 == i {
            out.extend(std::iter::repeat_n(chars[i], keep[r]));
            i += runs[r].1;
            r += 1;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

/// Emoticon rule first, lengthening second; anything else stays unlabeled
/// for the learned classifier. Inventory words are lowercased, so the
/// emoticon rule also tries the uppercased form (`:d` as `:D`).
pub fn rule_stage<S: AsRef<str>>(oov_words: &[S], dict: &Dictionary) -> BTreeMap<String, RuleVerdict> {
    oov_words
        .iter()
        .map(|w| {
            let w = w.as_ref();
            let verdict = if classify_emoticon(w) || classify_emoticon(&w.to_uppercase()) {
                RuleVerdict::emoticon()
            } else {
                classify_lengthening(w, dict)
            };
            (w.to_string(), verdict)
        })
        .collect()
}

/// Accuracy/precision/recall of one rule against gold labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleScore {
    pub category: Category,
    pub evaluated: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleReport {
    pub total: usize,
    pub emoticons: usize,
    pub lengthenings: usize,
    pub unlabeled: usize,
    pub capped: Vec<String>,
    pub scores: Vec<RuleScore>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores each rule as a binary detector over the labeled words.
pub fn evaluate_rules(verdicts: &BTreeMap<String, RuleVerdict>, labels: &LabelSet) -> RuleReport {
    let mut report = RuleReport {
        total: verdicts.len(),
        ..Default::default()
    };
    for (w, v) in verdicts {
        match v.category {
            Some(Category::Emoticon) => report.emoticons += 1,
            Some(Category::Lengthening) => report.lengthenings += 1,
            _ => report.unlabeled += 1,
        }
        if v.capped {
            report.capped.push(w.clone());
        }
    }
    for cat in [Category::Emoticon, Category::Lengthening] {
        let (mut tp, mut fp, mut tn, mut fneg) = (0, 0, 0, 0);
        for (w, v) in verdicts {
            let Some(gold) = labels.get(w) else { continue };
            match (v.category == Some(cat), gold == cat) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fneg += 1,
                (false, false) => tn += 1,
            }
        }
        let n = tp + fp + tn + fneg;
        report.scores.push(RuleScore {
            category: cat,
            evaluated: n,
            accuracy: ratio(tp + tn, n),
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fneg),
        });
    }
    report
}

impl RuleReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "words\t{}", self.total);
        let _ = writeln!(s, "emoticon\t{}", self.emoticons);
        let _ = writeln!(s, "lengthening\t{}", self.lengthenings);
        let _ = writeln!(s, "unlabeled\t{}", self.unlabeled);
        let _ = writeln!(s, "\ncategory\tevaluated\taccuracy\tprecision\trecall");
        for sc in &self.scores {
            let _ = writeln!(
                s,
                "{}\t{}\t{:.2}\t{:.3}\t{:.3}",
                sc.category,
                sc.evaluated,
                sc.accuracy * 100.0,
                sc.precision,
                sc.recall
            );
        }
        let _ = writeln!(s, "\ncapped\t{}", self.capped.len());
        for w in &self.capped {
            let _ = writeln!(s, "{w}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dict() -> Dictionary {
        Dictionary::new(["no", "please", "ok", "damn", "good", "god", "hello", "bananas"]).unwrap()
    }

    #[test]
    fn emoticons() {
        for e in [
            ":)", ":(", ":D", ":P", ":/", ";-)", "(:", "D:", "xD", "XD", ":)))", "=p", ":DDD", "8-)", "!!",
        ] {
            assert!(classify_emoticon(e), "{e}");
        }
        for w in ["lol", "xo", "px", "Do", ":", "D", "a:)", "omg"] {
            assert!(!classify_emoticon(w), "{w}");
        }
    }

    #[test]
    fn prefix_lengths() {
        assert_eq!(emoticon_prefix_len(":Dx"), Some(2));
        assert_eq!(emoticon_prefix_len("D:"), Some(2));
        assert_eq!(emoticon_prefix_len(":-)))"), Some(5));
        assert_eq!(emoticon_prefix_len(":"), None);
        assert_eq!(emoticon_prefix_len("ab"), None);
    }

    #[test]
    fn lengthenings() {
        let d = dict();
        let norm = |w: &str| classify_lengthening(w, &d).normalized_form;
        assert_eq!(norm("noooo").as_deref(), Some("no"));
        assert_eq!(norm("pleaseeee").as_deref(), Some("please"));
        assert_eq!(norm("okk").as_deref(), Some("ok"));
        assert_eq!(norm("damnnn").as_deref(), Some("damn"));
        assert_eq!(norm("NOOOO").as_deref(), Some("no"));
        assert_eq!(norm("heeellllooo").as_deref(), Some("hello"));
        assert_eq!(norm("lol"), None);
        assert_eq!(norm("qqqz"), None);
    }

    #[test]
    fn fewest_deletions_wins() {
        // "goood" -> "good" (1 deletion) beats "god" (2)
        let v = classify_lengthening("goood", &dict());
        assert_eq!(v.normalized_form.as_deref(), Some("good"));
        assert_eq!(v.category, Some(Category::Lengthening));
    }

    #[test]
    fn enumeration_cap() {
        let word = "aaaabbbbccccddddeeeeffffgggg";
        let v = classify_lengthening(word, &dict());
        assert!(v.capped);
        assert_eq!(v.category, None);
    }

    #[test]
    fn stage_ordering() {
        let out = rule_stage(&[":)", "noooo", "lol"], &dict());
        assert_eq!(out[":)"].category, Some(Category::Emoticon));
        assert_eq!(out["noooo"].normalized_form.as_deref(), Some("no"));
        assert_eq!(out["lol"].category, None);
        assert!(rule_stage::<&str>(&[], &dict()).is_empty());
    }

    #[test]
    fn stage_sees_lowercased_emoticons() {
        let out = rule_stage(&[":d", "xd", ";'p", "lol"], &dict());
        for w in [":d", "xd", ";'p"] {
            assert_eq!(out[w].category, Some(Category::Emoticon), "{w}");
        }
        assert_eq!(out["lol"].category, None);
    }

    #[test]
    fn rule_scores() {
        let d = dict();
        let v = rule_stage(&[":)", ":(", "noooo", "lol", "!!"], &d);
        let labels = LabelSet::parse(":)\temoticon\n:(\temoticon\nnoooo\tlengthening\nlol\tshortening_abbrev\n!!\texpression\n").unwrap();
        let r = evaluate_rules(&v, &labels);
        let emo = r.scores[0];
        assert_eq!(emo.evaluated, 5);
        assert!((emo.precision - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(emo.recall, 1.0);
        assert!((emo.accuracy - 0.8).abs() < 1e-12);
        assert_eq!(r.scores[1].recall, 1.0);
    }
}
