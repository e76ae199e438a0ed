//! Tweet ingestion, text cleaning and near-duplicate removal.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TweetKind {
    Need,
    Availability,
    #[default]
    Unlabeled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub kind: TweetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessedTweet {
    pub id: String,
    pub clean_text: String,
    pub tokens_for_dedup: BTreeSet<String>,
}

/// Result of reading a tweet file. `malformed` counts skipped lines.
#[derive(Debug, Clone, Default)]
pub struct Ingested {
    pub tweets: Vec<Tweet>,
    pub malformed: usize,
}

/// Reads a tweet JSONL file and labels every record with `kind`.
/// Lines that fail to parse, have an empty id or blank text, or repeat an
/// earlier id are skipped and counted.
pub fn ingest(path: &Path, kind: TweetKind) -> Result<Ingested> {
    let mut out = read_tweets(path)?;
    for t in &mut out.tweets {
        t.kind = kind;
    }
    Ok(out)
}

/// Reads a tweet JSONL file keeping each record's own kind label.
pub fn read_tweets(path: &Path) -> Result<Ingested> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut seen = HashSet::new();
    let mut out = Ingested::default();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let reason = match serde_json::from_str::<Tweet>(&line) {
            Ok(t) if t.id.is_empty() => "empty id".to_string(),
            Ok(t) if t.text.trim().is_empty() => "blank text".to_string(),
            Ok(t) if !seen.insert(t.id.clone()) => format!("duplicate id {}", t.id),
            Ok(t) => {
                out.tweets.push(t);
                continue;
            }
            Err(e) => e.to_string(),
        };
        log::warn!("{}:{}: skipping record: {reason}", path.display(), idx + 1);
        out.malformed += 1;
    }
    Ok(out)
}

static URL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(?:https?://|www\.)\S+").unwrap());
static MENTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(^|[^\w.])(?:@\w+)+").unwrap());
static EMAIL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[A-Za-z0-9_.+-]+@[A-Za-z0-9_-]+(?:\.[A-Za-z0-9_-]+)+").unwrap());
static SPLIT_LOWER_UPPER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([a-z])([A-Z])").unwrap());
static SPLIT_ACRONYM: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([A-Z])([A-Z][a-z])").unwrap());
static SPLIT_ALPHA_DIGIT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([A-Za-z])([0-9])").unwrap());
static SPLIT_DIGIT_ALPHA: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([0-9])([A-Za-z])").unwrap());
static ORDINAL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[0-9]+(?:st|nd|rd|th|ST|ND|RD|TH)$").unwrap());
static WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[A-Za-z0-9]+").unwrap());

/// Cleans raw tweet text. Case is preserved; the function is idempotent.
pub fn clean_text(raw: &str) -> String {
    let mut s = URL.replace_all(raw, " ").into_owned();
    s = MENTION.replace_all(&s, "$1 ").into_owned();
    s = s
        .replace("&amp;", " ")
        .replace(['\u{2018}', '\u{2019}'], "'")
        .replace(['\u{201c}', '\u{201d}'], "\"")
        .replace(['\u{2026}'], " ")
        .replace("...", " ");
    s = s
        .chars()
        .map(|c| match c {
            '#' | '&' | '(' | ')' | '[' | ']' | '{' | '}' | '<' | '>' => ' ',
            c if !c.is_ascii() || c.is_ascii_control() => ' ',
            c => c,
        })
        .collect();

    let mut words = Vec::new();
    for word in s.split_whitespace() {
        if word == "RT" || word == "RT:" {
            continue;
        }
        if EMAIL.is_match(word) || ORDINAL.is_match(word.trim_end_matches(|c: char| c.is_ascii_punctuation())) {
            words.push(word.to_string());
        } else {
            words.push(split_joints(word));
        }
    }
    words
        .join(" ")
        .split_whitespace()
        .filter(|w| *w != "RT")
        .collect::<Vec<_>>()
        .join(" ")
}

fn split_joints(word: &str) -> String {
    let s = SPLIT_LOWER_UPPER.replace_all(word, "$1 $2");
    let s = SPLIT_ACRONYM.replace_all(&s, "$1 $2");
    let s = SPLIT_ALPHA_DIGIT.replace_all(&s, "$1 $2");
    // Digit-to-letter boundaries keep ordinals intact ("2nd" stays whole).
    let mut out = String::new();
    for piece in s.split(' ') {
        if !out.is_empty() {
            out.push(' ');
        }
        if ORDINAL.is_match(piece.trim_end_matches(|c: char| c.is_ascii_punctuation())) {
            out.push_str(piece);
        } else {
            out.push_str(&SPLIT_DIGIT_ALPHA.replace_all(piece, "$1 $2"));
        }
    }
    out
}

/// Lowercase alphanumeric words of `text` that are not stopwords.
pub fn content_words<'a>(text: &'a str, stopwords: &'a HashSet<String>) -> impl Iterator<Item = String> + 'a {
    WORD.find_iter(text)
        .map(|m| m.as_str().to_ascii_lowercase())
        .filter(move |w| !stopwords.contains(w))
}

pub fn preprocess(tweet: &Tweet, stopwords: &HashSet<String>) -> PreprocessedTweet {
    let clean = clean_text(&tweet.text);
    let tokens = content_words(&clean, stopwords).collect();
    PreprocessedTweet {
        id: tweet.id.clone(),
        clean_text: clean,
        tokens_for_dedup: tokens,
    }
}

/// Jaccard similarity of two word bags. Two empty bags are identical and score 1.
pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// Greedy first-seen-wins dedup. A tweet is dropped when its Jaccard
/// similarity to any already retained tweet is strictly above `threshold`.
/// Returns retained ids in input order.
///
/// Only retained tweets sharing at least one word are compared, through an
/// inverted index. Pairs with no shared word score 0 and can never exceed a
/// threshold in [0, 1], so the result matches the all-pairs definition.
pub fn deduplicate(tweets: &[PreprocessedTweet], threshold: f64) -> Vec<String> {
    let mut retained: Vec<usize> = Vec::new();
    let mut postings: HashMap<&str, Vec<usize>> = HashMap::new();
    let mut empty_retained = false;
    let mut overlap: HashMap<usize, usize> = HashMap::new();

    for (i, t) in tweets.iter().enumerate() {
        let bag = &t.tokens_for_dedup;
        let duplicate = if bag.is_empty() {
            empty_retained && 1.0 > threshold
        } else {
            overlap.clear();
            for w in bag {
                if let Some(list) = postings.get(w.as_str()) {
                    for &j in list {
                        *overlap.entry(j).or_default() += 1;
                    }
                }
            }
            overlap.iter().any(|(&j, &inter)| {
                let other = tweets[j].tokens_for_dedup.len();
                let union = bag.len() + other - inter;
                inter as f64 / union as f64 > threshold
            })
        };
        if duplicate {
            continue;
        }
        retained.push(i);
        if bag.is_empty() {
            empty_retained = true;
        }
        for w in bag {
            postings.entry(w.as_str()).or_default().push(i);
        }
    }
    retained.into_iter().map(|i| tweets[i].id.clone()).collect()
}
