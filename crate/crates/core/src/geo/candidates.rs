use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use super::jaro::jaro_winkler;
use super::segment::segment_hashtag;
use crate::annotation::{base_relation, AnnotatedTweet, Token, Tree};
use crate::lexicons::{AffixType, LexiconSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Hashtag,
    ProperNoun,
    Regex,
    Dependency,
    Entity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationCandidate {
    pub surface: String,
    pub origin: Origin,
    /// Half-open token range the surface was taken from.
    pub token_span: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateSettings {
    pub jw_threshold: f64,
    pub dependency_distance_max: usize,
}

impl Default for CandidateSettings {
    fn default() -> Self {
        CandidateSettings {
            jw_threshold: 0.75,
            dependency_distance_max: 4,
        }
    }
}

fn is_delimiter(t: &Token) -> bool {
    matches!(t.text.as_str(), "," | ";" | "/" | "&") || (t.pos == "CCONJ" && t.text.eq_ignore_ascii_case("and"))
}

/// Joins tokens with spaces, attaching punctuation to the preceding word.
pub(crate) fn join_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    for t in tokens {
        if !out.is_empty() && !matches!(t.text.as_str(), "," | ";" | ":" | "." | "!" | "?") {
            out.push(' ');
        }
        out.push_str(&t.text);
    }
    out
}

struct Builder<'a> {
    tweet: &'a AnnotatedTweet,
    out: Vec<LocationCandidate>,
}

impl Builder<'_> {
    fn push(&mut self, start: usize, end: usize, origin: Origin) {
        let surface = join_tokens(&self.tweet.tokens[start..end]);
        self.push_surface(surface, (start, end), origin);
    }

    fn push_surface(&mut self, surface: String, span: (usize, usize), origin: Origin) {
        if !surface.trim().is_empty() {
            self.out.push(LocationCandidate {
                surface,
                origin,
                token_span: span,
            });
        }
    }
}

/// Generates location candidates from proper-noun runs, affix cues, affix
/// regexes, dependency proximity to need/availability words, geographic
/// entity spans and segmented hashtag-like tokens. Surfaces are deduplicated
/// case-insensitively, first occurrence kept.
pub fn propose_candidates(
    tweet: &AnnotatedTweet,
    lex: &LexiconSet,
    settings: &CandidateSettings,
) -> Vec<LocationCandidate> {
    let mut b = Builder { tweet, out: Vec::new() };
    hashtag_segments(&mut b, lex);
    proper_noun_runs(&mut b, lex, settings);
    affix_regex(&mut b, lex);
    if !tweet.degraded {
        dependency_neighbours(&mut b, lex, settings);
    }
    for e in tweet.entities.iter().filter(|e| e.is_geo()) {
        if e.start < e.end && e.end <= tweet.tokens.len() {
            b.push(e.start, e.end, Origin::Entity);
        }
    }
    let mut seen = HashSet::new();
    b.out.retain(|c| seen.insert(c.surface.to_lowercase()));
    b.out
}

/// Tokens that look like run-together hashtags (alphabetic, unknown to the
/// unigram table) contribute their segments plus the original.
fn hashtag_segments(b: &mut Builder, lex: &LexiconSet) {
    for (i, t) in b.tweet.tokens.iter().enumerate() {
        let word = &t.text;
        if !t.is_noun() || word.chars().count() < 4 || !word.chars().all(|c| c.is_ascii_alphabetic()) {
            continue;
        }
        if lex.unigram_counts.contains_key(&word.to_lowercase()) {
            continue;
        }
        let pieces = segment_hashtag(word, &lex.unigram_counts);
        if pieces.len() > 1 {
            for p in pieces {
                b.push_surface(p, (i, i + 1), Origin::Hashtag);
            }
        }
    }
}

fn affix_like(word: &str, lex: &LexiconSet, threshold: f64) -> bool {
    let w = word.to_lowercase();
    lex.affix_type(&w).is_some() || lex.affixes().any(|(_, a)| jaro_winkler(&w, a) >= threshold)
}

fn proper_noun_runs(b: &mut Builder, lex: &LexiconSet, settings: &CandidateSettings) {
    let toks = &b.tweet.tokens;
    let n = toks.len();
    let mut i = 0;
    while i < n {
        if !toks[i].is_propn() {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < n && (toks[j].is_propn() || toks[j].pos == "ADJ" || is_delimiter(&toks[j])) {
            j += 1;
        }
        let mut end = j;
        while end > i + 1 && !toks[end - 1].is_propn() {
            end -= 1;
        }

        if end < n && toks[end].pos == "NOUN" && affix_like(&toks[end].text, lex, settings.jw_threshold) {
            b.push(i, end + 1, Origin::ProperNoun);
        }
        let cued = i > 0 && {
            let prev = toks[i - 1].lower();
            lex.location_prepositions.contains(&prev) || lex.affix_type(&prev) == Some(AffixType::Directions)
        };
        if cued {
            b.push(i, end, Origin::ProperNoun);
            let parts = split_on_delimiters(toks, i, end);
            if parts.len() > 1 {
                for (s, e) in parts {
                    b.push(s, e, Origin::ProperNoun);
                }
            }
        }
        i = j.max(i + 1);
    }
}

/// Delimiter-separated parts of a run, each trimmed to start and end on a proper noun.
fn split_on_delimiters(toks: &[Token], start: usize, end: usize) -> Vec<(usize, usize)> {
    let mut parts = Vec::new();
    let mut s = start;
    for k in start..=end {
        if k == end || is_delimiter(&toks[k]) {
            let (mut a, mut z) = (s, k);
            while a < z && !toks[a].is_propn() {
                a += 1;
            }
            while z > a && !toks[z - 1].is_propn() {
                z -= 1;
            }
            if a < z {
                parts.push((a, z));
            }
            s = k + 1;
        }
    }
    parts
}

static CAPITALISED: &str = r"[A-Z][A-Za-z'.\-]*";

fn affix_alternation(lex: &LexiconSet) -> String {
    let mut terms: Vec<&str> = lex.affixes().map(|(_, a)| a).collect();
    terms.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    terms.dedup();
    terms
        .iter()
        .map(|t| regex::escape(t).replace(' ', r"\s+"))
        .collect::<Vec<_>>()
        .join("|")
}

pub(crate) fn build_affix_patterns(lex: &LexiconSet) -> (Regex, Regex) {
    let alt = affix_alternation(lex);
    let suffix = Regex::new(&format!(r"\b(?:{CAPITALISED}\s+){{1,3}}(?i:{alt})\b")).unwrap();
    let prefix = Regex::new(&format!(r"\b(?i:{alt})(?:\s+{CAPITALISED}){{1,3}}\b")).unwrap();
    (suffix, prefix)
}

/// Capitalised words followed by an affix ("Kupandole Gurudwara"), or a
/// capitalised affix followed by capitalised words ("North Chennai").
fn affix_regex(b: &mut Builder, lex: &LexiconSet) {
    let toks = &b.tweet.tokens;
    let mut text = String::new();
    let mut starts = Vec::with_capacity(toks.len());
    let mut ends = Vec::with_capacity(toks.len());
    for t in toks {
        if !text.is_empty() {
            text.push(' ');
        }
        starts.push(text.len());
        text.push_str(&t.text);
        ends.push(text.len());
    }
    let (suffix, prefix) = lex.affix_patterns.get_or_init(|| build_affix_patterns(lex));
    let mut spans = Vec::new();
    for m in suffix.find_iter(&text) {
        spans.push((m.start(), m.end()));
    }
    for m in prefix.find_iter(&text) {
        if m.as_str().starts_with(|c: char| c.is_ascii_uppercase()) {
            spans.push((m.start(), m.end()));
        }
    }
    for (ms, me) in spans {
        let s = starts.iter().position(|&x| x == ms);
        let e = ends.iter().position(|&x| x == me);
        if let (Some(s), Some(e)) = (s, e) {
            b.push(s, e + 1, Origin::Regex);
        }
    }
}

/// Chunk used as a location surface: climb out of compound/flat/amod
/// attachments, then take the head with its compound and flat dependents.
fn location_chunk(tree: &Tree, mut idx: usize) -> (usize, usize) {
    let mut guard = 0;
    while let Some(h) = tree.head(idx) {
        let rel = base_relation(&tree.tokens()[idx].deprel);
        if !matches!(rel, "compound" | "flat" | "amod") || guard > tree.len() {
            break;
        }
        idx = h;
        guard += 1;
    }
    tree.phrase(idx, &["compound", "flat"])
}

fn dependency_neighbours(b: &mut Builder, lex: &LexiconSet, settings: &CandidateSettings) {
    let tree = Tree::new(b.tweet);
    let toks = tree.tokens();
    let cues: Vec<usize> = (0..toks.len())
        .filter(|&i| {
            let t = &toks[i];
            lex.is_need_word(&t.lemma)
                || lex.is_availability_word(&t.lemma)
                || lex.is_need_word(&t.text)
                || lex.is_availability_word(&t.text)
        })
        .collect();
    let mut chunks = Vec::new();
    for cue in cues {
        let dist = tree.distances(cue);
        for (i, d) in dist.iter().enumerate() {
            if *d == 0 || *d > settings.dependency_distance_max {
                continue;
            }
            if matches!(toks[i].pos.as_str(), "NOUN" | "PROPN" | "ADJ") {
                let chunk = location_chunk(&tree, i);
                if !chunks.contains(&chunk) {
                    chunks.push(chunk);
                }
            }
        }
    }
    chunks.sort();
    for (s, e) in chunks {
        b.push(s, e, Origin::Dependency);
    }
}
