use std::collections::HashSet;

use crate::annotation::{base_relation, AnnotatedTweet, EntityKind, Tree};
use crate::geo::{LocationCandidate, Origin};

use super::resources::HeadWordSet;

/// Spans and strings a source may not overlap.
#[derive(Debug, Default, Clone)]
pub struct Exclusions {
    pub spans: Vec<(usize, usize)>,
    pub strings: HashSet<String>,
}

impl Exclusions {
    fn blocks(&self, span: (usize, usize), surface: &str) -> bool {
        self.spans.iter().any(|&(s, e)| span.0 < e && s < span.1) || self.strings.contains(&surface.to_lowercase())
    }
}

fn is_subject(deprel: &str) -> bool {
    matches!(
        base_relation(deprel),
        "nsubj" | "csubj" | "nsubjpass" | "csubjpass" | "agent"
    ) || deprel == "obl:agent"
}

/// Extends a proper noun over its contiguous proper-noun neighbours.
fn proper_run(tweet: &AnnotatedTweet, i: usize) -> (usize, usize) {
    let toks = &tweet.tokens;
    let mut s = i;
    while s > 0 && toks[s - 1].is_propn() {
        s -= 1;
    }
    let mut e = i + 1;
    while e < toks.len() && toks[e].is_propn() {
        e += 1;
    }
    (s, e)
}

fn finish(
    tweet: &AnnotatedTweet,
    mut found: Vec<(usize, usize)>,
    unverified: &[LocationCandidate],
    exclude: &Exclusions,
) -> Vec<String> {
    for c in unverified.iter().filter(|c| c.origin == Origin::Entity) {
        found.push(c.token_span);
    }
    found.sort();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for span in found {
        let surface = tweet.surface(span.0, span.1);
        if exclude.blocks(span, &surface) || !seen.insert(surface.to_lowercase()) {
            continue;
        }
        out.push(surface);
    }
    out
}

/// Proper-noun subjects of head words, person and organisation entities, and
/// geographic entities the gazetteer rejected; minus anything overlapping a
/// resource or a verified location.
pub fn extract_sources(
    tweet: &AnnotatedTweet,
    heads: &HeadWordSet,
    unverified: &[LocationCandidate],
    exclude: &Exclusions,
) -> Vec<String> {
    let tree = Tree::new(tweet);
    let mut found = Vec::new();
    for &h in &heads.indices {
        for &c in tree.children(h) {
            let t = &tweet.tokens[c];
            if t.is_propn() && is_subject(&t.deprel) {
                found.push(proper_run(tweet, c));
            }
        }
    }
    for e in &tweet.entities {
        if matches!(e.kind(), EntityKind::Person | EntityKind::Org) {
            found.push((e.start, e.end));
        }
    }
    finish(tweet, found, unverified, exclude)
}

/// Entity-only sources: person, nationality/religious group and
/// organisation spans plus rejected geographic entities.
pub fn baseline_sources(tweet: &AnnotatedTweet, unverified: &[LocationCandidate], exclude: &Exclusions) -> Vec<String> {
    let found = tweet
        .entities
        .iter()
        .filter(|e| matches!(e.kind(), EntityKind::Person | EntityKind::Norp | EntityKind::Org))
        .map(|e| (e.start, e.end))
        .collect();
    finish(tweet, found, unverified, exclude)
}
