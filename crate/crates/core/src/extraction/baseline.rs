use crate::annotation::AnnotatedTweet;
use crate::lexicons::{LexiconSet, SimilarityOracle};

use super::resources::{collapse, resolve_phrase, ResourceMention};

fn noun_phrases(tweet: &AnnotatedTweet) -> Vec<(usize, usize)> {
    let toks = &tweet.tokens;
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        if !(toks[i].is_noun() || toks[i].pos == "ADJ") {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < toks.len() && (toks[j].is_noun() || toks[j].pos == "ADJ") {
            j += 1;
        }
        let mut end = j;
        while end > i && !toks[end - 1].is_noun() {
            end -= 1;
        }
        if end > i {
            out.push((i, end));
        }
        i = j;
    }
    out
}

/// Every maximal noun phrase is tried whole, then each noun inside it.
pub fn baseline_resources(tweet: &AnnotatedTweet, lex: &LexiconSet, oracle: &SimilarityOracle) -> Vec<ResourceMention> {
    let mut found = Vec::new();
    for (s, e) in noun_phrases(tweet) {
        if let Some(m) = resolve_phrase(tweet, (s, e), oracle, lex, true) {
            if e - s > 1 && m.term.contains(' ') {
                found.push(m);
                continue;
            }
        }
        for i in s..e {
            if tweet.tokens[i].is_noun() {
                if let Some(mut m) = resolve_phrase(tweet, (i, i + 1), oracle, lex, true) {
                    // Quantities are read from the start of the noun phrase.
                    m.span = (s.min(i), i + 1);
                    found.push(m);
                }
            }
        }
    }
    collapse(found)
}
