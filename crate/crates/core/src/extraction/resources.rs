use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::annotation::{base_relation, AnnotatedTweet, Tree};
use crate::lexicons::{is_resource, LexiconSet, ResourceClass, SimilarityOracle};

/// Children with these relations are potential resources when they are nouns.
const ARGUMENT_RELATIONS: &[&str] = &["obj", "dobj", "iobj", "nsubj", "csubj", "conj", "obl", "nmod", "pobj"];

/// Children with these relations become head words themselves.
const RECURSIVE_RELATIONS: &[&str] = &[
    "obl", "nmod", "prep", "advcl", "acl", "relcl", "xcomp", "ccomp", "acomp", "punct", "conj",
];

/// Left dependents that belong to a resource phrase.
pub(crate) const PHRASE_RELATIONS: &[&str] = &["compound", "flat", "amod"];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HeadWordSet {
    pub indices: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialResources {
    pub heads: HeadWordSet,
    /// Token indices of potential resources, ascending.
    pub nouns: Vec<usize>,
}

impl PotentialResources {
    pub fn surfaces<'a>(&self, tweet: &'a AnnotatedTweet) -> Vec<&'a str> {
        self.nouns.iter().map(|&i| tweet.tokens[i].text.as_str()).collect()
    }
}

/// Returned when a record carries no usable parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Degraded;

/// Walks the dependency tree from the roots and the need/availability words.
///
/// Noun children attached by an argument relation are potential resources.
/// Children attached by a modifier, clause, complement or punctuation
/// relation join the head words and are explored in turn. Potential
/// resources are explored too, since conjuncts and prepositional objects
/// hang off nouns. Each token is visited once.
pub fn extract_potential_resources(tweet: &AnnotatedTweet, lex: &LexiconSet) -> Result<PotentialResources, Degraded> {
    if tweet.degraded {
        return Err(Degraded);
    }
    let tree = Tree::new(tweet);
    let toks = tree.tokens();
    let mut heads = BTreeSet::new();
    let mut nouns = BTreeSet::new();
    let mut queue = VecDeque::new();

    let roots = tree.roots();
    for &r in &roots {
        if toks[r].is_noun() {
            nouns.insert(r);
        }
    }
    let cues =
        (0..toks.len()).filter(|&i| lex.is_need_word(&toks[i].lemma) || lex.is_availability_word(&toks[i].lemma));
    let mut seeds: Vec<usize> = roots.iter().copied().chain(cues).collect();
    seeds.sort_unstable();
    seeds.dedup();
    for s in seeds {
        heads.insert(s);
        queue.push_back(s);
    }

    while let Some(h) = queue.pop_front() {
        for &c in tree.children(h) {
            let rel = base_relation(&toks[c].deprel);
            let argument = ARGUMENT_RELATIONS.contains(&rel) && toks[c].is_noun();
            if argument {
                nouns.insert(c);
            }
            if (argument || RECURSIVE_RELATIONS.contains(&rel)) && heads.insert(c) {
                queue.push_back(c);
            }
        }
    }
    Ok(PotentialResources {
        heads: HeadWordSet { indices: heads },
        nouns: nouns.into_iter().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceMention {
    /// Words as written in the tweet.
    pub term: String,
    /// The ontology term it resolved to.
    pub canonical: String,
    pub class: ResourceClass,
    pub quantity: Option<u64>,
    /// Token range of the phrase the term was found in.
    #[serde(skip)]
    pub span: (usize, usize),
}

fn lookup(
    words: &[&crate::annotation::Token],
    oracle: &SimilarityOracle,
    lex: &LexiconSet,
) -> Option<crate::lexicons::ResourceMatch> {
    let surface = words.iter().map(|t| t.lower()).collect::<Vec<_>>().join(" ");
    let lemma = words.iter().map(|t| t.lemma_lower()).collect::<Vec<_>>().join(" ");
    is_resource(&surface, oracle, lex).or_else(|| is_resource(&lemma, oracle, lex))
}

/// Resolves the phrase headed by `head`: the whole phrase first, then each
/// common noun in it from left to right. Proper nouns and adjectives are
/// never resolved on their own.
pub(crate) fn resolve_phrase(
    tweet: &AnnotatedTweet,
    span: (usize, usize),
    oracle: &SimilarityOracle,
    lex: &LexiconSet,
    allow_proper: bool,
) -> Option<ResourceMention> {
    let words: Vec<_> = tweet.tokens[span.0..span.1].iter().collect();
    if words.len() > 1 || allow_proper || words[0].pos == "NOUN" {
        if let Some(m) = lookup(&words, oracle, lex) {
            return Some(mention(tweet.surface(span.0, span.1), m, span));
        }
    }
    if words.len() == 1 {
        return None;
    }
    words
        .iter()
        .enumerate()
        .filter(|(_, t)| t.pos == "NOUN" || (allow_proper && t.pos == "PROPN"))
        .find_map(|(k, t)| lookup(&[*t], oracle, lex).map(|m| mention(tweet.tokens[span.0 + k].text.clone(), m, span)))
}

fn mention(term: String, m: crate::lexicons::ResourceMatch, span: (usize, usize)) -> ResourceMention {
    ResourceMention {
        term,
        canonical: m.canonical,
        class: m.class,
        quantity: None,
        span,
    }
}

/// Keeps the first mention of every canonical term.
pub(crate) fn collapse(mentions: Vec<ResourceMention>) -> Vec<ResourceMention> {
    let mut seen = HashSet::new();
    mentions
        .into_iter()
        .filter(|m| seen.insert(m.canonical.clone()))
        .collect()
}

/// Filters potential resources through the ontology, in token order.
pub fn extract_resources(
    tweet: &AnnotatedTweet,
    potential: &PotentialResources,
    lex: &LexiconSet,
    oracle: &SimilarityOracle,
) -> Vec<ResourceMention> {
    let tree = Tree::new(tweet);
    let found = potential
        .nouns
        .iter()
        .filter_map(|&i| resolve_phrase(tweet, tree.phrase(i, PHRASE_RELATIONS), oracle, lex, false))
        .collect();
    collapse(found)
}
