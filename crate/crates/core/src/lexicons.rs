//! Word lists, the resource ontology and the similarity table.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceClass {
    Cash,
    Health,
    Logistics,
    Shelter,
    Food,
}

impl ResourceClass {
    pub const ALL: [ResourceClass; 5] = [
        ResourceClass::Cash,
        ResourceClass::Health,
        ResourceClass::Logistics,
        ResourceClass::Shelter,
        ResourceClass::Food,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResourceClass::Cash => "cash",
            ResourceClass::Health => "health",
            ResourceClass::Logistics => "logistics",
            ResourceClass::Shelter => "shelter",
            ResourceClass::Food => "food",
        }
    }
}

impl fmt::Display for ResourceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ResourceClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown resource class {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AffixType {
    Landforms,
    Roads,
    Buildings,
    Towns,
    Directions,
}

impl FromStr for AffixType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "landforms" => Ok(AffixType::Landforms),
            "roads" => Ok(AffixType::Roads),
            "buildings" => Ok(AffixType::Buildings),
            "towns" => Ok(AffixType::Towns),
            "directions" => Ok(AffixType::Directions),
            other => Err(format!("unknown affix type {other:?}")),
        }
    }
}

const DEFAULT_NEED: &str = include_str!("../data/lexicon/needwords.txt");
const DEFAULT_AVAIL: &str = include_str!("../data/lexicon/availwords.txt");
const DEFAULT_RESOURCES: &str = include_str!("../data/lexicon/resources.tsv");
const DEFAULT_AFFIXES: &str = include_str!("../data/lexicon/affixes.tsv");
const DEFAULT_PREPOSITIONS: &str = include_str!("../data/lexicon/prepositions.txt");
const DEFAULT_STOPWORDS: &str = include_str!("../data/lexicon/stopwords.txt");
const DEFAULT_UNIGRAMS: &str = include_str!("../data/lexicon/unigrams.tsv");
const DEFAULT_SIMILARITY: &str = include_str!("../data/lexicon/similarity.tsv");

#[derive(Debug, Clone)]
pub struct LexiconSet {
    pub need_words: HashSet<String>,
    pub availability_words: HashSet<String>,
    pub resources_by_class: BTreeMap<ResourceClass, BTreeSet<String>>,
    pub location_affixes: BTreeMap<AffixType, BTreeSet<String>>,
    pub location_prepositions: HashSet<String>,
    pub stopwords: HashSet<String>,
    pub unigram_counts: HashMap<String, u64>,
    resource_index: BTreeMap<String, ResourceClass>,
    pub(crate) affix_patterns: OnceLock<(regex::Regex, regex::Regex)>,
}

/// A recognised resource: the list term it resolved to and that term's class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceMatch {
    pub canonical: String,
    pub class: ResourceClass,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn word_set(text: &str) -> HashSet<String> {
    content_lines(text).map(|(_, l)| l.to_lowercase()).collect()
}

fn tsv_pairs<'a>(text: &'a str, path: &'a Path) -> impl Iterator<Item = Result<(usize, &'a str, &'a str)>> + 'a {
    content_lines(text).map(move |(n, l)| {
        let mut parts = l.splitn(2, '\t');
        match (parts.next(), parts.next()) {
            (Some(a), Some(b)) if !b.trim().is_empty() => Ok((n, a.trim(), b.trim())),
            _ => Err(Error::parse(path, n, "expected two tab-separated columns")),
        }
    })
}

fn read_optional(dir: &Path, name: &str, default: &'static str) -> Result<String> {
    let path = dir.join(name);
    match std::fs::read_to_string(&path) {
        Ok(text) if content_lines(&text).next().is_some() => Ok(text),
        Ok(_) => {
            log::info!("{} is empty, using built-in default", path.display());
            Ok(default.to_string())
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(default.to_string()),
        Err(e) => Err(Error::io(path, e)),
    }
}

/// Loads the lexicon directory. `resources.tsv` is mandatory; every other
/// file falls back to the built-in copy when missing or empty.
pub fn load_lexicons(dir: &Path) -> Result<LexiconSet> {
    let res_path = dir.join("resources.tsv");
    let resources = match std::fs::read_to_string(&res_path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::MissingLexicon(res_path)),
        Err(e) => return Err(Error::io(res_path, e)),
    };
    LexiconSet::from_texts(
        &read_optional(dir, "needwords.txt", DEFAULT_NEED)?,
        &read_optional(dir, "availwords.txt", DEFAULT_AVAIL)?,
        &resources,
        &read_optional(dir, "affixes.tsv", DEFAULT_AFFIXES)?,
        &read_optional(dir, "prepositions.txt", DEFAULT_PREPOSITIONS)?,
        &read_optional(dir, "stopwords.txt", DEFAULT_STOPWORDS)?,
        &read_optional(dir, "unigrams.tsv", DEFAULT_UNIGRAMS)?,
        dir,
    )
}

impl LexiconSet {
    /// The lexicon shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_texts(
            DEFAULT_NEED,
            DEFAULT_AVAIL,
            DEFAULT_RESOURCES,
            DEFAULT_AFFIXES,
            DEFAULT_PREPOSITIONS,
            DEFAULT_STOPWORDS,
            DEFAULT_UNIGRAMS,
            Path::new("<builtin>"),
        )
        .expect("built-in lexicon is well formed")
    }

    #[allow(clippy::too_many_arguments)]
    fn from_texts(
        need: &str,
        avail: &str,
        resources: &str,
        affixes: &str,
        prepositions: &str,
        stopwords: &str,
        unigrams: &str,
        dir: &Path,
    ) -> Result<Self> {
        let res_path = dir.join("resources.tsv");
        let mut resources_by_class: BTreeMap<ResourceClass, BTreeSet<String>> = BTreeMap::new();
        let mut resource_index = BTreeMap::new();
        for row in tsv_pairs(resources, &res_path) {
            let (n, class, term) = row?;
            let class: ResourceClass = class.parse().map_err(|e: String| Error::parse(&res_path, n, e))?;
            let term = term.to_lowercase();
            resource_index.entry(term.clone()).or_insert(class);
            resources_by_class.entry(class).or_default().insert(term);
        }
        if resource_index.is_empty() {
            return Err(Error::parse(&res_path, 0, "resource ontology is empty"));
        }

        let aff_path = dir.join("affixes.tsv");
        let mut location_affixes: BTreeMap<AffixType, BTreeSet<String>> = BTreeMap::new();
        for row in tsv_pairs(affixes, &aff_path) {
            let (n, kind, term) = row?;
            let kind: AffixType = kind.parse().map_err(|e: String| Error::parse(&aff_path, n, e))?;
            location_affixes.entry(kind).or_default().insert(term.to_lowercase());
        }

        let uni_path = dir.join("unigrams.tsv");
        let mut unigram_counts = HashMap::new();
        for row in tsv_pairs(unigrams, &uni_path) {
            let (n, word, count) = row?;
            let count: u64 = count
                .parse()
                .map_err(|_| Error::parse(&uni_path, n, format!("bad count {count:?}")))?;
            *unigram_counts.entry(word.to_lowercase()).or_insert(0) += count;
        }

        Ok(LexiconSet {
            need_words: word_set(need),
            availability_words: word_set(avail),
            resources_by_class,
            location_affixes,
            location_prepositions: word_set(prepositions),
            stopwords: word_set(stopwords),
            unigram_counts,
            resource_index,
            affix_patterns: OnceLock::new(),
        })
    }

    pub fn resource_class(&self, term: &str) -> Option<ResourceClass> {
        self.resource_index.get(term).copied()
    }

    pub fn resource_terms(&self) -> impl Iterator<Item = (&str, ResourceClass)> {
        self.resource_index.iter().map(|(t, c)| (t.as_str(), *c))
    }

    pub fn is_need_word(&self, lemma: &str) -> bool {
        self.need_words.contains(&lemma.to_lowercase())
    }

    pub fn is_availability_word(&self, lemma: &str) -> bool {
        self.availability_words.contains(&lemma.to_lowercase())
    }

    pub fn affix_type(&self, word: &str) -> Option<AffixType> {
        let w = word.to_lowercase();
        self.location_affixes
            .iter()
            .find(|(_, terms)| terms.contains(&w))
            .map(|(k, _)| *k)
    }

    pub fn affixes(&self) -> impl Iterator<Item = (AffixType, &str)> {
        self.location_affixes
            .iter()
            .flat_map(|(k, terms)| terms.iter().map(move |t| (*k, t.as_str())))
    }
}

/// Precomputed word-to-resource similarity scores.
#[derive(Debug, Clone)]
pub struct SimilarityOracle {
    table: HashMap<String, Vec<(String, f64)>>,
    pub threshold: f64,
}

impl SimilarityOracle {
    pub fn new(threshold: f64) -> Self {
        SimilarityOracle {
            table: HashMap::new(),
            threshold,
        }
    }

    pub fn builtin(threshold: f64) -> Self {
        Self::parse(DEFAULT_SIMILARITY, Path::new("<builtin>/similarity.tsv"), threshold)
            .expect("built-in similarity table is well formed")
    }

    /// Loads `similarity.tsv` from `dir`, falling back to the built-in table.
    pub fn load(dir: &Path, threshold: f64) -> Result<Self> {
        let text = read_optional(dir, "similarity.tsv", DEFAULT_SIMILARITY)?;
        Self::parse(&text, &dir.join("similarity.tsv"), threshold)
    }

    pub fn parse(text: &str, path: &Path, threshold: f64) -> Result<Self> {
        let mut oracle = Self::new(threshold);
        for (n, line) in content_lines(text) {
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(Error::parse(path, n, "expected word, resource and score"));
            }
            let score: f64 = cols[2]
                .parse()
                .ok()
                .filter(|s: &f64| (0.0..=1.0).contains(s))
                .ok_or_else(|| Error::parse(path, n, format!("score {:?} outside [0, 1]", cols[2])))?;
            oracle.insert(cols[0], cols[1], score);
        }
        Ok(oracle)
    }

    pub fn insert(&mut self, word: &str, resource: &str, score: f64) {
        let entry = self.table.entry(word.to_lowercase()).or_default();
        let resource = resource.to_lowercase();
        if !entry.iter().any(|(r, _)| *r == resource) {
            entry.push((resource, score));
        }
    }

    /// Score for a (word, resource) pair; identical words score 1.
    pub fn score(&self, word: &str, resource: &str) -> Option<f64> {
        let (w, r) = (word.to_lowercase(), resource.to_lowercase());
        if w == r {
            return Some(1.0);
        }
        self.table.get(&w)?.iter().find(|(res, _)| *res == r).map(|(_, s)| *s)
    }

    fn candidates(&self, word: &str) -> &[(String, f64)] {
        self.table.get(word).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Resolves a word or phrase to a resource: an exact list member first, then
/// the best table entry scoring strictly above the threshold. Score ties go
/// to the lexicographically smallest resource term.
pub fn is_resource(term: &str, oracle: &SimilarityOracle, lex: &LexiconSet) -> Option<ResourceMatch> {
    let term = term.trim().to_lowercase();
    if term.is_empty() {
        return None;
    }
    if let Some(class) = lex.resource_class(&term) {
        return Some(ResourceMatch { canonical: term, class });
    }
    let mut best: Option<(&str, f64)> = None;
    for (res, score) in oracle.candidates(&term) {
        if *score <= oracle.threshold || lex.resource_class(res).is_none() {
            continue;
        }
        let better = match best {
            None => true,
            Some((b, s)) => *score > s || (*score == s && res.as_str() < b),
        };
        if better {
            best = Some((res, *score));
        }
    }
    best.map(|(res, _)| ResourceMatch {
        canonical: res.to_string(),
        class: lex.resource_class(res).unwrap(),
    })
}

const UNITS: [&str; 20] = [
    "zero",
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "ten",
    "eleven",
    "twelve",
    "thirteen",
    "fourteen",
    "fifteen",
    "sixteen",
    "seventeen",
    "eighteen",
    "nineteen",
];
const TENS: [&str; 8] = [
    "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

fn number_word(w: &str) -> Option<u64> {
    if let Some(i) = UNITS.iter().position(|u| *u == w) {
        return Some(i as u64);
    }
    if let Some(i) = TENS.iter().position(|t| *t == w) {
        return Some(20 + 10 * i as u64);
    }
    match w {
        "a" | "an" => Some(1),
        "dozen" | "dozens" => Some(12),
        "hundred" | "hundreds" => Some(100),
        "thousand" | "thousands" => Some(1_000),
        "lakh" | "lakhs" => Some(100_000),
        "million" | "millions" => Some(1_000_000),
        _ => None,
    }
}

fn is_scale(v: u64) -> bool {
    matches!(v, 12 | 100 | 1_000 | 100_000 | 1_000_000)
}

fn parse_number_words(words: &[&str]) -> Option<u64> {
    // A lone article is not a number.
    if words.iter().all(|w| *w == "a" || *w == "an") {
        return None;
    }
    let mut total: u64 = 0;
    let mut current: u64 = 0;
    let mut seen = false;
    for w in words {
        if *w == "and" && seen {
            continue;
        }
        let v = number_word(w)?;
        seen = true;
        if is_scale(v) {
            let base = if current == 0 { 1 } else { current };
            if v >= 1_000 {
                total = total.saturating_add(base.saturating_mul(v));
                current = 0;
            } else {
                current = base.saturating_mul(v);
            }
        } else {
            current = current.saturating_add(v);
        }
    }
    seen.then(|| total.saturating_add(current))
}

fn parse_digits(s: &str) -> Option<u64> {
    let digits: String = s.chars().filter(|c| *c != ',').collect();
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if s.starts_with(',') || s.ends_with(',') || s.contains(",,") {
        return None;
    }
    Some(digits.parse::<u64>().unwrap_or(u64::MAX))
}

/// Parses a numeric token: digit strings with optional thousands commas, number
/// words up to "million", and hyphen/space compounds of them. Ranges and
/// fractions ("2-3", "1.5", "1/2") resolve to their first number.
pub fn is_numeric_token(token: &str) -> Option<u64> {
    let t = token.trim().trim_end_matches('+').trim_end_matches("'s").to_lowercase();
    if t.is_empty() {
        return None;
    }
    if let Some(v) = parse_digits(&t) {
        return Some(v);
    }
    if t.starts_with(|c: char| c.is_ascii_digit()) {
        let first: String = t.chars().take_while(|c| c.is_ascii_digit() || *c == ',').collect();
        let rest = &t[first.len()..];
        let range_like = rest.starts_with(['-', '.', '/', '\u{2013}'])
            && rest[1..].chars().next().is_some_and(|c| c.is_ascii_digit());
        if range_like {
            return parse_digits(&first);
        }
        return None;
    }
    let words: Vec<&str> = t.split(['-', ' ']).filter(|w| !w.is_empty()).collect();
    parse_number_words(&words)
}

/// True for a word that can take part in a spelled-out number.
pub fn is_number_word(token: &str) -> bool {
    let t = token.to_lowercase();
    t != "a" && t != "an" && number_word(&t).is_some()
}
