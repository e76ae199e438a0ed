//! Scoring and ranking availability records against needs.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::AnnotatedTweet;
use crate::corpus::content_words;
use crate::embeddings::{average_vector, cosine, EmbeddingTable, Flavor};
use crate::error::{Error, Result};
use crate::extraction::ExtractedRecord;
use crate::geo::{min_distance_km, proximity_score, BoundingBox};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    P1,
    P2a,
    P2b,
    B1,
    B2,
    B3,
    B4a,
    B4b,
    B4c,
    #[serde(rename = "combined")]
    Combined,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::P1,
        Method::P2a,
        Method::P2b,
        Method::B1,
        Method::B2,
        Method::B3,
        Method::B4a,
        Method::B4b,
        Method::B4c,
        Method::Combined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::P1 => "P1",
            Method::P2a => "P2a",
            Method::P2b => "P2b",
            Method::B1 => "B1",
            Method::B2 => "B2",
            Method::B3 => "B3",
            Method::B4a => "B4a",
            Method::B4b => "B4b",
            Method::B4c => "B4c",
            Method::Combined => "combined",
        }
    }

    /// Methods scoring extracted records rather than tweet text.
    pub fn uses_records(self) -> bool {
        matches!(self, Method::P1 | Method::P2a | Method::P2b | Method::Combined)
    }

    pub fn flavor(self) -> Option<Flavor> {
        match self {
            Method::P2a | Method::B3 => Some(Flavor::Local),
            Method::P2b | Method::B4c | Method::Combined => Some(Flavor::PretrainedCrisis),
            Method::B4a => Some(Flavor::PretrainedGeneral),
            Method::B4b => Some(Flavor::Paraphrase),
            Method::P1 | Method::B1 | Method::B2 => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Method::ALL.iter().map(|m| m.as_str()).collect();
                format!("unknown method {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodConfig {
    pub method: Method,
    pub k: usize,
    pub resource_weight: f64,
    pub proximity_weight: f64,
}

impl MethodConfig {
    pub fn new(method: Method) -> Self {
        MethodConfig {
            method,
            k: 5,
            resource_weight: 0.5,
            proximity_weight: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        let w = [self.resource_weight, self.proximity_weight];
        if w.iter().any(|x| !(0.0..=1.0).contains(x)) || (w[0] + w[1] - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "weights must be fractions summing to 1, got {w:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedMatch {
    pub avail_id: String,
    #[serde(rename = "total")]
    pub total_score: f64,
    #[serde(rename = "resource")]
    pub resource_score: f64,
    #[serde(rename = "proximity")]
    pub proximity_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub need_id: String,
    pub method: Method,
    pub ranked: Vec<RankedMatch>,
}

/// One side of a pair: an extracted record, the annotated tweet, or both.
#[derive(Debug, Clone)]
pub struct MatchItem {
    pub id: String,
    pub record: Option<ExtractedRecord>,
    pub tweet: Option<AnnotatedTweet>,
}

impl MatchItem {
    pub fn from_record(record: ExtractedRecord) -> Self {
        MatchItem {
            id: record.tweet_id.clone(),
            record: Some(record),
            tweet: None,
        }
    }

    pub fn from_tweet(tweet: AnnotatedTweet) -> Self {
        MatchItem {
            id: tweet.id.clone(),
            record: None,
            tweet: Some(tweet),
        }
    }
}

/// Shared read-only inputs for scoring.
#[derive(Debug, Clone, Default)]
pub struct MatchContext {
    pub vectors: HashMap<Flavor, EmbeddingTable>,
    pub bbox: Option<BoundingBox>,
    pub stopwords: HashSet<String>,
}

// ---------------------------------------------------------------- resources

fn canonical_set(r: &ExtractedRecord) -> BTreeSet<&str> {
    r.resources.iter().map(|m| m.canonical.as_str()).collect()
}

/// Share of the need's resources that the availability also offers.
/// `None` when the need has no resources.
pub fn score_p1(need: &ExtractedRecord, avail: &ExtractedRecord) -> Option<f64> {
    let n = canonical_set(need);
    if n.is_empty() {
        return None;
    }
    let a = canonical_set(avail);
    Some(n.intersection(&a).count() as f64 / n.len() as f64)
}

/// Words used to build a record's resource vector: each term's own words
/// when any is in the vocabulary, otherwise its canonical term's words.
fn resource_words(r: &ExtractedRecord, table: &EmbeddingTable) -> Vec<String> {
    let mut out = Vec::new();
    for m in &r.resources {
        let own: Vec<String> = m.term.split_whitespace().map(str::to_string).collect();
        if own.iter().any(|w| table.get(w).is_some()) {
            out.extend(own);
        } else {
            out.extend(m.canonical.split_whitespace().map(str::to_string));
        }
    }
    out
}

/// Outcome of an embedding comparison. `flagged` marks a side with no
/// in-vocabulary words, in which case the score is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub score: f64,
    pub flagged: bool,
}

/// Cosine of averaged resource vectors, floored at 0 so resource scores stay in [0, 1].
pub fn score_resource_embedding(need: &ExtractedRecord, avail: &ExtractedRecord, table: &EmbeddingTable) -> Similarity {
    let a = average_vector(&resource_words(need, table), table);
    let b = average_vector(&resource_words(avail, table), table);
    match (a, b) {
        (Some(a), Some(b)) => Similarity {
            score: cosine(&a, &b).unwrap_or(0.0).max(0.0),
            flagged: false,
        },
        _ => Similarity {
            score: 0.0,
            flagged: true,
        },
    }
}

// ---------------------------------------------------------------- tweet text

fn nouns(t: &AnnotatedTweet) -> BTreeSet<String> {
    t.tokens.iter().filter(|t| t.is_noun()).map(|t| t.lower()).collect()
}

/// Share of the need tweet's nouns that also occur in the availability tweet.
pub fn score_b1(need: &AnnotatedTweet, avail: &AnnotatedTweet) -> f64 {
    let n = nouns(need);
    if n.is_empty() {
        return 0.0;
    }
    n.intersection(&nouns(avail)).count() as f64 / n.len() as f64
}

/// Document frequencies over a corpus.
#[derive(Debug, Clone, Default)]
pub struct TfIdfModel {
    pub documents: usize,
    pub df: HashMap<String, usize>,
}

impl TfIdfModel {
    pub fn fit<S: AsRef<str>>(docs: &[Vec<S>]) -> Self {
        let mut df: HashMap<String, usize> = HashMap::new();
        for d in docs {
            let unique: HashSet<&str> = d.iter().map(AsRef::as_ref).collect();
            for t in unique {
                *df.entry(t.to_string()).or_default() += 1;
            }
        }
        TfIdfModel {
            documents: docs.len(),
            df,
        }
    }

    pub fn idf(&self, term: &str) -> f64 {
        match self.df.get(term) {
            Some(&df) if df > 0 => (self.documents as f64 / df as f64).ln(),
            _ => 0.0,
        }
    }

    /// Raw term count times ln(N / df).
    pub fn weights<S: AsRef<str>>(&self, doc: &[S]) -> HashMap<String, f64> {
        let mut tf: HashMap<String, f64> = HashMap::new();
        for t in doc {
            *tf.entry(t.as_ref().to_string()).or_default() += 1.0;
        }
        tf.into_iter()
            .map(|(t, c)| {
                let w = c * self.idf(&t);
                (t, w)
            })
            .collect()
    }
}

/// Cosine of two TF-IDF vectors.
pub fn score_tfidf<S: AsRef<str>>(need: &[S], avail: &[S], model: &TfIdfModel) -> f64 {
    let a = model.weights(need);
    let b = model.weights(avail);
    let dot: f64 = a.iter().filter_map(|(t, x)| b.get(t).map(|y| x * y)).sum();
    let na: f64 = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(0.0, 1.0)
}

/// Cosine of averaged word vectors over all tokens.
pub fn score_tweet_embedding<S: AsRef<str>>(need: &[S], avail: &[S], table: &EmbeddingTable) -> Similarity {
    match (average_vector(need, table), average_vector(avail, table)) {
        (Some(a), Some(b)) => Similarity {
            score: cosine(&a, &b).unwrap_or(0.0),
            flagged: false,
        },
        _ => Similarity {
            score: 0.0,
            flagged: true,
        },
    }
}

pub fn tweet_terms(t: &AnnotatedTweet, stopwords: &HashSet<String>) -> Vec<String> {
    content_words(&t.text, stopwords).collect()
}

// ---------------------------------------------------------------- combined

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedScore {
    pub total: f64,
    pub resource: f64,
    pub proximity: f64,
}

/// Weighted sum of a resource score and a proximity score.
pub fn combine(resource: f64, proximity: f64, cfg: &MethodConfig) -> f64 {
    cfg.resource_weight * resource + cfg.proximity_weight * proximity
}

/// Resource similarity plus proximity of the closest location pair. `None`
/// when either record has no located place.
pub fn score_combined(
    need: &ExtractedRecord,
    avail: &ExtractedRecord,
    table: &EmbeddingTable,
    bbox: &BoundingBox,
    cfg: &MethodConfig,
) -> Option<CombinedScore> {
    let d = min_distance_km(&need.coordinates(), &avail.coordinates())?;
    let resource = score_resource_embedding(need, avail, table).score;
    let proximity = proximity_score(d, bbox);
    Some(CombinedScore {
        total: combine(resource, proximity, cfg),
        resource,
        proximity,
    })
}

// ---------------------------------------------------------------- ranking

/// Sorts by descending total, ascending availability id, and keeps `k`.
pub fn sort_and_truncate(ranked: &mut Vec<RankedMatch>, k: usize) {
    ranked.sort_by(|a, b| {
        b.total_score
            .total_cmp(&a.total_score)
            .then_with(|| a.avail_id.cmp(&b.avail_id))
    });
    ranked.truncate(k);
}

/// Scorer prepared for one method over one need/availability collection.
pub struct Ranker<'a> {
    cfg: MethodConfig,
    ctx: &'a MatchContext,
    table: Option<&'a EmbeddingTable>,
    tfidf: Option<TfIdfModel>,
}

impl<'a> Ranker<'a> {
    /// Checks that the method's inputs exist. B2 fits document frequencies
    /// over the union of `needs` and `avails`.
    pub fn new(cfg: MethodConfig, ctx: &'a MatchContext, needs: &[MatchItem], avails: &[MatchItem]) -> Result<Self> {
        cfg.validate()?;
        let table = match cfg.method.flavor() {
            Some(f) => Some(ctx.vectors.get(&f).ok_or_else(|| {
                Error::MethodUnavailable(
                    cfg.method.to_string(),
                    format!("no {} vector file configured", f.as_str()),
                )
            })?),
            None => None,
        };
        if cfg.method == Method::Combined && ctx.bbox.is_none() {
            return Err(Error::MethodUnavailable(
                "combined".into(),
                "no bounding box configured".into(),
            ));
        }
        let side = if cfg.method.uses_records() {
            "extracted records"
        } else {
            "annotated tweets"
        };
        let complete = needs.iter().chain(avails).all(|i| {
            if cfg.method.uses_records() {
                i.record.is_some()
            } else {
                i.tweet.is_some()
            }
        });
        if !complete {
            return Err(Error::MethodUnavailable(
                cfg.method.to_string(),
                format!("requires {side} for every input"),
            ));
        }
        let tfidf = (cfg.method == Method::B2).then(|| {
            let docs: Vec<Vec<String>> = needs
                .iter()
                .chain(avails)
                .filter_map(|i| i.tweet.as_ref())
                .map(|t| tweet_terms(t, &ctx.stopwords))
                .collect();
            TfIdfModel::fit(&docs)
        });
        Ok(Ranker { cfg, ctx, table, tfidf })
    }

    /// Scores one pair; `None` excludes it from the ranking.
    pub fn score(&self, need: &MatchItem, avail: &MatchItem) -> Option<RankedMatch> {
        let entry = |total: f64, resource: f64, proximity: Option<f64>| RankedMatch {
            avail_id: avail.id.clone(),
            total_score: total,
            resource_score: resource,
            proximity_score: proximity,
        };
        let stop = &self.ctx.stopwords;
        match self.cfg.method {
            Method::P1 => {
                let s = score_p1(need.record.as_ref()?, avail.record.as_ref()?)?;
                Some(entry(s, s, None))
            }
            Method::P2a | Method::P2b => {
                let s = score_resource_embedding(need.record.as_ref()?, avail.record.as_ref()?, self.table?);
                Some(entry(s.score, s.score, None))
            }
            Method::Combined => {
                let c = score_combined(
                    need.record.as_ref()?,
                    avail.record.as_ref()?,
                    self.table?,
                    self.ctx.bbox.as_ref()?,
                    &self.cfg,
                )?;
                Some(entry(c.total, c.resource, Some(c.proximity)))
            }
            Method::B1 => {
                let s = score_b1(need.tweet.as_ref()?, avail.tweet.as_ref()?);
                Some(entry(s, s, None))
            }
            Method::B2 => {
                let a = tweet_terms(need.tweet.as_ref()?, stop);
                let b = tweet_terms(avail.tweet.as_ref()?, stop);
                let s = score_tfidf(&a, &b, self.tfidf.as_ref()?);
                Some(entry(s, s, None))
            }
            Method::B3 | Method::B4a | Method::B4b | Method::B4c => {
                let a = tweet_terms(need.tweet.as_ref()?, stop);
                let b = tweet_terms(avail.tweet.as_ref()?, stop);
                let s = score_tweet_embedding(&a, &b, self.table?);
                Some(entry(s.score, s.score, None))
            }
        }
    }

    pub fn rank(&self, need: &MatchItem, avails: &[MatchItem]) -> MatchResult {
        let mut ranked = Vec::new();
        let skip = self.cfg.method == Method::P1 && need.record.as_ref().is_some_and(|r| r.resources.is_empty());
        if skip {
            log::warn!("{}: need has no resources, skipped for P1", need.id);
        } else {
            ranked = avails.par_iter().filter_map(|a| self.score(need, a)).collect();
            sort_and_truncate(&mut ranked, self.cfg.k);
        }
        MatchResult {
            need_id: need.id.clone(),
            method: self.cfg.method,
            ranked,
        }
    }
}

/// Ranks availabilities for every need.
pub fn rank_all(
    needs: &[MatchItem],
    avails: &[MatchItem],
    cfg: MethodConfig,
    ctx: &MatchContext,
) -> Result<Vec<MatchResult>> {
    let ranker = Ranker::new(cfg, ctx, needs, avails)?;
    Ok(needs.par_iter().map(|n| ranker.rank(n, avails)).collect())
}

/// Ranks availabilities for one need.
pub fn rank(need: &MatchItem, avails: &[MatchItem], cfg: MethodConfig, ctx: &MatchContext) -> Result<MatchResult> {
    let ranker = Ranker::new(cfg, ctx, std::slice::from_ref(need), avails)?;
    Ok(ranker.rank(need, avails))
}

pub fn write_report_tsv(path: &Path, results: &[MatchResult]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "need_id\tmethod\trank\tavail_id\ttotal\tresource\tproximity")?;
        for r in results {
            for (i, m) in r.ranked.iter().enumerate() {
                let prox = m
                    .proximity_score
                    .map(|p| format!("{p:.4}"))
                    .unwrap_or_else(|| "-".into());
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{}",
                    r.need_id,
                    r.method,
                    i + 1,
                    m.avail_id,
                    m.total_score,
                    m.resource_score,
                    prox
                )?;
            }
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}
