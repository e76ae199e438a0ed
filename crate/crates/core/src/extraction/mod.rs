//! Structured records from annotated tweets.

mod baseline;
mod contacts;
mod quantities;
mod resources;
mod sources;

pub use baseline::baseline_resources;
pub use contacts::{extract_contacts, Contact, ContactKind};
pub use quantities::extract_quantities;
pub use resources::{
    extract_potential_resources, extract_resources, Degraded, HeadWordSet, PotentialResources, ResourceMention,
};
pub use sources::{baseline_sources, extract_sources, Exclusions};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::AnnotatedTweet;
use crate::corpus::TweetKind;
use crate::geo::{
    propose_candidates, verify, CandidateSettings, Coordinates, Gazetteer, Granularity, LocationCandidate, Origin,
    Verification,
};
use crate::lexicons::{LexiconSet, SimilarityOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Need,
    Availability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Proposed,
    Baseline,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "proposed" => Ok(Mode::Proposed),
            "baseline" => Ok(Mode::Baseline),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationMention {
    pub surface: String,
    pub coordinates: Option<Coordinates>,
    pub granularity: Granularity,
    /// True when the gazetteer hit lies outside the event bounding box.
    #[serde(default)]
    pub outside_box: bool,
    #[serde(skip)]
    pub span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedRecord {
    pub tweet_id: String,
    pub kind: RecordKind,
    pub resources: Vec<ResourceMention>,
    pub locations: Vec<LocationMention>,
    pub sources: Vec<String>,
    pub contacts: Vec<Contact>,
    pub method: Mode,
    /// The tweet carries both a need cue and an availability cue.
    #[serde(default)]
    pub dual_cue: bool,
}

impl ExtractedRecord {
    pub fn coordinates(&self) -> Vec<Coordinates> {
        self.locations.iter().filter_map(|l| l.coordinates).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionSettings {
    pub quantity_window: usize,
    pub candidates: CandidateSettings,
}

impl Default for ExtractionSettings {
    fn default() -> Self {
        ExtractionSettings {
            quantity_window: 3,
            candidates: CandidateSettings::default(),
        }
    }
}

/// Everything extraction reads; immutable and shareable across threads.
#[derive(Debug, Clone, Copy)]
pub struct Extractor<'a> {
    pub lex: &'a LexiconSet,
    pub oracle: &'a SimilarityOracle,
    pub gazetteer: &'a Gazetteer,
    pub settings: ExtractionSettings,
}

fn cue_counts(tweet: &AnnotatedTweet, lex: &LexiconSet) -> (usize, usize) {
    let need = tweet
        .tokens
        .iter()
        .filter(|t| lex.is_need_word(&t.lemma) || lex.is_need_word(&t.text))
        .count();
    let avail = tweet
        .tokens
        .iter()
        .filter(|t| lex.is_availability_word(&t.lemma) || lex.is_availability_word(&t.text))
        .count();
    (need, avail)
}

fn located(v: &Verification) -> Vec<LocationMention> {
    v.verified
        .iter()
        .map(|l| LocationMention {
            surface: l.candidate.surface.clone(),
            coordinates: Some(l.entry.coordinates()),
            granularity: l.entry.granularity,
            outside_box: l.outside_box,
            span: l.candidate.token_span,
        })
        .collect()
}

fn exclusions(resources: &[ResourceMention], locations: &[LocationMention]) -> Exclusions {
    let mut ex = Exclusions::default();
    for r in resources {
        ex.spans.push(r.span);
        ex.strings.insert(r.term.to_lowercase());
    }
    for l in locations {
        ex.spans.push(l.span);
        ex.strings.insert(l.surface.to_lowercase());
    }
    ex
}

impl Extractor<'_> {
    /// Extracts every tweet in parallel, preserving input order.
    pub fn extract_all(&self, tweets: &[AnnotatedTweet], mode: Mode) -> Vec<ExtractedRecord> {
        tweets.par_iter().map(|t| self.extract(t, mode)).collect()
    }

    /// Builds a record. Proposed mode falls back to baseline for tweets
    /// without a parse, recording `method = baseline`.
    pub fn extract(&self, tweet: &AnnotatedTweet, mode: Mode) -> ExtractedRecord {
        let (need_cues, avail_cues) = cue_counts(tweet, self.lex);
        let kind = match tweet.kind {
            TweetKind::Need => RecordKind::Need,
            TweetKind::Availability => RecordKind::Availability,
            TweetKind::Unlabeled if avail_cues > need_cues => RecordKind::Availability,
            TweetKind::Unlabeled => RecordKind::Need,
        };
        let potential = match mode {
            Mode::Proposed => extract_potential_resources(tweet, self.lex).ok(),
            Mode::Baseline => None,
        };
        if mode == Mode::Proposed && potential.is_none() {
            log::info!("{}: no usable parse, using baseline extraction", tweet.id);
        }

        let (resources, locations, sources, method) = match potential {
            Some(p) => {
                let mut resources = extract_resources(tweet, &p, self.lex, self.oracle);
                extract_quantities(tweet, &mut resources, self.settings.quantity_window);
                let candidates = propose_candidates(tweet, self.lex, &self.settings.candidates);
                let v = verify(&candidates, self.gazetteer, self.lex);
                let locations = located(&v);
                let sources = extract_sources(tweet, &p.heads, &v.unverified, &exclusions(&resources, &locations));
                (resources, locations, sources, Mode::Proposed)
            }
            None => {
                let mut resources = baseline_resources(tweet, self.lex, self.oracle);
                extract_quantities(tweet, &mut resources, self.settings.quantity_window);
                let candidates: Vec<LocationCandidate> = tweet
                    .entities
                    .iter()
                    .filter(|e| e.is_geo() && e.start < e.end && e.end <= tweet.tokens.len())
                    .map(|e| LocationCandidate {
                        surface: tweet.surface(e.start, e.end),
                        origin: Origin::Entity,
                        token_span: (e.start, e.end),
                    })
                    .collect();
                let v = verify(&candidates, self.gazetteer, self.lex);
                let locations = located(&v);
                let sources = baseline_sources(tweet, &v.unverified, &exclusions(&resources, &locations));
                (resources, locations, sources, Mode::Baseline)
            }
        };

        ExtractedRecord {
            tweet_id: tweet.id.clone(),
            kind,
            resources,
            locations,
            sources,
            contacts: extract_contacts(&tweet.text),
            method,
            dual_cue: need_cues > 0 && avail_cues > 0,
        }
    }
}

/// Convenience wrapper around [`Extractor::extract`] with default settings.
pub fn extract_record(
    tweet: &AnnotatedTweet,
    lex: &LexiconSet,
    oracle: &SimilarityOracle,
    gazetteer: &Gazetteer,
    mode: Mode,
) -> ExtractedRecord {
    Extractor {
        lex,
        oracle,
        gazetteer,
        settings: ExtractionSettings::default(),
    }
    .extract(tweet, mode)
}
