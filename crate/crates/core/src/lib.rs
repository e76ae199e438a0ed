//! Extraction of resource needs and availabilities from disaster-time
//! tweets, and ranking of availabilities against needs.
//!
//! The pipeline runs in four stages, each usable on its own:
//! [`corpus`] cleans and deduplicates raw tweets, [`extraction`] turns
//! annotated tweets into [`ExtractedRecord`]s, [`matching`] ranks
//! availabilities for each need, and [`evaluation`] scores rankings
//! against human judgments.

pub mod annotation;
pub mod config;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod extraction;
pub mod geo;
pub mod jsonl;
pub mod lexicons;
pub mod matching;

pub use annotation::{AnnotatedTweet, Entity, Token};
pub use config::EventConfig;
pub use corpus::{Tweet, TweetKind};
pub use embeddings::{EmbeddingTable, Flavor};
pub use error::{Error, Result};
pub use evaluation::{EvalReport, Judgments};
pub use extraction::{ExtractedRecord, Extractor, Mode};
pub use geo::{BoundingBox, Coordinates, Gazetteer};
pub use lexicons::{LexiconSet, ResourceClass, SimilarityOracle};
pub use matching::{MatchResult, Method, MethodConfig};
