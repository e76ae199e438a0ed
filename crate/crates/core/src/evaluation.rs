//! Precision@k, recall and F-score over judged matches.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::ExtractedRecord;
use crate::geo::min_distance_km;
use crate::matching::{MatchResult, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Correct,
    Incorrect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub need_id: String,
    pub avail_id: String,
    pub label: Label,
}

/// Judgments keyed by (need id, availability id).
#[derive(Debug, Clone, Default)]
pub struct Judgments {
    labels: HashMap<(String, String), Label>,
}

impl Judgments {
    pub fn from_rows(rows: impl IntoIterator<Item = Judgment>) -> Result<Self> {
        let mut labels = HashMap::new();
        for j in rows {
            let key = (j.need_id.clone(), j.avail_id.clone());
            if labels.insert(key, j.label).is_some() {
                return Err(Error::Invalid(format!(
                    "duplicate judgment for ({}, {})",
                    j.need_id, j.avail_id
                )));
            }
        }
        Ok(Judgments { labels })
    }

    /// Reads a "need_id,avail_id,label" CSV with a header row.
    pub fn load(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let headers = reader
            .headers()
            .map_err(|e| Error::parse(path, 1, e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["need_id", "avail_id", "label"] {
            return Err(Error::parse(path, 1, "header must be need_id,avail_id,label"));
        }
        let mut rows = Vec::new();
        for (i, row) in reader.deserialize::<Judgment>().enumerate() {
            rows.push(row.map_err(|e| Error::parse(path, i + 2, e.to_string()))?);
        }
        Self::from_rows(rows)
    }

    pub fn get(&self, need_id: &str, avail_id: &str) -> Option<Label> {
        self.labels.get(&(need_id.to_string(), avail_id.to_string())).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub retrieved: usize,
    pub correct: usize,
    pub unjudged: usize,
    pub needs: usize,
    pub needs_hit: usize,
}

pub fn count(results: &[MatchResult], judgments: &Judgments) -> Result<Counts> {
    let mut c = Counts {
        needs: results.len(),
        ..Counts::default()
    };
    for r in results {
        let mut hit = false;
        for m in &r.ranked {
            c.retrieved += 1;
            match judgments.get(&r.need_id, &m.avail_id) {
                Some(Label::Correct) => {
                    c.correct += 1;
                    hit = true;
                }
                Some(Label::Incorrect) => {}
                None => c.unjudged += 1,
            }
        }
        c.needs_hit += usize::from(hit);
    }
    if c.retrieved == 0 {
        return Err(Error::EmptyEvaluation("no retrieved pairs".into()));
    }
    Ok(c)
}

/// Share of retrieved pairs judged correct; unjudged pairs count as incorrect.
pub fn precision_at_k(results: &[MatchResult], judgments: &Judgments) -> Result<f64> {
    let c = count(results, judgments)?;
    Ok(c.correct as f64 / c.retrieved as f64)
}

/// Share of needs with at least one correct pair in their list.
pub fn recall_any(results: &[MatchResult], judgments: &Judgments) -> Result<f64> {
    let c = count(results, judgments)?;
    Ok(c.needs_hit as f64 / c.needs as f64)
}

/// Harmonic mean; 0 when either input is 0.
pub fn f_score(precision: f64, recall: f64) -> f64 {
    if precision <= 0.0 || recall <= 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: Method,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub judged_pairs: usize,
    pub unjudged_pairs: usize,
}

impl EvalReport {
    /// All three metrics from integer counts. The F-score is computed as
    /// 2·c·h / (c·N + h·R) so it rounds only once.
    pub fn from_counts(method: Method, c: &Counts) -> Self {
        let precision = c.correct as f64 / c.retrieved as f64;
        let recall = c.needs_hit as f64 / c.needs as f64;
        let denom = c.correct * c.needs + c.needs_hit * c.retrieved;
        let f = if c.correct == 0 || c.needs_hit == 0 {
            0.0
        } else {
            (2 * c.correct * c.needs_hit) as f64 / denom as f64
        };
        EvalReport {
            method,
            precision,
            recall,
            f_score: f,
            judged_pairs: c.retrieved - c.unjudged,
            unjudged_pairs: c.unjudged,
        }
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<10} {:>9} {:>9} {:>9} {:>8} {:>10}",
            "method", "precision", "recall", "f_score", "judged", "unjudged"
        )?;
        write!(
            f,
            "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>8} {:>10}",
            self.method.as_str(),
            self.precision,
            self.recall,
            self.f_score,
            self.judged_pairs,
            self.unjudged_pairs
        )
    }
}

/// Evaluates results that all come from one method.
pub fn evaluate(results: &[MatchResult], judgments: &Judgments) -> Result<EvalReport> {
    let method = results
        .first()
        .map(|r| r.method)
        .ok_or_else(|| Error::EmptyEvaluation("no match results".into()))?;
    if results.iter().any(|r| r.method != method) {
        return Err(Error::Invalid("results mix several methods".into()));
    }
    Ok(EvalReport::from_counts(method, &count(results, judgments)?))
}

/// Whether the closest pair of places lies strictly within `threshold_km`.
/// `None` when either record has no coordinates.
pub fn geo_correct(need: &ExtractedRecord, avail: &ExtractedRecord, threshold_km: f64) -> Option<bool> {
    min_distance_km(&need.coordinates(), &avail.coordinates()).map(|d| d < threshold_km)
}
