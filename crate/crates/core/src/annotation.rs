//! Annotated tweets: tokens with POS tags and dependency arcs plus entity spans.

use std::collections::VecDeque;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::TweetKind;
use crate::error::Result;
use crate::jsonl;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    #[serde(rename = "t")]
    pub text: String,
    pub lemma: String,
    pub pos: String,
    pub head: i64,
    pub deprel: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityKind {
    Gpe,
    Loc,
    Facility,
    Person,
    Norp,
    Org,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub start: usize,
    pub end: usize,
    pub label: String,
}

impl Entity {
    pub fn kind(&self) -> EntityKind {
        match self.label.to_ascii_uppercase().as_str() {
            "GPE" => EntityKind::Gpe,
            "LOC" => EntityKind::Loc,
            "FACILITY" | "FAC" => EntityKind::Facility,
            "PERSON" => EntityKind::Person,
            "NORP" => EntityKind::Norp,
            "ORG" => EntityKind::Org,
            _ => EntityKind::Other,
        }
    }

    pub fn is_geo(&self) -> bool {
        matches!(self.kind(), EntityKind::Gpe | EntityKind::Loc | EntityKind::Facility)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedTweet {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub kind: TweetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    #[serde(default)]
    pub tokens: Vec<Token>,
    #[serde(default)]
    pub entities: Vec<Entity>,
    #[serde(default)]
    pub degraded: bool,
}

/// Strips a relation subtype: "nsubj:pass" becomes "nsubj".
pub fn base_relation(deprel: &str) -> &str {
    deprel.split(':').next().unwrap_or(deprel)
}

impl Token {
    pub fn is_noun(&self) -> bool {
        self.pos == "NOUN" || self.pos == "PROPN"
    }

    pub fn is_propn(&self) -> bool {
        self.pos == "PROPN"
    }

    pub fn lower(&self) -> String {
        self.text.to_lowercase()
    }

    pub fn lemma_lower(&self) -> String {
        self.lemma.to_lowercase()
    }
}

impl AnnotatedTweet {
    /// Checks arc ranges, acyclicity and entity bounds. Degraded records
    /// skip the arc checks since they carry no parse.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let n = self.tokens.len();
        if !self.degraded {
            for (i, t) in self.tokens.iter().enumerate() {
                if t.head < -1 || t.head >= n as i64 || t.head == i as i64 {
                    return Err(format!("token {i} has invalid head {}", t.head));
                }
            }
            for i in 0..n {
                let mut cur = i;
                let mut steps = 0;
                while self.tokens[cur].head >= 0 {
                    cur = self.tokens[cur].head as usize;
                    steps += 1;
                    if steps > n {
                        return Err(format!("cycle through token {i}"));
                    }
                }
            }
            if n > 0 && !self.tokens.iter().any(|t| t.head == -1) {
                return Err("no root".into());
            }
        }
        let mut spans: Vec<(usize, usize)> = self.entities.iter().map(|e| (e.start, e.end)).collect();
        spans.sort();
        for (s, e) in &spans {
            if s >= e || *e > n {
                return Err(format!("entity span {s}..{e} out of bounds"));
            }
        }
        if spans.windows(2).any(|w| w[0].1 > w[1].0) {
            return Err("overlapping entity spans".into());
        }
        Ok(())
    }

    pub fn surface(&self, start: usize, end: usize) -> String {
        self.tokens[start..end]
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Reads annotated JSONL. Unparseable or invalid records are skipped and counted.
pub fn read_annotated(path: &Path) -> Result<jsonl::Loaded<AnnotatedTweet>> {
    let mut loaded = jsonl::read_lenient::<AnnotatedTweet>(path)?;
    let before = loaded.records.len();
    loaded.records.retain(|t| match t.validate() {
        Ok(()) => true,
        Err(e) => {
            log::warn!("{}: record {} rejected: {e}", path.display(), t.id);
            false
        }
    });
    loaded.malformed += before - loaded.records.len();
    Ok(loaded)
}

/// Adjacency view over a parsed tweet.
#[derive(Debug, Clone)]
pub struct Tree<'a> {
    pub tweet: &'a AnnotatedTweet,
    children: Vec<Vec<usize>>,
}

impl<'a> Tree<'a> {
    pub fn new(tweet: &'a AnnotatedTweet) -> Self {
        let mut children = vec![Vec::new(); tweet.tokens.len()];
        if !tweet.degraded {
            for (i, t) in tweet.tokens.iter().enumerate() {
                if t.head >= 0 && (t.head as usize) < children.len() {
                    children[t.head as usize].push(i);
                }
            }
        }
        Tree { tweet, children }
    }

    pub fn tokens(&self) -> &'a [Token] {
        &self.tweet.tokens
    }

    pub fn len(&self) -> usize {
        self.tweet.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweet.tokens.is_empty()
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn head(&self, i: usize) -> Option<usize> {
        let h = self.tweet.tokens[i].head;
        (!self.tweet.degraded && h >= 0).then_some(h as usize)
    }

    pub fn roots(&self) -> Vec<usize> {
        if self.tweet.degraded {
            return Vec::new();
        }
        (0..self.len()).filter(|&i| self.tweet.tokens[i].head == -1).collect()
    }

    /// Arc distances from `from` to every token, treating arcs as undirected.
    /// Tokens in other sentences stay at `usize::MAX`.
    pub fn distances(&self, from: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(cur) = queue.pop_front() {
            let next = self.children[cur].iter().copied().chain(self.head(cur));
            for nb in next.collect::<Vec<_>>() {
                if dist[nb] == usize::MAX {
                    dist[nb] = dist[cur] + 1;
                    queue.push_back(nb);
                }
            }
        }
        dist
    }

    /// The token plus its contiguous left dependents whose relation is one of `rels`.
    pub fn phrase(&self, head: usize, rels: &[&str]) -> (usize, usize) {
        let mut start = head;
        while start > 0 {
            let prev = start - 1;
            let t = &self.tweet.tokens[prev];
            if self.head(prev).is_some_and(|h| h >= start && h <= head) && rels.contains(&base_relation(&t.deprel)) {
                start = prev;
            } else {
                break;
            }
        }
        (start, head + 1)
    }
}
