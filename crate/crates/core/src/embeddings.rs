//! Word-vector tables in the plain-text word2vec format.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Local,
    PretrainedCrisis,
    PretrainedGeneral,
    Paraphrase,
}

impl Flavor {
    pub const ALL: [Flavor; 4] = [
        Flavor::Local,
        Flavor::PretrainedCrisis,
        Flavor::PretrainedGeneral,
        Flavor::Paraphrase,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Local => "local",
            Flavor::PretrainedCrisis => "pretrained_crisis",
            Flavor::PretrainedGeneral => "pretrained_general",
            Flavor::Paraphrase => "paraphrase",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    pub dimension: usize,
    pub flavor: Flavor,
    vectors: HashMap<String, Vec<f64>>,
    /// Tokens in file order, for stable serialisation.
    order: Vec<String>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize, flavor: Flavor) -> Self {
        EmbeddingTable {
            dimension,
            flavor,
            vectors: HashMap::new(),
            order: Vec::new(),
        }
    }

    /// Adds a vector; an existing token keeps its first vector.
    pub fn insert(&mut self, token: &str, vector: Vec<f64>) -> Result<bool> {
        if vector.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: vector.len(),
            });
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid(format!("non-finite component in vector for {token:?}")));
        }
        if self.vectors.contains_key(token) {
            return Ok(false);
        }
        self.order.push(token.to_string());
        self.vectors.insert(token.to_string(), vector);
        Ok(true)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Exact token first, lowercase second.
    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors
            .get(token)
            .or_else(|| self.vectors.get(&token.to_lowercase()))
            .map(Vec::as_slice)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let mut write = || -> std::io::Result<()> {
            writeln!(out, "{} {}", self.len(), self.dimension)?;
            for tok in &self.order {
                write!(out, "{tok}")?;
                for x in &self.vectors[tok] {
                    write!(out, " {x:.6}")?;
                }
                writeln!(out)?;
            }
            out.flush()
        };
        write().map_err(|e| Error::io(path, e))
    }
}

/// Loads a "V D" header followed by "token f1 .. fD" rows.
pub fn load_vectors(path: &Path, flavor: Flavor) -> Result<EmbeddingTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header = match lines.next() {
        Some(line) => line.map_err(|e| Error::io(path, e))?,
        None => return Err(Error::parse(path, 1, "empty vector file")),
    };
    let dims: Vec<usize> = header.split_whitespace().filter_map(|x| x.parse().ok()).collect();
    let (declared, dimension) = match dims.as_slice() {
        [v, d] if *d > 0 => (*v, *d),
        _ => {
            return Err(Error::parse(
                path,
                1,
                format!("expected \"V D\" header, got {header:?}"),
            ))
        }
    };
    let mut table = EmbeddingTable::new(dimension, flavor);
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let token = parts.next().unwrap_or_default();
        let vector: Vec<f64> = parts
            .map(|x| x.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(path, lineno, format!("bad component: {e}")))?;
        if vector.len() != dimension {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {dimension} components, found {}", vector.len()),
            ));
        }
        table
            .insert(token, vector)
            .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
    }
    if table.is_empty() {
        return Err(Error::parse(path, 1, "vector file has no rows"));
    }
    if declared != table.len() {
        log::warn!(
            "{}: header declares {declared} rows, loaded {}",
            path.display(),
            table.len()
        );
    }
    Ok(table)
}

/// Mean of the vectors of in-vocabulary tokens, or `None` if there are none.
pub fn average_vector<S: AsRef<str>>(tokens: &[S], table: &EmbeddingTable) -> Option<Vec<f64>> {
    let mut sum = vec![0.0; table.dimension];
    let mut n = 0usize;
    for tok in tokens {
        if let Some(v) = table.get(tok.as_ref()) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            n += 1;
        }
    }
    (n > 0).then(|| sum.into_iter().map(|s| s / n as f64).collect())
}

/// Cosine similarity; 0 when either vector has zero norm. Rounding drift is
/// clamped so the result stays within [-1, 1].
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}
