//! Inputs shared by the benchmarks.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reliefmatch::{Tweet, TweetKind};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

pub fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

const WORDS: &[&str] = &[
    "water",
    "food",
    "tents",
    "shelter",
    "medicine",
    "doctors",
    "blankets",
    "rice",
    "power",
    "roads",
    "bridge",
    "school",
    "hospital",
    "village",
    "district",
    "relief",
    "camp",
    "trucks",
    "blood",
    "volunteers",
    "rescue",
    "injured",
    "kathmandu",
    "gorkha",
    "lalitpur",
    "bhaktapur",
    "urgent",
    "families",
    "children",
    "aftershock",
];

/// Random short tweets, a fifth of them copies of an earlier one.
pub fn tweets(n: usize, seed: u64) -> Vec<Tweet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut texts: Vec<String> = Vec::with_capacity(n);
    for _ in 0..n {
        let text = if !texts.is_empty() && rng.gen_bool(0.2) {
            texts[rng.gen_range(0..texts.len())].clone()
        } else {
            let len = rng.gen_range(4..14);
            (0..len)
                .map(|_| WORDS[rng.gen_range(0..WORDS.len())])
                .collect::<Vec<_>>()
                .join(" ")
        };
        texts.push(text);
    }
    texts
        .into_iter()
        .enumerate()
        .map(|(i, text)| Tweet {
            id: format!("b{i}"),
            text,
            kind: TweetKind::Unlabeled,
            timestamp: None,
        })
        .collect()
}
