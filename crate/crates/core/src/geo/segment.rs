use std::collections::HashMap;

/// Shorter dictionary pieces are mostly noise ("rk", "ha") and count as unknown.
const MIN_PIECE: usize = 3;

/// Segments a hashtag body by maximum likelihood under a unigram model.
///
/// Known words score log10(count / total); unknown words score -10 per
/// character, so gluing an unknown run together is always preferred over
/// splitting it. Pieces shorter than three letters, other than "a" and "i", count as unknown.
///
/// Returns the segments followed by the original tag. When the best split is
/// the whole tag, or relies on any unknown piece, only the original is returned.
pub fn segment_hashtag(tag: &str, unigrams: &HashMap<String, u64>) -> Vec<String> {
    let chars: Vec<(usize, char)> = tag.char_indices().collect();
    let n = chars.len();
    if n < 2 {
        return vec![tag.to_string()];
    }
    let total: f64 = unigrams.values().sum::<u64>().max(1) as f64;
    let lower = tag.to_lowercase();
    let lower_chars: Vec<char> = lower.chars().collect();
    if lower_chars.len() != n {
        return vec![tag.to_string()];
    }
    let known = |s: &str| -> Option<f64> {
        let len = s.chars().count();
        if len < MIN_PIECE && s != "a" && s != "i" {
            return None;
        }
        unigrams.get(s).map(|&c| (c as f64 / total).log10())
    };
    let score = |s: &str| known(s).unwrap_or(-10.0 * s.chars().count() as f64);

    // best[i]: best score for the first i characters, with the start of the last piece.
    let mut best: Vec<(f64, usize)> = vec![(f64::NEG_INFINITY, 0); n + 1];
    best[0] = (0.0, 0);
    for end in 1..=n {
        for start in 0..end {
            let piece: String = lower_chars[start..end].iter().collect();
            let s = best[start].0 + score(&piece);
            if s > best[end].0 {
                best[end] = (s, start);
            }
        }
    }
    let mut bounds = Vec::new();
    let mut end = n;
    while end > 0 {
        let start = best[end].1;
        bounds.push((start, end));
        end = start;
    }
    bounds.reverse();

    let byte = |i: usize| if i == n { tag.len() } else { chars[i].0 };
    let pieces: Vec<String> = bounds.iter().map(|&(s, e)| tag[byte(s)..byte(e)].to_string()).collect();
    if pieces.len() < 2 || pieces.iter().any(|p| known(&p.to_lowercase()).is_none()) {
        return vec![tag.to_string()];
    }
    let mut out = pieces;
    out.push(tag.to_string());
    out
}
