use crate::annotation::AnnotatedTweet;
use crate::lexicons::{is_number_word, is_numeric_token};

use super::resources::ResourceMention;

/// Attaches a quantity to each mention: the first numeric token found while
/// scanning up to `window` tokens back from the phrase start, skipping
/// determiners and adjectives and stopping at anything else. Spelled-out
/// numbers spanning several tokens ("two thousand") are read whole.
pub fn extract_quantities(tweet: &AnnotatedTweet, mentions: &mut [ResourceMention], window: usize) {
    for m in mentions.iter_mut() {
        m.quantity = quantity_before(tweet, m.span.0, window);
    }
}

fn quantity_before(tweet: &AnnotatedTweet, start: usize, window: usize) -> Option<u64> {
    let toks = &tweet.tokens;
    let lowest = start.saturating_sub(window);
    let mut k = start;
    while k > lowest {
        k -= 1;
        let t = &toks[k];
        if is_number_word(&t.text) {
            let mut first = k;
            while first > 0
                && (is_number_word(&toks[first - 1].text) || toks[first - 1].text.eq_ignore_ascii_case("and"))
            {
                first -= 1;
            }
            while toks[first].text.eq_ignore_ascii_case("and") {
                first += 1;
            }
            let phrase = toks[first..=k]
                .iter()
                .map(|t| t.text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            return is_numeric_token(&phrase);
        }
        if let Some(v) = is_numeric_token(&t.text) {
            return Some(v);
        }
        if !matches!(t.pos.as_str(), "DET" | "ADJ") {
            return None;
        }
    }
    None
}
