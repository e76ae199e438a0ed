mod common;

use std::collections::{BTreeSet, HashMap};
use std::sync::LazyLock;

use proptest::prelude::*;

use common::{brute_force_dedup, law_of_cosines_km};
use reliefmatch::corpus::{clean_text, deduplicate, jaccard, PreprocessedTweet};
use reliefmatch::embeddings::{average_vector, cosine, load_vectors};
use reliefmatch::evaluation::{evaluate, Judgment, Judgments, Label};
use reliefmatch::extraction::{extract_contacts, ExtractedRecord};
use reliefmatch::geo::{haversine_km, jaro_winkler, proximity_score, segment_hashtag};
use reliefmatch::matching::{rank_all, MatchContext, MatchItem, MatchResult, RankedMatch};
use reliefmatch::{BoundingBox, Coordinates, EmbeddingTable, Flavor, LexiconSet, Method, MethodConfig};

static UNIGRAMS: LazyLock<HashMap<String, u64>> = LazyLock::new(|| LexiconSet::builtin().unigram_counts);

fn coords() -> impl Strategy<Value = Coordinates> {
    (-89.9f64..89.9, -180.0f64..180.0).prop_map(|(lat, lon)| Coordinates::new(lat, lon))
}

fn bag() -> impl Strategy<Value = BTreeSet<String>> {
    prop::collection::btree_set("[a-f]{1,2}", 0..8)
}

fn nepal() -> BoundingBox {
    BoundingBox::new(26.3, 30.5, 80.0, 88.2).unwrap()
}

proptest! {
    #[test]
    fn haversine_is_a_metric(a in coords(), b in coords(), c in coords()) {
        let ab = haversine_km(a, b);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - haversine_km(b, a)).abs() < 1e-9);
        prop_assert!(ab <= haversine_km(a, c) + haversine_km(c, b) + 1e-6);
        prop_assert!(haversine_km(a, a) < 1e-9);
        let reference = law_of_cosines_km(a, b);
        prop_assert!((ab - reference).abs() <= 1e-3 * reference.max(1.0));
    }

    #[test]
    fn proximity_is_bounded_and_non_increasing(d1 in 0.0f64..5000.0, d2 in 0.0f64..5000.0) {
        let (near, far) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let b = nepal();
        let (pn, pf) = (proximity_score(near, &b), proximity_score(far, &b));
        prop_assert!((0.0..=1.0).contains(&pn) && (0.0..=1.0).contains(&pf));
        prop_assert!(pn >= pf);
    }

    #[test]
    fn jaro_winkler_symmetric_and_bounded(a in "[a-z]{0,10}", b in "[a-z]{0,10}") {
        let s = jaro_winkler(&a, &b);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert!((s - jaro_winkler(&b, &a)).abs() < 1e-12);
        prop_assert_eq!(s == 1.0, a == b);
    }

    #[test]
    fn segments_concatenate_to_the_tag(words in prop::collection::vec(prop::sample::select(vec!["nepal", "quake", "relief", "kathmandu", "help", "zzq"]), 1..4)) {
        let tag: String = words.concat();
        let out = segment_hashtag(&tag, &UNIGRAMS);
        prop_assert_eq!(out.last().unwrap(), &tag);
        if out.len() > 1 {
            let joined: String = out[..out.len() - 1].concat();
            prop_assert_eq!(joined.to_lowercase(), tag.to_lowercase());
        }
    }

    #[test]
    fn jaccard_symmetric_and_bounded(a in bag(), b in bag()) {
        let s = jaccard(&a, &b);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s, jaccard(&b, &a));
    }

    #[test]
    fn dedup_equals_brute_force(bags in prop::collection::vec(bag(), 0..40), threshold in 0.0f64..1.0) {
        let tweets: Vec<PreprocessedTweet> = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| PreprocessedTweet { id: format!("t{i}"), clean_text: String::new(), tokens_for_dedup: b })
            .collect();
        let fast = deduplicate(&tweets, threshold);
        prop_assert_eq!(&fast, &brute_force_dedup(&tweets, threshold));
        let kept: Vec<PreprocessedTweet> = tweets.iter().filter(|t| fast.contains(&t.id)).cloned().collect();
        prop_assert_eq!(deduplicate(&kept, threshold), fast);
    }

    #[test]
    fn clean_text_is_idempotent(s in "[ -~]{0,60}") {
        let once = clean_text(&s);
        prop_assert_eq!(clean_text(&once), once);
    }

    #[test]
    fn contacts_have_enough_digits(s in "[0-9 ()+-]{0,30}") {
        for c in extract_contacts(&s) {
            prop_assert!(c.value.chars().filter(char::is_ascii_digit).count() >= 7);
        }
    }

    #[test]
    fn cosine_symmetric_bounded_scale_free(
        a in prop::collection::vec(-10.0f64..10.0, 1..16),
        k in 0.01f64..100.0,
    ) {
        let b: Vec<f64> = a.iter().rev().copied().collect();
        let ab = cosine(&a, &b).unwrap();
        prop_assert!(ab.abs() <= 1.0 + 1e-12);
        prop_assert_eq!(ab, cosine(&b, &a).unwrap());
        if a.iter().any(|x| *x != 0.0) {
            let scaled: Vec<f64> = a.iter().map(|x| x * k).collect();
            prop_assert!((cosine(&scaled, &a).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn average_ignores_token_order(order in Just(vec!["water", "food", "tents", "oov"]).prop_shuffle()) {
        let mut t = EmbeddingTable::new(2, Flavor::Local);
        t.insert("water", vec![1.0, 0.0]).unwrap();
        t.insert("food", vec![0.5, 0.5]).unwrap();
        t.insert("tents", vec![0.0, 2.0]).unwrap();
        let avg = average_vector(&order, &t).unwrap();
        prop_assert!((avg[0] - 0.5).abs() < 1e-12 && (avg[1] - 2.5 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn vectors_round_trip_to_six_decimals(rows in prop::collection::btree_map("[a-z]{1,6}", prop::collection::vec(-5.0f64..5.0, 3), 1..10)) {
        let mut t = EmbeddingTable::new(3, Flavor::Local);
        for (w, v) in &rows {
            t.insert(w, v.clone()).unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.txt");
        t.save(&path).unwrap();
        let back = load_vectors(&path, Flavor::Local).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (w, v) in &rows {
            for (x, y) in v.iter().zip(back.get(w).unwrap()) {
                prop_assert!((x - y).abs() <= 5e-7);
            }
        }
    }

    #[test]
    fn rankings_are_prefix_stable(scores in prop::collection::vec(0u8..4, 1..12), k in 1usize..10) {
        let need = record("n", &["water", "food", "tents"]);
        let pool = ["water", "food", "tents", "rice"];
        let avails: Vec<MatchItem> = scores
            .iter()
            .enumerate()
            .map(|(i, &s)| MatchItem::from_record(record(&format!("a{i:02}"), &pool[..s as usize])))
            .collect();
        let ctx = MatchContext::default();
        let run = |k| rank_all(&[MatchItem::from_record(need.clone())], &avails, MethodConfig { k, ..MethodConfig::new(Method::P1) }, &ctx).unwrap();
        let short = run(k);
        let long = run(k + 1);
        prop_assert!(short[0].ranked.len() <= k);
        prop_assert_eq!(&short[0].ranked[..], &long[0].ranked[..short[0].ranked.len()]);
        for w in short[0].ranked.windows(2) {
            prop_assert!(w[0].total_score > w[1].total_score
                || (w[0].total_score == w[1].total_score && w[0].avail_id < w[1].avail_id));
        }
    }

    #[test]
    fn metrics_bounded_and_order_free(labels in prop::collection::vec(prop::collection::vec(any::<bool>(), 1..6), 1..6)) {
        let results: Vec<MatchResult> = labels
            .iter()
            .enumerate()
            .map(|(n, l)| MatchResult {
                need_id: format!("n{n}"),
                method: Method::P2b,
                ranked: (0..l.len())
                    .map(|a| RankedMatch { avail_id: format!("a{a}"), total_score: 0.5, resource_score: 0.5, proximity_score: None })
                    .collect(),
            })
            .collect();
        let mut rows: Vec<Judgment> = labels
            .iter()
            .enumerate()
            .flat_map(|(n, l)| l.iter().enumerate().map(move |(a, &ok)| Judgment {
                need_id: format!("n{n}"),
                avail_id: format!("a{a}"),
                label: if ok { Label::Correct } else { Label::Incorrect },
            }))
            .collect();
        let report = evaluate(&results, &Judgments::from_rows(rows.clone()).unwrap()).unwrap();
        for m in [report.precision, report.recall, report.f_score] {
            prop_assert!((0.0..=1.0).contains(&m));
        }
        prop_assert!(report.f_score <= report.precision.max(report.recall) + 1e-12);
        if report.precision == report.recall {
            prop_assert!((report.f_score - report.precision).abs() < 1e-12);
        }
        rows.reverse();
        prop_assert_eq!(report, evaluate(&results, &Judgments::from_rows(rows).unwrap()).unwrap());
    }
}

fn record(id: &str, resources: &[&str]) -> ExtractedRecord {
    let res: Vec<serde_json::Value> = resources
        .iter()
        .map(|r| serde_json::json!({"term": r, "canonical": r, "class": "food"}))
        .collect();
    serde_json::from_value(serde_json::json!({
        "tweet_id": id, "kind": "need", "resources": res, "locations": [], "sources": [],
        "contacts": [], "method": "proposed", "dual_cue": false
    }))
    .unwrap()
}
