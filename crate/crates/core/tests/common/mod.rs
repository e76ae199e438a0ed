//! Acceptance checks shared by the acceptance runner and the integration tests.
//! Each check returns a one-line summary on success and a reason on failure.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reliefmatch::annotation::{read_annotated, AnnotatedTweet};
use reliefmatch::corpus::{deduplicate, jaccard, preprocess, PreprocessedTweet};
use reliefmatch::embeddings::{cosine, load_vectors};
use reliefmatch::evaluation::{evaluate, geo_correct, Judgments};
use reliefmatch::extraction::extract_potential_resources;
use reliefmatch::extraction::{extract_record, ExtractedRecord, LocationMention, Mode};
use reliefmatch::geo::{haversine_km, proximity_score, Granularity, EARTH_RADIUS_KM};
use reliefmatch::jsonl;
use reliefmatch::matching::{combine, rank_all, score_tfidf, MatchContext, MatchItem, MatchResult, TfIdfModel};
use reliefmatch::{
    BoundingBox, Coordinates, EmbeddingTable, Flavor, Gazetteer, LexiconSet, Method, MethodConfig, SimilarityOracle,
    Tweet, TweetKind,
};

pub type Outcome = Result<String, String>;

pub struct Criterion {
    pub name: &'static str,
    pub check: fn() -> Outcome,
}

pub const CRITERIA: &[Criterion] = &[
    Criterion {
        name: "showcase_golden",
        check: showcase_golden,
    },
    Criterion {
        name: "walk_traces",
        check: walk_traces,
    },
    Criterion {
        name: "dedup_oracle",
        check: dedup_oracle,
    },
    Criterion {
        name: "tfidf_cosine_oracles",
        check: tfidf_cosine_oracles,
    },
    Criterion {
        name: "haversine_oracle",
        check: haversine_oracle,
    },
    Criterion {
        name: "crisis_ranking",
        check: crisis_ranking,
    },
    Criterion {
        name: "combined_properties",
        check: combined_properties,
    },
    Criterion {
        name: "evaluation_constants",
        check: evaluation_constants,
    },
    Criterion {
        name: "geo_thresholds",
        check: geo_thresholds,
    },
];

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> PathBuf {
    crate_dir().join("tests/fixtures").join(name)
}

fn gazetteer() -> Gazetteer {
    Gazetteer::from_fixture(&crate_dir().join("data/gazetteer.tsv")).expect("gazetteer fixture")
}

fn annotated(name: &str) -> Vec<AnnotatedTweet> {
    let loaded = read_annotated(&fixture(name)).expect("annotated fixture");
    assert_eq!(loaded.malformed, 0, "{name} has malformed lines");
    loaded.records
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))
}

// ---------------------------------------------------------------- extraction

/// Expected values of one field: what must be present, and what may
/// additionally appear because the reference output lists it as an error.
struct Field {
    required: &'static [&'static str],
    tolerated: &'static [&'static str],
}

const fn f(required: &'static [&'static str], tolerated: &'static [&'static str]) -> Field {
    Field { required, tolerated }
}

const NONE: Field = f(&[], &[]);

struct Row {
    id: &'static str,
    resources: Field,
    locations: Field,
    quantities: Field,
    sources: Field,
    contacts: Field,
}

const SHOWCASE: &[Row] = &[
    Row {
        id: "sc-01",
        resources: f(&["medicine", "meals", "tents", "blankets"], &[]),
        locations: f(&["nepal"], &[]),
        quantities: f(&["tents-200", "blankets-600", "meals-2000"], &[]),
        sources: f(&["pakistan army"], &[]),
        contacts: NONE,
    },
    Row {
        id: "sc-02",
        resources: f(&["blood"], &[]),
        locations: NONE,
        quantities: NONE,
        sources: f(&["dr manita"], &[]),
        contacts: f(&["98412-34567"], &[]),
    },
    Row {
        id: "sc-03",
        resources: f(&["food"], &[]),
        locations: f(&["ktm", "bagmati"], &[]),
        quantities: NONE,
        sources: f(&[], &["kupandole gurudwara"]),
        contacts: NONE,
    },
    Row {
        id: "sc-04",
        resources: f(&["water", "reliefs", "food packets"], &[]),
        locations: f(&["nepal"], &[]),
        quantities: NONE,
        sources: f(&["india"], &[]),
        contacts: NONE,
    },
    Row {
        id: "sc-05",
        resources: f(&["electricity"], &[]),
        locations: f(&["kathmandu"], &[]),
        quantities: NONE,
        sources: f(&[], &["people", "shankhamul"]),
        contacts: NONE,
    },
    Row {
        id: "sc-06",
        resources: f(&["water", "food", "medicines", "doctors"], &["ton material"]),
        locations: f(&["nepal"], &[]),
        quantities: NONE,
        sources: f(&["govt", "ndrf"], &[]),
        contacts: NONE,
    },
    Row {
        id: "sc-07",
        resources: f(&["clothes", "shoes", "water"], &["pm"]),
        locations: f(&["florence"], &[]),
        quantities: f(&[], &["pm-10"]),
        sources: NONE,
        contacts: NONE,
    },
    Row {
        id: "sc-08",
        resources: f(&["ambulances", "relief", "rescue dogs"], &[]),
        locations: f(&["italy"], &[]),
        quantities: f(&["ambulances-20"], &[]),
        sources: NONE,
        contacts: NONE,
    },
    Row {
        id: "sc-09",
        resources: NONE,
        locations: f(&["italy"], &[]),
        quantities: NONE,
        sources: f(&[], &["emergencies"]),
        contacts: f(&["800 123 456"], &[]),
    },
];

fn compare(row: &str, field: &str, expected: &Field, got: Vec<String>) -> Vec<String> {
    let got: BTreeSet<String> = got.into_iter().map(|s| s.to_lowercase()).collect();
    let mut problems = Vec::new();
    for r in expected.required {
        if !got.contains(*r) {
            problems.push(format!("{row}.{field}: missing {r:?}"));
        }
    }
    for g in &got {
        if !expected.required.contains(&g.as_str()) && !expected.tolerated.contains(&g.as_str()) {
            problems.push(format!("{row}.{field}: unexpected {g:?}"));
        }
    }
    problems
}

pub fn fields(r: &ExtractedRecord) -> [Vec<String>; 5] {
    [
        r.resources.iter().map(|m| m.term.clone()).collect(),
        r.locations.iter().map(|l| l.surface.clone()).collect(),
        r.resources
            .iter()
            .filter_map(|m| m.quantity.map(|q| format!("{}-{q}", m.term)))
            .collect(),
        r.sources.clone(),
        r.contacts.iter().map(|c| c.value.clone()).collect(),
    ]
}

pub fn showcase_golden() -> Outcome {
    let start = Instant::now();
    let lex = LexiconSet::builtin();
    let oracle = SimilarityOracle::builtin(0.8);
    let gaz = gazetteer();
    let tweets = annotated("showcase.annotated.jsonl");
    ensure(tweets.len() == SHOWCASE.len(), || {
        format!("expected {} tweets, found {}", SHOWCASE.len(), tweets.len())
    })?;
    let mut problems = Vec::new();
    let mut required = 0;
    for (row, t) in SHOWCASE.iter().zip(&tweets) {
        ensure(row.id == t.id, || {
            format!("fixture order: expected {}, found {}", row.id, t.id)
        })?;
        let rec = extract_record(t, &lex, &oracle, &gaz, Mode::Proposed);
        let expected = [
            &row.resources,
            &row.locations,
            &row.quantities,
            &row.sources,
            &row.contacts,
        ];
        let names = ["resources", "locations", "quantities", "sources", "contacts"];
        for ((exp, got), name) in expected.into_iter().zip(fields(&rec)).zip(names) {
            required += exp.required.len();
            problems.extend(compare(row.id, name, exp, got));
        }
    }
    ensure(problems.is_empty(), || problems.join("; "))?;
    within(start.elapsed(), Duration::from_secs(5), "showcase suite")?;
    Ok(format!(
        "{} rows, {required} required values recovered, no extras",
        SHOWCASE.len()
    ))
}

pub fn walk_traces() -> Outcome {
    let lex = LexiconSet::builtin();
    let oracle = SimilarityOracle::builtin(0.8);
    let gaz = gazetteer();
    let tweets = annotated("walks.annotated.jsonl");
    let by_id: HashMap<&str, &AnnotatedTweet> = tweets.iter().map(|t| (t.id.as_str(), t)).collect();

    let walk1 = by_id.get("walk1").ok_or("walk1 missing")?;
    let potential = extract_potential_resources(walk1, &lex).map_err(|_| "walk1 degraded".to_string())?;
    let surfaces: BTreeSet<&str> = potential.surfaces(walk1).into_iter().collect();
    let want: BTreeSet<&str> = ["tents", "Samiti", "victims"].into();
    ensure(surfaces == want, || {
        format!("potential resources {surfaces:?}, want {want:?}")
    })?;
    let rec = extract_record(walk1, &lex, &oracle, &gaz, Mode::Proposed);
    let res: Vec<(&str, Option<u64>)> = rec.resources.iter().map(|m| (m.term.as_str(), m.quantity)).collect();
    ensure(res == [("tents", Some(800))], || format!("walk1 resources {res:?}"))?;
    ensure(rec.sources == ["Rajasthan Seva Samiti"], || {
        format!("walk1 sources {:?}", rec.sources)
    })?;

    let walk2 = by_id.get("walk2").ok_or("walk2 missing")?;
    let rec = extract_record(walk2, &lex, &oracle, &gaz, Mode::Proposed);
    let locs: BTreeSet<&str> = rec.locations.iter().map(|l| l.surface.as_str()).collect();
    let want: BTreeSet<&str> = ["Nepal", "Kathmandu", "Bir hospital"].into();
    ensure(locs == want, || format!("walk2 locations {locs:?}, want {want:?}"))?;
    Ok("walk1 resources/quantity/source and walk2 locations exact".into())
}

// ---------------------------------------------------------------- oracles

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
    "collapsed",
    "buildings",
    "airport",
    "army",
    "supplies",
    "urgent",
    "families",
    "children",
    "aftershock",
    "kathmandu",
    "gorkha",
    "sindhupalchowk",
    "lalitpur",
    "bhaktapur",
    "donate",
    "sending",
    "needed",
    "available",
];

/// Synthetic tweets where roughly a third copy an earlier tweet with one
/// word swapped, dropped or added.
pub fn synthetic_tweets(n: usize, seed: u64) -> Vec<Tweet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut texts: Vec<Vec<&str>> = Vec::with_capacity(n);
    for _ in 0..n {
        let words = if !texts.is_empty() && rng.gen_bool(0.35) {
            let mut w = texts[rng.gen_range(0..texts.len())].clone();
            match rng.gen_range(0..3) {
                0 if w.len() > 1 => {
                    w.remove(rng.gen_range(0..w.len()));
                }
                1 => w.push(WORDS[rng.gen_range(0..WORDS.len())]),
                _ => {
                    let i = rng.gen_range(0..w.len());
                    w[i] = WORDS[rng.gen_range(0..WORDS.len())];
                }
            }
            w
        } else {
            let len = rng.gen_range(3..12);
            (0..len).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect()
        };
        texts.push(words);
    }
    texts
        .into_iter()
        .enumerate()
        .map(|(i, w)| Tweet {
            id: format!("s{i:04}"),
            text: w.join(" "),
            kind: TweetKind::Unlabeled,
            timestamp: None,
        })
        .collect()
}

/// All-pairs reference: keep a tweet unless it is too similar to a kept one.
pub fn brute_force_dedup(tweets: &[PreprocessedTweet], threshold: f64) -> Vec<String> {
    let mut kept: Vec<&PreprocessedTweet> = Vec::new();
    for t in tweets {
        if kept
            .iter()
            .all(|k| jaccard(&k.tokens_for_dedup, &t.tokens_for_dedup) <= threshold)
        {
            kept.push(t);
        }
    }
    kept.into_iter().map(|t| t.id.clone()).collect()
}

pub fn dedup_oracle() -> Outcome {
    let start = Instant::now();
    let lex = LexiconSet::builtin();
    let tweets: Vec<PreprocessedTweet> = synthetic_tweets(500, 17)
        .iter()
        .map(|t| preprocess(t, &lex.stopwords))
        .collect();
    let fast = deduplicate(&tweets, 0.8);
    let slow = brute_force_dedup(&tweets, 0.8);
    ensure(fast == slow, || {
        format!("greedy kept {}, oracle kept {}", fast.len(), slow.len())
    })?;
    ensure(fast.len() < tweets.len(), || "no near-duplicates were planted".into())?;
    within(start.elapsed(), Duration::from_secs(10), "dedup")?;
    Ok(format!("500 tweets, {} retained, identical to all-pairs", fast.len()))
}

/// Dense reference implementation over a fixed vocabulary.
pub fn tfidf_reference(docs: &[Vec<String>], a: &[String], b: &[String]) -> f64 {
    let vocab: Vec<String> = docs
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = docs.len() as f64;
    let vector = |doc: &[String]| -> Vec<f64> {
        vocab
            .iter()
            .map(|term| {
                let tf = doc.iter().filter(|w| *w == term).count() as f64;
                let df = docs.iter().filter(|d| d.contains(term)).count() as f64;
                if df == 0.0 {
                    0.0
                } else {
                    tf * (n / df).ln()
                }
            })
            .collect()
    };
    reference_cosine(&vector(a), &vector(b))
}

pub fn reference_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

pub fn tfidf_cosine_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let docs: Vec<Vec<String>> = (0..rng.gen_range(2..12))
            .map(|_| {
                (0..rng.gen_range(1..10))
                    .map(|_| WORDS[rng.gen_range(0..12)].to_string())
                    .collect()
            })
            .collect();
        let model = TfIdfModel::fit(&docs);
        let (i, j) = (rng.gen_range(0..docs.len()), rng.gen_range(0..docs.len()));
        let got = score_tfidf(&docs[i], &docs[j], &model);
        let want = tfidf_reference(&docs, &docs[i], &docs[j]);
        ensure((got - want).abs() <= 1e-9, || {
            format!("tf-idf case {case}: {got} vs {want}")
        })?;
        worst = worst.max((got - want).abs());

        let dim = rng.gen_range(1..50);
        let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let got = cosine(&a, &b).map_err(|e| e.to_string())?;
        let want = reference_cosine(&a, &b);
        ensure((got - want).abs() <= 1e-9, || {
            format!("cosine case {case}: {got} vs {want}")
        })?;
        worst = worst.max((got - want).abs());
    }
    Ok(format!("50 + 50 cases, max deviation {worst:.1e}"))
}

/// Spherical law of cosines, a formulation independent of haversine.
pub fn law_of_cosines_km(a: Coordinates, b: Coordinates) -> f64 {
    let (p1, p2) = (a.lat.to_radians(), b.lat.to_radians());
    let dl = (b.lon - a.lon).to_radians();
    let c = (p1.sin() * p2.sin() + p1.cos() * p2.cos() * dl.cos()).clamp(-1.0, 1.0);
    EARTH_RADIUS_KM * c.acos()
}

pub fn haversine_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = Coordinates::new(rng.gen_range(-89.0..89.0), rng.gen_range(-180.0..180.0));
        let b = Coordinates::new(rng.gen_range(-89.0..89.0), rng.gen_range(-180.0..180.0));
        let got = haversine_km(a, b);
        let want = law_of_cosines_km(a, b);
        let rel = (got - want).abs() / want.max(1e-12);
        ensure(rel < 1e-3, || format!("{a:?} {b:?}: {got} vs {want}"))?;
        worst = worst.max(rel);
    }
    let p = Coordinates::new(27.7, 85.3);
    ensure(haversine_km(p, p).abs() < 1e-6, || "zero distance".into())?;
    let anti = haversine_km(Coordinates::new(10.0, 20.0), Coordinates::new(-10.0, -160.0));
    let half = std::f64::consts::PI * EARTH_RADIUS_KM;
    ensure((anti - half).abs() < 1e-6, || format!("antipodal {anti} vs {half}"))?;
    Ok(format!(
        "100 random pairs, max relative deviation {worst:.1e}; analytic cases exact"
    ))
}

// ---------------------------------------------------------------- matching

pub fn crisis_vectors() -> EmbeddingTable {
    load_vectors(&fixture("crisis_vectors.txt"), Flavor::PretrainedCrisis).expect("crisis vectors")
}

pub fn records(name: &str) -> Vec<ExtractedRecord> {
    jsonl::read_strict(&fixture(name)).expect("record fixture")
}

pub fn crisis_ranking() -> Outcome {
    let needs: Vec<MatchItem> = records("ranking.needs.jsonl")
        .into_iter()
        .map(MatchItem::from_record)
        .collect();
    let avails: Vec<MatchItem> = records("ranking.avails.jsonl")
        .into_iter()
        .map(MatchItem::from_record)
        .collect();
    let mut ctx = MatchContext::default();
    ctx.vectors.insert(Flavor::PretrainedCrisis, crisis_vectors());
    let results = rank_all(&needs, &avails, MethodConfig::new(Method::P2b), &ctx).map_err(|e| e.to_string())?;
    let expected: HashMap<&str, &str> = [("n1", "a1"), ("n2", "a2"), ("n3", "a3"), ("n4", "a4"), ("n5", "a5")].into();
    let mut hits = 0;
    let mut misses = Vec::new();
    for r in &results {
        let top = r.ranked.first().map(|m| m.avail_id.as_str()).unwrap_or("-");
        if expected.get(r.need_id.as_str()) == Some(&top) {
            hits += 1;
        } else {
            misses.push(format!("{} ranked {top} first", r.need_id));
        }
    }
    let detail = if misses.is_empty() {
        String::new()
    } else {
        format!(" ({})", misses.join(", "))
    };
    ensure(hits >= 4, || format!("{hits}/5 correct first{detail}"))?;
    Ok(format!("{hits}/5 needs rank the expected availability first{detail}"))
}

fn located(id: &str, places: &[(f64, f64)]) -> ExtractedRecord {
    let mut r: ExtractedRecord = serde_json::from_value(serde_json::json!({
        "tweet_id": id, "kind": "need", "resources": [{"term": "water", "canonical": "water", "class": "food"}],
        "locations": [], "sources": [], "contacts": [], "method": "proposed", "dual_cue": false
    }))
    .expect("record literal");
    r.locations = places
        .iter()
        .map(|&(lat, lon)| LocationMention {
            surface: "x".into(),
            coordinates: Some(Coordinates::new(lat, lon)),
            granularity: Granularity::Coarse,
            outside_box: false,
            span: (0, 0),
        })
        .collect();
    r
}

pub fn combined_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = MethodConfig::new(Method::Combined);
    for _ in 0..1000 {
        let (r, p): (f64, f64) = (rng.gen(), rng.gen());
        let total = combine(r, p, &cfg);
        ensure(total == (r + p) / 2.0, || format!("combine({r}, {p}) = {total}"))?;
    }
    let bbox = BoundingBox::new(26.3, 30.5, 80.0, 88.2).map_err(|e| e.to_string())?;
    for _ in 0..1000 {
        let r: f64 = rng.gen();
        let d1 = rng.gen_range(0.0..1000.0);
        let d2 = rng.gen_range(0.0..1000.0);
        let (near, far) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let (pn, pf) = (proximity_score(near, &bbox), proximity_score(far, &bbox));
        ensure(pn >= pf, || format!("proximity not monotone at {near} / {far}"))?;
        ensure(combine(r, pn, &cfg) >= combine(r, pf, &cfg), || {
            format!("total not monotone at {near} / {far}")
        })?;
    }

    let mut ctx = MatchContext::default();
    ctx.vectors.insert(Flavor::PretrainedCrisis, crisis_vectors());
    ctx.bbox = Some(bbox);
    let needs = vec![
        MatchItem::from_record(located("n", &[(27.7, 85.3)])),
        MatchItem::from_record(located("m", &[])),
    ];
    let avails: Vec<MatchItem> = (0..20)
        .map(|i| {
            let places = if i % 3 == 0 {
                vec![]
            } else {
                vec![(27.0 + i as f64 * 0.1, 85.0)]
            };
            MatchItem::from_record(located(&format!("a{i:02}"), &places))
        })
        .collect();
    let cfg = MethodConfig { k: 20, ..cfg };
    let results: Vec<MatchResult> = rank_all(&needs, &avails, cfg, &ctx).map_err(|e| e.to_string())?;
    for r in &results {
        for m in &r.ranked {
            let i: usize = m.avail_id[1..].parse().expect("avail id");
            ensure(!i.is_multiple_of(3), || {
                format!("{} without location ranked for {}", m.avail_id, r.need_id)
            })?;
        }
    }
    ensure(results[1].ranked.is_empty(), || {
        "need without location received matches".into()
    })?;
    ensure(results[0].ranked.len() == 13, || {
        format!("{} located pairs ranked, want 13", results[0].ranked.len())
    })?;
    Ok("equal weights exact on 1000 pairs, monotone on 1000 triples, unlocated pairs excluded".into())
}

// ---------------------------------------------------------------- evaluation

pub fn evaluation_constants() -> Outcome {
    let results: Vec<MatchResult> = jsonl::read_strict(&fixture("eval.matches.jsonl")).map_err(|e| e.to_string())?;
    let judgments = Judgments::load(&fixture("eval.judgments.csv")).map_err(|e| e.to_string())?;
    let report = evaluate(&results, &judgments).map_err(|e| e.to_string())?;
    // 7 of 20 retrieved pairs are correct; 3 of 4 needs have a correct pair.
    let (p, r) = (7.0 / 20.0, 3.0 / 4.0);
    let f = 21.0 / 44.0;
    ensure(report.precision == p, || format!("precision {}", report.precision))?;
    ensure(report.recall == r, || format!("recall {}", report.recall))?;
    ensure(report.f_score == f, || format!("f-score {} vs {f}", report.f_score))?;
    ensure(report.judged_pairs == 20 && report.unjudged_pairs == 0, || {
        "pair counts".into()
    })?;
    Ok(format!(
        "P={} R={} F={:.6}",
        report.precision, report.recall, report.f_score
    ))
}

fn place(gaz: &Gazetteer, name: &str, granularity: Granularity) -> Result<(f64, f64), String> {
    let (entry, _) = gaz
        .resolve(name, granularity)
        .ok_or_else(|| format!("{name} not in gazetteer"))?;
    Ok((entry.lat, entry.lon))
}

pub fn geo_thresholds() -> Outcome {
    use Granularity::{Coarse, Fine};
    let italy = BoundingBox::new(35.5, 47.1, 6.6, 18.5).map_err(|e| e.to_string())?;
    let gaz = gazetteer().with_bbox(italy);
    let florence = place(&gaz, "Florence", Coarse)?;
    let rieti = place(&gaz, "Rieti", Coarse)?;
    let verdict = geo_correct(&located("n", &[florence]), &located("a", &[rieti]), 100.0);
    ensure(verdict == Some(false), || {
        format!("Florence/Rieti at 100 km: {verdict:?}")
    })?;

    let gaz = gazetteer();
    let pairs: [(&str, Granularity, &str, Granularity, f64); 4] = [
        ("TU teaching hospital", Fine, "Tistung", Coarse, 100.0),
        ("Valasaravakkam", Coarse, "KK Nagar", Coarse, 20.0),
        ("Greams Road", Fine, "Vijaya Hospital", Fine, 20.0),
        ("MKB Nagar", Coarse, "Kilpauk", Coarse, 20.0),
    ];
    for (a, ga, b, gb, km) in pairs {
        let verdict = geo_correct(
            &located("n", &[place(&gaz, a, ga)?]),
            &located("a", &[place(&gaz, b, gb)?]),
            km,
        );
        ensure(verdict == Some(true), || format!("{a}/{b} at {km} km: {verdict:?}"))?;
    }
    Ok("Florence/Rieti false at 100 km; TU hospital/Tistung true at 100 km; 3 Chennai pairs true at 20 km".into())
}
