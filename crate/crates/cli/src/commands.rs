use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use reliefmatch::annotation::{read_annotated, AnnotatedTweet};
use reliefmatch::config::roles;
use reliefmatch::corpus::{deduplicate, ingest, preprocess, read_tweets, Tweet};
use reliefmatch::embeddings::load_vectors;
use reliefmatch::evaluation::{evaluate, EvalReport, Judgments};
use reliefmatch::extraction::{ExtractionSettings, RecordKind};
use reliefmatch::geo::GazetteerTable;
use reliefmatch::lexicons::load_lexicons;
use reliefmatch::matching::{rank_all, write_report_tsv, MatchContext, MatchItem, MatchResult};
use reliefmatch::{
    jsonl, EventConfig, ExtractedRecord, Extractor, Flavor, Gazetteer, LexiconSet, Method, MethodConfig, Mode,
    SimilarityOracle, TweetKind,
};

/// Everything loaded from one event configuration.
struct Event {
    cfg: EventConfig,
    lex: LexiconSet,
    oracle: SimilarityOracle,
    gazetteer: Gazetteer,
    settings: ExtractionSettings,
}

impl Event {
    fn load(path: &Path) -> Result<Self> {
        let cfg = EventConfig::load(path)?;
        let (lex, oracle) = match cfg.path(roles::LEXICON_DIR) {
            Some(_) => {
                let dir = cfg.require(roles::LEXICON_DIR)?;
                (
                    load_lexicons(dir)?,
                    SimilarityOracle::load(dir, cfg.similarity_threshold)?,
                )
            }
            None => (
                LexiconSet::builtin(),
                SimilarityOracle::builtin(cfg.similarity_threshold),
            ),
        };
        let mut gazetteer = match cfg.path(roles::GAZETTEER) {
            Some(_) => Gazetteer::from_fixture(cfg.require(roles::GAZETTEER)?)?,
            None => {
                log::warn!("no gazetteer configured; no location will be verified");
                Gazetteer::from_table(GazetteerTable::default())
            }
        };
        if let Some(cache) = cfg.path(roles::GAZETTEER_CACHE) {
            gazetteer = gazetteer.with_cache(cache)?;
        }
        #[cfg(feature = "live")]
        if let Some(live) = &cfg.live_gazetteer {
            if let Some(dir) = cfg.path(roles::GAZETTEER_CACHE).and_then(Path::parent) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            gazetteer = gazetteer.with_live(Box::new(reliefmatch::geo::HttpGeocoder::new(live.clone())));
        }
        let gazetteer = gazetteer.with_bbox(cfg.bounding_box);
        let settings = cfg.extraction_settings();
        Ok(Event {
            cfg,
            lex,
            oracle,
            gazetteer,
            settings,
        })
    }

    fn extractor(&self) -> Extractor<'_> {
        Extractor {
            lex: &self.lex,
            oracle: &self.oracle,
            gazetteer: &self.gazetteer,
            settings: self.settings,
        }
    }

    fn method_config(&self, method: Method, k: Option<usize>) -> Result<MethodConfig> {
        let cfg = MethodConfig {
            method,
            k: k.unwrap_or(self.cfg.k),
            resource_weight: self.cfg.resource_weight,
            proximity_weight: self.cfg.proximity_weight,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn match_context(&self, method: Method) -> Result<MatchContext> {
        let mut ctx = MatchContext {
            bbox: Some(self.cfg.bounding_box),
            stopwords: self.lex.stopwords.clone(),
            ..MatchContext::default()
        };
        if let Some(flavor) = method.flavor() {
            if let Some(path) = self.cfg.path(vector_role(flavor)) {
                let table = load_vectors(path, flavor)?;
                ctx.vectors.insert(flavor, table);
            }
        }
        Ok(ctx)
    }
}

fn vector_role(flavor: Flavor) -> &'static str {
    match flavor {
        Flavor::Local => roles::VECTORS_LOCAL,
        Flavor::PretrainedCrisis => roles::VECTORS_CRISIS,
        Flavor::PretrainedGeneral => roles::VECTORS_GENERAL,
        Flavor::Paraphrase => roles::VECTORS_PARAPHRASE,
    }
}

fn tsv_path(output: &Path) -> PathBuf {
    output.with_extension("tsv")
}

fn as_tweet(t: &AnnotatedTweet) -> Tweet {
    Tweet {
        id: t.id.clone(),
        text: t.text.clone(),
        kind: t.kind,
        timestamp: t.timestamp.clone(),
    }
}

fn retained_ids(event: &Event, tweets: &[Tweet]) -> HashSet<String> {
    let pre: Vec<_> = tweets.iter().map(|t| preprocess(t, &event.lex.stopwords)).collect();
    deduplicate(&pre, event.cfg.dedup_threshold).into_iter().collect()
}

pub fn dedup(config: &Path, input: &Path, output: &Path, kind: Option<TweetKind>) -> Result<String> {
    let event = Event::load(config)?;
    let loaded = match kind {
        Some(k) => ingest(input, k)?,
        None => read_tweets(input)?,
    };
    let keep = retained_ids(&event, &loaded.tweets);
    let retained: Vec<&Tweet> = loaded.tweets.iter().filter(|t| keep.contains(&t.id)).collect();
    jsonl::write(output, &retained)?;
    Ok(format!(
        "input\t{}\nretained\t{}\ndiscarded\t{}\nmalformed\t{}\n",
        loaded.tweets.len(),
        retained.len(),
        loaded.tweets.len() - retained.len(),
        loaded.malformed
    ))
}

fn fill_rates(records: &[ExtractedRecord]) -> String {
    let n = records.len();
    let rate = |f: &dyn Fn(&ExtractedRecord) -> bool| {
        if n == 0 {
            0.0
        } else {
            records.iter().filter(|r| f(r)).count() as f64 / n as f64
        }
    };
    let rows: [(&str, f64); 5] = [
        ("resources", rate(&|r| !r.resources.is_empty())),
        (
            "quantities",
            rate(&|r| r.resources.iter().any(|m| m.quantity.is_some())),
        ),
        ("locations", rate(&|r| !r.locations.is_empty())),
        ("sources", rate(&|r| !r.sources.is_empty())),
        ("contacts", rate(&|r| !r.contacts.is_empty())),
    ];
    let mut out = String::new();
    for (name, v) in rows {
        let _ = writeln!(out, "fill_{name}\t{v:.4}");
    }
    out
}

fn extract_summary(records: &[ExtractedRecord], malformed: usize) -> String {
    let baseline = records.iter().filter(|r| r.method == Mode::Baseline).count();
    let mut out = format!(
        "records\t{}\nmalformed\t{malformed}\nbaseline_fallback\t{baseline}\n",
        records.len()
    );
    out.push_str(&fill_rates(records));
    out
}

pub fn extract(config: &Path, input: &Path, output: &Path, mode: Mode) -> Result<String> {
    let event = Event::load(config)?;
    let loaded = read_annotated(input)?;
    let records = event.extractor().extract_all(&loaded.records, mode);
    jsonl::write(output, &records)?;
    let mut summary = extract_summary(&records, loaded.malformed);
    let failures = event.gazetteer.failures();
    if failures > 0 {
        let _ = writeln!(summary, "gazetteer_failures\t{failures}");
    }
    Ok(summary)
}

fn read_items(path: &Path, method: Method) -> Result<Vec<MatchItem>> {
    if method.uses_records() {
        let records: Vec<ExtractedRecord> =
            jsonl::read_strict(path).with_context(|| format!("{} must hold extracted records", path.display()))?;
        Ok(records.into_iter().map(MatchItem::from_record).collect())
    } else {
        let loaded = read_annotated(path)?;
        if loaded.malformed > 0 {
            log::warn!(
                "{}: skipped {} malformed annotated tweets",
                path.display(),
                loaded.malformed
            );
        }
        Ok(loaded.records.into_iter().map(MatchItem::from_tweet).collect())
    }
}

fn match_summary(results: &[MatchResult], method: Method) -> String {
    let pairs: usize = results.iter().map(|r| r.ranked.len()).sum();
    let empty = results.iter().filter(|r| r.ranked.is_empty()).count();
    format!(
        "method\t{method}\nneeds\t{}\nranked_pairs\t{pairs}\nneeds_without_matches\t{empty}\n",
        results.len()
    )
}

fn warn_unlocated(needs: &[MatchItem], method: Method) {
    if method != Method::Combined {
        return;
    }
    let located = needs
        .iter()
        .any(|n| n.record.as_ref().is_some_and(|r| !r.coordinates().is_empty()));
    if !located {
        log::warn!("no need record has a located place; the combined report is empty");
    }
}

fn rank_and_write(
    event: &Event,
    needs: &[MatchItem],
    avails: &[MatchItem],
    output: &Path,
    method: Method,
    k: Option<usize>,
) -> Result<Vec<MatchResult>> {
    let cfg = event.method_config(method, k)?;
    let ctx = event.match_context(method)?;
    warn_unlocated(needs, method);
    let results = rank_all(needs, avails, cfg, &ctx)?;
    jsonl::write(output, &results)?;
    write_report_tsv(&tsv_path(output), &results)?;
    Ok(results)
}

pub fn run_match(
    config: &Path,
    needs: &Path,
    avails: &Path,
    output: &Path,
    method: Method,
    k: Option<usize>,
) -> Result<String> {
    let event = Event::load(config)?;
    let needs = read_items(needs, method)?;
    let avails = read_items(avails, method)?;
    let results = rank_and_write(&event, &needs, &avails, output, method, k)?;
    Ok(match_summary(&results, method))
}

fn load_judgments(path: &Path) -> Result<Judgments> {
    let judgments = Judgments::load(path)?;
    if judgments.is_empty() {
        bail!("{} contains no judgments", path.display());
    }
    Ok(judgments)
}

fn write_eval(report: &EvalReport, output: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    fs::write(output, json + "\n").with_context(|| format!("writing {}", output.display()))
}

pub fn eval(config: &Path, report: &Path, judgments: &Path, output: &Path) -> Result<String> {
    let event = Event::load(config)?;
    let results: Vec<MatchResult> = jsonl::read_strict(report)?;
    let judgments = load_judgments(judgments)?;
    let report = evaluate(&results, &judgments)?;
    write_eval(&report, output)?;
    Ok(format!("event\t{}\n{report}\n", event.cfg.event_name))
}

pub fn pipeline(
    config: &Path,
    input: &Path,
    out_dir: &Path,
    mode: Mode,
    method: Method,
    k: Option<usize>,
    judgments: Option<&Path>,
) -> Result<String> {
    let event = Event::load(config)?;
    // Check the judgments before doing any work.
    let judgments = judgments.map(load_judgments).transpose()?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    let loaded = read_annotated(input)?;
    let tweets: Vec<Tweet> = loaded.records.iter().map(as_tweet).collect();
    let keep = retained_ids(&event, &tweets);
    let retained: Vec<AnnotatedTweet> = loaded.records.into_iter().filter(|t| keep.contains(&t.id)).collect();
    jsonl::write(&out_dir.join("retained.annotated.jsonl"), &retained)?;

    let records = event.extractor().extract_all(&retained, mode);
    jsonl::write(&out_dir.join("records.jsonl"), &records)?;

    let (mut needs, mut avails) = (Vec::new(), Vec::new());
    for (tweet, record) in retained.into_iter().zip(records.iter().cloned()) {
        let side = if record.kind == RecordKind::Need {
            &mut needs
        } else {
            &mut avails
        };
        side.push(MatchItem {
            id: tweet.id.clone(),
            record: Some(record),
            tweet: Some(tweet),
        });
    }
    let results = rank_and_write(&event, &needs, &avails, &out_dir.join("matches.jsonl"), method, k)?;

    let mut summary = format!(
        "event\t{}\ninput\t{}\nretained\t{}\n",
        event.cfg.event_name,
        tweets.len(),
        records.len()
    );
    summary.push_str(&extract_summary(&records, loaded.malformed));
    let _ = writeln!(summary, "needs\t{}\navailabilities\t{}", needs.len(), avails.len());
    summary.push_str(&match_summary(&results, method));
    if let Some(j) = judgments {
        let report = evaluate(&results, &j)?;
        write_eval(&report, &out_dir.join("eval.json"))?;
        let _ = writeln!(summary, "{report}");
    }
    Ok(summary)
}
