use std::collections::HashMap;
use std::fmt;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};

use super::candidates::LocationCandidate;
use super::{haversine_km, BoundingBox, Coordinates};
use crate::error::{Error, Result};
use crate::lexicons::{AffixType, LexiconSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Coarse,
    Fine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provider {
    PrimaryGazetteer,
    FineGazetteer,
    Cache,
}

impl Granularity {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "coarse" => Some(Granularity::Coarse),
            "fine" => Some(Granularity::Fine),
            _ => None,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Granularity::Coarse => "coarse",
            Granularity::Fine => "fine",
        }
    }
}

impl Provider {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "primary_gazetteer" => Some(Provider::PrimaryGazetteer),
            "fine_gazetteer" => Some(Provider::FineGazetteer),
            "cache" => Some(Provider::Cache),
            _ => None,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Provider::PrimaryGazetteer => "primary_gazetteer",
            Provider::FineGazetteer => "fine_gazetteer",
            Provider::Cache => "cache",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazetteerEntry {
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    pub granularity: Granularity,
    pub provider: Provider,
}

impl GazetteerEntry {
    pub fn coordinates(&self) -> Coordinates {
        Coordinates::new(self.lat, self.lon)
    }

    fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.name,
            self.lat,
            self.lon,
            self.granularity.as_str(),
            self.provider.as_str()
        )
    }
}

/// Name-indexed gazetteer rows; names match case-insensitively.
#[derive(Debug, Clone, Default)]
pub struct GazetteerTable {
    by_name: HashMap<String, Vec<GazetteerEntry>>,
}

impl GazetteerTable {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut table = GazetteerTable::default();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let bad = |msg: &str| Error::parse(path, idx + 1, msg.to_string());
            if cols.len() != 5 {
                return Err(bad("expected name, lat, lon, granularity, provider"));
            }
            let lat: f64 = cols[1].trim().parse().map_err(|_| bad("bad latitude"))?;
            let lon: f64 = cols[2].trim().parse().map_err(|_| bad("bad longitude"))?;
            if !Coordinates::new(lat, lon).is_valid() {
                return Err(bad("coordinates out of range"));
            }
            table.insert(GazetteerEntry {
                name: cols[0].trim().to_string(),
                lat,
                lon,
                granularity: Granularity::parse(cols[3].trim()).ok_or_else(|| bad("bad granularity"))?,
                provider: Provider::parse(cols[4].trim()).ok_or_else(|| bad("bad provider"))?,
            });
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn insert(&mut self, entry: GazetteerEntry) {
        self.by_name.entry(entry.name.to_lowercase()).or_default().push(entry);
    }

    pub fn lookup(&self, name: &str, granularity: Granularity) -> Vec<GazetteerEntry> {
        self.by_name
            .get(&name.to_lowercase())
            .map(|v| v.iter().filter(|e| e.granularity == granularity).cloned().collect())
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.by_name.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_name.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LookupError {
    Timeout,
    Failed(String),
}

impl fmt::Display for LookupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LookupError::Timeout => f.write_str("timed out"),
            LookupError::Failed(m) => f.write_str(m),
        }
    }
}

/// A network geocoder. Implementations do their own rate limiting.
pub trait LiveGeocoder: Send + Sync {
    fn lookup(&self, name: &str, granularity: Granularity) -> std::result::Result<Vec<GazetteerEntry>, LookupError>;
}

/// Gazetteer handle: committed fixture, then on-disk cache, then live lookup.
/// Live results are appended to the cache. Shareable across threads.
pub struct Gazetteer {
    fixture: GazetteerTable,
    cache: RwLock<GazetteerTable>,
    cache_path: Option<PathBuf>,
    live: Option<Box<dyn LiveGeocoder>>,
    bbox: Option<BoundingBox>,
    failures: Mutex<usize>,
}

impl fmt::Debug for Gazetteer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gazetteer")
            .field("fixture_entries", &self.fixture.len())
            .field("cache_path", &self.cache_path)
            .field("live", &self.live.is_some())
            .field("bbox", &self.bbox)
            .finish()
    }
}

impl Gazetteer {
    pub fn from_table(fixture: GazetteerTable) -> Self {
        Gazetteer {
            fixture,
            cache: RwLock::new(GazetteerTable::default()),
            cache_path: None,
            live: None,
            bbox: None,
            failures: Mutex::new(0),
        }
    }

    pub fn from_fixture(path: &Path) -> Result<Self> {
        Ok(Self::from_table(GazetteerTable::load(path)?))
    }

    /// Attaches an on-disk cache, loading it when the file exists.
    pub fn with_cache(mut self, path: &Path) -> Result<Self> {
        let table = if path.exists() {
            GazetteerTable::load(path)?
        } else {
            GazetteerTable::default()
        };
        self.cache = RwLock::new(table);
        self.cache_path = Some(path.to_path_buf());
        Ok(self)
    }

    pub fn with_live(mut self, live: Box<dyn LiveGeocoder>) -> Self {
        self.live = Some(live);
        self
    }

    pub fn with_bbox(mut self, bbox: BoundingBox) -> Self {
        self.bbox = Some(bbox);
        self
    }

    pub fn bbox(&self) -> Option<&BoundingBox> {
        self.bbox.as_ref()
    }

    /// Number of live lookups that failed so far.
    pub fn failures(&self) -> usize {
        *self.failures.lock().unwrap()
    }

    /// All hits for a name at the given granularity.
    pub fn lookup(&self, name: &str, granularity: Granularity) -> Vec<GazetteerEntry> {
        let hits = self.fixture.lookup(name, granularity);
        if !hits.is_empty() {
            return hits;
        }
        let cached = self.cache.read().unwrap().lookup(name, granularity);
        if !cached.is_empty() {
            return cached;
        }
        let Some(live) = &self.live else {
            return Vec::new();
        };
        match live.lookup(name, granularity) {
            Ok(hits) => {
                let hits: Vec<_> = hits.into_iter().filter(|e| e.coordinates().is_valid()).collect();
                self.remember(name, &hits);
                hits
            }
            Err(e) => {
                let mut failures = self.failures.lock().unwrap();
                *failures += 1;
                log::warn!(
                    "gazetteer lookup for {name:?} failed ({e}); {} failures so far",
                    *failures
                );
                Vec::new()
            }
        }
    }

    fn remember(&self, query: &str, hits: &[GazetteerEntry]) {
        let mut cache = self.cache.write().unwrap();
        let rows: Vec<GazetteerEntry> = hits
            .iter()
            .map(|e| GazetteerEntry {
                name: query.to_string(),
                provider: Provider::Cache,
                ..e.clone()
            })
            .collect();
        for row in &rows {
            cache.insert(row.clone());
        }
        let Some(path) = &self.cache_path else { return };
        let written = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .and_then(|mut f| {
                for row in &rows {
                    writeln!(f, "{}", row.to_tsv())?;
                }
                Ok(())
            });
        if let Err(e) = written {
            log::warn!("cannot append to gazetteer cache {}: {e}", path.display());
        }
    }

    /// Picks one hit: the nearest to the box centre when a box is set, else the first.
    /// The flag is true when the chosen hit lies outside the box.
    pub fn resolve(&self, name: &str, granularity: Granularity) -> Option<(GazetteerEntry, bool)> {
        let hits = self.lookup(name, granularity);
        let Some(bbox) = &self.bbox else {
            return hits.into_iter().next().map(|e| (e, false));
        };
        let centre = bbox.center();
        let best = hits
            .into_iter()
            .min_by(|a, b| haversine_km(a.coordinates(), centre).total_cmp(&haversine_km(b.coordinates(), centre)))?;
        let outside = !bbox.contains(best.coordinates());
        Some((best, outside))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifiedLocation {
    pub candidate: LocationCandidate,
    pub entry: GazetteerEntry,
    pub outside_box: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Verification {
    pub verified: Vec<VerifiedLocation>,
    pub unverified: Vec<LocationCandidate>,
}

/// Surfaces ending in a building or road word go to the fine provider.
pub fn granularity_for(surface: &str, lex: &LexiconSet) -> Granularity {
    let last = surface.split_whitespace().last().unwrap_or("");
    match lex.affix_type(last) {
        Some(AffixType::Buildings | AffixType::Roads) => Granularity::Fine,
        _ => Granularity::Coarse,
    }
}

/// Looks every candidate up. Verified surfaces are deduplicated
/// case-insensitively; failures are returned on the side.
pub fn verify(candidates: &[LocationCandidate], gaz: &Gazetteer, lex: &LexiconSet) -> Verification {
    let mut out = Verification::default();
    let mut seen = std::collections::HashSet::new();
    for cand in candidates {
        let key = cand.surface.to_lowercase();
        if seen.contains(&key) {
            continue;
        }
        match gaz.resolve(&cand.surface, granularity_for(&cand.surface, lex)) {
            Some((entry, outside_box)) => {
                seen.insert(key);
                out.verified.push(VerifiedLocation {
                    candidate: cand.clone(),
                    entry,
                    outside_box,
                });
            }
            None => {
                if !out.unverified.iter().any(|u| u.surface.to_lowercase() == key) {
                    out.unverified.push(cand.clone());
                }
            }
        }
    }
    out.unverified.retain(|u| !seen.contains(&u.surface.to_lowercase()));
    out
}

#[cfg(feature = "live")]
pub mod live {
    //! Blocking HTTP geocoder for GeoNames (coarse) and Nominatim (fine).

    use std::sync::Mutex;
    use std::time::{Duration, Instant};

    use serde::{Deserialize, Serialize};

    use super::{GazetteerEntry, Granularity, LiveGeocoder, LookupError, Provider};

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct LiveSettings {
        /// GeoNames search endpoint, e.g. http://api.geonames.org/searchJSON
        pub coarse_url: String,
        /// Nominatim search endpoint, e.g. https://nominatim.openstreetmap.org/search
        pub fine_url: String,
        #[serde(default)]
        pub username: Option<String>,
        #[serde(default = "default_interval")]
        pub min_interval_ms: u64,
        #[serde(default = "default_timeout")]
        pub timeout_ms: u64,
    }

    fn default_interval() -> u64 {
        1000
    }

    fn default_timeout() -> u64 {
        5000
    }

    pub struct HttpGeocoder {
        settings: LiveSettings,
        agent: ureq::Agent,
        last: Mutex<Option<Instant>>,
    }

    impl HttpGeocoder {
        pub fn new(settings: LiveSettings) -> Self {
            let agent = ureq::AgentBuilder::new()
                .timeout(Duration::from_millis(settings.timeout_ms))
                .user_agent("reliefmatch/0.1")
                .build();
            HttpGeocoder {
                settings,
                agent,
                last: Mutex::new(None),
            }
        }

        /// Holds the lock across the request so lookups are serialised.
        fn get(&self, url: &str, query: &[(&str, &str)]) -> Result<serde_json::Value, LookupError> {
            let mut last = self.last.lock().unwrap();
            let gap = Duration::from_millis(self.settings.min_interval_ms);
            if let Some(prev) = *last {
                let elapsed = prev.elapsed();
                if elapsed < gap {
                    std::thread::sleep(gap - elapsed);
                }
            }
            *last = Some(Instant::now());
            let mut req = self.agent.get(url);
            for (k, v) in query {
                req = req.query(k, v);
            }
            match req.call() {
                Ok(resp) => resp.into_json().map_err(|e| LookupError::Failed(e.to_string())),
                Err(ureq::Error::Transport(t)) if t.kind() == ureq::ErrorKind::Io => Err(LookupError::Timeout),
                Err(e) => Err(LookupError::Failed(e.to_string())),
            }
        }
    }

    impl LiveGeocoder for HttpGeocoder {
        fn lookup(&self, name: &str, granularity: Granularity) -> Result<Vec<GazetteerEntry>, LookupError> {
            match granularity {
                Granularity::Coarse => {
                    let user = self.settings.username.as_deref().unwrap_or("demo");
                    let body = self.get(
                        &self.settings.coarse_url,
                        &[("q", name), ("maxRows", "10"), ("username", user)],
                    )?;
                    Ok(parse_geonames(&body))
                }
                Granularity::Fine => {
                    let body = self.get(
                        &self.settings.fine_url,
                        &[("q", name), ("format", "json"), ("limit", "10")],
                    )?;
                    Ok(parse_nominatim(&body))
                }
            }
        }
    }

    fn number(v: &serde_json::Value) -> Option<f64> {
        v.as_f64().or_else(|| v.as_str()?.parse().ok())
    }

    pub fn parse_geonames(body: &serde_json::Value) -> Vec<GazetteerEntry> {
        let rows = body
            .get("geonames")
            .and_then(|g| g.as_array())
            .cloned()
            .unwrap_or_default();
        rows.iter()
            .filter_map(|r| {
                Some(GazetteerEntry {
                    name: r.get("name")?.as_str()?.to_string(),
                    lat: number(r.get("lat")?)?,
                    lon: number(r.get("lng")?)?,
                    granularity: Granularity::Coarse,
                    provider: Provider::PrimaryGazetteer,
                })
            })
            .collect()
    }

    pub fn parse_nominatim(body: &serde_json::Value) -> Vec<GazetteerEntry> {
        let rows = body.as_array().cloned().unwrap_or_default();
        rows.iter()
            .filter_map(|r| {
                Some(GazetteerEntry {
                    name: r.get("display_name")?.as_str()?.to_string(),
                    lat: number(r.get("lat")?)?,
                    lon: number(r.get("lon")?)?,
                    granularity: Granularity::Fine,
                    provider: Provider::FineGazetteer,
                })
            })
            .collect()
    }

}
