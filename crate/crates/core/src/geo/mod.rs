//! Location inference and geometric helpers.

mod candidates;
mod gazetteer;
mod jaro;
mod segment;

pub use candidates::{propose_candidates, CandidateSettings, LocationCandidate, Origin};
#[cfg(feature = "live")]
pub use gazetteer::live::{HttpGeocoder, LiveSettings};
pub use gazetteer::{
    verify, Gazetteer, GazetteerEntry, GazetteerTable, Granularity, LiveGeocoder, LookupError, Provider, Verification,
    VerifiedLocation,
};
pub use jaro::{jaro, jaro_winkler};
pub use segment::segment_hashtag;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coordinates {
    pub lat: f64,
    pub lon: f64,
}

impl Coordinates {
    pub fn new(lat: f64, lon: f64) -> Self {
        Coordinates { lat, lon }
    }

    pub fn is_valid(&self) -> bool {
        (-90.0..=90.0).contains(&self.lat) && (-180.0..=180.0).contains(&self.lon)
    }
}

/// Great-circle distance in kilometres.
///
/// The complement 1 - h is expanded into non-negative terms so that nearly
/// antipodal points keep full precision.
pub fn haversine_km(a: Coordinates, b: Coordinates) -> f64 {
    let (lat1, lat2) = (a.lat.to_radians(), b.lat.to_radians());
    let half_dlat = (lat2 - lat1) / 2.0;
    let half_sum = (lat2 + lat1) / 2.0;
    let half_dlon = (b.lon - a.lon).to_radians() / 2.0;
    let h = half_dlat.sin().powi(2) + lat1.cos() * lat2.cos() * half_dlon.sin().powi(2);
    let rest = (half_dlat.cos() * half_dlon.cos()).powi(2) + (half_sum.sin() * half_dlon.sin()).powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().atan2(rest.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_lat: f64,
    pub max_lat: f64,
    pub min_lon: f64,
    pub max_lon: f64,
}

impl BoundingBox {
    pub fn new(min_lat: f64, max_lat: f64, min_lon: f64, max_lon: f64) -> Result<Self> {
        let b = BoundingBox {
            min_lat,
            max_lat,
            min_lon,
            max_lon,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let corners = [
            Coordinates::new(self.min_lat, self.min_lon),
            Coordinates::new(self.max_lat, self.max_lon),
        ];
        if !corners.iter().all(Coordinates::is_valid) {
            return Err(Error::BoundingBox("corner outside valid coordinate range".into()));
        }
        if self.min_lat >= self.max_lat || self.min_lon >= self.max_lon {
            return Err(Error::BoundingBox(format!("min must be below max: {self:?}")));
        }
        Ok(())
    }

    pub fn diagonal_km(&self) -> f64 {
        haversine_km(
            Coordinates::new(self.min_lat, self.min_lon),
            Coordinates::new(self.max_lat, self.max_lon),
        )
    }

    pub fn center(&self) -> Coordinates {
        Coordinates::new((self.min_lat + self.max_lat) / 2.0, (self.min_lon + self.max_lon) / 2.0)
    }

    pub fn contains(&self, c: Coordinates) -> bool {
        (self.min_lat..=self.max_lat).contains(&c.lat) && (self.min_lon..=self.max_lon).contains(&c.lon)
    }
}

/// 1 at zero distance, falling linearly to 0 at the box diagonal and clipped there.
pub fn proximity_score(d_km: f64, bbox: &BoundingBox) -> f64 {
    1.0 - (d_km.max(0.0) / bbox.diagonal_km()).min(1.0)
}

/// Smallest pairwise distance between two coordinate sets.
pub fn min_distance_km(a: &[Coordinates], b: &[Coordinates]) -> Option<f64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| haversine_km(*x, *y)))
        .min_by(f64::total_cmp)
}
