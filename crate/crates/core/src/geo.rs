//! Great-circle distances between region anchor points.

use std::collections::{HashMap, HashSet};
use std::io::Read;

use thiserror::Error;

use crate::clustering::{hac, ClusterError, CondensedDistanceMatrix, Dendrogram, DistanceTag, Linkage};

pub const EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("region `{region}`: latitude {lat} outside [-90, 90] or longitude {lon} outside (-180, 180]")]
    OutOfRange { region: String, lat: f64, lon: f64 },
    #[error("region `{0}` listed twice")]
    DuplicateRegion(String),
    #[error("no coordinates for cuisine `{0}`")]
    MissingRegion(String),
    #[error("regions file, line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionCoordinates {
    pub region: String,
    pub lat: f64,
    pub lon: f64,
}

impl RegionCoordinates {
    pub fn new(region: impl Into<String>, lat: f64, lon: f64) -> Result<Self, GeoError> {
        let region = region.into();
        if !((-90.0..=90.0).contains(&lat) && lon > -180.0 && lon <= 180.0) {
            return Err(GeoError::OutOfRange { region, lat, lon });
        }
        Ok(RegionCoordinates { region, lat, lon })
    }
}

/// Haversine distance in kilometres.
pub fn haversine(a: &RegionCoordinates, b: &RegionCoordinates) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.clamp(0.0, 1.0).sqrt().asin()
}

/// Reads `region,lat,lon` rows. Lines starting with `#` are comments.
pub fn parse_regions<R: Read>(reader: R) -> Result<Vec<RegionCoordinates>, GeoError> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| GeoError::Malformed { line: 1, message: e.to_string() })?;
    if header.iter().collect::<Vec<_>>() != ["region", "lat", "lon"] {
        return Err(GeoError::Malformed { line: 1, message: "expected header `region,lat,lon`".into() });
    }
    let mut seen = HashSet::new();
    let mut regions = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| GeoError::Malformed {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let number = |idx: usize, name: &str| -> Result<f64, GeoError> {
            row.get(idx)
                .unwrap_or("")
                .parse::<f64>()
                .map_err(|e| GeoError::Malformed { line, message: format!("{name}: {e}") })
        };
        let region = row.get(0).unwrap_or("").to_string();
        if region.is_empty() {
            return Err(GeoError::Malformed { line, message: "empty region".into() });
        }
        if !seen.insert(region.clone()) {
            return Err(GeoError::DuplicateRegion(region));
        }
        regions.push(RegionCoordinates::new(region, number(1, "lat")?, number(2, "lon")?)?);
    }
    Ok(regions)
}

/// Haversine matrix over `regions`, optionally restricted to `cuisines`.
pub fn geo_distances(
    coords: &[RegionCoordinates],
    cuisines: Option<&[String]>,
) -> Result<CondensedDistanceMatrix, GeoError> {
    let mut by_name: HashMap<&str, &RegionCoordinates> = HashMap::new();
    for c in coords {
        if by_name.insert(c.region.as_str(), c).is_some() {
            return Err(GeoError::DuplicateRegion(c.region.clone()));
        }
    }
    let chosen: Vec<&RegionCoordinates> = match cuisines {
        Some(names) => names
            .iter()
            .map(|n| by_name.get(n.as_str()).copied().ok_or_else(|| GeoError::MissingRegion(n.clone())))
            .collect::<Result<_, _>>()?,
        None => coords.iter().collect(),
    };
    let labels = chosen.iter().map(|c| c.region.clone()).collect();
    Ok(CondensedDistanceMatrix::from_fn(labels, DistanceTag::Haversine, |i, j| haversine(chosen[i], chosen[j]))?)
}

pub fn geo_tree(
    coords: &[RegionCoordinates],
    cuisines: Option<&[String]>,
    linkage: Linkage,
) -> Result<Dendrogram, GeoError> {
    Ok(hac(&geo_distances(coords, cuisines)?, linkage)?)
}
