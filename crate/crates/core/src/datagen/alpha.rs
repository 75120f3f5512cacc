use std::collections::BTreeMap;
use std::io::Read;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Ratings given by one demographic group on the scale `[0, max_scale]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DemographicRatings {
    pub group_key: String,
    pub ratings: Vec<f64>,
    pub max_scale: f64,
}

impl DemographicRatings {
    pub fn new(group_key: impl Into<String>, ratings: Vec<f64>, max_scale: f64) -> Result<Self> {
        let group_key = group_key.into();
        if !(max_scale > 0.0 && max_scale.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "group {group_key}: max_scale {max_scale} must be positive"
            )));
        }
        if let Some(r) = ratings.iter().find(|r| !(0.0..=max_scale).contains(*r)) {
            return Err(Error::InvalidParams(format!(
                "group {group_key}: rating {r} outside [0, {max_scale}]"
            )));
        }
        Ok(DemographicRatings {
            group_key,
            ratings,
            max_scale,
        })
    }
}

/// User factor: mean rating over `max_scale`, clamped to `[0, 1]`.
pub fn estimate_alpha(group: &DemographicRatings) -> Result<f64> {
    if group.ratings.is_empty() {
        return Err(Error::NoData(format!("group {} has no ratings", group.group_key)));
    }
    let mean = group.ratings.iter().sum::<f64>() / group.ratings.len() as f64;
    Ok((mean / group.max_scale).clamp(0.0, 1.0))
}

#[derive(Deserialize)]
struct RatingRow {
    group_key: String,
    rating: f64,
    max_scale: f64,
}

/// Reads `group_key,rating,max_scale` rows (with header) into groups ordered by key.
/// A group's rows must agree on `max_scale`.
pub fn read_ratings_csv<R: Read>(reader: R) -> Result<Vec<DemographicRatings>> {
    let mut groups: BTreeMap<String, (f64, Vec<f64>)> = BTreeMap::new();
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    for (i, row) in csv.deserialize::<RatingRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let entry = groups
            .entry(row.group_key.clone())
            .or_insert((row.max_scale, Vec::new()));
        if entry.0 != row.max_scale {
            return Err(Error::Parse {
                line,
                message: format!("group {} mixes scales {} and {}", row.group_key, entry.0, row.max_scale),
            });
        }
        entry.1.push(row.rating);
    }
    groups
        .into_iter()
        .map(|(key, (scale, ratings))| DemographicRatings::new(key, ratings, scale))
        .collect()
}
