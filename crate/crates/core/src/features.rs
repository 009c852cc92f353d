//! Engineered features for clustering under the Euclidean metric.
//!
//! Each dimension has a fixed recipe:
//!
//! | dimension   | features                                   |
//! |-------------|--------------------------------------------|
//! | heat demand | 6 time-of-maximum indicators + 7 statistics |
//! | temperature | 7 statistics                               |
//! | user        | 7 statistics                               |
//! | building    | shape set (6)                              |
//! | boiler      | shape set (6)                              |
//!
//! The statistics are mean, std, max, min and the 25th/50th/75th
//! percentiles. The shape set is mean, std, rate of change, excess kurtosis,
//! skewness and variance.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::profile::DailyMeanProfile;
use crate::Dimension;

/// An inclusive minute-of-day range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeInterval {
    pub name: String,
    pub start_minute: usize,
    pub end_minute: usize,
}

impl TimeInterval {
    pub fn new(name: impl Into<String>, start_minute: usize, end_minute: usize) -> Self {
        assert!(start_minute <= end_minute && end_minute < 1440, "interval must not wrap");
        Self {
            name: name.into(),
            start_minute,
            end_minute,
        }
    }

    pub fn contains(&self, minute: usize) -> bool {
        (self.start_minute..=self.end_minute).contains(&minute)
    }
}

/// The six time-of-maximum windows. Evening and night overlap between
/// 20:00 and 21:59, so a peak there sets both indicators.
pub fn default_intervals() -> Vec<TimeInterval> {
    let hm = |h: usize, m: usize| h * 60 + m;
    vec![
        TimeInterval::new("early_morning", hm(5, 0), hm(7, 59)),
        TimeInterval::new("morning", hm(8, 0), hm(9, 59)),
        TimeInterval::new("noon", hm(10, 0), hm(16, 59)),
        TimeInterval::new("evening", hm(17, 0), hm(21, 59)),
        TimeInterval::new("night", hm(20, 0), hm(23, 59)),
        TimeInterval::new("late_night", hm(0, 0), hm(4, 59)),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    #[default]
    Raw,
    ZScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub household_id: String,
    pub dimension: Dimension,
    pub names: Vec<String>,
    pub values: Vec<f64>,
    pub scaling: Scaling,
    /// Set when skewness/kurtosis were undefined (zero spread) and reported
    /// as zero.
    pub degenerate: bool,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

/// Ordered (name, value) pairs produced by one recipe step.
pub type Fragment = Vec<(String, f64)>;

/// Index of the first maximum.
pub fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn tom_features(profile: &DailyMeanProfile, intervals: &[TimeInterval]) -> Fragment {
    let peak = argmax_first(&profile.values);
    intervals
        .iter()
        .map(|iv| (format!("tom_{}", iv.name), if iv.contains(peak) { 1.0 } else { 0.0 }))
        .collect()
}

/// Percentile by linear interpolation between order statistics, `q` in
/// `[0, 1]`, over already-sorted data.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let rank = q * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population variance.
fn variance(values: &[f64], mean: f64) -> f64 {
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64
}

pub fn stat_features(profile: &DailyMeanProfile) -> Fragment {
    let v = &profile.values;
    let m = mean(v);
    let std = variance(v, m).sqrt();
    let mut sorted = v.clone();
    sorted.sort_by(f64::total_cmp);
    vec![
        ("mean".into(), m),
        ("std".into(), std),
        ("max".into(), sorted[sorted.len() - 1]),
        ("min".into(), sorted[0]),
        ("p25".into(), percentile_sorted(&sorted, 0.25)),
        ("p50".into(), percentile_sorted(&sorted, 0.50)),
        ("p75".into(), percentile_sorted(&sorted, 0.75)),
    ]
}

/// Shape statistics; the flag is set when the profile is flat.
pub fn shape_features(profile: &DailyMeanProfile) -> (Fragment, bool) {
    let v = &profile.values;
    let n = v.len() as f64;
    let m = mean(v);
    let var = variance(v, m);
    let std = var.sqrt();
    let rate = if v.len() > 1 {
        v.windows(2).map(|w| w[1] - w[0]).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let degenerate = !(std > 0.0);
    let (skew, kurt) = if degenerate {
        (0.0, 0.0)
    } else {
        let m3 = v.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
        let m4 = v.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
        (m3 / var.powf(1.5), m4 / (var * var) - 3.0)
    };
    (
        vec![
            ("mean".into(), m),
            ("std".into(), std),
            ("rate_of_change".into(), rate),
            ("kurtosis".into(), kurt),
            ("skewness".into(), skew),
            ("variance".into(), var),
        ],
        degenerate,
    )
}

/// Applies the dimension's recipe with the default time-of-maximum windows.
pub fn assemble(dimension: Dimension, profile: &DailyMeanProfile) -> FeatureVector {
    assemble_with(dimension, profile, &default_intervals())
}

pub fn assemble_with(
    dimension: Dimension,
    profile: &DailyMeanProfile,
    intervals: &[TimeInterval],
) -> FeatureVector {
    let mut degenerate = false;
    let parts: Fragment = match dimension {
        Dimension::HeatDemand => {
            let mut f = tom_features(profile, intervals);
            f.extend(stat_features(profile));
            f
        }
        Dimension::Temperature | Dimension::User => stat_features(profile),
        Dimension::Building | Dimension::Boiler => {
            let (f, flat) = shape_features(profile);
            degenerate = flat;
            f
        }
    };
    let (names, values) = parts.into_iter().unzip();
    FeatureVector {
        household_id: profile.household_id.clone(),
        dimension,
        names,
        values,
        scaling: Scaling::Raw,
        degenerate,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub name: String,
    pub mean: f64,
    pub std: f64,
}

/// Per-column scaling parameters, written next to scaled feature files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub dimension: Dimension,
    pub columns: Vec<ColumnScale>,
}

/// Z-scores every column across the population in place. Columns with zero
/// spread are centred only.
pub fn zscore_population(vectors: &mut [FeatureVector]) -> Option<ScalingParams> {
    let first = vectors.first()?;
    let dimension = first.dimension;
    let names = first.names.clone();
    let n = vectors.len() as f64;
    let columns: Vec<ColumnScale> = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let m = vectors.iter().map(|v| v.values[j]).sum::<f64>() / n;
            let var = vectors.iter().map(|v| (v.values[j] - m).powi(2)).sum::<f64>() / n;
            ColumnScale {
                name: name.clone(),
                mean: m,
                std: var.sqrt(),
            }
        })
        .collect();
    for v in vectors.iter_mut() {
        for (x, c) in v.values.iter_mut().zip(&columns) {
            *x = if c.std > 0.0 { (*x - c.mean) / c.std } else { *x - c.mean };
        }
        v.scaling = Scaling::ZScore;
    }
    Some(ScalingParams { dimension, columns })
}

pub fn write_features<W: Write>(vectors: &[FeatureVector], writer: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    if let Some(first) = vectors.first() {
        let mut header = vec!["household_id".to_string()];
        header.extend(first.names.iter().cloned());
        w.write_record(&header)?;
    }
    for v in vectors {
        let mut row = vec![v.household_id.clone()];
        row.extend(v.values.iter().map(|x| x.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::MINUTES_PER_DAY;

    fn profile(values: Vec<f64>) -> DailyMeanProfile {
        DailyMeanProfile {
            household_id: "h".into(),
            dimension: Dimension::HeatDemand,
            coverage: vec![1; values.len()],
            values,
        }
    }

    fn peak_at(minute: usize) -> DailyMeanProfile {
        let mut v = vec![0.0; MINUTES_PER_DAY];
        v[minute] = 1.0;
        profile(v)
    }

    fn tom_map(p: &DailyMeanProfile) -> Vec<(String, f64)> {
        tom_features(p, &default_intervals())
    }

    #[test]
    fn tom_noon_peak() {
        let f = tom_map(&peak_at(600));
        let on: Vec<_> = f.iter().filter(|(_, v)| *v == 1.0).map(|(n, _)| n.as_str()).collect();
        assert_eq!(on, ["tom_noon"]);
    }

    #[test]
    fn tom_overlapping_evening_and_night() {
        let f = tom_map(&peak_at(1260));
        let on: Vec<_> = f.iter().filter(|(_, v)| *v == 1.0).map(|(n, _)| n.as_str()).collect();
        assert_eq!(on, ["tom_evening", "tom_night"]);
    }

    #[test]
    fn tom_flat_profile_is_late_night() {
        let f = tom_map(&profile(vec![3.0; MINUTES_PER_DAY]));
        let on: Vec<_> = f.iter().filter(|(_, v)| *v == 1.0).map(|(n, _)| n.as_str()).collect();
        assert_eq!(on, ["tom_late_night"]);
    }

    fn stats(v: Vec<f64>) -> Vec<f64> {
        stat_features(&profile(v)).into_iter().map(|(_, x)| x).collect()
    }

    #[test]
    fn stats_flat() {
        assert_eq!(stats(vec![5.0; MINUTES_PER_DAY]), vec![5.0, 0.0, 5.0, 5.0, 5.0, 5.0, 5.0]);
    }

    #[test]
    fn stats_arithmetic_sequence() {
        let s = stats((1..=1440).map(f64::from).collect());
        assert_eq!(s[0], 720.5);
        assert_eq!(s[2], 1440.0);
        assert_eq!(s[3], 1.0);
        assert_eq!(s[5], 720.5);
        // rank 0.25 * 1439 = 359.75 -> 360.75
        assert_eq!(s[4], 360.75);
    }

    #[test]
    fn stats_two_valued() {
        let mut v = vec![0.0; 720];
        v.extend(vec![10.0; 720]);
        let s = stats(v);
        assert_eq!(s[0], 5.0);
        assert_eq!(s[4], 0.0);
        assert_eq!(s[6], 10.0);
        assert_eq!(s[1], 5.0);
    }

    #[test]
    fn shape_ramp_and_symmetry() {
        let ramp: Vec<f64> = (0..MINUTES_PER_DAY).map(|i| i as f64 * 0.01).collect();
        let (f, flat) = shape_features(&profile(ramp));
        assert!(!flat);
        let rate = f.iter().find(|(n, _)| n == "rate_of_change").unwrap().1;
        assert!((rate - 0.01).abs() < 1e-12);
        let skew = f.iter().find(|(n, _)| n == "skewness").unwrap().1;
        assert!(skew.abs() < 1e-9);
        let std = f[1].1;
        let var = f[5].1;
        assert!((std * std - var).abs() < 1e-9 * var);
        // Uniform distribution has excess kurtosis -1.2
        let kurt = f[3].1;
        assert!((kurt + 1.2).abs() < 1e-3);
    }

    #[test]
    fn shape_flat_is_flagged() {
        let (f, flat) = shape_features(&profile(vec![2.0; 100]));
        assert!(flat);
        assert_eq!(f[3].1, 0.0);
        assert_eq!(f[4].1, 0.0);
    }

    #[test]
    fn recipe_sizes() {
        let p = peak_at(100);
        assert_eq!(assemble(Dimension::HeatDemand, &p).values.len(), 13);
        assert_eq!(assemble(Dimension::Temperature, &p).values.len(), 7);
        assert_eq!(assemble(Dimension::User, &p).values.len(), 7);
        assert_eq!(assemble(Dimension::Building, &p).values.len(), 6);
        assert_eq!(
            assemble(Dimension::Boiler, &p).names,
            ["mean", "std", "rate_of_change", "kurtosis", "skewness", "variance"]
        );
    }

    #[test]
    fn zscore_columns() {
        let mut vs: Vec<FeatureVector> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&x| FeatureVector {
                household_id: x.to_string(),
                dimension: Dimension::User,
                names: vec!["a".into(), "b".into()],
                values: vec![x, 7.0],
                scaling: Scaling::Raw,
                degenerate: false,
            })
            .collect();
        let params = zscore_population(&mut vs).unwrap();
        assert_eq!(params.columns[0].mean, 2.0);
        assert_eq!(params.columns[1].std, 0.0);
        assert_eq!(vs[1].values, vec![0.0, 0.0]);
        assert!((vs[2].values[0] - 1.224744871391589).abs() < 1e-12);
        assert!(vs.iter().all(|v| v.scaling == Scaling::ZScore));
    }
}
