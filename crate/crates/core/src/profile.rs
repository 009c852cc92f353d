//! Season-mean daily profiles, one per household and [`Dimension`].

use std::io::{Read, Write};

use chrono::{NaiveDate, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{HouseholdSeries, SensorRecord};
use crate::{Dimension, MINUTES_PER_DAY};

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("{dimension} profile has no contributing days at minute {minute_of_day}")]
    InsufficientCoverage {
        dimension: Dimension,
        minute_of_day: usize,
    },
    #[error("profile file: {0}")]
    Format(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// What to do with minute slots that no day contributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapPolicy {
    /// Linear interpolation between the nearest covered slots, wrapping
    /// around midnight.
    #[default]
    Interpolate,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileOptions {
    /// Only minutes with the circulator running feed the boiler ΔT profile.
    pub boiler_requires_heat: bool,
    /// Skip minutes with a domestic hot water request in the heat demand
    /// profile.
    pub exclude_hot_water: bool,
    /// Inclusive date range to average over; `None` uses everything.
    pub season: Option<(NaiveDate, NaiveDate)>,
    pub gap_policy: GapPolicy,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            boiler_requires_heat: true,
            exclude_hot_water: false,
            season: None,
            gap_policy: GapPolicy::Interpolate,
        }
    }
}

/// Mean value per minute of day over a season.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyMeanProfile {
    pub household_id: String,
    pub dimension: Dimension,
    pub values: Vec<f64>,
    /// Number of days contributing to each slot; zero for interpolated slots.
    pub coverage: Vec<u32>,
}

impl DailyMeanProfile {
    pub fn interpolated_slots(&self) -> usize {
        self.coverage.iter().filter(|&&c| c == 0).count()
    }
}

/// The per-minute quantity a dimension averages, or `None` when the minute
/// does not contribute.
fn slot_value(dimension: Dimension, r: &SensorRecord, opts: &ProfileOptions) -> Option<f64> {
    if r.nodata {
        return None;
    }
    match dimension {
        Dimension::Boiler => {
            if opts.boiler_requires_heat && r.heat != Some(true) {
                return None;
            }
            Some(r.blr_t? - r.t_ret?)
        }
        Dimension::HeatDemand => {
            if opts.exclude_hot_water && r.water == Some(true) {
                return None;
            }
            match (r.blr_mod_lvl, r.flame) {
                (Some(v), _) => Some(v),
                (None, Some(false)) => Some(0.0),
                _ => None,
            }
        }
        Dimension::Temperature => r.t_out,
        Dimension::Building => {
            if r.heat != Some(false) {
                return None;
            }
            Some(r.t_r? - r.t_out?)
        }
        Dimension::User => r.t_r_set,
    }
}

/// Order-independent mean: contributions are sorted before summing so any
/// permutation of days gives the same bits, and the result is clamped to the
/// contributing range.
fn slot_mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let sum: f64 = values.iter().sum();
    let mean = sum / values.len() as f64;
    mean.clamp(values[0], values[values.len() - 1])
}

pub fn extract(
    series: &HouseholdSeries,
    dimension: Dimension,
    opts: &ProfileOptions,
) -> Result<DailyMeanProfile, ProfileError> {
    let mut slots: Vec<Vec<f64>> = vec![Vec::new(); MINUTES_PER_DAY];
    for r in &series.records {
        if let Some((lo, hi)) = opts.season {
            let d = r.time.date();
            if d < lo || d > hi {
                continue;
            }
        }
        if let Some(v) = slot_value(dimension, r, opts) {
            let slot = r.time.hour() as usize * 60 + r.time.minute() as usize;
            slots[slot].push(v);
        }
    }

    let coverage: Vec<u32> = slots.iter().map(|s| s.len() as u32).collect();
    if let Some(first_gap) = coverage.iter().position(|&c| c == 0) {
        if opts.gap_policy == GapPolicy::Error || coverage.iter().all(|&c| c == 0) {
            return Err(ProfileError::InsufficientCoverage {
                dimension,
                minute_of_day: first_gap,
            });
        }
    }
    let mut values: Vec<f64> = slots
        .iter_mut()
        .map(|s| if s.is_empty() { f64::NAN } else { slot_mean(s) })
        .collect();
    fill_circular(&mut values, &coverage);
    Ok(DailyMeanProfile {
        household_id: series.household_id.clone(),
        dimension,
        values,
        coverage,
    })
}

/// Linear interpolation across uncovered slots, treating the day as a
/// circle. Requires at least one covered slot.
fn fill_circular(values: &mut [f64], coverage: &[u32]) {
    let n = values.len();
    let covered: Vec<usize> = (0..n).filter(|&i| coverage[i] > 0).collect();
    if covered.len() == n {
        return;
    }
    if covered.len() == 1 {
        let v = values[covered[0]];
        values.iter_mut().for_each(|x| *x = v);
        return;
    }
    for w in 0..covered.len() {
        let p = covered[w];
        let q = covered[(w + 1) % covered.len()];
        let span = (q + n - p) % n;
        let (vp, vq) = (values[p], values[q]);
        for step in 1..span {
            let i = (p + step) % n;
            let frac = step as f64 / span as f64;
            values[i] = vp + (vq - vp) * frac;
        }
    }
}

pub fn extract_boiler(
    series: &HouseholdSeries,
    opts: &ProfileOptions,
) -> Result<DailyMeanProfile, ProfileError> {
    extract(series, Dimension::Boiler, opts)
}

pub fn extract_heat_demand(
    series: &HouseholdSeries,
    opts: &ProfileOptions,
) -> Result<DailyMeanProfile, ProfileError> {
    extract(series, Dimension::HeatDemand, opts)
}

pub fn extract_temperature(
    series: &HouseholdSeries,
    opts: &ProfileOptions,
) -> Result<DailyMeanProfile, ProfileError> {
    extract(series, Dimension::Temperature, opts)
}

pub fn extract_building(
    series: &HouseholdSeries,
    opts: &ProfileOptions,
) -> Result<DailyMeanProfile, ProfileError> {
    extract(series, Dimension::Building, opts)
}

pub fn extract_user(
    series: &HouseholdSeries,
    opts: &ProfileOptions,
) -> Result<DailyMeanProfile, ProfileError> {
    extract(series, Dimension::User, opts)
}

/// Z-normalises a series in place. Constant series become all zeros.
pub fn znormalize(values: &mut [f64]) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    for v in values.iter_mut() {
        *v = if std > 0.0 { (*v - mean) / std } else { 0.0 };
    }
}

/// Mean-pools `values` down to `target_len` buckets of (nearly) equal width.
pub fn mean_pool(values: &[f64], target_len: usize) -> Vec<f64> {
    let n = values.len();
    if target_len == 0 || target_len >= n {
        return values.to_vec();
    }
    (0..target_len)
        .map(|b| {
            let lo = b * n / target_len;
            let hi = (b + 1) * n / target_len;
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

fn slot_label(i: usize) -> String {
    format!("{:02}:{:02}", i / 60, i % 60)
}

/// Writes one row per profile: `household_id` then one column per minute.
pub fn write_profiles<W: Write>(profiles: &[DailyMeanProfile], writer: W) -> Result<(), ProfileError> {
    write_rows(profiles, writer, |p| p.values.iter().map(|v| v.to_string()).collect())
}

/// Companion to [`write_profiles`] holding the per-slot day counts.
pub fn write_coverage<W: Write>(profiles: &[DailyMeanProfile], writer: W) -> Result<(), ProfileError> {
    write_rows(profiles, writer, |p| p.coverage.iter().map(|v| v.to_string()).collect())
}

fn write_rows<W: Write>(
    profiles: &[DailyMeanProfile],
    writer: W,
    cells: impl Fn(&DailyMeanProfile) -> Vec<String>,
) -> Result<(), ProfileError> {
    let mut w = csv::Writer::from_writer(writer);
    let width = profiles.first().map_or(MINUTES_PER_DAY, |p| p.values.len());
    let mut header = vec!["household_id".to_string()];
    header.extend((0..width).map(slot_label));
    w.write_record(&header)?;
    for p in profiles {
        let mut row = vec![p.household_id.clone()];
        row.extend(cells(p));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a profile CSV written by [`write_profiles`]. Coverage is not part
/// of that file and comes back as all ones.
pub fn read_profiles<R: Read>(
    reader: R,
    dimension: Dimension,
) -> Result<Vec<DailyMeanProfile>, ProfileError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let width = rdr.headers()?.len().saturating_sub(1);
    if width == 0 {
        return Err(ProfileError::Format("no value columns".into()));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let values = row
            .iter()
            .skip(1)
            .map(|c| c.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ProfileError::Format(format!("row {}: {e}", i + 1)))?;
        out.push(DailyMeanProfile {
            household_id: row.get(0).unwrap_or_default().to_string(),
            dimension,
            coverage: vec![1; values.len()],
            values,
        });
    }
    Ok(out)
}
