//! Sensor CSV ingestion, 1-minute resampling and the two cleaning rules.
//!
//! Raw files carry one row per sensor sample with the boiler/room schema
//! (`time, blr_mod_lvl, blr_t, heat, flame, water, t_out, t_ret, t_r, t_r_set,
//! t_set, nodata`). Missing cells stay missing all the way through: nothing
//! is zero-filled or interpolated here.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Outdoor readings strictly above this are treated as sensor faults.
pub const OUTDOOR_MAX_C: f64 = 25.0;

const TIME_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("unparseable timestamp at data row {row}: `{value}`")]
    UnparseableTimestamp { row: usize, value: String },
    #[error("invalid value `{value}` in column `{column}` at data row {row}")]
    InvalidValue {
        row: usize,
        column: String,
        value: String,
    },
    #[error("file contains no data rows")]
    EmptyFile,
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// One timestamped reading. Every measurement is optional; `None` is the
/// missing marker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorRecord {
    pub time: NaiveDateTime,
    /// Boiler modulation, % of maximum output.
    pub blr_mod_lvl: Option<f64>,
    /// Boiler water temperature, °C.
    pub blr_t: Option<f64>,
    /// Circulator active.
    pub heat: Option<bool>,
    /// Burner lit.
    pub flame: Option<bool>,
    /// Domestic hot water requested.
    pub water: Option<bool>,
    /// Outdoor temperature, °C.
    pub t_out: Option<f64>,
    /// Return water temperature, °C.
    pub t_ret: Option<f64>,
    /// Room temperature, °C.
    pub t_r: Option<f64>,
    /// Target room temperature, °C.
    pub t_r_set: Option<f64>,
    /// Boiler target temperature, °C.
    pub t_set: Option<f64>,
    pub nodata: bool,
}

impl SensorRecord {
    /// A record with every field missing.
    pub fn missing(time: NaiveDateTime) -> Self {
        Self {
            time,
            blr_mod_lvl: None,
            blr_t: None,
            heat: None,
            flame: None,
            water: None,
            t_out: None,
            t_ret: None,
            t_r: None,
            t_r_set: None,
            t_set: None,
            nodata: false,
        }
    }

    pub fn is_all_missing(&self) -> bool {
        [
            self.blr_mod_lvl,
            self.blr_t,
            self.t_out,
            self.t_ret,
            self.t_r,
            self.t_r_set,
            self.t_set,
        ]
        .iter()
        .all(Option::is_none)
            && self.heat.is_none()
            && self.flame.is_none()
            && self.water.is_none()
    }
}

/// Column names for each field of [`SensorRecord`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMap {
    pub time: String,
    pub blr_mod_lvl: String,
    pub blr_t: String,
    pub heat: String,
    pub flame: String,
    pub water: String,
    pub t_out: String,
    pub t_ret: String,
    pub t_r: String,
    pub t_r_set: String,
    pub t_set: String,
    pub nodata: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            time: "time".into(),
            blr_mod_lvl: "blr_mod_lvl".into(),
            blr_t: "blr_t".into(),
            heat: "heat".into(),
            flame: "flame".into(),
            water: "water".into(),
            t_out: "t_out".into(),
            t_ret: "t_ret".into(),
            t_r: "t_r".into(),
            t_r_set: "t_r_set".into(),
            t_set: "t_set".into(),
            nodata: "nodata".into(),
        }
    }
}

impl ColumnMap {
    fn names(&self) -> [&str; 12] {
        [
            &self.time,
            &self.blr_mod_lvl,
            &self.blr_t,
            &self.heat,
            &self.flame,
            &self.water,
            &self.t_out,
            &self.t_ret,
            &self.t_r,
            &self.t_r_set,
            &self.t_set,
            &self.nodata,
        ]
    }
}

/// A household's readings on a contiguous 1-minute grid. Minutes without
/// any source sample are present as all-missing records.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholdSeries {
    pub household_id: String,
    pub records: Vec<SensorRecord>,
}

impl HouseholdSeries {
    pub fn new(household_id: impl Into<String>, records: Vec<SensorRecord>) -> Self {
        Self {
            household_id: household_id.into(),
            records,
        }
    }

    /// First and last calendar day covered, inclusive.
    pub fn season_span(&self) -> Option<(NaiveDate, NaiveDate)> {
        let first = self.records.first()?;
        let last = self.records.last()?;
        Some((first.time.date(), last.time.date()))
    }

    /// Number of minutes that carry no data at all.
    pub fn gap_minutes(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.nodata || r.is_all_missing())
            .count()
    }

    /// True when timestamps advance by exactly one minute everywhere.
    pub fn is_on_minute_grid(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| (w[1].time - w[0].time).num_seconds() == 60)
            && self
                .records
                .iter()
                .all(|r| r.time.second() == 0 && r.time.nanosecond() == 0)
    }
}

/// Raw samples as read from disk, sorted by time with exact duplicate
/// timestamps collapsed (last row wins).
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecords {
    pub records: Vec<SensorRecord>,
    pub rows_read: usize,
    pub duplicate_rows: usize,
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    for fmt in [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t);
        }
    }
    DateTime::parse_from_rfc3339(s)
        .ok()
        .map(|t| t.naive_utc())
}

fn is_missing_token(s: &str) -> bool {
    s.is_empty() || ["nan", "na", "null", "none"].contains(&s.to_ascii_lowercase().as_str())
}

fn parse_number(s: &str) -> Result<Option<f64>, ()> {
    let s = s.trim();
    if is_missing_token(s) {
        return Ok(None);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(()),
    }
}

fn parse_flag(s: &str) -> Result<Option<bool>, ()> {
    let s = s.trim();
    if is_missing_token(s) {
        return Ok(None);
    }
    match s.to_ascii_lowercase().as_str() {
        "1" | "true" | "t" | "yes" => Ok(Some(true)),
        "0" | "false" | "f" | "no" => Ok(Some(false)),
        _ => Err(()),
    }
}

/// Reads raw samples from any CSV source.
pub fn read_raw<R: Read>(reader: R, schema: &ColumnMap) -> Result<RawRecords, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut idx = [0usize; 12];
    for (slot, name) in idx.iter_mut().zip(schema.names()) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))?;
    }

    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let row_no = i + 1;
        let cell = |k: usize| row.get(idx[k]).unwrap_or("");
        let time = parse_timestamp(cell(0)).ok_or_else(|| IngestError::UnparseableTimestamp {
            row: row_no,
            value: cell(0).to_string(),
        })?;
        let bad = |k: usize| IngestError::InvalidValue {
            row: row_no,
            column: schema.names()[k].to_string(),
            value: cell(k).to_string(),
        };
        let num = |k: usize| parse_number(cell(k)).map_err(|_| bad(k));
        let flag = |k: usize| parse_flag(cell(k)).map_err(|_| bad(k));
        records.push(SensorRecord {
            time,
            blr_mod_lvl: num(1)?,
            blr_t: num(2)?,
            heat: flag(3)?,
            flame: flag(4)?,
            water: flag(5)?,
            t_out: num(6)?,
            t_ret: num(7)?,
            t_r: num(8)?,
            t_r_set: num(9)?,
            t_set: num(10)?,
            nodata: flag(11)?.unwrap_or(false),
        });
    }
    if records.is_empty() {
        return Err(IngestError::EmptyFile);
    }
    let rows_read = records.len();

    // Stable sort keeps file order among equal timestamps, so the last
    // occurrence in each run is the last one in the file.
    records.sort_by_key(|r| r.time);
    let mut deduped: Vec<SensorRecord> = Vec::with_capacity(records.len());
    for r in records {
        match deduped.last_mut() {
            Some(prev) if prev.time == r.time => *prev = r,
            _ => deduped.push(r),
        }
    }
    Ok(RawRecords {
        duplicate_rows: rows_read - deduped.len(),
        records: deduped,
        rows_read,
    })
}

pub fn read_raw_path(path: &Path, schema: &ColumnMap) -> Result<RawRecords, IngestError> {
    read_raw(File::open(path)?, schema)
}

fn truncate_to_minute(t: NaiveDateTime) -> NaiveDateTime {
    t.with_second(0)
        .and_then(|t| t.with_nanosecond(0))
        .expect("zero seconds is always valid")
}

#[derive(Default)]
struct MinuteAcc {
    sums: [f64; 7],
    counts: [u32; 7],
    flags: [Option<bool>; 3],
    samples: u32,
    nodata_samples: u32,
}

impl MinuteAcc {
    fn push(&mut self, r: &SensorRecord) {
        self.samples += 1;
        if r.nodata {
            self.nodata_samples += 1;
            return;
        }
        let values = [
            r.blr_mod_lvl,
            r.blr_t,
            r.t_out,
            r.t_ret,
            r.t_r,
            r.t_r_set,
            r.t_set,
        ];
        for (k, v) in values.into_iter().enumerate() {
            if let Some(v) = v {
                self.sums[k] += v;
                self.counts[k] += 1;
            }
        }
        for (k, f) in [r.heat, r.flame, r.water].into_iter().enumerate() {
            if let Some(f) = f {
                self.flags[k] = Some(self.flags[k].unwrap_or(false) || f);
            }
        }
    }

    fn finish(&self, time: NaiveDateTime) -> SensorRecord {
        let mean = |k: usize| (self.counts[k] > 0).then(|| self.sums[k] / self.counts[k] as f64);
        SensorRecord {
            time,
            blr_mod_lvl: mean(0),
            blr_t: mean(1),
            t_out: mean(2),
            t_ret: mean(3),
            t_r: mean(4),
            t_r_set: mean(5),
            t_set: mean(6),
            heat: self.flags[0],
            flame: self.flags[1],
            water: self.flags[2],
            nodata: self.samples > 0 && self.nodata_samples == self.samples,
        }
    }
}

/// Aggregates time-sorted samples onto a 1-minute grid: numeric fields by
/// mean, flags by logical OR. `nodata` samples contribute nothing. Minutes
/// between the first and last sample that received no samples come out as
/// all-missing records.
pub fn resample_1min(household_id: impl Into<String>, raw: &[SensorRecord]) -> HouseholdSeries {
    let mut records = Vec::new();
    let mut current: Option<(NaiveDateTime, MinuteAcc)> = None;
    for r in raw {
        let minute = truncate_to_minute(r.time);
        match &mut current {
            Some((m, acc)) if *m == minute => acc.push(r),
            _ => {
                if let Some((m, acc)) = current.take() {
                    records.push(acc.finish(m));
                    let mut gap = m + chrono::Duration::minutes(1);
                    while gap < minute {
                        records.push(SensorRecord::missing(gap));
                        gap += chrono::Duration::minutes(1);
                    }
                }
                let mut acc = MinuteAcc::default();
                acc.push(r);
                current = Some((minute, acc));
            }
        }
    }
    if let Some((m, acc)) = current {
        records.push(acc.finish(m));
    }
    HouseholdSeries::new(household_id, records)
}

/// Reads a household CSV and resamples it. The household id is the file
/// stem.
pub fn parse_csv(path: &Path, schema: &ColumnMap) -> Result<HouseholdSeries, IngestError> {
    let raw = read_raw_path(path, schema)?;
    Ok(resample_1min(household_id_from_path(path), &raw.records))
}

pub fn household_id_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Replaces every outdoor reading above [`OUTDOOR_MAX_C`] with missing.
/// Returns how many values were removed.
pub fn clean_outdoor(series: &mut HouseholdSeries) -> usize {
    let mut removed = 0;
    for r in &mut series.records {
        if matches!(r.t_out, Some(t) if t > OUTDOOR_MAX_C) {
            r.t_out = None;
            removed += 1;
        }
    }
    removed
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IngestWarning {
    /// The circulator never ran, so no setpoint floor exists.
    NoOperationalMinutes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetpointCleaning {
    /// Lowest target temperature seen while heating.
    pub floor: Option<f64>,
    pub substituted: usize,
    pub warning: Option<IngestWarning>,
}

/// Raises idle-period target temperatures that fall below the lowest target
/// seen while the boiler was heating up to that floor.
pub fn clean_target_setpoint(series: &mut HouseholdSeries) -> SetpointCleaning {
    let floor = series
        .records
        .iter()
        .filter(|r| r.heat == Some(true))
        .filter_map(|r| r.t_r_set)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
    let Some(floor) = floor else {
        return SetpointCleaning {
            floor: None,
            substituted: 0,
            warning: Some(IngestWarning::NoOperationalMinutes),
        };
    };
    let mut substituted = 0;
    for r in &mut series.records {
        if r.heat == Some(false) {
            if let Some(v) = r.t_r_set {
                if v < floor {
                    r.t_r_set = Some(floor);
                    substituted += 1;
                }
            }
        }
    }
    SetpointCleaning {
        floor: Some(floor),
        substituted,
        warning: None,
    }
}

/// Per-household bookkeeping for a full ingest pass.
///
/// `rows_read = rows_kept + rows_masked`, where masked rows are those
/// flagged `nodata` plus rows superseded by a later duplicate timestamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub household_id: String,
    pub rows_read: usize,
    pub rows_kept: usize,
    pub rows_masked: usize,
    pub nodata_rows: usize,
    pub duplicate_rows: usize,
    pub minutes: usize,
    pub gap_minutes: usize,
    pub t_out_filtered: usize,
    pub t_r_set_substituted: usize,
    pub setpoint_floor: Option<f64>,
    pub warnings: Vec<IngestWarning>,
}

/// Parse, resample, then apply both cleaning rules (nodata masking happens
/// during resampling, before the filters).
pub fn ingest_household(
    path: &Path,
    schema: &ColumnMap,
) -> Result<(HouseholdSeries, IngestReport), IngestError> {
    let raw = read_raw_path(path, schema)?;
    Ok(ingest_raw(household_id_from_path(path), raw))
}

pub fn ingest_raw(household_id: String, raw: RawRecords) -> (HouseholdSeries, IngestReport) {
    let nodata_rows = raw.records.iter().filter(|r| r.nodata).count();
    let mut series = resample_1min(household_id, &raw.records);
    let t_out_filtered = clean_outdoor(&mut series);
    let setpoint = clean_target_setpoint(&mut series);
    let rows_masked = nodata_rows + raw.duplicate_rows;
    let report = IngestReport {
        household_id: series.household_id.clone(),
        rows_read: raw.rows_read,
        rows_kept: raw.rows_read - rows_masked,
        rows_masked,
        nodata_rows,
        duplicate_rows: raw.duplicate_rows,
        minutes: series.records.len(),
        gap_minutes: series.gap_minutes(),
        t_out_filtered,
        t_r_set_substituted: setpoint.substituted,
        setpoint_floor: setpoint.floor,
        warnings: setpoint.warning.into_iter().collect(),
    };
    (series, report)
}

/// Writes the canonical CSV: default column names, ISO timestamps, flags as
/// `0/1`, missing values as empty cells.
pub fn write_csv<W: Write>(series: &HouseholdSeries, writer: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ColumnMap::default().names())?;
    let num = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    let flag = |v: Option<bool>| match v {
        Some(true) => "1".to_string(),
        Some(false) => "0".to_string(),
        None => String::new(),
    };
    for r in &series.records {
        w.write_record([
            r.time.format(TIME_FORMAT).to_string(),
            num(r.blr_mod_lvl),
            num(r.blr_t),
            flag(r.heat),
            flag(r.flame),
            flag(r.water),
            num(r.t_out),
            num(r.t_ret),
            num(r.t_r),
            num(r.t_r_set),
            num(r.t_set),
            flag(Some(r.nodata)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_path(series: &HouseholdSeries, path: &Path) -> Result<(), IngestError> {
    let file = std::io::BufWriter::new(File::create(path)?);
    write_csv(series, file)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "time,blr_mod_lvl,blr_t,heat,flame,water,t_out,t_ret,t_r,t_r_set,t_set,nodata\n";

    fn t(s: &str) -> NaiveDateTime {
        parse_timestamp(s).unwrap()
    }

    fn read(body: &str) -> Result<RawRecords, IngestError> {
        read_raw(format!("{HEADER}{body}").as_bytes(), &ColumnMap::default())
    }

    fn rec(time: &str) -> SensorRecord {
        SensorRecord::missing(t(time))
    }

    #[test]
    fn three_valid_rows() {
        let raw = read(
            "2022-10-01T10:00:00,40,60,1,1,0,5,45,20,21,60,0\n\
             2022-10-01T10:01:00,41,61,1,1,0,5,45,20,21,60,0\n\
             2022-10-01T10:02:00,,62,true,false,,5.5,45,20,21,60,false\n",
        )
        .unwrap();
        let s = resample_1min("h", &raw.records);
        assert_eq!(s.records.len(), 3);
        assert_eq!(s.records[2].blr_mod_lvl, None);
        assert_eq!(s.records[2].heat, Some(true));
        assert_eq!(s.records[2].flame, Some(false));
        assert_eq!(s.records[2].water, None);
        assert!(s.is_on_minute_grid());
    }

    #[test]
    fn missing_column_is_named() {
        let err = read_raw(
            "time,blr_mod_lvl,blr_t,heat,flame,water,t_out,t_r,t_r_set,t_set,nodata\n".as_bytes(),
            &ColumnMap::default(),
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::MissingColumn(c) if c == "t_ret"));
    }

    #[test]
    fn empty_and_bad_timestamp() {
        assert!(matches!(read(""), Err(IngestError::EmptyFile)));
        let err = read("2022-10-01T10:00:00,1,1,1,1,1,1,1,1,1,1,0\nyesterday,1,1,1,1,1,1,1,1,1,1,0\n")
            .unwrap_err();
        assert!(matches!(err, IngestError::UnparseableTimestamp { row: 2, .. }));
        let err = read("2022-10-01T10:00:00,warm,1,1,1,1,1,1,1,1,1,0\n").unwrap_err();
        assert!(matches!(err, IngestError::InvalidValue { row: 1, ref column, .. } if column == "blr_mod_lvl"));
    }

    #[test]
    fn sub_minute_rows_fold_into_one_minute() {
        let raw = read(
            "2022-10-01T10:00:07,,60,0,0,0,,,,,,0\n\
             2022-10-01T10:00:41,,62,1,0,0,,,,,,0\n",
        )
        .unwrap();
        let s = resample_1min("h", &raw.records);
        assert_eq!(s.records.len(), 1);
        assert_eq!(s.records[0].time, t("2022-10-01T10:00:00"));
        assert_eq!(s.records[0].blr_t, Some(61.0));
        assert_eq!(s.records[0].heat, Some(true));
    }

    #[test]
    fn exact_duplicate_timestamps_last_wins() {
        let raw = read(
            "2022-10-01T10:00:00,,60,0,0,0,,,,,,0\n\
             2022-10-01T10:00:00,,70,0,0,0,,,,,,0\n",
        )
        .unwrap();
        assert_eq!(raw.rows_read, 2);
        assert_eq!(raw.duplicate_rows, 1);
        assert_eq!(raw.records.len(), 1);
        assert_eq!(raw.records[0].blr_t, Some(70.0));
    }

    #[test]
    fn gaps_are_missing_not_zero() {
        let mut a = rec("2022-10-01T10:02:00");
        a.blr_t = Some(50.0);
        let mut b = rec("2022-10-01T10:04:00");
        b.blr_t = Some(52.0);
        let s = resample_1min("h", &[a, b]);
        assert_eq!(s.records.len(), 3);
        assert_eq!(s.records[1].time, t("2022-10-01T10:03:00"));
        assert!(s.records[1].is_all_missing());
        assert_eq!(s.gap_minutes(), 1);
    }

    #[test]
    fn nodata_rows_are_masked() {
        let mut a = rec("2022-10-01T10:00:10");
        a.blr_t = Some(50.0);
        let mut b = rec("2022-10-01T10:00:20");
        b.blr_t = Some(99.0);
        b.nodata = true;
        let mut c = rec("2022-10-01T10:01:00");
        c.t_out = Some(3.0);
        c.nodata = true;
        let s = resample_1min("h", &[a, b, c]);
        assert_eq!(s.records[0].blr_t, Some(50.0));
        assert!(!s.records[0].nodata);
        assert!(s.records[1].nodata);
        assert_eq!(s.records[1].t_out, None);
    }

    #[test]
    fn outdoor_threshold_is_strict() {
        let mut s = HouseholdSeries::new("h", vec![]);
        for (i, v) in [26.3, 25.0, -4.0].into_iter().enumerate() {
            let mut r = rec("2022-10-01T00:00:00");
            r.time += chrono::Duration::minutes(i as i64);
            r.t_out = Some(v);
            r.t_r = Some(19.0);
            s.records.push(r);
        }
        let before = s.clone();
        assert_eq!(clean_outdoor(&mut s), 1);
        assert_eq!(s.records[0].t_out, None);
        assert_eq!(s.records[1].t_out, Some(25.0));
        assert_eq!(s.records[2].t_out, Some(-4.0));
        for (a, b) in s.records.iter().zip(&before.records) {
            assert_eq!(a.t_r, b.t_r);
        }
    }

    fn setpoint_series(rows: &[(bool, f64)]) -> HouseholdSeries {
        let base = t("2022-10-01T00:00:00");
        let records = rows
            .iter()
            .enumerate()
            .map(|(i, &(heat, sp))| {
                let mut r = SensorRecord::missing(base + chrono::Duration::minutes(i as i64));
                r.heat = Some(heat);
                r.t_r_set = Some(sp);
                r
            })
            .collect();
        HouseholdSeries::new("h", records)
    }

    #[test]
    fn setpoint_floor_substitution() {
        let mut s = setpoint_series(&[(true, 21.0), (true, 20.0), (false, 5.0), (false, 22.0)]);
        let out = clean_target_setpoint(&mut s);
        assert_eq!(out.floor, Some(20.0));
        assert_eq!(out.substituted, 1);
        assert_eq!(s.records[2].t_r_set, Some(20.0));
        assert_eq!(s.records[3].t_r_set, Some(22.0));
    }

    #[test]
    fn setpoint_without_heating_is_untouched() {
        let mut s = setpoint_series(&[(false, 5.0), (false, 19.0)]);
        let before = s.clone();
        let out = clean_target_setpoint(&mut s);
        assert_eq!(out.warning, Some(IngestWarning::NoOperationalMinutes));
        assert_eq!(s, before);
    }

    #[test]
    fn parses_alternate_timestamp_forms() {
        assert_eq!(t("2022-10-01 10:00:00"), t("2022-10-01T10:00:00"));
        assert_eq!(t("2022-10-01T10:00"), t("2022-10-01T10:00:00"));
        assert_eq!(t("2022-10-01T10:00:00Z"), t("2022-10-01T10:00:00"));
    }
}
