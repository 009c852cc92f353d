//! Synthetic households with planted archetype structure.
//!
//! Each household renders its archetype's templates, cyclically shifted and
//! scaled, into the raw sensor schema with seeded Gaussian noise. The
//! heating schedule follows the shifted heat-demand template: the circulator
//! and burner are on exactly where that template is positive.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::derive_seed;
use crate::ingest::{self, HouseholdSeries, IngestError, SensorRecord};
use crate::{Dimension, MINUTES_PER_DAY};

/// Return water temperature while heating, °C.
const T_RET: f64 = 40.0;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid archetype `{name}`: {reason}")]
    InvalidSpec { name: String, reason: String },
    #[error("no archetypes given")]
    NoArchetypes,
    #[error("days must be at least 1")]
    NoDays,
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// One 1440-point template per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Templates {
    pub boiler: Vec<f64>,
    pub heat_demand: Vec<f64>,
    pub temperature: Vec<f64>,
    pub building: Vec<f64>,
    pub user: Vec<f64>,
}

fn bump(minute: usize, center: f64, half_width: f64, peak: f64) -> f64 {
    let d = minute as f64 - center;
    if d.abs() >= half_width {
        0.0
    } else {
        peak * 0.5 * (1.0 + (PI * d / half_width).cos())
    }
}

fn daily_cosine(minute: usize, mean: f64, amplitude: f64, peak_minute: f64) -> f64 {
    mean + amplitude * (2.0 * PI * (minute as f64 - peak_minute) / MINUTES_PER_DAY as f64).cos()
}

impl Templates {
    /// Morning and evening heating periods around a day-night weather cycle.
    ///
    /// The comfort setpoint starts half an hour after the morning heating,
    /// so the setback value is also seen while the boiler runs.
    pub fn standard() -> Self {
        let heat_demand: Vec<f64> = (0..MINUTES_PER_DAY)
            .map(|m| bump(m, 420.0, 90.0, 60.0) + bump(m, 1170.0, 150.0, 45.0))
            .collect();
        Templates {
            boiler: heat_demand.iter().map(|h| 5.0 + h / 6.0).collect(),
            temperature: (0..MINUTES_PER_DAY).map(|m| daily_cosine(m, 7.0, 3.0, 900.0)).collect(),
            building: (0..MINUTES_PER_DAY).map(|m| daily_cosine(m, 10.0, 3.0, 960.0)).collect(),
            user: (0..MINUTES_PER_DAY)
                .map(|m| if (360..540).contains(&m) || (1020..1320).contains(&m) { 21.0 } else { 17.0 })
                .collect(),
            heat_demand,
        }
    }

    pub fn get(&self, dimension: Dimension) -> &[f64] {
        match dimension {
            Dimension::Boiler => &self.boiler,
            Dimension::HeatDemand => &self.heat_demand,
            Dimension::Temperature => &self.temperature,
            Dimension::Building => &self.building,
            Dimension::User => &self.user,
        }
    }
}

/// Whether a dimension follows the household's time shift and amplitude.
/// Outdoor temperature is shared weather; the setpoint is shifted only.
fn transform_flags(dimension: Dimension) -> (bool, bool) {
    match dimension {
        Dimension::Temperature => (false, false),
        Dimension::User => (true, false),
        Dimension::Boiler | Dimension::HeatDemand | Dimension::Building => (true, true),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeSpec {
    pub name: String,
    pub templates: Templates,
    pub time_shift_minutes: i32,
    pub amplitude_scale: f64,
    /// Per-minute noise standard deviation, in each field's own units.
    pub noise_std: f64,
    pub n_households: usize,
    /// Each household adds a uniform integer shift in `[-j, j]`.
    #[serde(default)]
    pub shift_jitter_minutes: u32,
    /// Lag-one autocorrelation of the noise; 0 gives white noise.
    #[serde(default)]
    pub ar1: f64,
}

impl ArchetypeSpec {
    pub fn new(name: impl Into<String>, n_households: usize) -> Self {
        ArchetypeSpec {
            name: name.into(),
            templates: Templates::standard(),
            time_shift_minutes: 0,
            amplitude_scale: 1.0,
            noise_std: 0.0,
            n_households,
            shift_jitter_minutes: 0,
            ar1: 0.0,
        }
    }

    fn validate(&self) -> Result<(), SynthError> {
        let fail = |reason: &str| {
            Err(SynthError::InvalidSpec {
                name: self.name.clone(),
                reason: reason.to_string(),
            })
        };
        if self.n_households == 0 {
            return fail("n_households must be at least 1");
        }
        if !(self.amplitude_scale > 0.0 && self.amplitude_scale.is_finite()) {
            return fail("amplitude_scale must be positive");
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return fail("noise_std must be finite and non-negative");
        }
        if !(0.0..1.0).contains(&self.ar1) {
            return fail("ar1 must lie in [0, 1)");
        }
        if Dimension::ALL.iter().any(|&d| self.templates.get(d).len() != MINUTES_PER_DAY) {
            return fail("templates must have 1440 points");
        }
        Ok(())
    }
}

/// Faults injected after rendering, for exercising the cleaning rules.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Corruption {
    /// Per-minute probability of an outdoor reading in (25, 60] °C.
    pub t_out_spike_rate: f64,
    /// Per-minute probability, while not heating, of a setpoint 3 to 8 °C
    /// below its template value.
    pub setpoint_drop_rate: f64,
}

impl Corruption {
    fn is_active(&self) -> bool {
        self.t_out_spike_rate > 0.0 || self.setpoint_drop_rate > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub archetypes: Vec<ArchetypeSpec>,
    pub days: usize,
    pub seed: u64,
    pub start: NaiveDate,
    #[serde(default)]
    pub corruption: Corruption,
}

/// One household to render.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseholdPlan {
    pub id: String,
    pub archetype: usize,
    /// Archetype shift plus this household's jitter.
    pub shift_minutes: i32,
    pub seed: u64,
}

/// Ground-truth archetype of every household.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub archetypes: Vec<String>,
    pub labels: BTreeMap<String, usize>,
}

impl Truth {
    /// Labels in the order of `ids`; `None` if any id is unknown.
    pub fn labels_for(&self, ids: &[String]) -> Option<Vec<usize>> {
        ids.iter().map(|id| self.labels.get(id).copied()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("truth serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedDataset {
    pub households: Vec<HouseholdSeries>,
    pub truth: Truth,
}

pub fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2022, 10, 1).expect("valid date")
}

impl SynthConfig {
    pub fn new(archetypes: Vec<ArchetypeSpec>, days: usize, seed: u64) -> Self {
        SynthConfig {
            archetypes,
            days,
            seed,
            start: default_start(),
            corruption: Corruption::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.archetypes.is_empty() {
            return Err(SynthError::NoArchetypes);
        }
        if self.days == 0 {
            return Err(SynthError::NoDays);
        }
        self.archetypes.iter().try_for_each(ArchetypeSpec::validate)
    }

    pub fn n_households(&self) -> usize {
        self.archetypes.iter().map(|a| a.n_households).sum()
    }

    /// Household ids, archetypes, shifts and sub-seeds, in output order.
    pub fn plan(&self) -> Vec<HouseholdPlan> {
        let width = self.n_households().to_string().len().max(2);
        let mut plans = Vec::with_capacity(self.n_households());
        for (a, spec) in self.archetypes.iter().enumerate() {
            for _ in 0..spec.n_households {
                let index = plans.len();
                let seed = derive_seed(self.seed, index as u64);
                let jitter = if spec.shift_jitter_minutes > 0 {
                    let j = spec.shift_jitter_minutes as i32;
                    ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX)).random_range(-j..=j)
                } else {
                    0
                };
                plans.push(HouseholdPlan {
                    id: format!("hh{:0width$}", index + 1),
                    archetype: a,
                    shift_minutes: spec.time_shift_minutes + jitter,
                    seed,
                });
            }
        }
        plans
    }

    pub fn truth(&self) -> Truth {
        Truth {
            archetypes: self.archetypes.iter().map(|a| a.name.clone()).collect(),
            labels: self.plan().into_iter().map(|p| (p.id, p.archetype)).collect(),
        }
    }

    /// The noise-free daily profile a household's data is built from.
    pub fn expected_profile(&self, plan: &HouseholdPlan, dimension: Dimension) -> Vec<f64> {
        let spec = &self.archetypes[plan.archetype];
        let template = spec.templates.get(dimension);
        let (shifted, scaled) = transform_flags(dimension);
        let shift = if shifted { plan.shift_minutes } else { 0 };
        let scale = if scaled { spec.amplitude_scale } else { 1.0 };
        (0..MINUTES_PER_DAY)
            .map(|m| scale * template[(m as i64 - shift as i64).rem_euclid(MINUTES_PER_DAY as i64) as usize])
            .collect()
    }

    /// Renders one household's full minute series.
    pub fn render(&self, plan: &HouseholdPlan) -> HouseholdSeries {
        let spec = &self.archetypes[plan.archetype];
        let profile = |d| self.expected_profile(plan, d);
        let demand = profile(Dimension::HeatDemand);
        let boiler = profile(Dimension::Boiler);
        let outdoor = profile(Dimension::Temperature);
        let building = profile(Dimension::Building);
        let user = profile(Dimension::User);

        let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let innovation = (1.0 - spec.ar1 * spec.ar1).sqrt();
        let mut state = [0.0f64; 5];
        let corrupt = self.corruption.is_active();
        let origin: NaiveDateTime = self.start.and_hms_opt(0, 0, 0).expect("midnight");

        let total = self.days * MINUTES_PER_DAY;
        let mut records = Vec::with_capacity(total);
        for t in 0..total {
            let m = t % MINUTES_PER_DAY;
            for s in state.iter_mut() {
                let z: f64 = normal.sample(&mut rng);
                *s = spec.ar1 * *s + innovation * z;
            }
            let noise = |i: usize| spec.noise_std * state[i];
            let heat = demand[m] > 0.0;
            let t_out = outdoor[m] + noise(0);
            let mut rec = SensorRecord::missing(origin + Duration::minutes(t as i64));
            rec.heat = Some(heat);
            rec.flame = Some(heat);
            rec.water = Some(false);
            rec.blr_mod_lvl = Some(if heat { demand[m] + noise(1) } else { 0.0 });
            rec.t_ret = Some(T_RET);
            rec.blr_t = Some(T_RET + boiler[m] + noise(2));
            rec.t_out = Some(t_out);
            rec.t_r = Some(t_out + building[m] + noise(3));
            rec.t_r_set = Some(user[m] + noise(4));
            rec.t_set = Some(if heat { 60.0 } else { 40.0 });
            if corrupt {
                let spike: f64 = rng.random();
                let drop: f64 = rng.random();
                let spike_value = rng.random_range(25.5..=60.0);
                let drop_value = rng.random_range(3.0..=8.0);
                if spike < self.corruption.t_out_spike_rate {
                    rec.t_out = Some(spike_value);
                }
                if !heat && drop < self.corruption.setpoint_drop_rate {
                    rec.t_r_set = Some(user[m] - drop_value);
                }
            }
            records.push(rec);
        }
        HouseholdSeries::new(plan.id.clone(), records)
    }

    /// Materialises every household. Large seasons take a lot of memory;
    /// prefer [`SynthConfig::render`] per household for those.
    pub fn generate(&self) -> Result<PlantedDataset, SynthError> {
        self.validate()?;
        let plans = self.plan();
        let households = plans.par_iter().map(|p| self.render(p)).collect();
        Ok(PlantedDataset {
            households,
            truth: self.truth(),
        })
    }

    /// Writes one CSV per household plus `truth.json` into `dir`.
    pub fn write_dataset(&self, dir: &Path) -> Result<Truth, SynthError> {
        self.validate()?;
        fs::create_dir_all(dir)?;
        self.plan().par_iter().try_for_each(|p| {
            let series = self.render(p);
            ingest::write_csv_path(&series, &dir.join(format!("{}.csv", p.id)))
        })?;
        let truth = self.truth();
        fs::write(dir.join("truth.json"), truth.to_json())?;
        Ok(truth)
    }
}

pub fn generate(specs: Vec<ArchetypeSpec>, days: usize, seed: u64) -> Result<PlantedDataset, SynthError> {
    SynthConfig::new(specs, days, seed).generate()
}

/// Default per-minute noise for the standard scenarios.
pub const STANDARD_NOISE: f64 = 2.0;
/// Length of one heating season in days.
pub const SEASON_DAYS: usize = 210;

fn three_archetypes(shifts: [i32; 3], jitter: u32) -> Vec<ArchetypeSpec> {
    let names = ["early_low", "mid_medium", "late_high"];
    let scales = [0.7, 1.0, 1.4];
    let sizes = [10, 10, 9];
    (0..3)
        .map(|i| ArchetypeSpec {
            time_shift_minutes: shifts[i],
            amplitude_scale: scales[i],
            noise_std: STANDARD_NOISE,
            shift_jitter_minutes: jitter,
            ..ArchetypeSpec::new(names[i], sizes[i])
        })
        .collect()
}

/// 29 households in three archetypes shifted by -90, 0 and +90 minutes and
/// scaled by 0.7, 1.0 and 1.4, over one heating season.
pub fn standard_config(seed: u64) -> SynthConfig {
    SynthConfig::new(three_archetypes([-90, 0, 90], 15), SEASON_DAYS, seed)
}

/// Same archetype scales, but every household draws its own shift in
/// ±120 minutes, so timing varies more within archetypes than between them.
pub fn shift_dominated_config(seed: u64) -> SynthConfig {
    SynthConfig::new(three_archetypes([0, 0, 0], 120), SEASON_DAYS, seed)
}

pub fn scenario_standard(seed: u64) -> PlantedDataset {
    standard_config(seed)
        .generate()
        .expect("standard scenario is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{extract, ProfileOptions};

    fn small(noise: f64, days: usize) -> SynthConfig {
        let mut a = ArchetypeSpec::new("a", 2);
        a.noise_std = noise;
        let mut b = ArchetypeSpec::new("b", 1);
        b.time_shift_minutes = 60;
        b.amplitude_scale = 1.3;
        b.noise_std = noise;
        SynthConfig::new(vec![a, b], days, 11)
    }

    #[test]
    fn plan_ids_and_truth() {
        let cfg = standard_config(3);
        let plans = cfg.plan();
        assert_eq!(plans.len(), 29);
        assert_eq!(plans[0].id, "hh01");
        assert_eq!(plans[28].id, "hh29");
        let truth = cfg.truth();
        assert_eq!(truth.labels.len(), 29);
        let mut counts = [0; 3];
        truth.labels.values().for_each(|&l| counts[l] += 1);
        assert_eq!(counts, [10, 10, 9]);
        assert!(plans.iter().all(|p| (p.shift_minutes - cfg.archetypes[p.archetype].time_shift_minutes).abs() <= 15));
    }

    #[test]
    fn noise_free_round_trip_is_exact() {
        let cfg = small(0.0, 2);
        let plans = cfg.plan();
        for plan in &plans {
            let mut series = cfg.render(plan);
            assert_eq!(series.records.len(), 2 * MINUTES_PER_DAY);
            assert_eq!(ingest::clean_outdoor(&mut series), 0);
            assert_eq!(ingest::clean_target_setpoint(&mut series).substituted, 0);
            for dim in Dimension::ALL {
                let got = extract(&series, dim, &ProfileOptions::default()).unwrap();
                let want = cfg.expected_profile(plan, dim);
                for m in 0..MINUTES_PER_DAY {
                    if got.coverage[m] > 0 {
                        assert!((got.values[m] - want[m]).abs() < 1e-9, "{dim} slot {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn same_seed_same_data() {
        let cfg = small(1.5, 1);
        let p = &cfg.plan()[1];
        assert_eq!(cfg.render(p), cfg.render(p));
        let other = SynthConfig { seed: 12, ..cfg.clone() };
        assert_ne!(cfg.render(p), other.render(&other.plan()[1]));
    }

    #[test]
    fn heat_follows_shifted_demand() {
        let cfg = small(0.5, 1);
        let plan = &cfg.plan()[2];
        let series = cfg.render(plan);
        let demand = cfg.expected_profile(plan, Dimension::HeatDemand);
        for (r, d) in series.records.iter().zip(&demand) {
            assert_eq!(r.heat, Some(*d > 0.0));
            assert_eq!(r.flame, r.heat);
        }
        // shifted by 60: the morning peak moves from 7:00 to 8:00
        assert_eq!(demand[480], 1.3 * 60.0);
    }

    #[test]
    fn corruption_injects_both_faults() {
        let mut cfg = small(0.0, 1);
        cfg.corruption = Corruption {
            t_out_spike_rate: 0.05,
            setpoint_drop_rate: 0.05,
        };
        let mut series = cfg.render(&cfg.plan()[0]);
        assert!(ingest::clean_outdoor(&mut series) > 0);
        assert!(ingest::clean_target_setpoint(&mut series).substituted > 0);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut cfg = small(0.0, 1);
        cfg.archetypes[0].amplitude_scale = 0.0;
        assert!(matches!(cfg.validate(), Err(SynthError::InvalidSpec { .. })));
        assert!(matches!(SynthConfig::new(vec![], 1, 0).validate(), Err(SynthError::NoArchetypes)));
        assert!(matches!(small(0.0, 0).validate(), Err(SynthError::NoDays)));
    }
}
