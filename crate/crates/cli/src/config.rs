//! Run configuration: a TOML file plus command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use heatprofile::cluster::{Algorithm, InitStrategy, Linkage};
use heatprofile::crossdim::AgreementMethod;
use heatprofile::distance::Metric;
use heatprofile::features::Scaling;
use heatprofile::ingest::ColumnMap;
use heatprofile::profile::{GapPolicy, ProfileOptions};
use heatprofile::Dimension;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    #[default]
    Standard,
    ShiftDominated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub scenario: Scenario,
    pub days: usize,
    /// Overrides every archetype's per-minute noise.
    pub noise_std: Option<f64>,
    pub t_out_spike_rate: f64,
    pub setpoint_drop_rate: f64,
}

impl Default for SynthSection {
    fn default() -> Self {
        Self {
            scenario: Scenario::Standard,
            days: heatprofile::synth::SEASON_DAYS,
            noise_std: None,
            t_out_spike_rate: 0.0,
            setpoint_drop_rate: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Raw household CSVs. Defaults to `<output_dir>/raw`.
    pub input_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub dimensions: Vec<Dimension>,
    pub metrics: Vec<Metric>,
    pub algorithms: Vec<Algorithm>,
    pub k_range: [usize; 2],
    pub linkage: Linkage,
    pub seed: u64,
    pub n_init: usize,
    pub max_iter: usize,
    pub init: InitStrategy,
    /// Scaling of engineered features, which feed the Euclidean metric.
    pub scaling: Scaling,
    /// Sakoe-Chiba band for DTW and DDTW, in samples.
    pub band: Option<usize>,
    /// Points per day the profiles are mean-pooled to before the elastic
    /// distances; 1440 keeps full resolution.
    pub resolution: usize,
    /// k used for cluster plots, PCA labels and cross comparisons.
    pub plot_k: usize,
    pub compare_algorithm: Algorithm,
    pub agreement_method: AgreementMethod,
    pub threads: Option<usize>,
    pub exclude_hot_water: bool,
    pub gap_policy: GapPolicy,
    pub columns: ColumnMap,
    pub synth: SynthSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input_dir: None,
            output_dir: PathBuf::from("out"),
            dimensions: Dimension::ALL.to_vec(),
            metrics: Metric::ALL.to_vec(),
            algorithms: Algorithm::ALL.to_vec(),
            k_range: [2, 10],
            linkage: Linkage::Average,
            seed: 0,
            n_init: 10,
            max_iter: 300,
            init: InitStrategy::FarthestPoint,
            scaling: Scaling::ZScore,
            band: None,
            resolution: heatprofile::MINUTES_PER_DAY,
            plot_k: 3,
            compare_algorithm: Algorithm::KMeans,
            agreement_method: AgreementMethod::Hungarian,
            threads: None,
            exclude_hot_water: false,
            gap_policy: GapPolicy::Interpolate,
            columns: ColumnMap::default(),
            synth: SynthSection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Config(msg));
        let [lo, hi] = self.k_range;
        if lo < 2 || lo > hi {
            return fail(format!("k_range [{lo}, {hi}] must satisfy 2 <= lo <= hi"));
        }
        if self.dimensions.is_empty() || self.metrics.is_empty() || self.algorithms.is_empty() {
            return fail("dimensions, metrics and algorithms must be non-empty".into());
        }
        if has_duplicates(&self.dimensions) || has_duplicates(&self.metrics) || has_duplicates(&self.algorithms) {
            return fail("dimensions, metrics and algorithms must not repeat".into());
        }
        if self.n_init == 0 || self.max_iter == 0 {
            return fail("n_init and max_iter must be at least 1".into());
        }
        if !(2..=heatprofile::MINUTES_PER_DAY).contains(&self.resolution) {
            return fail(format!("resolution {} must lie in 2..=1440", self.resolution));
        }
        if self.plot_k < 2 {
            return fail("plot_k must be at least 2".into());
        }
        if self.threads == Some(0) {
            return fail("threads must be at least 1".into());
        }
        if self.synth.days == 0 {
            return fail("synth.days must be at least 1".into());
        }
        if let Some(s) = self.synth.noise_std {
            if !(s >= 0.0 && s.is_finite()) {
                return fail("synth.noise_std must be finite and non-negative".into());
            }
        }
        for rate in [self.synth.t_out_spike_rate, self.synth.setpoint_drop_rate] {
            if !(0.0..=1.0).contains(&rate) {
                return fail("synth corruption rates must lie in [0, 1]".into());
            }
        }
        Ok(())
    }

    pub fn raw_dir(&self) -> PathBuf {
        self.input_dir.clone().unwrap_or_else(|| self.output_dir.join("raw"))
    }

    pub fn profile_options(&self) -> ProfileOptions {
        ProfileOptions {
            exclude_hot_water: self.exclude_hot_water,
            gap_policy: self.gap_policy,
            ..ProfileOptions::default()
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn has_duplicates<T: PartialEq>(items: &[T]) -> bool {
    items.iter().enumerate().any(|(i, a)| items[..i].contains(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig {
            band: Some(30),
            input_dir: Some("data".into()),
            ..RunConfig::default()
        };
        let back: RunConfig = toml::from_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn parses_enum_spellings() {
        let cfg: RunConfig = toml::from_str(
            r#"
            dimensions = ["heat_demand", "user"]
            metrics = ["DTW"]
            algorithms = ["HAC"]
            linkage = "complete"
            k_range = [3, 5]
            [synth]
            scenario = "shift_dominated"
            days = 7
            "#,
        )
        .unwrap();
        assert_eq!(cfg.dimensions, vec![Dimension::HeatDemand, Dimension::User]);
        assert_eq!(cfg.metrics, vec![Metric::Dtw]);
        assert_eq!(cfg.algorithms, vec![Algorithm::Hac]);
        assert_eq!(cfg.synth.scenario, Scenario::ShiftDominated);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_ranges() {
        assert!(toml::from_str::<RunConfig>("k_rnage = [2, 3]").is_err());
        let cfg = RunConfig {
            k_range: [1, 4],
            ..RunConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
        let cfg = RunConfig {
            metrics: vec![Metric::Ed, Metric::Ed],
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
