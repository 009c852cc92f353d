use heatprofile::distance::{self, LocalCost};
use heatprofile::ingest;
use heatprofile::profile::{self, ProfileOptions};
use heatprofile::synth::{self, ArchetypeSpec, SynthConfig};
use heatprofile::Dimension;

#[test]
fn profiles_recover_templates_within_three_sigma() {
    let days = 30;
    let noise = 2.0;
    let spec = ArchetypeSpec {
        time_shift_minutes: 45,
        amplitude_scale: 1.2,
        noise_std: noise,
        ..ArchetypeSpec::new("a", 2)
    };
    let cfg = SynthConfig::new(vec![spec], days, 3);
    for plan in cfg.plan() {
        let series = cfg.render(&plan);
        for dim in [Dimension::Boiler, Dimension::HeatDemand, Dimension::Temperature, Dimension::User] {
            let p = profile::extract(&series, dim, &ProfileOptions::default()).unwrap();
            let expected = cfg.expected_profile(&plan, dim);
            let mut checked = 0;
            let mut within = 0;
            for m in 0..expected.len() {
                let c = p.coverage[m];
                if c == 0 {
                    continue;
                }
                checked += 1;
                // Heat demand is exactly zero while the boiler is off.
                let sigma = if dim == Dimension::HeatDemand && expected[m] == 0.0 { 0.0 } else { noise };
                if (p.values[m] - expected[m]).abs() <= 3.0 * sigma / (c as f64).sqrt() + 1e-9 {
                    within += 1;
                }
            }
            assert!(checked > 0);
            assert!(within as f64 >= 0.99 * checked as f64, "{dim:?}: {within}/{checked}");
        }
    }
}

#[test]
fn shifted_profiles_are_close_under_dtw_far_under_ed() {
    let shifted = ArchetypeSpec {
        time_shift_minutes: 60,
        ..ArchetypeSpec::new("late", 1)
    };
    let cfg = SynthConfig::new(vec![ArchetypeSpec::new("base", 1), shifted], 1, 0);
    let plans = cfg.plan();
    let a = cfg.expected_profile(&plans[0], Dimension::HeatDemand);
    let b = cfg.expected_profile(&plans[1], Dimension::HeatDemand);
    let ed = distance::euclidean(&a, &b).unwrap();
    let dtw = distance::dtw(&a, &b, LocalCost::Abs).unwrap();
    let ed_l1: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
    assert!(ed > 0.0);
    assert!(dtw < 0.1 * ed_l1, "dtw {dtw} vs lock-step L1 {ed_l1}");
}

#[test]
fn csv_round_trip_preserves_records() {
    let cfg = SynthConfig::new(vec![ArchetypeSpec { noise_std: 1.0, ..ArchetypeSpec::new("a", 3) }], 2, 11);
    let dir = tempfile::tempdir().unwrap();
    let truth = cfg.write_dataset(dir.path()).unwrap();
    assert_eq!(truth.labels.len(), 3);
    assert!(dir.path().join("truth.json").exists());
    for plan in cfg.plan() {
        let original = cfg.render(&plan);
        let back = ingest::parse_csv(&dir.path().join(format!("{}.csv", plan.id)), &Default::default()).unwrap();
        assert_eq!(back.household_id, plan.id);
        assert_eq!(back.records, original.records);
    }
}

#[test]
fn generation_is_deterministic_and_ids_are_stable() {
    let a = synth::standard_config(4);
    let mut small = a.clone();
    small.days = 1;
    let x = small.generate().unwrap();
    let y = small.generate().unwrap();
    assert_eq!(x, y);
    assert_eq!(x.households.len(), 29);
    assert_eq!(x.households[0].household_id, "hh01");
    assert_eq!(x.households[28].household_id, "hh29");
    let labels = x.truth.labels_for(&["hh01".into(), "hh11".into(), "hh29".into()]).unwrap();
    assert_eq!(labels, vec![0, 1, 2]);
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(SynthConfig::new(vec![], 1, 0).generate().is_err());
    assert!(SynthConfig::new(vec![ArchetypeSpec::new("a", 1)], 0, 0).generate().is_err());
    let bad = ArchetypeSpec { amplitude_scale: 0.0, ..ArchetypeSpec::new("a", 1) };
    assert!(SynthConfig::new(vec![bad], 1, 0).generate().is_err());
}
