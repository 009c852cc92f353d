use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn heatprofile(config: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatprofile"))
        .arg("--config")
        .arg(config)
        .args(args)
        .output()
        .expect("binary runs")
}

/// A small, fast run: three days, profiles pooled to 30-minute slots, k in 2..=3.
fn small_config(dir: &Path, extra: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(
        &path,
        format!(
            "output_dir = {:?}\nseed = 3\nk_range = [2, 3]\nresolution = 48\nn_init = 2\n{extra}\n[synth]\ndays = 3\n",
            dir.join("out").to_string_lossy()
        ),
    )
    .unwrap();
    path
}

fn run_ok(config: &Path, step: &str) {
    let out = heatprofile(config, &[step]);
    assert!(out.status.success(), "{step}: {}", String::from_utf8_lossy(&out.stderr));
}

fn files_in(dir: &Path, ext: &str) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(ext))
        .collect();
    names.sort();
    names
}

#[test]
fn full_pipeline_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = dir.path().join("out");
    for step in ["synth", "ingest", "profile", "features", "distances", "sweep", "compare", "report"] {
        run_ok(&cfg, step);
    }

    let raw = out.join("raw");
    assert_eq!(files_in(&raw, ".csv").len(), 29);
    assert!(raw.join("truth.json").exists());
    assert_eq!(files_in(&out.join("cleaned"), ".csv").len(), 29);

    let mut report = csv::Reader::from_path(out.join("ingest_report.csv")).unwrap();
    let headers = report.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = report.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 29);
    for r in &rows {
        let n = |c: &str| r[col(c)].parse::<usize>().unwrap();
        assert_eq!(n("rows_read"), n("rows_kept") + n("rows_masked"));
    }

    let profiles = files_in(&out.join("profiles"), ".csv");
    assert_eq!(profiles.iter().filter(|n| !n.ends_with("_coverage.csv")).count(), 5);
    assert_eq!(profiles.iter().filter(|n| n.ends_with("_coverage.csv")).count(), 5);

    // 5 dimensions x 3 metrics x 2 algorithms x 2 values of k.
    let summary = csv::Reader::from_path(out.join("sweep/summary.csv")).unwrap().into_records().count();
    assert_eq!(summary, 5 * 3 * 2 * 2);

    assert_eq!(files_in(&out.join("compare"), ".svg").len(), 3);
    assert!(out.join("compare/agreement_long.csv").exists());
    assert!(out.join("compare/truth_agreement.csv").exists());
    assert!(!files_in(&out.join("compare/contingency"), ".csv").is_empty());
    assert!(out.join("report.md").exists());
    assert!(out.join("resolved_config.toml").exists());
}

#[test]
fn single_household_ingest_reconciles() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input");
    fs::create_dir(&input).unwrap();
    fs::write(
        input.join("house.csv"),
        "time,blr_mod_lvl,blr_t,heat,flame,water,t_out,t_ret,t_r,t_r_set,t_set,nodata\n\
         2023-01-01T00:00:00,10,50,1,1,0,30,40,20,21,60,0\n\
         2023-01-01T00:00:00,12,50,1,1,0,5,40,20,21,60,0\n\
         2023-01-01T00:01:00,0,45,0,0,0,5,40,19,15,40,0\n\
         2023-01-01T00:02:00,,,,,,,,,,,1\n",
    )
    .unwrap();
    let cfg = small_config(dir.path(), &format!("input_dir = {:?}", input.to_string_lossy()));
    run_ok(&cfg, "ingest");
    let out = dir.path().join("out");
    assert_eq!(files_in(&out.join("cleaned"), ".csv"), vec!["house.csv"]);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("ingest_report.json")).unwrap()).unwrap();
    let h = &report[0];
    assert_eq!(h["rows_read"], 4);
    assert_eq!(h["duplicate_rows"], 1);
    assert_eq!(h["nodata_rows"], 1);
    assert_eq!(h["rows_kept"], 2);
    assert_eq!(h["t_r_set_substituted"], 1);
}

#[test]
fn bad_schema_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input");
    fs::create_dir(&input).unwrap();
    fs::write(input.join("bad.csv"), "time,blr_t\n2023-01-01T00:00:00,50\n").unwrap();
    let cfg = small_config(dir.path(), &format!("input_dir = {:?}", input.to_string_lossy()));
    let out = heatprofile(&cfg, &["ingest"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing column"));
}

#[test]
fn bad_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "k_range = [1, 4]\n").unwrap();
    assert_eq!(heatprofile(&cfg, &["synth"]).status.code(), Some(2));
    fs::write(&cfg, "no_such_key = 1\n").unwrap();
    assert_eq!(heatprofile(&cfg, &["synth"]).status.code(), Some(2));
    let missing = dir.path().join("absent.toml");
    assert_eq!(heatprofile(&missing, &["synth"]).status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config(dir.path(), "dimensions = [\"heat_demand\", \"user\"]");
        for step in ["synth", "ingest", "profile", "sweep", "compare"] {
            run_ok(&cfg, step);
        }
        let out = dir.path().join("out");
        ["sweep/summary.csv", "sweep/assignments/heat_demand.csv", "compare/agreement_long.csv"]
            .map(|f| fs::read(out.join(f)).unwrap())
    };
    assert_eq!(run(), run());
}
