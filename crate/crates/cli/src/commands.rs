//! The pipeline stages. Each reads from the run's directories, writes its
//! own subdirectory of `output_dir`, and produces identical files for
//! identical inputs and configuration.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use heatprofile::cluster::{self, Algorithm, ClusterAssignment, SweepConfig, SweepData, SweepEntry};
use heatprofile::crossdim::{self, AgreementMethod};
use heatprofile::distance::{DistanceOptions, Metric};
use heatprofile::features::{self, FeatureVector, Scaling, ScalingParams};
use heatprofile::ingest::{self, IngestReport};
use heatprofile::pca;
use heatprofile::profile::{self, DailyMeanProfile};
use heatprofile::synth::{self, Truth};
use heatprofile::Dimension;
use rayon::prelude::*;

use crate::config::{RunConfig, Scenario};
use crate::error::CliError;
use crate::svg;

pub type Result<T> = std::result::Result<T, CliError>;

const TRUTH_FILE: &str = "truth.json";

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| CliError::data(path, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::data(path, e))
}

fn open_writer(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path).map_err(|e| CliError::data(path, e))?))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<fs::File>>> {
    Ok(csv::Writer::from_writer(open_writer(path)?))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Household CSV files in a directory, sorted by name.
pub fn list_csv(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::data(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::data(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "csv") && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(CliError::Data(format!("no CSV files in {}", dir.display())));
    }
    Ok(files)
}

pub fn cleaned_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir.join("cleaned")
}

pub fn profiles_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir.join("profiles")
}

pub fn sweep_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir.join("sweep")
}

pub fn compare_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir.join("compare")
}

pub fn write_resolved_config(cfg: &RunConfig) -> Result<()> {
    create_dir(&cfg.output_dir)?;
    write_file(&cfg.output_dir.join("resolved_config.toml"), cfg.to_toml())
}

pub fn synth_config(cfg: &RunConfig) -> synth::SynthConfig {
    let mut sc = match cfg.synth.scenario {
        Scenario::Standard => synth::standard_config(cfg.seed),
        Scenario::ShiftDominated => synth::shift_dominated_config(cfg.seed),
    };
    sc.days = cfg.synth.days;
    if let Some(noise) = cfg.synth.noise_std {
        sc.archetypes.iter_mut().for_each(|a| a.noise_std = noise);
    }
    sc.corruption = synth::Corruption {
        t_out_spike_rate: cfg.synth.t_out_spike_rate,
        setpoint_drop_rate: cfg.synth.setpoint_drop_rate,
    };
    sc
}

/// Writes a planted dataset into the raw input directory.
pub fn cmd_synth(cfg: &RunConfig) -> Result<Truth> {
    let dir = cfg.raw_dir();
    create_dir(&dir)?;
    Ok(synth_config(cfg).write_dataset(&dir)?)
}

/// Cleans every raw household file and writes the per-household report.
pub fn cmd_ingest(cfg: &RunConfig) -> Result<Vec<IngestReport>> {
    let files = list_csv(&cfg.raw_dir())?;
    let out = cleaned_dir(cfg);
    create_dir(&out)?;
    let reports = files
        .par_iter()
        .map(|path| {
            let (series, report) =
                ingest::ingest_household(path, &cfg.columns).map_err(|e| CliError::data(path, e))?;
            if report.rows_read != report.rows_kept + report.rows_masked {
                return Err(CliError::Internal(format!(
                    "{}: row counts do not reconcile",
                    path.display()
                )));
            }
            let target = out.join(format!("{}.csv", series.household_id));
            ingest::write_csv_path(&series, &target).map_err(|e| CliError::data(&target, e))?;
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut w = csv_writer(&cfg.output_dir.join("ingest_report.csv"))?;
    w.write_record([
        "household_id",
        "rows_read",
        "rows_kept",
        "rows_masked",
        "nodata_rows",
        "duplicate_rows",
        "minutes",
        "gap_minutes",
        "t_out_filtered",
        "t_r_set_substituted",
        "setpoint_floor",
        "warnings",
    ])?;
    for r in &reports {
        let warnings: Vec<String> = r
            .warnings
            .iter()
            .map(|w| serde_json::to_value(w).map(|v| v["kind"].as_str().unwrap_or("").to_string()))
            .collect::<std::result::Result<_, _>>()?;
        w.write_record([
            r.household_id.clone(),
            r.rows_read.to_string(),
            r.rows_kept.to_string(),
            r.rows_masked.to_string(),
            r.nodata_rows.to_string(),
            r.duplicate_rows.to_string(),
            r.minutes.to_string(),
            r.gap_minutes.to_string(),
            r.t_out_filtered.to_string(),
            r.t_r_set_substituted.to_string(),
            fmt_opt(r.setpoint_floor),
            warnings.join(";"),
        ])?;
    }
    w.flush()?;
    write_file(
        &cfg.output_dir.join("ingest_report.json"),
        serde_json::to_string_pretty(&reports)?,
    )?;
    Ok(reports)
}

/// Extracts the configured daily mean profiles from the cleaned files.
pub fn cmd_profile(cfg: &RunConfig) -> Result<BTreeMap<Dimension, Vec<DailyMeanProfile>>> {
    let files = list_csv(&cleaned_dir(cfg))?;
    let opts = cfg.profile_options();
    let per_household = files
        .par_iter()
        .map(|path| {
            let series = ingest::parse_csv(path, &cfg.columns).map_err(|e| CliError::data(path, e))?;
            cfg.dimensions
                .iter()
                .map(|&d| profile::extract(&series, d, &opts).map_err(|e| CliError::data(path, e)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let dir = profiles_dir(cfg);
    create_dir(&dir)?;
    let mut out = BTreeMap::new();
    for (i, &dim) in cfg.dimensions.iter().enumerate() {
        let profiles: Vec<DailyMeanProfile> = per_household.iter().map(|p| p[i].clone()).collect();
        profile::write_profiles(&profiles, open_writer(&dir.join(format!("{dim}.csv")))?)?;
        profile::write_coverage(&profiles, open_writer(&dir.join(format!("{dim}_coverage.csv")))?)?;
        out.insert(dim, profiles);
    }
    Ok(out)
}

pub fn load_profiles(cfg: &RunConfig, dim: Dimension) -> Result<Vec<DailyMeanProfile>> {
    let path = profiles_dir(cfg).join(format!("{dim}.csv"));
    let file = fs::File::open(&path).map_err(|e| CliError::data(&path, e))?;
    profile::read_profiles(std::io::BufReader::new(file), dim).map_err(|e| CliError::data(&path, e))
}

/// Engineered features for one dimension, scaled as configured.
pub fn feature_vectors(
    cfg: &RunConfig,
    dim: Dimension,
    profiles: &[DailyMeanProfile],
) -> (Vec<FeatureVector>, Option<ScalingParams>) {
    let mut vectors: Vec<FeatureVector> = profiles.iter().map(|p| features::assemble(dim, p)).collect();
    let params = match cfg.scaling {
        Scaling::ZScore => features::zscore_population(&mut vectors),
        Scaling::Raw => None,
    };
    (vectors, params)
}

pub fn cmd_features(cfg: &RunConfig) -> Result<()> {
    let dir = cfg.output_dir.join("features");
    create_dir(&dir)?;
    for &dim in &cfg.dimensions {
        let profiles = load_profiles(cfg, dim)?;
        let (vectors, params) = feature_vectors(cfg, dim, &profiles);
        features::write_features(&vectors, open_writer(&dir.join(format!("{dim}.csv")))?)?;
        if let Some(params) = params {
            write_file(
                &dir.join(format!("{dim}_scaling.json")),
                serde_json::to_string_pretty(&params)?,
            )?;
        }
    }
    Ok(())
}

/// Inputs for every metric of one dimension: features for ED, pooled
/// profiles for the elastic metrics.
pub fn sweep_data(cfg: &RunConfig, dim: Dimension, profiles: &[DailyMeanProfile]) -> Result<SweepData> {
    let ids: Vec<String> = profiles.iter().map(|p| p.household_id.clone()).collect();
    let (vectors, _) = feature_vectors(cfg, dim, profiles);
    let ed: Vec<Vec<f64>> = vectors.into_iter().map(|v| v.values).collect();
    let series: Vec<Vec<f64>> = profiles
        .iter()
        .map(|p| {
            if cfg.resolution == p.values.len() {
                p.values.clone()
            } else {
                profile::mean_pool(&p.values, cfg.resolution)
            }
        })
        .collect();
    let opts = DistanceOptions { band: cfg.band };
    Ok(SweepData::build(ids, ed, &series, &cfg.metrics, &opts)?)
}

pub fn cmd_distances(cfg: &RunConfig) -> Result<()> {
    let dir = cfg.output_dir.join("distances");
    create_dir(&dir)?;
    for &dim in &cfg.dimensions {
        let profiles = load_profiles(cfg, dim)?;
        let data = sweep_data(cfg, dim, &profiles)?;
        for m in &data.matrices {
            let stem = format!("{dim}_{}", m.metric);
            m.write_csv(open_writer(&dir.join(format!("{stem}.csv")))?)?;
            let mut bin = open_writer(&dir.join(format!("{stem}.bin")))?;
            m.write_binary(&mut bin)?;
            bin.flush()?;
        }
    }
    Ok(())
}

fn sweep_config(cfg: &RunConfig) -> SweepConfig {
    SweepConfig {
        k_min: cfg.k_range[0],
        k_max: cfg.k_range[1],
        algorithms: cfg.algorithms.clone(),
        metrics: cfg.metrics.clone(),
        linkage: cfg.linkage,
        seed: cfg.seed,
        n_init: cfg.n_init,
        max_iter: cfg.max_iter,
        init: cfg.init,
    }
}

fn column_name(metric: Metric, algorithm: Algorithm, k: usize) -> String {
    format!("{metric}_{algorithm}_k{k}")
}

/// Clusters every configured combination, scores it, and writes the summary,
/// labels, cluster profile plots and PCA projections.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<()> {
    let dir = sweep_dir(cfg);
    for sub in ["assignments", "plots", "cluster_profiles", "pca"] {
        create_dir(&dir.join(sub))?;
    }
    let scfg = sweep_config(cfg);
    let mut summary = csv_writer(&dir.join("summary.csv"))?;
    summary.write_record(["dimension", "metric", "algorithm", "k", "sil", "dbi", "chi", "empty_flag"])?;
    for &dim in &cfg.dimensions {
        let profiles = load_profiles(cfg, dim)?;
        let data = sweep_data(cfg, dim, &profiles)?;
        let mut entries = cluster::sweep(&data, &scfg)?;
        entries.sort_by_key(|e| (e.assignment.metric, e.assignment.algorithm, e.assignment.k));
        for e in &entries {
            let a = &e.assignment;
            summary.write_record([
                dim.to_string(),
                a.metric.to_string(),
                a.algorithm.to_string(),
                a.k.to_string(),
                fmt_opt(e.scores.silhouette),
                fmt_opt(e.scores.dbi),
                fmt_opt(e.scores.chi),
                u8::from(e.degenerate).to_string(),
            ])?;
        }
        write_assignments(&dir.join("assignments").join(format!("{dim}.csv")), &data.ids, &entries)?;
        for e in entries.iter().filter(|e| e.assignment.k == cfg.plot_k) {
            write_cluster_profiles(&dir, dim, &profiles, &e.assignment)?;
        }
        write_pca(cfg, &dir.join("pca"), dim, &profiles, &data, &entries)?;
    }
    summary.flush()?;
    Ok(())
}

fn write_assignments(path: &Path, ids: &[String], entries: &[SweepEntry]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["household_id".to_string()];
    header.extend(
        entries
            .iter()
            .map(|e| column_name(e.assignment.metric, e.assignment.algorithm, e.assignment.k)),
    );
    w.write_record(&header)?;
    for (i, id) in ids.iter().enumerate() {
        let mut row = vec![id.clone()];
        row.extend(entries.iter().map(|e| e.assignment.labels[i].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Per-cluster mean and median profiles, as CSV and as an SVG chart.
fn write_cluster_profiles(
    dir: &Path,
    dim: Dimension,
    profiles: &[DailyMeanProfile],
    a: &ClusterAssignment,
) -> Result<()> {
    let stem = format!("{dim}_{}_{}_k{}", a.metric, a.algorithm, a.k);
    let width = profiles[0].values.len();
    let mut w = csv_writer(&dir.join("cluster_profiles").join(format!("{stem}.csv")))?;
    let mut header = vec!["cluster".to_string(), "stat".to_string(), "size".to_string()];
    header.extend((0..width).map(|i| format!("{:02}:{:02}", i / 60, i % 60)));
    w.write_record(&header)?;
    let mut lines = Vec::new();
    for c in 0..a.k {
        let members: Vec<&DailyMeanProfile> =
            profiles.iter().zip(&a.labels).filter(|(_, &l)| l == c).map(|(p, _)| p).collect();
        if members.is_empty() {
            continue;
        }
        let mean: Vec<f64> = (0..width)
            .map(|s| members.iter().map(|p| p.values[s]).sum::<f64>() / members.len() as f64)
            .collect();
        let med: Vec<f64> = (0..width)
            .map(|s| median(&mut members.iter().map(|p| p.values[s]).collect::<Vec<_>>()))
            .collect();
        for (stat, values) in [("mean", &mean), ("median", &med)] {
            let mut row = vec![c.to_string(), stat.to_string(), members.len().to_string()];
            row.extend(values.iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        lines.push(svg::Line {
            label: format!("cluster {c} mean (n={})", members.len()),
            color: svg::color(c),
            dashed: false,
            values: mean,
        });
        lines.push(svg::Line {
            label: format!("cluster {c} median"),
            color: svg::color(c),
            dashed: true,
            values: med,
        });
    }
    w.flush()?;
    let title = format!("{dim}: {} + {}, k = {}", a.algorithm, a.metric, a.k);
    write_file(
        &dir.join("plots").join(format!("{stem}_profiles.svg")),
        svg::line_chart(&title, dim.as_str(), &lines),
    )
}

/// PCA scatter per metric: profiles for the elastic metrics, features for
/// ED, coloured by the comparison algorithm's labels at `plot_k`.
fn write_pca(
    cfg: &RunConfig,
    dir: &Path,
    dim: Dimension,
    profiles: &[DailyMeanProfile],
    data: &SweepData,
    entries: &[SweepEntry],
) -> Result<()> {
    if data.ids.len() < 3 {
        return Ok(());
    }
    let raw: Vec<Vec<f64>> = profiles.iter().map(|p| p.values.clone()).collect();
    let project = |rows: &[Vec<f64>]| {
        pca::pca2(&data.ids, rows).map_err(|e| CliError::Data(format!("PCA for {dim}: {e}")))
    };
    let mut on_profiles = None;
    let mut on_features = None;
    for &metric in &cfg.metrics {
        let projection = match metric {
            Metric::Ed => {
                if on_features.is_none() {
                    on_features = Some(project(&data.vectors)?);
                }
                on_features.as_ref()
            }
            _ => {
                if on_profiles.is_none() {
                    on_profiles = Some(project(&raw)?);
                }
                on_profiles.as_ref()
            }
        }
        .expect("projection computed");
        let labels = entries
            .iter()
            .find(|e| {
                e.assignment.metric == metric
                    && e.assignment.algorithm == cfg.compare_algorithm
                    && e.assignment.k == cfg.plot_k
            })
            .map(|e| e.assignment.labels.clone());
        let stem = format!("{dim}_{metric}");
        let mut w = csv_writer(&dir.join(format!("{stem}.csv")))?;
        w.write_record(["household_id", "pc1", "pc2", "label"])?;
        for i in 0..data.ids.len() {
            let label = labels.as_ref().map(|l| l[i].to_string()).unwrap_or_default();
            w.write_record([
                data.ids[i].clone(),
                projection.pc1[i].to_string(),
                projection.pc2[i].to_string(),
                label,
            ])?;
        }
        w.flush()?;
        write_file(
            &dir.join(format!("{stem}_variance.json")),
            serde_json::to_string_pretty(&serde_json::json!({
                "explained_variance_ratio": projection.explained_variance_ratio,
                "rank_deficient": projection.rank_deficient,
            }))?,
        )?;
        let points: Vec<(f64, f64, usize)> = (0..data.ids.len())
            .map(|i| (projection.pc1[i], projection.pc2[i], labels.as_ref().map_or(0, |l| l[i])))
            .collect();
        let [r1, r2] = projection.explained_variance_ratio;
        let title = format!("{dim} ({metric} labels, k = {})", cfg.plot_k);
        write_file(
            &dir.join(format!("{stem}.svg")),
            svg::scatter(
                &title,
                &format!("PC1 ({:.1}%)", 100.0 * r1),
                &format!("PC2 ({:.1}%)", 100.0 * r2),
                &points,
            ),
        )?;
    }
    Ok(())
}

/// Labels per column of one dimension's assignments file.
pub fn read_assignments(path: &Path) -> Result<(Vec<String>, BTreeMap<String, Vec<usize>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::data(path, e))?;
    let header: Vec<String> = r.headers()?.iter().skip(1).map(str::to_string).collect();
    let mut ids = Vec::new();
    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); header.len()];
    for row in r.records() {
        let row = row?;
        ids.push(row.get(0).unwrap_or_default().to_string());
        for (j, cell) in row.iter().skip(1).enumerate() {
            let label = cell
                .parse()
                .map_err(|_| CliError::data(path, format!("bad label `{cell}`")))?;
            columns
                .get_mut(j)
                .ok_or_else(|| CliError::data(path, "ragged row"))?
                .push(label);
        }
    }
    Ok((ids, header.into_iter().zip(columns).collect()))
}

fn assignment_from(ids: &[String], labels: Vec<usize>, metric: Metric, algorithm: Algorithm) -> ClusterAssignment {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    ClusterAssignment {
        ids: ids.to_vec(),
        labels,
        k,
        algorithm,
        metric,
        linkage: None,
        centers: None,
        objective: None,
        empty_clusters: Vec::new(),
        seed: None,
    }
}

/// Contingency tables between metrics, cross-dimension agreement per metric,
/// and agreement with the planted truth when a truth file is present.
pub fn cmd_compare(cfg: &RunConfig) -> Result<()> {
    let dir = compare_dir(cfg);
    create_dir(&dir.join("contingency"))?;
    let k = cfg.plot_k;
    let alg = cfg.compare_algorithm;
    let mut by_dim: BTreeMap<Dimension, BTreeMap<Metric, ClusterAssignment>> = BTreeMap::new();
    let mut all_columns: Vec<(Dimension, Vec<String>, BTreeMap<String, Vec<usize>>)> = Vec::new();
    for &dim in &cfg.dimensions {
        let path = sweep_dir(cfg).join("assignments").join(format!("{dim}.csv"));
        let (ids, columns) = read_assignments(&path)?;
        let mut per_metric = BTreeMap::new();
        for &metric in &cfg.metrics {
            let name = column_name(metric, alg, k);
            let labels = columns
                .get(&name)
                .ok_or_else(|| CliError::data(&path, format!("no column {name}; is plot_k within the swept range?")))?;
            per_metric.insert(metric, assignment_from(&ids, labels.clone(), metric, alg));
        }
        by_dim.insert(dim, per_metric);
        all_columns.push((dim, ids, columns));
    }

    for &dim in &cfg.dimensions {
        let per_metric = &by_dim[&dim];
        for (i, &ma) in cfg.metrics.iter().enumerate() {
            for &mb in &cfg.metrics[i + 1..] {
                let (a, b) = (&per_metric[&ma], &per_metric[&mb]);
                let table = crossdim::contingency(a, b)?;
                if table.row_sums.iter().map(|&x| x as usize).collect::<Vec<_>>() != a.sizes()
                    || table.total as usize != a.ids.len()
                {
                    return Err(CliError::Internal(format!("{dim} {ma} vs {mb}: margins do not reconcile")));
                }
                let path = dir.join("contingency").join(format!("{dim}_{alg}_k{k}_{ma}_vs_{mb}.csv"));
                let mut w = open_writer(&path)?;
                table.write_csv(&mut w, ma.as_str(), mb.as_str())?;
                w.flush()?;
            }
        }
    }

    let mut long = csv_writer(&dir.join("agreement_long.csv"))?;
    long.write_record(["metric", "method", "dimension_a", "dimension_b", "agreement"])?;
    if cfg.dimensions.len() >= 2 {
        for &metric in &cfg.metrics {
            for method in AgreementMethod::ALL {
                let pairs: Vec<(Dimension, &ClusterAssignment)> =
                    cfg.dimensions.iter().map(|&d| (d, &by_dim[&d][&metric])).collect();
                let matrix = crossdim::cross_dimension_heatmap(&pairs, method)?;
                let mut w = open_writer(&dir.join(format!("agreement_{metric}_{}.csv", method.as_str())))?;
                matrix.write_csv(&mut w)?;
                w.flush()?;
                let n = matrix.dimensions.len();
                for i in 0..n {
                    for j in i + 1..n {
                        long.write_record([
                            metric.to_string(),
                            method.as_str().to_string(),
                            matrix.dimensions[i].to_string(),
                            matrix.dimensions[j].to_string(),
                            matrix.proportions[i][j].to_string(),
                        ])?;
                    }
                }
                if method == cfg.agreement_method {
                    let labels: Vec<String> = matrix.dimensions.iter().map(|d| d.to_string()).collect();
                    let cells: Vec<Vec<Option<f64>>> = (0..n)
                        .map(|i| (0..n).map(|j| (i != j).then(|| matrix.proportions[i][j])).collect())
                        .collect();
                    let title = format!("{metric}: label agreement ({}, k = {k})", method.as_str());
                    write_file(
                        &dir.join(format!("agreement_{metric}.svg")),
                        svg::heatmap(&title, &labels, &cells),
                    )?;
                }
            }
        }
    }
    long.flush()?;

    let truth_path = cfg.raw_dir().join(TRUTH_FILE);
    if truth_path.is_file() {
        let truth: Truth = serde_json::from_str(
            &fs::read_to_string(&truth_path).map_err(|e| CliError::data(&truth_path, e))?,
        )
        .map_err(|e| CliError::data(&truth_path, e))?;
        let mut w = csv_writer(&dir.join("truth_agreement.csv"))?;
        w.write_record(["dimension", "column", "hungarian", "pair_counting"])?;
        for (dim, ids, columns) in &all_columns {
            let Some(truth_labels) = truth.labels_for(ids) else {
                return Err(CliError::data(&truth_path, "households differ from the truth file"));
            };
            for (name, labels) in columns {
                w.write_record([
                    dim.to_string(),
                    name.clone(),
                    crossdim::agreement_labels(labels, &truth_labels, AgreementMethod::Hungarian).to_string(),
                    crossdim::agreement_labels(labels, &truth_labels, AgreementMethod::PairCounting).to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct SummaryRow {
    dimension: String,
    metric: String,
    algorithm: String,
    k: usize,
    scores: [Option<f64>; 3],
    empty: bool,
}

fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::data(path, e))?;
    let parse = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| CliError::data(path, format!("bad number `{s}`")))
        }
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 8 {
            return Err(CliError::data(path, "expected 8 columns"));
        }
        rows.push(SummaryRow {
            dimension: rec[0].to_string(),
            metric: rec[1].to_string(),
            algorithm: rec[2].to_string(),
            k: rec[3].parse().map_err(|_| CliError::data(path, "bad k"))?,
            scores: [parse(&rec[4])?, parse(&rec[5])?, parse(&rec[6])?],
            empty: &rec[7] == "1",
        });
    }
    Ok(rows)
}

/// Markdown digest of the sweep: the k each index prefers per combination.
pub fn cmd_report(cfg: &RunConfig) -> Result<String> {
    let rows = read_summary(&sweep_dir(cfg).join("summary.csv"))?;
    let mut groups: BTreeMap<(String, String, String), Vec<&SummaryRow>> = BTreeMap::new();
    for r in &rows {
        groups
            .entry((r.dimension.clone(), r.metric.clone(), r.algorithm.clone()))
            .or_default()
            .push(r);
    }
    // index 1 (DBI) is minimised, the others maximised
    let best = |rows: &[&SummaryRow], idx: usize| -> String {
        rows.iter()
            .filter_map(|r| r.scores[idx].filter(|v| v.is_finite()).map(|v| (r.k, v)))
            .reduce(|a, b| {
                let better = if idx == 1 { b.1 < a.1 } else { b.1 > a.1 };
                if better { b } else { a }
            })
            .map(|(k, v)| format!("{k} ({v:.3})"))
            .unwrap_or_else(|| "n/a".into())
    };
    let mut out = String::from("# Clustering sweep report\n\n");
    out.push_str(&format!(
        "Seed {}, k in [{}, {}], linkage {:?}.\n\n",
        cfg.seed, cfg.k_range[0], cfg.k_range[1], cfg.linkage
    ));
    out.push_str("| dimension | metric | algorithm | best k by SIL | best k by DBI | best k by CHI | flagged k |\n");
    out.push_str("|---|---|---|---|---|---|---|\n");
    for ((dim, metric, alg), rows) in &groups {
        let flagged: Vec<String> = rows.iter().filter(|r| r.empty).map(|r| r.k.to_string()).collect();
        out.push_str(&format!(
            "| {dim} | {metric} | {alg} | {} | {} | {} | {} |\n",
            best(rows, 0),
            best(rows, 1),
            best(rows, 2),
            if flagged.is_empty() { "-".to_string() } else { flagged.join(", ") }
        ));
    }
    write_file(&cfg.output_dir.join("report.md"), &out)?;
    Ok(out)
}
