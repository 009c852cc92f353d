//! Distance-generic K-means and hierarchical agglomerative clustering.
//!
//! K-means runs on raw vectors with arithmetic-mean centres when the metric
//! is Euclidean, and on a precomputed [`DistanceMatrix`] with medoid centres
//! for the elastic metrics. Both variants minimise the same objective,
//! `J = Σ d(x, c(x))²`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::{self, DistanceError, DistanceMatrix, DistanceOptions, Metric};
use crate::validate::{self, Space, ValidationScores};

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("k = {k} exceeds the number of points ({n})")]
    KTooLarge { k: usize, n: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k = {k} outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("need at least two points, got {0}")]
    MatrixTooSmall(usize),
    #[error("no data to cluster")]
    NoData,
    #[error("vectors have unequal lengths")]
    RaggedData,
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "KMeans")]
    KMeans,
    #[serde(rename = "HAC")]
    Hac,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::KMeans, Algorithm::Hac];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::KMeans => "KMeans",
            Algorithm::Hac => "HAC",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "kmeans" => Ok(Algorithm::KMeans),
            "hac" | "agglomerative" => Ok(Algorithm::Hac),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    #[default]
    Average,
    Complete,
    Single,
}

impl Linkage {
    pub const ALL: [Linkage; 3] = [Linkage::Average, Linkage::Complete, Linkage::Single];
}

impl FromStr for Linkage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "average" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            "single" => Ok(Linkage::Single),
            other => Err(format!("unknown linkage `{other}`")),
        }
    }
}

/// Cluster representatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centers {
    Means(Vec<Vec<f64>>),
    /// Index of each cluster's medoid point.
    Medoids(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub ids: Vec<String>,
    pub labels: Vec<usize>,
    pub k: usize,
    pub algorithm: Algorithm,
    pub metric: Metric,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub linkage: Option<Linkage>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub centers: Option<Centers>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub objective: Option<f64>,
    /// Cluster indices with no members.
    pub empty_clusters: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

impl ClusterAssignment {
    pub fn sizes(&self) -> Vec<usize> {
        cluster_sizes(&self.labels, self.k)
    }

    /// True when both labelings induce the same partition, regardless of
    /// label names.
    pub fn same_partition(&self, other: &ClusterAssignment) -> bool {
        same_partition(&self.labels, &other.labels)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("assignment serialises")
    }
}

pub fn cluster_sizes(labels: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    for &l in labels {
        sizes[l] += 1;
    }
    sizes
}

/// Partition equality up to renaming of labels.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    canonical_labels(a) == canonical_labels(b)
}

/// Relabels so clusters are numbered by first appearance.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::BTreeMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

/// What K-means clusters.
#[derive(Debug, Clone, Copy)]
pub enum ClusterInput<'a> {
    /// Equal-length vectors under the Euclidean metric, mean centres.
    Vectors(&'a [Vec<f64>]),
    /// Any metric via its distance matrix, medoid centres.
    Precomputed(&'a DistanceMatrix),
}

impl ClusterInput<'_> {
    fn len(&self) -> usize {
        match self {
            ClusterInput::Vectors(v) => v.len(),
            ClusterInput::Precomputed(d) => d.len(),
        }
    }

    fn metric(&self) -> Metric {
        match self {
            ClusterInput::Vectors(_) => Metric::Ed,
            ClusterInput::Precomputed(d) => d.metric,
        }
    }

    fn point_dist(&self, i: usize, j: usize) -> f64 {
        match self {
            ClusterInput::Vectors(v) => sq_euclid(&v[i], &v[j]).sqrt(),
            ClusterInput::Precomputed(d) => d.get(i, j),
        }
    }
}

fn sq_euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// Random first centre, then repeatedly the point farthest from all
    /// chosen centres.
    #[default]
    FarthestPoint,
    /// Random first centre, then sampling proportional to squared distance.
    KMeansPlusPlus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub n_init: usize,
    pub init: InitStrategy,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            max_iter: 300,
            n_init: 10,
            init: InitStrategy::default(),
        }
    }
}

/// K-means output plus the objective after every iteration of every
/// restart.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub assignment: ClusterAssignment,
    pub traces: Vec<Vec<f64>>,
    pub best_restart: usize,
    /// All points coincide; only cluster 0 is populated.
    pub degenerate: bool,
}

/// Per-restart seed derived from the master seed by counter.
pub(crate) fn derive_seed(seed: u64, counter: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ counter.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
enum CenterState {
    Means(Vec<Vec<f64>>),
    Medoids(Vec<usize>),
}

struct Restart {
    labels: Vec<usize>,
    centers: CenterState,
    objective: f64,
    trace: Vec<f64>,
}

pub fn kmeans(input: ClusterInput<'_>, cfg: &KMeansConfig) -> Result<KMeansFit, ClusterError> {
    let n = input.len();
    if n == 0 {
        return Err(ClusterError::NoData);
    }
    if cfg.k == 0 {
        return Err(ClusterError::ZeroK);
    }
    if cfg.k > n {
        return Err(ClusterError::KTooLarge { k: cfg.k, n });
    }
    if let ClusterInput::Vectors(v) = input {
        if v.iter().any(|x| x.len() != v[0].len()) {
            return Err(ClusterError::RaggedData);
        }
    }
    let ids: Vec<String> = match input {
        ClusterInput::Precomputed(d) => d.ids.clone(),
        ClusterInput::Vectors(_) => (0..n).map(|i| i.to_string()).collect(),
    };

    let all_identical = (1..n).all(|i| input.point_dist(0, i) == 0.0);
    if all_identical && cfg.k > 1 {
        let centers = match input {
            ClusterInput::Vectors(v) => Centers::Means(vec![v[0].clone(); cfg.k]),
            ClusterInput::Precomputed(_) => Centers::Medoids(vec![0; cfg.k]),
        };
        return Ok(KMeansFit {
            assignment: ClusterAssignment {
                ids,
                labels: vec![0; n],
                k: cfg.k,
                algorithm: Algorithm::KMeans,
                metric: input.metric(),
                linkage: None,
                centers: Some(centers),
                objective: Some(0.0),
                empty_clusters: (1..cfg.k).collect(),
                seed: Some(cfg.seed),
            },
            traces: vec![vec![0.0]],
            best_restart: 0,
            degenerate: true,
        });
    }

    let restarts: Vec<Restart> = (0..cfg.n_init.max(1))
        .into_par_iter()
        .map(|r| run_restart(input, cfg, derive_seed(cfg.seed, r as u64)))
        .collect();
    let best_restart = restarts
        .iter()
        .enumerate()
        .fold(0, |best, (r, res)| {
            if res.objective < restarts[best].objective {
                r
            } else {
                best
            }
        });
    let traces = restarts.iter().map(|r| r.trace.clone()).collect();
    let best = restarts.into_iter().nth(best_restart).expect("at least one restart");
    let sizes = cluster_sizes(&best.labels, cfg.k);
    Ok(KMeansFit {
        assignment: ClusterAssignment {
            ids,
            labels: best.labels,
            k: cfg.k,
            algorithm: Algorithm::KMeans,
            metric: input.metric(),
            linkage: None,
            centers: Some(match best.centers {
                CenterState::Means(m) => Centers::Means(m),
                CenterState::Medoids(m) => Centers::Medoids(m),
            }),
            objective: Some(best.objective),
            empty_clusters: (0..cfg.k).filter(|&c| sizes[c] == 0).collect(),
            seed: Some(cfg.seed),
        },
        traces,
        best_restart,
        degenerate: false,
    })
}

fn initial_centers(input: ClusterInput<'_>, cfg: &KMeansConfig, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = input.len();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = (0..n).map(|i| input.point_dist(i, chosen[0]).powi(2)).collect();
    while chosen.len() < cfg.k {
        let total: f64 = nearest.iter().sum();
        let next = if total <= 0.0 {
            // Fewer distinct points than k: fall back to unused indices.
            (0..n).find(|i| !chosen.contains(i)).expect("k <= n")
        } else {
            match cfg.init {
                InitStrategy::FarthestPoint => {
                    let mut best = 0;
                    for i in 1..n {
                        if nearest[i] > nearest[best] {
                            best = i;
                        }
                    }
                    best
                }
                InitStrategy::KMeansPlusPlus => {
                    let target = rng.random::<f64>() * total;
                    let mut acc = 0.0;
                    let mut pick = n - 1;
                    for (i, w) in nearest.iter().enumerate() {
                        acc += w;
                        if *w > 0.0 && acc >= target {
                            pick = i;
                            break;
                        }
                    }
                    pick
                }
            }
        };
        chosen.push(next);
        for i in 0..n {
            let d = input.point_dist(i, next).powi(2);
            if d < nearest[i] {
                nearest[i] = d;
            }
        }
    }
    chosen
}

fn run_restart(input: ClusterInput<'_>, cfg: &KMeansConfig, seed: u64) -> Restart {
    let n = input.len();
    let k = cfg.k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds = initial_centers(input, cfg, &mut rng);
    let mut centers = match input {
        ClusterInput::Vectors(v) => CenterState::Means(seeds.iter().map(|&i| v[i].clone()).collect()),
        ClusterInput::Precomputed(_) => CenterState::Medoids(seeds),
    };
    let dist_to_center = |i: usize, c: usize, centers: &CenterState| -> f64 {
        match (centers, input) {
            (CenterState::Means(m), ClusterInput::Vectors(v)) => sq_euclid(&v[i], &m[c]).sqrt(),
            (CenterState::Medoids(m), ClusterInput::Precomputed(d)) => d.get(i, m[c]),
            _ => unreachable!("centre kind follows input kind"),
        }
    };

    let mut labels: Vec<usize> = vec![usize::MAX; n];
    let mut trace = Vec::new();
    let mut objective = f64::INFINITY;
    for _ in 0..cfg.max_iter.max(1) {
        // Assignment: move only to a strictly closer centre.
        let mut new_labels = labels.clone();
        for (i, label) in new_labels.iter_mut().enumerate() {
            let mut best = *label;
            let mut best_d = if best == usize::MAX {
                f64::INFINITY
            } else {
                dist_to_center(i, best, &centers)
            };
            for c in 0..k {
                let d = dist_to_center(i, c, &centers);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            *label = best;
        }

        // Re-seed each empty cluster with the point farthest from its centre.
        let mut sizes = cluster_sizes(&new_labels, k);
        for c in 0..k {
            if sizes[c] > 0 {
                continue;
            }
            let mut far: Option<(usize, f64)> = None;
            for i in 0..n {
                if sizes[new_labels[i]] < 2 {
                    continue;
                }
                let d = dist_to_center(i, new_labels[i], &centers);
                if d > 0.0 && far.is_none_or(|(_, fd)| d > fd) {
                    far = Some((i, d));
                }
            }
            if let Some((i, _)) = far {
                sizes[new_labels[i]] -= 1;
                sizes[c] += 1;
                new_labels[i] = c;
                match (&mut centers, input) {
                    (CenterState::Means(m), ClusterInput::Vectors(v)) => m[c] = v[i].clone(),
                    (CenterState::Medoids(m), _) => m[c] = i,
                    _ => unreachable!(),
                }
            }
        }

        // Update.
        match (&mut centers, input) {
            (CenterState::Means(m), ClusterInput::Vectors(v)) => {
                let dim = v[0].len();
                for (c, center) in m.iter_mut().enumerate() {
                    if sizes[c] == 0 {
                        continue;
                    }
                    let mut sum = vec![0.0; dim];
                    for i in (0..n).filter(|&i| new_labels[i] == c) {
                        for (s, x) in sum.iter_mut().zip(&v[i]) {
                            *s += x;
                        }
                    }
                    *center = sum.into_iter().map(|s| s / sizes[c] as f64).collect();
                }
            }
            (CenterState::Medoids(m), ClusterInput::Precomputed(d)) => {
                for (c, medoid) in m.iter_mut().enumerate() {
                    if sizes[c] == 0 {
                        continue;
                    }
                    let members: Vec<usize> = (0..n).filter(|&i| new_labels[i] == c).collect();
                    let cost = |cand: usize| members.iter().map(|&i| d.get(i, cand).powi(2)).sum::<f64>();
                    // The current medoid stays a candidate so the objective
                    // cannot rise even if it left the cluster.
                    let mut best = *medoid;
                    let mut best_cost = cost(best);
                    for &cand in &members {
                        let cc = cost(cand);
                        if cc < best_cost {
                            best = cand;
                            best_cost = cc;
                        }
                    }
                    *medoid = best;
                }
            }
            _ => unreachable!(),
        }

        objective = (0..n).map(|i| dist_to_center(i, new_labels[i], &centers).powi(2)).sum();
        trace.push(objective);
        let converged = new_labels == labels;
        labels = new_labels;
        if converged {
            break;
        }
    }
    Restart {
        labels,
        centers,
        objective,
        trace,
    }
}

/// One agglomeration step. Leaves are clusters `0..n`; the cluster formed at
/// step `s` gets id `n + s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub merges: Vec<Merge>,
    pub n_leaves: usize,
    pub linkage: Linkage,
}

/// Greedy agglomeration with Lance-Williams updates. Among equally close
/// pairs the one with the smallest (lowest member, lowest member) index pair
/// is merged first.
pub fn hac(dist: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram, ClusterError> {
    let n = dist.len();
    if n < 2 {
        return Err(ClusterError::MatrixTooSmall(n));
    }
    let mut d: Vec<Vec<f64>> = (0..n).map(|i| dist.row(i).to_vec()).collect();
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    // Slot `i` always holds the cluster whose lowest member is `i`.
    let mut id: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in i + 1..n {
                if active[j] && best.is_none_or(|(_, _, bd)| d[i][j] < bd) {
                    best = Some((i, j, d[i][j]));
                }
            }
        }
        let (i, j, height) = best.expect("two active clusters remain");
        let (ni, nj) = (size[i] as f64, size[j] as f64);
        for k in 0..n {
            if !active[k] || k == i || k == j {
                continue;
            }
            let updated = match linkage {
                Linkage::Single => d[i][k].min(d[j][k]),
                Linkage::Complete => d[i][k].max(d[j][k]),
                Linkage::Average => (ni * d[i][k] + nj * d[j][k]) / (ni + nj),
            };
            d[i][k] = updated;
            d[k][i] = updated;
        }
        active[j] = false;
        size[i] += size[j];
        merges.push(Merge {
            left: id[i],
            right: id[j],
            distance: height,
            size: size[i],
        });
        id[i] = n + step;
    }
    Ok(Dendrogram {
        merges,
        n_leaves: n,
        linkage,
    })
}

/// Labels after replaying the first `n_leaves - k` merges. Clusters are
/// numbered by their lowest member.
pub fn cut(dendro: &Dendrogram, k: usize) -> Result<Vec<usize>, ClusterError> {
    let n = dendro.n_leaves;
    if k == 0 || k > n {
        return Err(ClusterError::KOutOfRange { k, n });
    }
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (step, m) in dendro.merges.iter().take(n - k).enumerate() {
        let new_id = n + step;
        let a = find(&mut parent, m.left);
        let b = find(&mut parent, m.right);
        parent[a] = new_id;
        parent[b] = new_id;
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    Ok(canonical_labels(&roots))
}

/// Agglomerative clustering cut at `k`, packaged as an assignment.
pub fn hac_assignment(
    dist: &DistanceMatrix,
    linkage: Linkage,
    k: usize,
) -> Result<ClusterAssignment, ClusterError> {
    let dendro = hac(dist, linkage)?;
    let labels = cut(&dendro, k)?;
    Ok(ClusterAssignment {
        ids: dist.ids.clone(),
        labels,
        k,
        algorithm: Algorithm::Hac,
        metric: dist.metric,
        linkage: Some(linkage),
        centers: None,
        objective: None,
        empty_clusters: Vec::new(),
        seed: None,
    })
}

/// Everything a sweep clusters: the Euclidean vectors (engineered features
/// or raw profiles) and one distance matrix per metric.
#[derive(Debug, Clone)]
pub struct SweepData {
    pub ids: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
    pub matrices: Vec<DistanceMatrix>,
}

impl SweepData {
    /// `ed_vectors` feed the Euclidean metric, `series` the elastic ones.
    pub fn build(
        ids: Vec<String>,
        ed_vectors: Vec<Vec<f64>>,
        series: &[Vec<f64>],
        metrics: &[Metric],
        opts: &DistanceOptions,
    ) -> Result<Self, ClusterError> {
        let matrices = metrics
            .iter()
            .map(|&m| match m {
                Metric::Ed => distance::pairwise(&ids, &ed_vectors, m, opts),
                _ => distance::pairwise(&ids, series, m, opts),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            ids,
            vectors: ed_vectors,
            matrices,
        })
    }

    pub fn matrix(&self, metric: Metric) -> Option<&DistanceMatrix> {
        self.matrices.iter().find(|m| m.metric == metric)
    }

    pub fn space(&self, metric: Metric) -> Option<Space<'_>> {
        let dist = self.matrix(metric)?;
        Some(match metric {
            Metric::Ed => Space::euclidean(dist, &self.vectors),
            _ => Space::metric(dist),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub k_min: usize,
    pub k_max: usize,
    pub algorithms: Vec<Algorithm>,
    pub metrics: Vec<Metric>,
    pub linkage: Linkage,
    pub seed: u64,
    pub n_init: usize,
    pub max_iter: usize,
    pub init: InitStrategy,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            k_min: 2,
            k_max: 10,
            algorithms: Algorithm::ALL.to_vec(),
            metrics: Metric::ALL.to_vec(),
            linkage: Linkage::Average,
            seed: 0,
            n_init: 10,
            max_iter: 300,
            init: InitStrategy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub assignment: ClusterAssignment,
    pub scores: ValidationScores,
    /// Some cluster is empty or holds a single household.
    pub degenerate: bool,
}

/// Clusters every (algorithm, metric, k) combination and scores it. `k`
/// values above `n - 1` are skipped since no index is defined there.
pub fn sweep(data: &SweepData, cfg: &SweepConfig) -> Result<Vec<SweepEntry>, ClusterError> {
    let n = data.ids.len();
    if n == 0 {
        return Err(ClusterError::NoData);
    }
    let k_hi = cfg.k_max.min(n.saturating_sub(1));
    let mut jobs = Vec::new();
    for &algorithm in &cfg.algorithms {
        for &metric in &cfg.metrics {
            for k in cfg.k_min.max(1)..=k_hi {
                jobs.push((algorithm, metric, k));
            }
        }
    }
    let dendrograms: Vec<(Metric, Dendrogram)> = if cfg.algorithms.contains(&Algorithm::Hac) {
        cfg.metrics
            .iter()
            .map(|&m| {
                let dist = data.matrix(m).ok_or(ClusterError::NoData)?;
                Ok((m, hac(dist, cfg.linkage)?))
            })
            .collect::<Result<_, ClusterError>>()?
    } else {
        Vec::new()
    };

    jobs.into_par_iter()
        .map(|(algorithm, metric, k)| {
            let dist = data.matrix(metric).ok_or(ClusterError::NoData)?;
            let assignment = match algorithm {
                Algorithm::KMeans => {
                    let input = match metric {
                        Metric::Ed => ClusterInput::Vectors(&data.vectors),
                        _ => ClusterInput::Precomputed(dist),
                    };
                    let kcfg = KMeansConfig {
                        k,
                        seed: cfg.seed,
                        max_iter: cfg.max_iter,
                        n_init: cfg.n_init,
                        init: cfg.init,
                    };
                    let mut a = kmeans(input, &kcfg)?.assignment;
                    a.ids = data.ids.clone();
                    a
                }
                Algorithm::Hac => {
                    let dendro = &dendrograms
                        .iter()
                        .find(|(m, _)| *m == metric)
                        .expect("dendrogram per metric")
                        .1;
                    ClusterAssignment {
                        ids: data.ids.clone(),
                        labels: cut(dendro, k)?,
                        k,
                        algorithm,
                        metric,
                        linkage: Some(cfg.linkage),
                        centers: None,
                        objective: None,
                        empty_clusters: Vec::new(),
                        seed: None,
                    }
                }
            };
            let space = data.space(metric).expect("matrix present");
            let scores = validate::score_all(&space, &assignment.labels);
            let degenerate = assignment.sizes().iter().any(|&s| s <= 1);
            Ok(SweepEntry {
                assignment,
                scores,
                degenerate,
            })
        })
        .collect()
}
