//! Silhouette, Davies-Bouldin and Calinski-Harabasz under the active metric.
//!
//! For the Euclidean metric cluster centres are arithmetic means. For DTW
//! and derivative DTW the centre of a cluster is its medoid (the member with
//! the smallest summed squared distance to the other members) and the global
//! centre is the medoid of the whole data set. All distances, including
//! centre-to-centre ones, come from the active metric, so the DBI and CHI
//! values are metric generalisations of the textbook Euclidean indices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::{euclidean, DistanceMatrix};

#[derive(Debug, Error, PartialEq)]
pub enum ValidateError {
    #[error("index needs 2 <= clusters <= n - 1, got {clusters} clusters for {n} samples")]
    InvalidK { clusters: usize, n: usize },
    #[error("clusters {0} and {1} share a centre")]
    CoincidentCenters(usize, usize),
    #[error("within-cluster dispersion is zero")]
    ZeroWithinDispersion,
    #[error("{labels} labels for {n} samples")]
    LengthMismatch { labels: usize, n: usize },
}

/// The geometry an index is evaluated in: always a distance matrix, plus
/// the raw vectors when centres should be arithmetic means.
#[derive(Debug, Clone, Copy)]
pub struct Space<'a> {
    pub dist: &'a DistanceMatrix,
    pub vectors: Option<&'a [Vec<f64>]>,
}

impl<'a> Space<'a> {
    pub fn euclidean(dist: &'a DistanceMatrix, vectors: &'a [Vec<f64>]) -> Self {
        Self {
            dist,
            vectors: Some(vectors),
        }
    }

    pub fn metric(dist: &'a DistanceMatrix) -> Self {
        Self { dist, vectors: None }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Center {
    Mean(Vec<f64>),
    Medoid(usize),
}

/// Members and centre of every non-empty cluster, in label order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterCenters {
    pub members: Vec<Vec<usize>>,
    pub centers: Vec<Center>,
    pub global: Center,
}

fn medoid_of(dist: &DistanceMatrix, members: &[usize]) -> usize {
    let mut best = members[0];
    let mut best_cost = f64::INFINITY;
    for &c in members {
        let cost: f64 = members.iter().map(|&i| dist.get(i, c).powi(2)).sum();
        if cost < best_cost {
            best = c;
            best_cost = cost;
        }
    }
    best
}

fn mean_of(vectors: &[Vec<f64>], members: &[usize]) -> Vec<f64> {
    let mut sum = vec![0.0; vectors[members[0]].len()];
    for &i in members {
        for (s, x) in sum.iter_mut().zip(&vectors[i]) {
            *s += x;
        }
    }
    sum.into_iter().map(|s| s / members.len() as f64).collect()
}

impl ClusterCenters {
    pub fn from_labels(space: &Space<'_>, labels: &[usize]) -> Self {
        let k = labels.iter().copied().max().map_or(0, |m| m + 1);
        let members: Vec<Vec<usize>> = (0..k)
            .map(|c| (0..labels.len()).filter(|&i| labels[i] == c).collect::<Vec<_>>())
            .filter(|m| !m.is_empty())
            .collect();
        let all: Vec<usize> = (0..labels.len()).collect();
        let center = |m: &[usize]| match space.vectors {
            Some(v) => Center::Mean(mean_of(v, m)),
            None => Center::Medoid(medoid_of(space.dist, m)),
        };
        Self {
            centers: members.iter().map(|m| center(m)).collect(),
            global: center(&all),
            members,
        }
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }
}

fn point_to_center(space: &Space<'_>, i: usize, c: &Center) -> f64 {
    match c {
        Center::Mean(m) => euclidean(&space.vectors.expect("means need vectors")[i], m)
            .expect("centre has the data dimension"),
        Center::Medoid(j) => space.dist.get(i, *j),
    }
}

fn center_to_center(space: &Space<'_>, a: &Center, b: &Center) -> f64 {
    match (a, b) {
        (Center::Mean(x), Center::Mean(y)) => euclidean(x, y).expect("equal dimensions"),
        (Center::Medoid(i), Center::Medoid(j)) => space.dist.get(*i, *j),
        _ => unreachable!("centres of one space share a kind"),
    }
}

fn check_labels(space: &Space<'_>, labels: &[usize]) -> Result<(), ValidateError> {
    if labels.len() != space.len() {
        return Err(ValidateError::LengthMismatch {
            labels: labels.len(),
            n: space.len(),
        });
    }
    Ok(())
}

fn distinct(labels: &[usize]) -> usize {
    let mut seen: Vec<usize> = labels.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Mean silhouette over all samples. Members of singleton clusters score 0.
pub fn silhouette(dist: &DistanceMatrix, labels: &[usize]) -> Result<f64, ValidateError> {
    let n = dist.len();
    if labels.len() != n {
        return Err(ValidateError::LengthMismatch { labels: labels.len(), n });
    }
    let k_seen = distinct(labels);
    if k_seen < 2 || k_seen > n - 1 {
        return Err(ValidateError::InvalidK { clusters: k_seen, n });
    }
    let k = labels.iter().copied().max().unwrap_or(0) + 1;
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    let mut total = 0.0;
    let mut sums = vec![0.0; k];
    for i in 0..n {
        if sizes[labels[i]] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if j != i {
                sums[labels[j]] += dist.get(i, j);
            }
        }
        let own = labels[i];
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

pub fn davies_bouldin(space: &Space<'_>, labels: &[usize]) -> Result<f64, ValidateError> {
    check_labels(space, labels)?;
    let cc = ClusterCenters::from_labels(space, labels);
    davies_bouldin_with(space, &cc)
}

pub fn davies_bouldin_with(space: &Space<'_>, cc: &ClusterCenters) -> Result<f64, ValidateError> {
    let k = cc.k();
    if k < 2 {
        return Err(ValidateError::InvalidK { clusters: k, n: space.len() });
    }
    let scatter: Vec<f64> = cc
        .members
        .iter()
        .zip(&cc.centers)
        .map(|(m, c)| m.iter().map(|&i| point_to_center(space, i, c)).sum::<f64>() / m.len() as f64)
        .collect();
    let mut total = 0.0;
    for i in 0..k {
        let mut worst = f64::NEG_INFINITY;
        for j in 0..k {
            if i == j {
                continue;
            }
            let d = center_to_center(space, &cc.centers[i], &cc.centers[j]);
            if d == 0.0 {
                return Err(ValidateError::CoincidentCenters(i.min(j), i.max(j)));
            }
            worst = worst.max((scatter[i] + scatter[j]) / d);
        }
        total += worst;
    }
    Ok(total / k as f64)
}

pub fn calinski_harabasz(space: &Space<'_>, labels: &[usize]) -> Result<f64, ValidateError> {
    check_labels(space, labels)?;
    let cc = ClusterCenters::from_labels(space, labels);
    calinski_harabasz_with(space, &cc)
}

pub fn calinski_harabasz_with(space: &Space<'_>, cc: &ClusterCenters) -> Result<f64, ValidateError> {
    let k = cc.k();
    let n = space.len();
    if k < 2 || k >= n {
        return Err(ValidateError::InvalidK { clusters: k, n });
    }
    let between: f64 = cc
        .members
        .iter()
        .zip(&cc.centers)
        .map(|(m, c)| m.len() as f64 * center_to_center(space, c, &cc.global).powi(2))
        .sum();
    let within: f64 = cc
        .members
        .iter()
        .zip(&cc.centers)
        .map(|(m, c)| m.iter().map(|&i| point_to_center(space, i, c).powi(2)).sum::<f64>())
        .sum();
    if within == 0.0 {
        return Err(ValidateError::ZeroWithinDispersion);
    }
    Ok(between / within * (n - k) as f64 / (k - 1) as f64)
}

/// The three indices for one labeling. Undefined indices are `None` with
/// the reason listed in `issues`; coincident centres give an infinite DBI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationScores {
    pub silhouette: Option<f64>,
    pub dbi: Option<f64>,
    pub chi: Option<f64>,
    pub coincident_centers: bool,
    pub issues: Vec<String>,
}

pub fn score_all(space: &Space<'_>, labels: &[usize]) -> ValidationScores {
    let mut issues = Vec::new();
    fn keep(issues: &mut Vec<String>, r: Result<f64, ValidateError>, name: &str) -> Option<f64> {
        r.map_err(|e| issues.push(format!("{name}: {e}"))).ok()
    }
    let silhouette = keep(&mut issues, silhouette(space.dist, labels), "silhouette");
    let (dbi, chi, coincident) = if labels.len() == space.len() {
        let cc = ClusterCenters::from_labels(space, labels);
        let dbi_raw = davies_bouldin_with(space, &cc);
        let coincident = matches!(dbi_raw, Err(ValidateError::CoincidentCenters(..)));
        let dbi = if coincident {
            issues.push("dbi: coincident centres".into());
            Some(f64::INFINITY)
        } else {
            keep(&mut issues, dbi_raw, "dbi")
        };
        let chi = keep(&mut issues, calinski_harabasz_with(space, &cc), "chi");
        (dbi, chi, coincident)
    } else {
        issues.push("labels do not match the data".into());
        (None, None, false)
    };
    ValidationScores {
        silhouette,
        dbi,
        chi,
        coincident_centers: coincident,
        issues,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{pairwise_anonymous, Metric};

    fn line(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn silhouette_four_points_by_hand() {
        // 0, 1 | 5, 7
        let v = line(&[0.0, 1.0, 5.0, 7.0]);
        let d = pairwise_anonymous(&v, Metric::Ed).unwrap();
        let s = silhouette(&d, &[0, 0, 1, 1]).unwrap();
        let s0 = (6.0 - 1.0) / 6.0;
        let s1 = (5.0 - 1.0) / 5.0;
        let s2 = (4.5 - 2.0) / 4.5;
        let s3 = (6.5 - 2.0) / 6.5;
        assert!((s - (s0 + s1 + s2 + s3) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn silhouette_rejects_k_equal_n() {
        let d = pairwise_anonymous(&line(&[0.0, 1.0, 2.0]), Metric::Ed).unwrap();
        assert_eq!(
            silhouette(&d, &[0, 1, 2]),
            Err(ValidateError::InvalidK { clusters: 3, n: 3 })
        );
        assert!(silhouette(&d, &[0, 0, 0]).is_err());
    }

    #[test]
    fn singletons_have_zero_dbi() {
        let v = line(&[0.0, 4.0, 4.0]);
        let d = pairwise_anonymous(&v, Metric::Ed).unwrap();
        let space = Space::euclidean(&d, &v);
        assert_eq!(davies_bouldin(&space, &[0, 1, 1]).unwrap(), 0.0);
        assert_eq!(calinski_harabasz(&space, &[0, 1, 1]), Err(ValidateError::ZeroWithinDispersion));
    }

    #[test]
    fn tighter_clusters_lower_dbi() {
        let wide = line(&[0.0, 2.0, 10.0, 12.0]);
        let tight = line(&[0.5, 1.5, 10.5, 11.5]);
        let labels = [0, 0, 1, 1];
        let dw = pairwise_anonymous(&wide, Metric::Ed).unwrap();
        let dt = pairwise_anonymous(&tight, Metric::Ed).unwrap();
        let a = davies_bouldin(&Space::euclidean(&dw, &wide), &labels).unwrap();
        let b = davies_bouldin(&Space::euclidean(&dt, &tight), &labels).unwrap();
        assert!(b < a);
        assert!((a - 0.2).abs() < 1e-12);
    }

    #[test]
    fn chi_quadratic_in_separation() {
        let near = line(&[0.0, 1.0, 10.0, 11.0]);
        let far = line(&[0.0, 1.0, 20.0, 21.0]);
        let labels = [0, 0, 1, 1];
        let dn = pairwise_anonymous(&near, Metric::Ed).unwrap();
        let df = pairwise_anonymous(&far, Metric::Ed).unwrap();
        let a = calinski_harabasz(&Space::euclidean(&dn, &near), &labels).unwrap();
        let b = calinski_harabasz(&Space::euclidean(&df, &far), &labels).unwrap();
        assert!((b / a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn medoid_centres_for_metric_space() {
        let v = line(&[0.0, 1.0, 3.0, 10.0, 11.0]);
        let d = pairwise_anonymous(&v, Metric::Dtw).unwrap();
        let cc = ClusterCenters::from_labels(&Space::metric(&d), &[0, 0, 0, 1, 1]);
        assert_eq!(cc.centers, vec![Center::Medoid(1), Center::Medoid(3)]);
        assert_eq!(cc.global, Center::Medoid(2));
    }

    #[test]
    fn coincident_centres_flagged() {
        let v = line(&[0.0, 2.0, 1.0, 1.0]);
        let d = pairwise_anonymous(&v, Metric::Ed).unwrap();
        let s = score_all(&Space::euclidean(&d, &v), &[0, 0, 1, 1]);
        assert!(s.coincident_centers);
        assert_eq!(s.dbi, Some(f64::INFINITY));
        assert!(s.silhouette.is_some());
    }

    #[test]
    fn perfect_clusters() {
        let v = line(&[0.0, 0.0, 0.01, 100.0, 100.0, 100.01]);
        let d = pairwise_anonymous(&v, Metric::Ed).unwrap();
        let s = score_all(&Space::euclidean(&d, &v), &[0, 0, 0, 1, 1, 1]);
        assert!(s.silhouette.unwrap() > 0.99);
        assert!(s.dbi.unwrap() < 1e-3);
        assert!(s.chi.unwrap() > 1e6);
        let relabeled = score_all(&Space::euclidean(&d, &v), &[1, 1, 1, 0, 0, 0]);
        assert_eq!(s, relabeled);
    }
}
