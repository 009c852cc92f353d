//! Two-component PCA by power iteration with deflation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const MAX_ITER: usize = 10_000;
const EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum PcaError {
    #[error("need at least 3 rows, got {0}")]
    TooFewRows(usize),
    #[error("need at least 2 columns, got {0}")]
    TooFewColumns(usize),
    #[error("rows have unequal lengths")]
    Ragged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub ids: Vec<String>,
    pub pc1: Vec<f64>,
    pub pc2: Vec<f64>,
    /// Unit loading vectors in the input space.
    pub components: [Vec<f64>; 2],
    /// Variance captured by each component.
    pub explained_variance: [f64; 2],
    pub explained_variance_ratio: [f64; 2],
    pub total_variance: f64,
    /// All variance is zero; scores are all zero.
    pub rank_deficient: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn orthogonalize(v: &mut [f64], against: &[f64]) {
    let p = dot(v, against);
    v.iter_mut().zip(against).for_each(|(x, a)| *x -= p * a);
}

/// Symmetric matrix-vector product with a dense row-major `n × n` matrix.
fn matvec(m: &[f64], n: usize, v: &[f64]) -> Vec<f64> {
    (0..n).map(|i| dot(&m[i * n..(i + 1) * n], v)).collect()
}

/// Dominant eigenpair of a symmetric PSD matrix restricted to the
/// complement of `deflated`.
fn power_iteration(m: &[f64], n: usize, deflated: &[Vec<f64>]) -> (f64, Vec<f64>) {
    // Deterministic, generic start vector.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 101) as f64 / 101.0).collect();
    for d in deflated {
        orthogonalize(&mut v, d);
    }
    if normalize(&mut v) == 0.0 {
        v = vec![0.0; n];
        v[0] = 1.0;
    }
    let mut lambda = 0.0;
    for _ in 0..MAX_ITER {
        let mut w = matvec(m, n, &v);
        for d in deflated {
            orthogonalize(&mut w, d);
        }
        let next_lambda = dot(&v, &w);
        if normalize(&mut w) == 0.0 {
            // v lies in the null space.
            return (0.0, v);
        }
        v = w;
        let done = (next_lambda - lambda).abs() <= EIGEN_TOL * next_lambda.abs().max(f64::MIN_POSITIVE);
        lambda = next_lambda;
        if done {
            break;
        }
    }
    (lambda, v)
}

/// Projects rows onto their first two principal components.
///
/// The covariance (or, when there are fewer rows than columns, the Gram
/// matrix of the centred rows) is decomposed by power iteration. Each
/// component's sign is chosen so its largest-magnitude loading is positive.
pub fn pca2(ids: &[String], data: &[Vec<f64>]) -> Result<Projection, PcaError> {
    let n = data.len();
    if n < 3 {
        return Err(PcaError::TooFewRows(n));
    }
    let d = data[0].len();
    if data.iter().any(|r| r.len() != d) {
        return Err(PcaError::Ragged);
    }
    if d < 2 {
        return Err(PcaError::TooFewColumns(d));
    }
    let mut means = vec![0.0; d];
    for row in data {
        means.iter_mut().zip(row).for_each(|(m, x)| *m += x);
    }
    means.iter_mut().for_each(|m| *m /= n as f64);
    let centred: Vec<Vec<f64>> = data
        .iter()
        .map(|r| r.iter().zip(&means).map(|(x, m)| x - m).collect())
        .collect();
    let denom = (n - 1) as f64;
    let total_variance: f64 = centred.iter().map(|r| dot(r, r)).sum::<f64>() / denom;

    let mut components: Vec<Vec<f64>> = Vec::with_capacity(2);
    if n < d {
        // Eigenvectors of X Xᵀ map to components through Xᵀ u.
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let g = dot(&centred[i], &centred[j]) / denom;
                gram[i * n + j] = g;
                gram[j * n + i] = g;
            }
        }
        let mut found: Vec<Vec<f64>> = Vec::new();
        for _ in 0..2 {
            let (_, u) = power_iteration(&gram, n, &found);
            let mut v = vec![0.0; d];
            for (row, w) in centred.iter().zip(&u) {
                v.iter_mut().zip(row).for_each(|(acc, x)| *acc += w * x);
            }
            found.push(u);
            components.push(v);
        }
    } else {
        let mut cov = vec![0.0; d * d];
        for row in &centred {
            for i in 0..d {
                for j in 0..=i {
                    cov[i * d + j] += row[i] * row[j];
                }
            }
        }
        for i in 0..d {
            for j in 0..=i {
                cov[i * d + j] /= denom;
                cov[j * d + i] = cov[i * d + j];
            }
        }
        for _ in 0..2 {
            let (_, v) = power_iteration(&cov, d, &components);
            components.push(v);
        }
    }

    // Exact orthonormality in the input space.
    let (first, second) = components.split_at_mut(1);
    normalize(&mut first[0]);
    orthogonalize(&mut second[0], &first[0]);
    if normalize(&mut second[0]) == 0.0 {
        second[0] = complement_unit(&first[0]);
    }
    for c in components.iter_mut() {
        let lead = c
            .iter()
            .enumerate()
            .fold(0, |b, (i, x)| if x.abs() > c[b].abs() { i } else { b });
        if c[lead] < 0.0 {
            c.iter_mut().for_each(|x| *x = -*x);
        }
    }

    let rank_deficient = !(total_variance > 0.0);
    let scores = |c: &[f64]| -> Vec<f64> {
        if rank_deficient {
            vec![0.0; n]
        } else {
            centred.iter().map(|r| dot(r, c)).collect()
        }
    };
    let pc1 = scores(&components[0]);
    let pc2 = scores(&components[1]);
    let var = |s: &[f64]| s.iter().map(|x| x * x).sum::<f64>() / denom;
    let explained_variance = [var(&pc1), var(&pc2)];
    let ratio = |v: f64| if rank_deficient { 0.0 } else { v / total_variance };
    let mut comps = components.into_iter();
    Ok(Projection {
        ids: ids.to_vec(),
        explained_variance_ratio: [ratio(explained_variance[0]), ratio(explained_variance[1])],
        explained_variance,
        total_variance,
        components: [comps.next().unwrap(), comps.next().unwrap()],
        pc1,
        pc2,
        rank_deficient,
    })
}

/// A unit vector orthogonal to `v`.
fn complement_unit(v: &[f64]) -> Vec<f64> {
    for axis in 0..v.len() {
        let mut e = vec![0.0; v.len()];
        e[axis] = 1.0;
        orthogonalize(&mut e, v);
        if normalize(&mut e) > 1e-6 {
            return e;
        }
    }
    unreachable!("dimension >= 2 always has an orthogonal direction")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn rank_one_line() {
        let data: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let p = pca2(&ids(10), &data).unwrap();
        assert!((p.explained_variance_ratio[0] - 1.0).abs() < 1e-9);
        assert!(p.pc2.iter().all(|s| s.abs() < 1e-9));
        let c = &p.components[0];
        assert!((c[1] / c[0] - 2.0).abs() < 1e-9);
        assert!(c[1] > 0.0);
    }

    #[test]
    fn rank_deficient_zero_projection() {
        let data = vec![vec![1.0, 2.0]; 4];
        let p = pca2(&ids(4), &data).unwrap();
        assert!(p.rank_deficient);
        assert!(p.pc1.iter().chain(&p.pc2).all(|&s| s == 0.0));
        assert_eq!(p.explained_variance_ratio, [0.0, 0.0]);
    }

    #[test]
    fn input_errors() {
        assert_eq!(pca2(&ids(2), &[vec![1.0, 2.0], vec![3.0, 4.0]]), Err(PcaError::TooFewRows(2)));
        assert_eq!(pca2(&ids(3), &[vec![1.0], vec![2.0], vec![3.0]]), Err(PcaError::TooFewColumns(1)));
        assert_eq!(
            pca2(&ids(3), &[vec![1.0, 2.0], vec![2.0], vec![3.0, 1.0]]),
            Err(PcaError::Ragged)
        );
    }

    #[test]
    fn wide_data_uses_gram_route() {
        // 4 rows, 50 columns
        let data: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..50).map(|j| ((i * 13 + j * 7) % 17) as f64 + i as f64 * 0.5).collect())
            .collect();
        let p = pca2(&ids(4), &data).unwrap();
        assert!(dot(&p.components[0], &p.components[1]).abs() < 1e-9);
        assert!((dot(&p.components[0], &p.components[0]) - 1.0).abs() < 1e-12);
        assert!(p.explained_variance_ratio[0] >= p.explained_variance_ratio[1]);
        assert!(p.explained_variance_ratio.iter().sum::<f64>() <= 1.0 + 1e-12);
    }
}
