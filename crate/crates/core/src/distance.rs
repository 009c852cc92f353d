//! Euclidean, DTW and derivative-DTW dissimilarities.
//!
//! DTW uses absolute difference as its local cost; derivative DTW runs the
//! same dynamic program on estimated derivatives with squared difference and
//! reports the raw path sum (no square root).

use std::fmt;
use std::io::{Read, Write};
use std::ops::Deref;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DistanceError {
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty series")]
    EmptySeries,
    #[error("series of length {0} is too short for a derivative (need 3)")]
    TooShort(usize),
    #[error("series contains non-finite values")]
    NonFinite,
    #[error("need at least two series, got {0}")]
    TooFewSeries(usize),
    #[error("pair ({i}, {j}): {source}")]
    Pair {
        i: usize,
        j: usize,
        source: Box<DistanceError>,
    },
    #[error("distance matrix file: {0}")]
    Format(String),
}

/// A non-empty, finite real sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Series(Vec<f64>);

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self, DistanceError> {
        if values.is_empty() {
            return Err(DistanceError::EmptySeries);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DistanceError::NonFinite);
        }
        Ok(Self(values))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Series {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = DistanceError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Series::new(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "ED")]
    Ed,
    #[serde(rename = "DTW")]
    Dtw,
    #[serde(rename = "DDTW")]
    Ddtw,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Ed, Metric::Dtw, Metric::Ddtw];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Ed => "ED",
            Metric::Dtw => "DTW",
            Metric::Ddtw => "DDTW",
        }
    }

    fn code(self) -> u8 {
        match self {
            Metric::Ed => 0,
            Metric::Dtw => 1,
            Metric::Ddtw => 2,
        }
    }

    fn from_code(c: u8) -> Option<Self> {
        Metric::ALL.into_iter().find(|m| m.code() == c)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ED" | "EUCLIDEAN" => Ok(Metric::Ed),
            "DTW" => Ok(Metric::Dtw),
            "DDTW" => Ok(Metric::Ddtw),
            other => Err(format!("unknown metric `{other}`")),
        }
    }
}

/// Local cost between two aligned samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LocalCost {
    #[default]
    Abs,
    Squared,
}

impl LocalCost {
    #[inline]
    fn eval(self, a: f64, b: f64) -> f64 {
        match self {
            LocalCost::Abs => (a - b).abs(),
            LocalCost::Squared => (a - b) * (a - b),
        }
    }
}

pub fn euclidean(x: &[f64], y: &[f64]) -> Result<f64, DistanceError> {
    if x.len() != y.len() {
        return Err(DistanceError::LengthMismatch(x.len(), y.len()));
    }
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Unconstrained DTW.
pub fn dtw(x: &[f64], y: &[f64], cost: LocalCost) -> Result<f64, DistanceError> {
    dtw_banded(x, y, cost, None)
}

/// DTW with an optional Sakoe-Chiba band of half-width `band`. The band is
/// widened to the length difference so a path always exists.
pub fn dtw_banded(
    x: &[f64],
    y: &[f64],
    cost: LocalCost,
    band: Option<usize>,
) -> Result<f64, DistanceError> {
    if x.is_empty() || y.is_empty() {
        return Err(DistanceError::EmptySeries);
    }
    // Rows run over the longer series so the rolling buffers hold the
    // shorter one.
    let (long, short) = if x.len() >= y.len() { (x, y) } else { (y, x) };
    let (m, n) = (long.len(), short.len());
    let w = band.map(|b| b.max(m - n));

    match cost {
        LocalCost::Abs => Ok(dtw_rows(long, short, w, |a, b| (a - b).abs())),
        LocalCost::Squared => Ok(dtw_rows(long, short, w, |a, b| (a - b) * (a - b))),
    }
}

/// Rolling-row DTW recurrence; `short` is the inner dimension.
#[inline]
fn dtw_rows(long: &[f64], short: &[f64], w: Option<usize>, cost: impl Fn(f64, f64) -> f64) -> f64 {
    let n = short.len();
    let mut prev = vec![f64::INFINITY; n];
    let mut curr = vec![f64::INFINITY; n];
    for (i, &xi) in long.iter().enumerate() {
        let (lo, hi) = match w {
            Some(w) => {
                curr.iter_mut().for_each(|c| *c = f64::INFINITY);
                (i.saturating_sub(w), (i + w).min(n - 1))
            }
            None => (0, n - 1),
        };
        // First cell of the row has no left neighbour.
        let mut left = if i == 0 {
            if lo == 0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else if lo == 0 {
            prev[0]
        } else {
            prev[lo - 1].min(prev[lo])
        } + cost(xi, short[lo]);
        curr[lo] = left;
        if i == 0 {
            for j in lo + 1..=hi {
                left += cost(xi, short[j]);
                curr[j] = left;
            }
        } else {
            let prev_row = &prev[lo..=hi];
            let shorts = &short[lo + 1..=hi];
            let cells = &mut curr[lo + 1..=hi];
            for ((c, pair), &yj) in cells.iter_mut().zip(prev_row.windows(2)).zip(shorts) {
                left = pair[0].min(pair[1]).min(left) + cost(xi, yj);
                *c = left;
            }
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[n - 1]
}

/// An optimal alignment with 0-based index pairs `(i, j)` into `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpingPath {
    pub steps: Vec<(usize, usize)>,
    pub cost: f64,
}

/// Unconstrained DTW that also recovers the path. Uses a full `m × n`
/// table.
pub fn dtw_path(x: &[f64], y: &[f64], cost: LocalCost) -> Result<WarpingPath, DistanceError> {
    if x.is_empty() || y.is_empty() {
        return Err(DistanceError::EmptySeries);
    }
    let (m, n) = (x.len(), y.len());
    let mut acc = vec![f64::INFINITY; m * n];
    let at = |i: usize, j: usize| i * n + j;
    for i in 0..m {
        for j in 0..n {
            let c = cost.eval(x[i], y[j]);
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let up = if i > 0 { acc[at(i - 1, j)] } else { f64::INFINITY };
                let left = if j > 0 { acc[at(i, j - 1)] } else { f64::INFINITY };
                let diag = if i > 0 && j > 0 { acc[at(i - 1, j - 1)] } else { f64::INFINITY };
                diag.min(up).min(left)
            };
            acc[at(i, j)] = c + best;
        }
    }
    let mut steps = vec![(m - 1, n - 1)];
    let (mut i, mut j) = (m - 1, n - 1);
    while i > 0 || j > 0 {
        (i, j) = if i == 0 {
            (0, j - 1)
        } else if j == 0 {
            (i - 1, 0)
        } else {
            let diag = acc[at(i - 1, j - 1)];
            let up = acc[at(i - 1, j)];
            let left = acc[at(i, j - 1)];
            if diag <= up && diag <= left {
                (i - 1, j - 1)
            } else if up <= left {
                (i - 1, j)
            } else {
                (i, j - 1)
            }
        };
        steps.push((i, j));
    }
    steps.reverse();
    Ok(WarpingPath {
        steps,
        cost: acc[at(m - 1, n - 1)],
    })
}

/// Derivative estimate: the average of the backward difference and the
/// central difference at interior points, with the endpoints copied from
/// their neighbours.
pub fn derivative(x: &[f64]) -> Result<Vec<f64>, DistanceError> {
    let m = x.len();
    if m < 3 {
        return Err(DistanceError::TooShort(m));
    }
    let mut d = vec![0.0; m];
    for i in 1..m - 1 {
        d[i] = ((x[i] - x[i - 1]) + (x[i + 1] - x[i - 1]) / 2.0) / 2.0;
    }
    d[0] = d[1];
    d[m - 1] = d[m - 2];
    Ok(d)
}

pub fn ddtw(x: &[f64], y: &[f64]) -> Result<f64, DistanceError> {
    dtw(&derivative(x)?, &derivative(y)?, LocalCost::Squared)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DistanceOptions {
    /// Sakoe-Chiba half-width for the elastic metrics.
    pub band: Option<usize>,
}

/// Symmetric pairwise dissimilarities with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub ids: Vec<String>,
    pub metric: Metric,
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from a full square block; the block must be
    /// symmetric with a zero diagonal.
    pub fn from_square(
        ids: Vec<String>,
        metric: Metric,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, DistanceError> {
        let n = ids.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(DistanceError::Format("matrix is not square".into()));
        }
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(DistanceError::Format(format!("non-zero diagonal at {i}")));
            }
            for j in 0..i {
                if rows[i][j] != rows[j][i] || !(rows[i][j] >= 0.0) {
                    return Err(DistanceError::Format(format!("invalid entry at ({i}, {j})")));
                }
            }
        }
        Ok(Self {
            ids,
            metric,
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    fn from_lower(ids: Vec<String>, metric: Metric, lower: &[f64]) -> Self {
        let n = ids.len();
        let mut data = vec![0.0; n * n];
        let mut k = 0;
        for i in 1..n {
            for j in 0..i {
                data[i * n + j] = lower[k];
                data[j * n + i] = lower[k];
                k += 1;
            }
        }
        Self { ids, metric, n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// CSV with an id header row and one labelled row per series.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![self.metric.as_str().to_string()];
        header.extend(self.ids.iter().cloned());
        w.write_record(&header)?;
        for i in 0..self.n {
            let mut row = vec![self.ids[i].clone()];
            row.extend(self.row(i).iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, DistanceError> {
        let fmt = |e: csv::Error| DistanceError::Format(e.to_string());
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
        let mut rows = rdr.records();
        let header = rows
            .next()
            .ok_or_else(|| DistanceError::Format("empty file".into()))?
            .map_err(fmt)?;
        let metric: Metric = header
            .get(0)
            .unwrap_or_default()
            .parse()
            .map_err(DistanceError::Format)?;
        let ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut block = Vec::new();
        for row in rows {
            let row = row.map_err(fmt)?;
            let vals = row
                .iter()
                .skip(1)
                .map(|c| c.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| DistanceError::Format(e.to_string()))?;
            block.push(vals);
        }
        Self::from_square(ids, metric, block)
    }

    /// Compact binary layout: magic `HCDM1`, metric code (u8), count (u32),
    /// each id as u32 length + UTF-8 bytes, then the strict lower triangle
    /// row by row as little-endian f64.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(b"HCDM1")?;
        w.write_all(&[self.metric.code()])?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        for id in &self.ids {
            w.write_all(&(id.len() as u32).to_le_bytes())?;
            w.write_all(id.as_bytes())?;
        }
        for i in 1..self.n {
            for j in 0..i {
                w.write_all(&self.get(i, j).to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self, DistanceError> {
        let io = |e: std::io::Error| DistanceError::Format(e.to_string());
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != b"HCDM1" {
            return Err(DistanceError::Format("bad magic".into()));
        }
        let mut code = [0u8; 1];
        r.read_exact(&mut code).map_err(io)?;
        let metric = Metric::from_code(code[0])
            .ok_or_else(|| DistanceError::Format(format!("unknown metric code {}", code[0])))?;
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf).map_err(io)?;
        let n = u32::from_le_bytes(u32buf) as usize;
        let mut ids = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut u32buf).map_err(io)?;
            let mut bytes = vec![0u8; u32::from_le_bytes(u32buf) as usize];
            r.read_exact(&mut bytes).map_err(io)?;
            ids.push(String::from_utf8(bytes).map_err(|e| DistanceError::Format(e.to_string()))?);
        }
        let mut lower = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        let mut f64buf = [0u8; 8];
        for _ in 0..n * n.saturating_sub(1) / 2 {
            r.read_exact(&mut f64buf).map_err(io)?;
            lower.push(f64::from_le_bytes(f64buf));
        }
        Ok(Self::from_lower(ids, metric, &lower))
    }
}

/// Computes every unordered pair once, in parallel, and mirrors it.
pub fn pairwise(
    ids: &[String],
    series: &[Vec<f64>],
    metric: Metric,
    opts: &DistanceOptions,
) -> Result<DistanceMatrix, DistanceError> {
    let n = series.len();
    if n < 2 {
        return Err(DistanceError::TooFewSeries(n));
    }
    assert_eq!(ids.len(), n, "one id per series");
    for s in series {
        if s.is_empty() {
            return Err(DistanceError::EmptySeries);
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(DistanceError::NonFinite);
        }
    }
    let prepared: Vec<Vec<f64>> = match metric {
        Metric::Ddtw => series
            .iter()
            .map(|s| derivative(s))
            .collect::<Result<_, _>>()?,
        _ => series.to_vec(),
    };
    let pairs: Vec<(usize, usize)> = (1..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
    let lower = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&prepared[i], &prepared[j]);
            match metric {
                Metric::Ed => euclidean(a, b),
                Metric::Dtw => dtw_banded(a, b, LocalCost::Abs, opts.band),
                Metric::Ddtw => dtw_banded(a, b, LocalCost::Squared, opts.band),
            }
            .map_err(|e| DistanceError::Pair {
                i,
                j,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(DistanceMatrix::from_lower(ids.to_vec(), metric, &lower))
}

/// Convenience for callers without ids.
pub fn pairwise_anonymous(series: &[Vec<f64>], metric: Metric) -> Result<DistanceMatrix, DistanceError> {
    let ids: Vec<String> = (0..series.len()).map(|i| i.to_string()).collect();
    pairwise(&ids, series, metric, &DistanceOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_basics() {
        assert_eq!(euclidean(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(euclidean(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(
            euclidean(&[0.0], &[1.0, 2.0]),
            Err(DistanceError::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn dtw_repeated_samples_cost_nothing() {
        let x = [1.0, 2.0, 3.0];
        let y = [1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
        assert_eq!(dtw(&x, &y, LocalCost::Abs).unwrap(), 0.0);
        assert_eq!(dtw(&x, &x, LocalCost::Abs).unwrap(), 0.0);
        assert_eq!(dtw(&[], &x, LocalCost::Abs), Err(DistanceError::EmptySeries));
    }

    #[test]
    fn dtw_hand_example() {
        // Best path pairs 0-0, 1-1, 2-1 -> |0-0| + |1-2| + |2-2|
        let d = dtw(&[0.0, 1.0, 2.0], &[0.0, 2.0], LocalCost::Abs).unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn path_cost_matches_rolling_dp() {
        let x = [0.3, 1.7, -2.0, 4.0, 0.0];
        let y = [1.0, -1.0, 3.5, 0.2];
        let p = dtw_path(&x, &y, LocalCost::Abs).unwrap();
        assert_eq!(p.cost, dtw(&x, &y, LocalCost::Abs).unwrap());
        assert_eq!(p.steps.first(), Some(&(0, 0)));
        assert_eq!(p.steps.last(), Some(&(4, 3)));
        for w in p.steps.windows(2) {
            let (di, dj) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            assert!(matches!((di, dj), (1, 0) | (0, 1) | (1, 1)));
        }
        let along: f64 = p.steps.iter().map(|&(i, j)| (x[i] - y[j]).abs()).sum();
        assert!((along - p.cost).abs() < 1e-12);
    }

    #[test]
    fn band_wide_enough_matches_unconstrained() {
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.4).sin()).collect();
        let y: Vec<f64> = (0..25).map(|i| (i as f64 * 0.5).cos()).collect();
        let free = dtw(&x, &y, LocalCost::Abs).unwrap();
        assert_eq!(dtw_banded(&x, &y, LocalCost::Abs, Some(30)).unwrap(), free);
        assert!(dtw_banded(&x, &y, LocalCost::Abs, Some(0)).unwrap() >= free);
    }

    #[test]
    fn derivative_estimator() {
        assert_eq!(derivative(&[1.0, 2.0, 4.0]).unwrap(), vec![1.25, 1.25, 1.25]);
        let ramp: Vec<f64> = (0..10).map(|i| 3.0 * i as f64).collect();
        assert!(derivative(&ramp).unwrap().iter().all(|&d| d == 3.0));
        assert!(derivative(&[7.0; 5]).unwrap().iter().all(|&d| d == 0.0));
        assert_eq!(derivative(&[1.0, 2.0]), Err(DistanceError::TooShort(2)));
    }

    #[test]
    fn ddtw_identity_and_offset() {
        let x = [1.0, 3.0, 2.0, 5.0, 4.0];
        assert_eq!(ddtw(&x, &x).unwrap(), 0.0);
        let shifted: Vec<f64> = x.iter().map(|v| v + 8.0).collect();
        assert_eq!(ddtw(&x, &shifted).unwrap(), 0.0);
        assert_eq!(ddtw(&x, &[1.0, 2.0]), Err(DistanceError::TooShort(2)));
    }

    #[test]
    fn pairwise_matches_individual_calls() {
        let s = vec![vec![0.0, 1.0, 2.0], vec![2.0, 1.0, 0.0], vec![1.0, 1.0, 1.0]];
        for metric in Metric::ALL {
            let d = pairwise_anonymous(&s, metric).unwrap();
            for i in 0..3 {
                assert_eq!(d.get(i, i), 0.0);
                for j in 0..3 {
                    assert_eq!(d.get(i, j), d.get(j, i));
                }
            }
            if metric == Metric::Ed {
                assert_eq!(d.get(0, 1), euclidean(&s[0], &s[1]).unwrap());
                assert_eq!(d.get(2, 0), euclidean(&s[2], &s[0]).unwrap());
                assert_eq!(d.get(1, 2), euclidean(&s[1], &s[2]).unwrap());
            }
        }
        let same = pairwise_anonymous(&[vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]], Metric::Dtw).unwrap();
        assert_eq!(same.row(0), &[0.0, 0.0]);
        assert!(matches!(
            pairwise_anonymous(&[vec![1.0]], Metric::Ed),
            Err(DistanceError::TooFewSeries(1))
        ));
        assert!(matches!(
            pairwise_anonymous(&[vec![1.0, 2.0], vec![1.0]], Metric::Ed),
            Err(DistanceError::Pair { i: 1, j: 0, .. })
        ));
    }

    #[test]
    fn csv_and_binary_round_trip() {
        let s = vec![vec![0.1, 1.0, 2.0], vec![2.0, 1.5, 0.0], vec![1.0, 1.0, 1.0]];
        let d = pairwise_anonymous(&s, Metric::Ddtw).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(DistanceMatrix::read_csv(buf.as_slice()).unwrap(), d);
        let mut bin = Vec::new();
        d.write_binary(&mut bin).unwrap();
        assert_eq!(&bin[..5], b"HCDM1");
        assert_eq!(DistanceMatrix::read_binary(bin.as_slice()).unwrap(), d);
        assert!(DistanceMatrix::read_binary(&b"HCDM2"[..]).is_err());
    }

    #[test]
    fn series_validation() {
        assert!(Series::new(vec![]).is_err());
        assert_eq!(Series::new(vec![f64::NAN]), Err(DistanceError::NonFinite));
        let s = Series::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(s.len(), 2);
    }
}
