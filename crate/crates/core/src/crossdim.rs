//! Cross-tabulation and agreement between two labelings of the same households.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::ClusterAssignment;
use crate::Dimension;

#[derive(Debug, Error, PartialEq)]
pub enum CrossDimError {
    #[error("labelings cover different households: {0}")]
    IdMismatch(String),
    #[error("need at least two labelings, got {0}")]
    TooFewLabelings(usize),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for CrossDimError {
    fn from(e: std::io::Error) -> Self {
        CrossDimError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementMethod {
    #[default]
    Hungarian,
    PairCounting,
}

impl AgreementMethod {
    pub const ALL: [AgreementMethod; 2] = [AgreementMethod::Hungarian, AgreementMethod::PairCounting];

    pub fn as_str(self) -> &'static str {
        match self {
            AgreementMethod::Hungarian => "hungarian",
            AgreementMethod::PairCounting => "pair_counting",
        }
    }
}

/// `counts[i][j]` = households labelled `i` by A and `j` by B.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
}

impl ContingencyTable {
    pub fn from_labels(a: &[usize], b: &[usize]) -> Self {
        assert_eq!(a.len(), b.len(), "labelings must have equal length");
        let rows = a.iter().max().map_or(0, |m| m + 1);
        let cols = b.iter().max().map_or(0, |m| m + 1);
        Self::with_shape(a, b, rows, cols)
    }

    fn with_shape(a: &[usize], b: &[usize], rows: usize, cols: usize) -> Self {
        let mut counts = vec![vec![0u64; cols]; rows];
        for (&i, &j) in a.iter().zip(b) {
            counts[i][j] += 1;
        }
        let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..cols).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        ContingencyTable { counts, row_sums, col_sums, total: a.len() as u64 }
    }

    pub fn rows(&self) -> usize {
        self.counts.len()
    }

    pub fn cols(&self) -> usize {
        self.col_sums.len()
    }

    /// Writes the table with a trailing margin row and column.
    pub fn write_csv<W: Write>(&self, mut w: W, row_name: &str, col_name: &str) -> std::io::Result<()> {
        write!(w, "{row_name}\\{col_name}")?;
        for j in 0..self.col_sums.len() {
            write!(w, ",{j}")?;
        }
        writeln!(w, ",total")?;
        for (i, row) in self.counts.iter().enumerate() {
            write!(w, "{i}")?;
            for c in row {
                write!(w, ",{c}")?;
            }
            writeln!(w, ",{}", self.row_sums[i])?;
        }
        write!(w, "total")?;
        for c in &self.col_sums {
            write!(w, ",{c}")?;
        }
        writeln!(w, ",{}", self.total)
    }

    /// Largest total count over one-to-one row/column pairings.
    pub fn max_matching(&self) -> u64 {
        let size = self.counts.len().max(self.col_sums.len());
        if size == 0 {
            return 0;
        }
        let max = self.counts.iter().flatten().copied().max().unwrap_or(0) as i64;
        // Minimise (max - count) on a zero-padded square matrix.
        let cost: Vec<Vec<i64>> = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| max - self.counts.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0) as i64)
                    .collect()
            })
            .collect();
        let assignment = hungarian_min(&cost);
        assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| self.counts.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0))
            .sum()
    }

    /// Household pairs on which both partitions agree, over all pairs.
    pub fn pair_agreement(&self) -> f64 {
        let c2 = |x: u64| x * x.saturating_sub(1) / 2;
        let pairs = c2(self.total);
        if pairs == 0 {
            return 1.0;
        }
        let both: u64 = self.counts.iter().flatten().map(|&c| c2(c)).sum();
        let in_a: u64 = self.row_sums.iter().map(|&c| c2(c)).sum();
        let in_b: u64 = self.col_sums.iter().map(|&c| c2(c)).sum();
        // together in both + apart in both
        let agree = pairs + 2 * both - in_a - in_b;
        agree as f64 / pairs as f64
    }
}

/// Square min-cost assignment (shortest augmenting path with potentials).
/// Returns the column chosen for each row.
pub fn hungarian_min(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = i64::MAX / 4;
    // 1-based arrays; index 0 is a sentinel.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    row_to_col
}

/// B's labels reordered to follow A's household order.
fn align(a: &ClusterAssignment, b: &ClusterAssignment) -> Result<Vec<usize>, CrossDimError> {
    if a.ids.len() != b.ids.len() {
        return Err(CrossDimError::IdMismatch(format!(
            "{} vs {} households",
            a.ids.len(),
            b.ids.len()
        )));
    }
    if a.ids == b.ids {
        return Ok(b.labels.clone());
    }
    let index: HashMap<&str, usize> = b.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    a.ids
        .iter()
        .map(|id| {
            index
                .get(id.as_str())
                .map(|&i| b.labels[i])
                .ok_or_else(|| CrossDimError::IdMismatch(format!("{id} missing from second labeling")))
        })
        .collect()
}

pub fn contingency(a: &ClusterAssignment, b: &ClusterAssignment) -> Result<ContingencyTable, CrossDimError> {
    let b_labels = align(a, b)?;
    let rows = a.k.max(a.labels.iter().max().map_or(0, |m| m + 1));
    let cols = b.k.max(b_labels.iter().max().map_or(0, |m| m + 1));
    Ok(ContingencyTable::with_shape(&a.labels, &b_labels, rows, cols))
}

pub fn agreement_labels(a: &[usize], b: &[usize], method: AgreementMethod) -> f64 {
    let table = ContingencyTable::from_labels(a, b);
    table_agreement(&table, method)
}

fn table_agreement(table: &ContingencyTable, method: AgreementMethod) -> f64 {
    match method {
        AgreementMethod::Hungarian if table.total == 0 => 1.0,
        AgreementMethod::Hungarian => table.max_matching() as f64 / table.total as f64,
        AgreementMethod::PairCounting => table.pair_agreement(),
    }
}

pub fn agreement(
    a: &ClusterAssignment,
    b: &ClusterAssignment,
    method: AgreementMethod,
) -> Result<f64, CrossDimError> {
    Ok(table_agreement(&contingency(a, b)?, method))
}

/// Pairwise agreement between per-dimension labelings under one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub dimensions: Vec<Dimension>,
    pub method: AgreementMethod,
    pub proportions: Vec<Vec<f64>>,
}

impl AgreementMatrix {
    /// Square CSV with the self-comparison diagonal left blank.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "dimension")?;
        for d in &self.dimensions {
            write!(w, ",{d}")?;
        }
        writeln!(w)?;
        for (i, d) in self.dimensions.iter().enumerate() {
            write!(w, "{d}")?;
            for (j, p) in self.proportions[i].iter().enumerate() {
                if i == j {
                    write!(w, ",")?;
                } else {
                    write!(w, ",{p:.6}")?;
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

pub fn cross_dimension_heatmap(
    assignments: &[(Dimension, &ClusterAssignment)],
    method: AgreementMethod,
) -> Result<AgreementMatrix, CrossDimError> {
    let n = assignments.len();
    if n < 2 {
        return Err(CrossDimError::TooFewLabelings(n));
    }
    let mut proportions = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in 0..i {
            let p = agreement(assignments[i].1, assignments[j].1, method)?;
            proportions[i][j] = p;
            proportions[j][i] = p;
        }
    }
    Ok(AgreementMatrix {
        dimensions: assignments.iter().map(|(d, _)| *d).collect(),
        method,
        proportions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::Algorithm;
    use crate::distance::Metric;

    fn assignment(ids: &[&str], labels: &[usize]) -> ClusterAssignment {
        ClusterAssignment {
            ids: ids.iter().map(|s| s.to_string()).collect(),
            labels: labels.to_vec(),
            k: labels.iter().max().map_or(0, |m| m + 1),
            algorithm: Algorithm::KMeans,
            metric: Metric::Dtw,
            linkage: None,
            centers: None,
            objective: None,
            empty_clusters: Vec::new(),
            seed: None,
        }
    }

    #[test]
    fn self_comparison_is_diagonal() {
        let a = assignment(&["a", "b", "c", "d", "e"], &[0, 0, 1, 2, 2]);
        let t = contingency(&a, &a).unwrap();
        assert_eq!(t.counts, vec![vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 2]]);
        assert_eq!(agreement(&a, &a, AgreementMethod::Hungarian).unwrap(), 1.0);
        assert_eq!(agreement(&a, &a, AgreementMethod::PairCounting).unwrap(), 1.0);
    }

    #[test]
    fn one_cluster_against_singletons() {
        let ids = ["a", "b", "c", "d"];
        let a = assignment(&ids, &[0, 0, 0, 0]);
        let b = assignment(&ids, &[0, 1, 2, 3]);
        assert_eq!(agreement(&a, &b, AgreementMethod::Hungarian).unwrap(), 0.25);
        assert_eq!(agreement(&a, &b, AgreementMethod::PairCounting).unwrap(), 0.0);
    }

    #[test]
    fn aligns_by_id_and_rejects_mismatch() {
        let a = assignment(&["a", "b", "c"], &[0, 1, 1]);
        let b = assignment(&["c", "a", "b"], &[0, 1, 0]);
        assert_eq!(agreement(&a, &b, AgreementMethod::Hungarian).unwrap(), 1.0);
        let c = assignment(&["a", "b", "x"], &[0, 1, 1]);
        assert!(matches!(contingency(&a, &c), Err(CrossDimError::IdMismatch(_))));
    }

    #[test]
    fn hungarian_beats_greedy() {
        // Greedy on the 5 picks (0,0) then (1,1)=0; optimum is 4+4.
        let cost = vec![vec![-5, -4], vec![-4, 0]];
        let p = hungarian_min(&cost);
        assert_eq!(p, vec![1, 0]);
    }

    #[test]
    fn rectangular_tables_pad() {
        let t = ContingencyTable::from_labels(&[0, 0, 1, 1, 1], &[0, 1, 2, 2, 2]);
        assert_eq!(t.max_matching(), 4);
        assert_eq!(t.row_sums, vec![2, 3]);
        assert_eq!(t.col_sums, vec![1, 1, 3]);
    }

    #[test]
    fn heatmap_csv_blanks_diagonal() {
        let ids = ["a", "b", "c"];
        let a = assignment(&ids, &[0, 1, 1]);
        let b = assignment(&ids, &[1, 0, 0]);
        let m = cross_dimension_heatmap(
            &[(Dimension::Boiler, &a), (Dimension::User, &b)],
            AgreementMethod::Hungarian,
        )
        .unwrap();
        let mut out = Vec::new();
        m.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "dimension,boiler,user\nboiler,,1.000000\nuser,1.000000,\n");
    }

    #[test]
    fn contingency_csv_has_margins() {
        let t = ContingencyTable::from_labels(&[0, 1, 1], &[0, 0, 1]);
        let mut out = Vec::new();
        t.write_csv(&mut out, "DTW", "DDTW").unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "DTW\\DDTW,0,1,total\n0,1,0,1\n1,1,1,2\ntotal,2,1,3\n"
        );
    }
}
