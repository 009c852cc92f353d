use heatprofile::crossdim::{self, AgreementMethod, ContingencyTable};
use proptest::prelude::*;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn cost_of(cost: &[Vec<i64>], assignment: &[usize]) -> i64 {
    assignment.iter().enumerate().map(|(i, &j)| cost[i][j]).sum()
}

fn labels(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..k, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hungarian_matches_brute_force(n in 1usize..=6, seed in prop::collection::vec(-50i64..50, 36)) {
        let cost: Vec<Vec<i64>> = (0..n).map(|i| seed[i * 6..i * 6 + n].to_vec()).collect();
        let got = crossdim::hungarian_min(&cost);
        let mut sorted = got.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        let best = permutations(n).iter().map(|p| cost_of(&cost, p)).min().unwrap();
        prop_assert_eq!(cost_of(&cost, &got), best);
    }

    #[test]
    fn agreement_bounds_and_symmetry((a, b) in (2usize..30).prop_flat_map(|n| (labels(n, 4), labels(n, 3)))) {
        for method in AgreementMethod::ALL {
            let ab = crossdim::agreement_labels(&a, &b, method);
            let ba = crossdim::agreement_labels(&b, &a, method);
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(ab, ba);
            prop_assert_eq!(crossdim::agreement_labels(&a, &a, method), 1.0);
        }
    }

    #[test]
    fn margins_reconcile((a, b) in (1usize..40).prop_flat_map(|n| (labels(n, 5), labels(n, 5)))) {
        let t = ContingencyTable::from_labels(&a, &b);
        prop_assert_eq!(t.total as usize, a.len());
        for (i, row) in t.counts.iter().enumerate() {
            prop_assert_eq!(row.iter().sum::<u64>(), t.row_sums[i]);
        }
        for j in 0..t.cols() {
            prop_assert_eq!(t.counts.iter().map(|r| r[j]).sum::<u64>(), t.col_sums[j]);
        }
    }
}

#[test]
fn contingency_csv_has_totals() {
    let t = ContingencyTable::from_labels(&[0, 0, 1, 1], &[1, 1, 0, 1]);
    let mut out = Vec::new();
    t.write_csv(&mut out, "a", "b").unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].ends_with(",total"));
    assert!(lines[3].starts_with("total,") && lines[3].ends_with(",4"));
}
