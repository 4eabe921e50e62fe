use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Cross-tabulation of two labelings. Rows follow the sorted distinct labels
/// of the first labeling, columns those of the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
}

/// Pair counts: `a` together in both, `b` together only in the first,
/// `c` together only in the second, `d` apart in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub a: u128,
    pub b: u128,
    pub c: u128,
    pub d: u128,
}

fn dense_index(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = BTreeMap::new();
    for &l in labels {
        map.entry(l).or_insert(0);
    }
    for (i, v) in map.values_mut().enumerate() {
        *v = i;
    }
    (labels.iter().map(|l| map[l]).collect(), map.len())
}

pub fn contingency(a: &[usize], b: &[usize]) -> Result<ContingencyTable> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (ia, ra) = dense_index(a);
    let (ib, rb) = dense_index(b);
    let mut counts = vec![vec![0u64; rb]; ra];
    for (&i, &j) in ia.iter().zip(&ib) {
        counts[i][j] += 1;
    }
    let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
    let col_sums = (0..rb).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
    Ok(ContingencyTable {
        counts,
        row_sums,
        col_sums,
        total: a.len() as u64,
    })
}

fn sum_squares<'a>(xs: impl Iterator<Item = &'a u64>) -> u128 {
    xs.map(|&x| x as u128 * x as u128).sum()
}

impl ContingencyTable {
    pub fn pair_counts(&self) -> PairCounts {
        let n = self.total as u128;
        let t = sum_squares(self.counts.iter().flatten());
        let r = sum_squares(self.row_sums.iter());
        let c = sum_squares(self.col_sums.iter());
        PairCounts {
            a: (t - n) / 2,
            b: (r - t) / 2,
            c: (c - t) / 2,
            d: (t + n * n - r - c) / 2,
        }
    }
}

/// Hubert–Arabie adjusted Rand index from pair counts.
pub fn adjusted_rand_index(table: &ContingencyTable) -> Result<f64> {
    if table.total < 2 {
        return Err(Error::TooFewPoints(table.total as usize));
    }
    let PairCounts { a, b, c, d } = table.pair_counts();
    let (a, b, c, d) = (a as f64, b as f64, c as f64, d as f64);
    let denominator = (a + b) * (b + d) + (a + c) * (c + d);
    if denominator == 0.0 {
        return Ok(if b == 0.0 && c == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(2.0 * (a * d - b * c) / denominator)
}

/// The compact trace-style expression
/// `(C(N,2)(a+d) − (b+c)(a+d)) / (C(N,2)² − (b+c)(a+d))`.
///
/// Kept as a diagnostic only: it is not chance-corrected in the usual sense
/// and disagrees with [`adjusted_rand_index`] (e.g. 1/7 against −1/2 for
/// `(0,0,1,1)` vs `(0,1,0,1)`).
pub fn trace_form_ari(table: &ContingencyTable) -> Result<f64> {
    if table.total < 2 {
        return Err(Error::TooFewPoints(table.total as usize));
    }
    let PairCounts { a, b, c, d } = table.pair_counts();
    let pairs = (a + b + c + d) as f64;
    let agree = (a + d) as f64;
    let disagree = (b + c) as f64;
    let denominator = pairs * pairs - disagree * agree;
    if denominator == 0.0 {
        return Ok(0.0);
    }
    Ok((pairs * agree - disagree * agree) / denominator)
}

/// Convenience wrapper: ARI of two label lists.
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64> {
    adjusted_rand_index(&contingency(a, b)?)
}
