//! PAM k-medoids on a precomputed distance table.
//!
//! Swap evaluation uses the nearest/second-nearest cache so one full sweep
//! over candidate swaps costs `O(m²)`. Labels are canonical: clusters are
//! numbered in order of first appearance, which makes "lexicographically
//! least labeling" a well-defined tie-break between equal-cost solutions.

use rand::seq::index;
use rand::Rng;

use super::distance::DistanceMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_RESTARTS: usize = 10;

/// Result of a k-medoids run. `medoids[l]` is the medoid of cluster `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct KMedoids {
    pub labels: Vec<usize>,
    pub medoids: Vec<usize>,
    pub cost: f64,
    pub swaps: usize,
    /// Total cost after initialization and after every accepted swap.
    pub cost_trace: Vec<f64>,
}

fn tolerance(cost: f64) -> f64 {
    1e-12 * (1.0 + cost.abs())
}

/// Canonical labeling and cost for a medoid set. A point equidistant from
/// several medoids joins the one whose label is smallest.
fn assign(d: &DistanceMatrix, medoids: &[usize]) -> (Vec<usize>, Vec<usize>, f64) {
    let m = d.size();
    let mut label_of = vec![usize::MAX; medoids.len()];
    let mut order = Vec::with_capacity(medoids.len());
    let mut labels = Vec::with_capacity(m);
    let mut cost = 0.0;
    for p in 0..m {
        let slot = match medoids.iter().position(|&q| q == p) {
            Some(s) => s,
            None => {
                let best = medoids.iter().map(|&q| d.get(p, q)).fold(f64::INFINITY, f64::min);
                cost += best;
                let mut chosen: Option<usize> = None;
                for (s, &q) in medoids.iter().enumerate() {
                    if d.get(p, q) != best {
                        continue;
                    }
                    chosen = match chosen {
                        None => Some(s),
                        Some(c) => {
                            // prefer a labelled medoid with smaller label, then the lowest index
                            let key = |slot: usize| (label_of[slot], medoids[slot]);
                            Some(if key(s) < key(c) { s } else { c })
                        }
                    };
                }
                chosen.expect("at least one medoid")
            }
        };
        if label_of[slot] == usize::MAX {
            label_of[slot] = order.len();
            order.push(medoids[slot]);
        }
        labels.push(label_of[slot]);
    }
    (labels, order, cost)
}

struct Cache {
    nearest: Vec<usize>,
    near: Vec<f64>,
    second: Vec<f64>,
}

impl Cache {
    fn build(d: &DistanceMatrix, medoids: &[usize]) -> Self {
        let m = d.size();
        let mut cache = Cache {
            nearest: vec![0; m],
            near: vec![f64::INFINITY; m],
            second: vec![f64::INFINITY; m],
        };
        for p in 0..m {
            for (s, &q) in medoids.iter().enumerate() {
                let v = d.get(p, q);
                if v < cache.near[p] {
                    cache.second[p] = cache.near[p];
                    cache.near[p] = v;
                    cache.nearest[p] = s;
                } else if v < cache.second[p] {
                    cache.second[p] = v;
                }
            }
        }
        cache
    }
}

/// Cost changes of replacing each medoid slot by `o`.
fn swap_deltas(d: &DistanceMatrix, cache: &Cache, o: usize, deltas: &mut [f64]) {
    deltas.iter_mut().for_each(|x| *x = 0.0);
    let mut common = 0.0;
    let row = d.row(o);
    for (p, &dpo) in row.iter().enumerate() {
        let gain = (dpo - cache.near[p]).min(0.0);
        common += gain;
        let s = cache.nearest[p];
        deltas[s] += dpo.min(cache.second[p]) - cache.near[p] - gain;
    }
    deltas.iter_mut().for_each(|x| *x += common);
}

/// One swap descent from `initial` medoid indices.
pub fn pam_from(d: &DistanceMatrix, initial: &[usize]) -> Result<KMedoids> {
    let m = d.size();
    let k = initial.len();
    if k == 0 || k > m {
        return Err(Error::DegenerateInput(format!("cannot form {k} clusters from {m} points")));
    }
    let mut medoids = initial.to_vec();
    let mut sorted = medoids.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != k || sorted[k - 1] >= m {
        return Err(Error::DegenerateInput("initial medoids must be distinct valid indices".into()));
    }

    let mut is_medoid = vec![false; m];
    medoids.iter().for_each(|&q| is_medoid[q] = true);
    let (mut labels, _, mut cost) = assign(d, &medoids);
    let mut trace = vec![cost];
    let mut swaps = 0;
    let cap = m * m;
    let mut deltas = vec![0.0; k];

    'descent: while swaps < cap {
        let cache = Cache::build(d, &medoids);
        let tol = tolerance(cost);
        let mut best: Option<(f64, usize, usize)> = None;
        let mut ties = Vec::new();
        for o in (0..m).filter(|&o| !is_medoid[o]) {
            swap_deltas(d, &cache, o, &mut deltas);
            for (s, &delta) in deltas.iter().enumerate() {
                if best.is_none_or(|(b, _, _)| delta < b) {
                    best = Some((delta, s, o));
                }
                if delta.abs() <= tol {
                    ties.push((s, o));
                }
            }
        }

        let mut apply = |medoids: &mut Vec<usize>, s: usize, o: usize| {
            is_medoid[medoids[s]] = false;
            is_medoid[o] = true;
            medoids[s] = o;
        };

        if let Some((delta, s, o)) = best {
            if delta < -tol {
                apply(&mut medoids, s, o);
                let (l, _, c) = assign(d, &medoids);
                labels = l;
                cost = c;
                trace.push(cost);
                swaps += 1;
                continue;
            }
        }
        // no strict improvement: move along equal-cost swaps toward smaller labelings
        for (s, o) in ties {
            let mut candidate = medoids.clone();
            candidate[s] = o;
            let (l, _, c) = assign(d, &candidate);
            if c <= cost && l < labels {
                apply(&mut medoids, s, o);
                labels = l;
                cost = c;
                trace.push(cost);
                swaps += 1;
                continue 'descent;
            }
        }
        break;
    }

    let (labels, medoids, cost) = assign(d, &medoids);
    Ok(KMedoids {
        labels,
        medoids,
        cost,
        swaps,
        cost_trace: trace,
    })
}

/// Best of `restarts` descents from random initial medoids: minimal cost,
/// then lexicographically least labeling.
pub fn k_medoids<R: Rng + ?Sized>(
    d: &DistanceMatrix,
    k: usize,
    restarts: usize,
    rng: &mut R,
) -> Result<KMedoids> {
    let m = d.size();
    if k == 0 || k > m {
        return Err(Error::DegenerateInput(format!("cannot form {k} clusters from {m} points")));
    }
    let mut best: Option<KMedoids> = None;
    for _ in 0..restarts.max(1) {
        let init = index::sample(rng, m, k).into_vec();
        let run = pam_from(d, &init)?;
        best = Some(match best {
            None => run,
            Some(b) => {
                let tol = tolerance(b.cost);
                if run.cost < b.cost - tol || (run.cost <= b.cost + tol && run.labels < b.labels) {
                    run
                } else {
                    b
                }
            }
        });
    }
    Ok(best.expect("at least one restart"))
}

/// Labels in `[0, k)` from a default-restart k-medoids run.
pub fn cluster_k_medoids<R: Rng + ?Sized>(
    d: &DistanceMatrix,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    Ok(k_medoids(d, k, DEFAULT_RESTARTS, rng)?.labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table(points: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_rows(
            points
                .iter()
                .map(|a| points.iter().map(|b| (a - b).abs()).collect())
                .collect(),
        )
        .unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(17)
    }

    /// Minimal medoid cost over every labeling into `k` nonempty groups.
    fn exhaustive(d: &DistanceMatrix, k: usize) -> (f64, Vec<usize>) {
        let m = d.size();
        let mut best = (f64::INFINITY, Vec::new());
        let mut labels = vec![0usize; m];
        loop {
            // restricted growth strings enumerate each partition once, canonically labelled
            let groups = labels.iter().max().unwrap() + 1;
            if groups == k {
                let mut cost = 0.0;
                for g in 0..k {
                    let members: Vec<usize> = (0..m).filter(|&p| labels[p] == g).collect();
                    cost += members
                        .iter()
                        .map(|&c| members.iter().map(|&p| d.get(p, c)).sum::<f64>())
                        .fold(f64::INFINITY, f64::min);
                }
                if cost < best.0 - 1e-12 {
                    best = (cost, labels.clone());
                }
            }
            let mut i = m - 1;
            loop {
                if i == 0 {
                    return best;
                }
                let cap = labels[..i].iter().max().unwrap() + 1;
                if labels[i] < cap.min(k - 1) {
                    labels[i] += 1;
                    labels[i + 1..].iter_mut().for_each(|x| *x = 0);
                    break;
                }
                i -= 1;
            }
        }
    }

    #[test]
    fn separated_pairs() {
        let d = table(&[0.0, 0.1, 10.0, 10.2]);
        assert_eq!(cluster_k_medoids(&d, 2, &mut rng()).unwrap(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn equidistant_points_take_least_labeling() {
        let m = 6;
        let rows = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        let d = DistanceMatrix::from_rows(rows).unwrap();
        for seed in 0..5 {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let run = k_medoids(&d, 2, 10, &mut r).unwrap();
            assert_eq!(run.labels, vec![0, 0, 0, 0, 0, 1]);
            assert_eq!(run.cost, 4.0);
        }
    }

    #[test]
    fn three_blobs_match_exhaustive_search() {
        let d = table(&[0.0, 0.3, 0.5, 5.0, 5.4, 5.5, 11.0, 11.2, 11.9]);
        let (cost, labels) = exhaustive(&d, 3);
        assert_eq!(labels, vec![0, 0, 0, 1, 1, 1, 2, 2, 2]);
        let run = k_medoids(&d, 3, 10, &mut rng()).unwrap();
        assert_eq!(run.labels, labels);
        assert!((run.cost - cost).abs() < 1e-12);
    }

    #[test]
    fn k_larger_than_points_rejected() {
        let d = table(&[0.0, 1.0]);
        assert!(matches!(cluster_k_medoids(&d, 3, &mut rng()), Err(Error::DegenerateInput(_))));
        assert!(cluster_k_medoids(&d, 0, &mut rng()).is_err());
        assert!(pam_from(&d, &[1, 1]).is_err());
    }

    #[test]
    fn k_equal_to_m_is_singletons() {
        let d = table(&[3.0, 1.0, 2.0]);
        let run = k_medoids(&d, 3, 3, &mut rng()).unwrap();
        assert_eq!(run.labels, vec![0, 1, 2]);
        assert_eq!(run.cost, 0.0);
    }

    #[test]
    fn single_cluster() {
        let d = table(&[0.0, 1.0, 2.0, 10.0]);
        let run = k_medoids(&d, 1, 4, &mut rng()).unwrap();
        assert_eq!(run.labels, vec![0; 4]);
        assert_eq!(run.medoids, vec![1]);
        assert_eq!(run.cost, 11.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn descent_is_monotone_and_bounded(
            points in prop::collection::vec(-50.0f64..50.0, 4..24),
            k in 1usize..5,
            seed in any::<u64>(),
        ) {
            let k = k.min(points.len());
            let d = table(&points);
            let m = points.len();
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let init = index::sample(&mut r, m, k).into_vec();
            let run = pam_from(&d, &init).unwrap();
            prop_assert!(run.swaps <= m * m);
            for w in run.cost_trace.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
            prop_assert!(run.labels.iter().all(|&l| l < k));
            // labels are canonical: first appearances in order 0, 1, 2, ...
            let mut next = 0;
            for &l in &run.labels {
                prop_assert!(l <= next);
                if l == next { next += 1; }
            }
            prop_assert_eq!(next, k);
        }

        #[test]
        fn restarts_match_exhaustive_on_small_sets(
            points in prop::collection::vec(0.0f64..20.0, 3..8),
            seed in any::<u64>(),
        ) {
            let d = table(&points);
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let run = k_medoids(&d, 2, 10, &mut r).unwrap();
            let (cost, _) = exhaustive(&d, 2);
            prop_assert!(run.cost <= cost + 1e-9);
        }
    }
}
