use crate::error::{check_dim, Error, Result};
use crate::matrix::{SquareMatrix, StochasticMatrix};
use crate::matrix_distance::{smooth, MatrixMetricKind};

const SYMMETRY_TOL: f64 = 1e-12;

/// Symmetric, zero-diagonal, finite pairwise distance table.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    m: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Empty);
        }
        let mut entries = Vec::with_capacity(m * m);
        for row in rows {
            check_dim(m, row.len())?;
            entries.extend(row);
        }
        for i in 0..m {
            for j in 0..m {
                let v = entries[i * m + j];
                if v.is_infinite() {
                    return Err(Error::InfiniteDistance { i, j });
                }
                if !(v >= 0.0) {
                    return Err(Error::NegativeEntry { index: i * m + j, value: v });
                }
                if i == j && v != 0.0 {
                    return Err(Error::DegenerateInput(format!("nonzero diagonal at {i}")));
                }
                if (v - entries[j * m + i]).abs() > SYMMETRY_TOL {
                    return Err(Error::DegenerateInput(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { m, entries })
    }

    pub fn size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.m..(i + 1) * self.m]
    }
}

/// Distances between every unordered pair, without smoothing.
pub fn pairwise_distance_matrix(
    matrices: &[StochasticMatrix],
    metric: MatrixMetricKind,
) -> Result<DistanceMatrix> {
    pairwise_distance_matrix_with(matrices, metric, None)
}

/// As [`pairwise_distance_matrix`], optionally smoothing every matrix with
/// `(P + ε)/(1 + nε)` first so that infinite KL rates cannot occur.
pub fn pairwise_distance_matrix_with(
    matrices: &[StochasticMatrix],
    metric: MatrixMetricKind,
    smoothing: Option<f64>,
) -> Result<DistanceMatrix> {
    let m = matrices.len();
    if m < 2 {
        return Err(Error::TooFewPoints(m));
    }
    let smoothed: Vec<StochasticMatrix>;
    let items = match smoothing {
        Some(eps) => {
            smoothed = matrices.iter().map(|p| smooth(p, eps)).collect();
            &smoothed[..]
        }
        None => matrices,
    };
    let n = items[0].dim();
    let mut entries = vec![0.0; m * m];
    for i in 0..m {
        check_dim(n, items[i].dim())?;
        for j in i + 1..m {
            let d = metric.distance(&items[i], &items[j])?;
            if d.is_infinite() {
                return Err(Error::InfiniteDistance { i, j });
            }
            entries[i * m + j] = d;
            entries[j * m + i] = d;
        }
    }
    Ok(DistanceMatrix { m, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::dirichlet::sample_stochastic_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn sm(rows: &[&[f64]]) -> StochasticMatrix {
        StochasticMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn identical_matrices_are_at_zero() {
        let p = sm(&[&[0.3, 0.7], &[0.6, 0.4]]);
        for metric in MatrixMetricKind::ALL {
            let d = pairwise_distance_matrix(&[p.clone(), p.clone()], metric).unwrap();
            assert_eq!(d.get(0, 1), 0.0, "{metric}");
        }
    }

    #[test]
    fn identity_and_swap_under_smd() {
        let id = StochasticMatrix::identity(2);
        let swap = StochasticMatrix::permutation(&[1, 0]).unwrap();
        let d = pairwise_distance_matrix(&[id, swap], MatrixMetricKind::Smd).unwrap();
        assert!((d.get(0, 1) - PI * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(d.get(1, 0), d.get(0, 1));
    }

    #[test]
    fn smd_table_is_a_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ms: Vec<_> = (0..8)
            .map(|_| sample_stochastic_matrix(&[0.5, 1.0, 2.0], &mut rng).unwrap())
            .collect();
        let d = pairwise_distance_matrix(&ms, MatrixMetricKind::Smd).unwrap();
        for i in 0..8 {
            assert_eq!(d.get(i, i), 0.0);
            for j in 0..8 {
                for k in 0..8 {
                    assert!(d.get(i, k) <= d.get(i, j) + d.get(j, k) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn infinite_kl_rejected_unless_smoothed() {
        let a = sm(&[&[0.7, 0.3], &[0.3, 0.7]]);
        let b = sm(&[&[0.5, 0.5], &[1.0, 0.0]]);
        let ms = [a, b];
        assert!(matches!(
            pairwise_distance_matrix(&ms, MatrixMetricKind::SymKlRate),
            Err(Error::InfiniteDistance { i: 0, j: 1 })
        ));
        let d = pairwise_distance_matrix_with(&ms, MatrixMetricKind::SymKlRate, Some(1e-12)).unwrap();
        assert!(d.get(0, 1).is_finite() && d.get(0, 1) > 0.0);
    }

    #[test]
    fn validation() {
        assert!(pairwise_distance_matrix(&[StochasticMatrix::identity(2)], MatrixMetricKind::L1).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).is_ok());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
        assert!(matches!(
            DistanceMatrix::from_rows(vec![vec![0.0, f64::INFINITY], vec![f64::INFINITY, 0.0]]),
            Err(Error::InfiniteDistance { .. })
        ));
    }
}
