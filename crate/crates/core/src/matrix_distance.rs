//! Distances between stochastic matrices.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_dim, Error, Result};
use crate::matrix::{SquareMatrix, StochasticMatrix};
use crate::simplex::{bhattacharyya_angle, half_angle};
use crate::structure::{is_ergodic, stationary_distribution};

/// Row-wise product distance `2·√(Σ_i arccos²(BC(P1_i, P2_i)))`.
///
/// Defined for any pair of equally sized stochastic matrices. Bounded above
/// by `π√n`, attained when every pair of rows has disjoint support.
pub fn stochastic_matrix_distance(p1: &StochasticMatrix, p2: &StochasticMatrix) -> Result<f64> {
    check_dim(p1.dim(), p2.dim())?;
    let sum: f64 = (0..p1.dim())
        .map(|i| half_angle(p1.row(i), p2.row(i)).powi(2))
        .sum();
    Ok(2.0 * sum.sqrt())
}

/// Bhattacharyya angle between the stationary laws of two ergodic chains.
pub fn ergodic_distance(p1: &StochasticMatrix, p2: &StochasticMatrix) -> Result<f64> {
    check_dim(p1.dim(), p2.dim())?;
    if !is_ergodic(p1) || !is_ergodic(p2) {
        return Err(Error::NotErgodic);
    }
    let pi1 = stationary_distribution(p1)?;
    let pi2 = stationary_distribution(p2)?;
    bhattacharyya_angle(&pi1, &pi2)
}

fn kl_rate(pi: &[f64], p: &StochasticMatrix, q: &StochasticMatrix) -> f64 {
    let mut total = 0.0;
    for (i, &weight) in pi.iter().enumerate() {
        let mut row = 0.0;
        for (&a, &b) in p.row(i).iter().zip(q.row(i)) {
            if a == 0.0 {
                continue;
            }
            if b == 0.0 {
                return f64::INFINITY;
            }
            row += a * (a / b).ln();
        }
        total += weight * row;
    }
    total
}

/// Symmetrized Kullback–Leibler divergence rate
/// `Σ_i π1_i KL(P1_i ‖ P2_i) + Σ_i π2_i KL(P2_i ‖ P1_i)`.
///
/// Returns `f64::INFINITY` when either chain puts mass on a transition the
/// other forbids.
pub fn sym_kl_rate(p1: &StochasticMatrix, p2: &StochasticMatrix) -> Result<f64> {
    check_dim(p1.dim(), p2.dim())?;
    if !is_ergodic(p1) || !is_ergodic(p2) {
        return Err(Error::NotErgodic);
    }
    let pi1 = stationary_distribution(p1)?;
    let pi2 = stationary_distribution(p2)?;
    Ok(kl_rate(pi1.as_slice(), p1, p2) + kl_rate(pi2.as_slice(), p2, p1))
}

/// Entrywise `Σ |P1_ij − P2_ij|`.
pub fn l1_matrix_distance(p1: &StochasticMatrix, p2: &StochasticMatrix) -> Result<f64> {
    check_dim(p1.dim(), p2.dim())?;
    Ok(p1.entries().iter().zip(p2.entries()).map(|(a, b)| (a - b).abs()).sum())
}

/// Frobenius norm of `P1 − P2`.
pub fn l2_matrix_distance(p1: &StochasticMatrix, p2: &StochasticMatrix) -> Result<f64> {
    check_dim(p1.dim(), p2.dim())?;
    Ok(p1
        .entries()
        .iter()
        .zip(p2.entries())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Mixes `P` with the uniform matrix: `(P + ε)/(1 + nε)`.
pub fn smooth(p: &StochasticMatrix, epsilon: f64) -> StochasticMatrix {
    let n = p.dim() as f64;
    let rows = p
        .to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|v| (v + epsilon) / (1.0 + n * epsilon)).collect())
        .collect();
    StochasticMatrix::from_rows(rows).expect("smoothing preserves stochasticity")
}

/// The matrix distances compared by the clustering benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatrixMetricKind {
    Smd,
    SymKlRate,
    L1,
    L2,
}

impl MatrixMetricKind {
    pub const ALL: [MatrixMetricKind; 4] = [Self::Smd, Self::SymKlRate, Self::L1, Self::L2];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Smd => "smd",
            Self::SymKlRate => "skl",
            Self::L1 => "l1",
            Self::L2 => "l2",
        }
    }

    pub fn distance(self, p1: &StochasticMatrix, p2: &StochasticMatrix) -> Result<f64> {
        match self {
            Self::Smd => stochastic_matrix_distance(p1, p2),
            Self::SymKlRate => sym_kl_rate(p1, p2),
            Self::L1 => l1_matrix_distance(p1, p2),
            Self::L2 => l2_matrix_distance(p1, p2),
        }
    }
}

impl fmt::Display for MatrixMetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MatrixMetricKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "smd" => Ok(Self::Smd),
            "skl" | "symkl" | "kl" => Ok(Self::SymKlRate),
            "l1" => Ok(Self::L1),
            "l2" => Ok(Self::L2),
            other => Err(format!("unknown metric '{other}' (expected smd, skl, l1 or l2)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn sm(rows: &[&[f64]]) -> StochasticMatrix {
        StochasticMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn smd_examples() {
        let a = sm(&[&[0.9, 0.1], &[0.1, 0.9]]);
        let b = sm(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert_eq!(stochastic_matrix_distance(&a, &a).unwrap(), 0.0);
        let id = StochasticMatrix::identity(2);
        let swap = StochasticMatrix::permutation(&[1, 0]).unwrap();
        assert_abs_diff_eq!(
            stochastic_matrix_distance(&id, &swap).unwrap(),
            PI * 2f64.sqrt(),
            epsilon = 1e-12
        );
        let bc: f64 = 0.45f64.sqrt() + 0.05f64.sqrt();
        let expected = 2.0 * (2.0 * bc.acos().powi(2)).sqrt();
        assert_abs_diff_eq!(stochastic_matrix_distance(&a, &b).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 1.3114, epsilon = 1e-4);
        assert!(stochastic_matrix_distance(&a, &StochasticMatrix::identity(3)).is_err());
    }

    #[test]
    fn smd_upper_bound_on_disjoint_permutations() {
        let a = StochasticMatrix::permutation(&[1, 2, 0]).unwrap();
        let b = StochasticMatrix::permutation(&[2, 0, 1]).unwrap();
        assert_abs_diff_eq!(
            stochastic_matrix_distance(&a, &b).unwrap(),
            PI * 3f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn ergodic_examples() {
        let a = sm(&[&[0.7, 0.3], &[0.3, 0.7]]);
        let b = sm(&[&[0.95, 0.05], &[0.45, 0.55]]);
        assert_abs_diff_eq!(ergodic_distance(&a, &a).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ergodic_distance(&a, &b).unwrap(), 0.9272952180016122, epsilon = 1e-10);
        let swap = StochasticMatrix::permutation(&[1, 0]).unwrap();
        assert!(matches!(ergodic_distance(&a, &swap), Err(Error::NotErgodic)));
    }

    #[test]
    fn ergodic_distance_grows_as_stationary_mass_concentrates() {
        // stationary law (1 − δ, δ) via detailed balance with P_01 = δ·c, P_10 = (1 − δ)·c
        let uniform = sm(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let mut last = 0.0;
        for delta in [0.1, 0.01, 0.001] {
            let p = sm(&[&[1.0 - 0.5 * delta, 0.5 * delta], &[0.5 * (1.0 - delta), 0.5 + 0.5 * delta]]);
            let d = ergodic_distance(&uniform, &p).unwrap();
            assert!(d > last);
            assert!(d < 2.0 * 0.5f64.sqrt().acos());
            last = d;
        }
    }

    #[test]
    fn sym_kl_examples() {
        let a = sm(&[&[0.7, 0.3], &[0.3, 0.7]]);
        let b = sm(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert_eq!(sym_kl_rate(&a, &a).unwrap(), 0.0);
        let expected = (0.7 * 1.4f64.ln() + 0.3 * 0.6f64.ln())
            + (0.5 * (5.0f64 / 7.0).ln() + 0.5 * (5.0f64 / 3.0).ln());
        assert_abs_diff_eq!(sym_kl_rate(&a, &b).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.16946, epsilon = 1e-5);
        let c = sm(&[&[0.5, 0.5], &[1.0, 0.0]]);
        assert_eq!(sym_kl_rate(&a, &c).unwrap(), f64::INFINITY);
    }

    #[test]
    fn entrywise_examples() {
        let id = StochasticMatrix::identity(2);
        let swap = StochasticMatrix::permutation(&[1, 0]).unwrap();
        assert_eq!(l1_matrix_distance(&id, &id).unwrap(), 0.0);
        assert_eq!(l2_matrix_distance(&id, &id).unwrap(), 0.0);
        assert_eq!(l1_matrix_distance(&id, &swap).unwrap(), 4.0);
        assert_eq!(l2_matrix_distance(&id, &swap).unwrap(), 2.0);
        let a = sm(&[&[0.9, 0.1], &[0.1, 0.9]]);
        let b = sm(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert_abs_diff_eq!(l1_matrix_distance(&a, &b).unwrap(), 1.6, epsilon = 1e-12);
        assert_abs_diff_eq!(l2_matrix_distance(&a, &b).unwrap(), 0.8, epsilon = 1e-12);
    }

    #[test]
    fn metric_tags_round_trip() {
        for kind in MatrixMetricKind::ALL {
            assert_eq!(kind.tag().parse::<MatrixMetricKind>().unwrap(), kind);
        }
        assert!("hamming".parse::<MatrixMetricKind>().is_err());
    }

    #[test]
    fn smoothing_removes_zeros() {
        let c = sm(&[&[0.5, 0.5], &[1.0, 0.0]]);
        let s = smooth(&c, 1e-12);
        assert!(s.entries().iter().all(|&v| v > 0.0));
    }
}
