//! Points on the probability simplex and the Bhattacharyya overlap between them.
//!
//! Angles are evaluated through the chord `‖√p − √q‖₂`, which equals
//! `2·sin(arccos(BC)/2)` on the simplex. This form loses no precision when the
//! two distributions nearly coincide, where `arccos` near 1 would.

use crate::error::{check_dim, Error, Result};

/// Default tolerance on `|Σp − 1|` accepted by [`ProbabilityVector::new`].
pub const SIMPLEX_TOL: f64 = 1e-9;

/// A validated categorical distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    entries: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(values, SIMPLEX_TOL)
    }

    /// Validates `values` and rescales them by their sum.
    pub fn with_tolerance(mut values: Vec<f64>, tol: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in values.iter().enumerate() {
            // NaN fails this comparison as well
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeEntry { index, value });
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::SumOutOfTolerance { sum, tol });
        }
        if sum != 1.0 {
            values.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(Self { entries: values })
    }

    /// The uniform distribution on `n` states.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        Ok(Self {
            entries: vec![1.0 / n as f64; n],
        })
    }

    /// The point mass `e_j`.
    pub fn basis(n: usize, j: usize) -> Result<Self> {
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, len: n });
        }
        let mut entries = vec![0.0; n];
        entries[j] = 1.0;
        Ok(Self { entries })
    }

    /// Clamps tiny negative rounding residue to zero and renormalizes.
    pub(crate) fn from_iterate(mut values: Vec<f64>) -> Result<Self> {
        for v in values.iter_mut() {
            if *v < 0.0 && *v > -1e-12 {
                *v = 0.0;
            }
        }
        Self::with_tolerance(values, 1e-8)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    pub fn min(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// `Σ √(p_i q_i)`, clamped to `[0, 1]`.
pub fn bhattacharyya_coefficient(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<f64> {
    check_dim(p.dim(), q.dim())?;
    Ok(overlap(p.as_slice(), q.as_slice()).clamp(0.0, 1.0))
}

/// `2·arccos(BC(p, q))`, in `[0, π]`.
pub fn bhattacharyya_angle(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<f64> {
    check_dim(p.dim(), q.dim())?;
    Ok(2.0 * half_angle(p.as_slice(), q.as_slice()))
}

/// Entrywise geometric mean `r_i = √(π1_i π2_i)`. Its sum is `BC(π1, π2)`.
pub fn hadamard_geometric_mean_vector(
    p: &ProbabilityVector,
    q: &ProbabilityVector,
) -> Result<Vec<f64>> {
    check_dim(p.dim(), q.dim())?;
    Ok(p.as_slice()
        .iter()
        .zip(q.as_slice())
        .map(|(a, b)| (a * b).sqrt())
        .collect())
}

pub(crate) fn overlap(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum()
}

/// `½ Σ (√p_i − √q_i)²`, which is `1 − BC` for points of the simplex.
pub(crate) fn overlap_deficit(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p
        .iter()
        .zip(q)
        .map(|(a, b)| {
            let d = a.sqrt() - b.sqrt();
            d * d
        })
        .sum::<f64>()
}

/// `arccos(BC(p, q))` through the chord length between `√p` and `√q`.
pub(crate) fn half_angle(p: &[f64], q: &[f64]) -> f64 {
    half_angle_from_deficit(overlap_deficit(p, q))
}

/// `arccos(1 − d)` evaluated without cancellation for small `d`.
pub(crate) fn half_angle_from_deficit(deficit: f64) -> f64 {
    2.0 * (deficit.clamp(0.0, 1.0) / 2.0).sqrt().min(1.0).asin()
}

/// `2·arccos(x)` with `x` clamped into `[0, 1]`.
pub fn angle_from_overlap(x: f64) -> f64 {
    2.0 * x.clamp(0.0, 1.0).acos()
}
