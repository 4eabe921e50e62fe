//! Mixing times measured by the Bhattacharyya angle to stationarity, with
//! spectral lower and upper bounds for reversible ergodic chains.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::{SquareMatrix, StochasticMatrix};
use crate::simplex::{bhattacharyya_angle, ProbabilityVector};
use crate::structure::{detailed_balance_gap, is_ergodic, stationary_distribution};

/// Detailed-balance tolerance required by [`reversible_spectrum`].
pub const BALANCE_TOL: f64 = 1e-10;
/// Default scan limit for [`mixing_time_exact`].
pub const MIXING_CAP: usize = 1_000_000;
const LAMBDA_FLOOR: f64 = 1e-12;

/// `γ = 1 − (5/16)^{2/7}`, the lower-bound constant.
pub fn gamma() -> f64 {
    1.0 - (5.0f64 / 16.0).powf(2.0 / 7.0)
}

/// Eigen-system of `D^{½} P D^{−½}` for a reversible chain, `D = diag(π)`.
#[derive(Debug, Clone)]
pub struct ReversibleSpectrum {
    /// Sorted descending; the first is one.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors; the first is `√π`.
    pub vectors: Vec<Vec<f64>>,
    pub stationary: ProbabilityVector,
}

impl ReversibleSpectrum {
    /// `P^τ` from the spectral expansion
    /// `P^τ(j,k) = π_k + √(π_k/π_j) Σ_{i≥2} λ_i^τ e^{(i)}_j e^{(i)}_k`.
    pub fn power(&self, tau: u32) -> Vec<f64> {
        let pi = self.stationary.as_slice();
        let n = pi.len();
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                let tail: f64 = self.eigenvalues[1..]
                    .iter()
                    .zip(&self.vectors[1..])
                    .map(|(l, e)| l.powi(tau as i32) * e[j] * e[k])
                    .sum();
                out[j * n + k] = pi[k] + (pi[k] / pi[j]).sqrt() * tail;
            }
        }
        out
    }

    /// `max(λ₂, |λ_n|)`.
    pub fn lambda_max(&self) -> f64 {
        match self.eigenvalues.len() {
            1 => 0.0,
            n => self.eigenvalues[1].max(self.eigenvalues[n - 1].abs()),
        }
    }
}

pub fn reversible_spectrum(p: &StochasticMatrix) -> Result<ReversibleSpectrum> {
    if !is_ergodic(p) {
        return Err(Error::NotErgodic);
    }
    let pi = stationary_distribution(p)?;
    if let Some(state) = pi.as_slice().iter().position(|&v| v <= 0.0) {
        return Err(Error::ZeroStationaryMass { state });
    }
    let gap = detailed_balance_gap(p, &pi)?;
    if gap > BALANCE_TOL {
        return Err(Error::NotReversible { gap });
    }
    let n = p.dim();
    let root: Vec<f64> = pi.as_slice().iter().map(|v| v.sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| root[i] * p.get(i, j) / root[j]);
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            if v.iter().sum::<f64>() < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    Ok(ReversibleSpectrum {
        eigenvalues,
        vectors,
        stationary: pi,
    })
}

/// `e_startᵀ P^τ` by `τ` vector–matrix products.
pub fn distribution_at(p: &StochasticMatrix, start: usize, tau: usize) -> Result<ProbabilityVector> {
    let mut x = ProbabilityVector::basis(p.dim(), start)?;
    for _ in 0..tau {
        x = ProbabilityVector::from_iterate(p.left_mul(x.as_slice()))?;
    }
    Ok(x)
}

/// Least `τ > 0` with `angle(π, e_startᵀ P^τ) ≤ ε`.
///
/// The angle is not monotone in `τ` in general, so this scans upward and
/// returns the first crossing.
pub fn mixing_time_exact(
    p: &StochasticMatrix,
    start: usize,
    epsilon: f64,
    cap: usize,
) -> Result<usize> {
    if !is_ergodic(p) {
        return Err(Error::NotErgodic);
    }
    let pi = stationary_distribution(p)?;
    mixing_time_from(p, &pi, start, epsilon, cap)
}

fn mixing_time_from(
    p: &StochasticMatrix,
    pi: &ProbabilityVector,
    start: usize,
    epsilon: f64,
    cap: usize,
) -> Result<usize> {
    let mut x = ProbabilityVector::basis(p.dim(), start)?;
    for tau in 1..=cap {
        x = ProbabilityVector::from_iterate(p.left_mul(x.as_slice()))?;
        if bhattacharyya_angle(pi, &x)? <= epsilon {
            return Ok(tau);
        }
    }
    Err(Error::CapExceeded { cap })
}

/// Largest exact mixing time over all start states.
pub fn mixing_time_worst(p: &StochasticMatrix, epsilon: f64, cap: usize) -> Result<usize> {
    if !is_ergodic(p) {
        return Err(Error::NotErgodic);
    }
    let pi = stationary_distribution(p)?;
    (0..p.dim()).try_fold(0, |worst, start| {
        Ok(worst.max(mixing_time_from(p, &pi, start, epsilon, cap)?))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingBounds {
    pub lambda_max: f64,
    pub pi_min: f64,
    pub tau_minus: usize,
    pub tau_plus: usize,
    pub epsilon: f64,
    pub gamma: f64,
}

/// Spectral bounds `τ− ≤ τ* ≤ τ+` for a reversible ergodic chain.
///
/// ```text
/// τ− = ⌈ log(γ / (1 + 1/π−)) / log λ_max ⌉
/// τ+ = ⌈ log(4(1 − cos(ε/2)) / (1 + 1/π−)) / (2 log λ_max) ⌉
/// ```
pub fn mixing_bounds(p: &StochasticMatrix, epsilon: f64) -> Result<MixingBounds> {
    if !(epsilon > 0.0) {
        return Err(Error::DegenerateInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let spectrum = reversible_spectrum(p)?;
    let lambda_max = spectrum.lambda_max();
    if lambda_max <= LAMBDA_FLOOR {
        return Err(Error::DegenerateSpectrum { lambda_max });
    }
    let pi_min = spectrum.stationary.min();
    let gamma = gamma();
    let spread = 1.0 + 1.0 / pi_min;
    let log_lambda = lambda_max.ln();
    let tau_minus = ((gamma / spread).ln() / log_lambda).ceil();
    let tau_plus = ((4.0 * (1.0 - (epsilon / 2.0).cos()) / spread).ln() / (2.0 * log_lambda)).ceil();
    Ok(MixingBounds {
        lambda_max,
        pi_min,
        tau_minus: tau_minus.max(1.0) as usize,
        tau_plus: tau_plus.max(1.0) as usize,
        epsilon,
        gamma,
    })
}
