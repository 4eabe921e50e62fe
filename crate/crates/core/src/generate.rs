//! Random chain generators for tests, benchmarks and experiments.

use rand::Rng;

use crate::bench::dirichlet::{sample_dirichlet, sample_stochastic_matrix};
use crate::error::Result;
use crate::matrix::{MarkovChain, StochasticMatrix};
use crate::simplex::ProbabilityVector;

/// Uniform draw from the simplex of dimension `n`.
pub fn random_probability_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ProbabilityVector> {
    sample_dirichlet(&vec![1.0; n], rng)
}

/// Matrix with independent uniform rows; strictly positive almost surely.
pub fn random_stochastic_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StochasticMatrix> {
    sample_stochastic_matrix(&vec![1.0; n], rng)
}

pub fn random_chain<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<MarkovChain> {
    let initial = random_probability_vector(n, rng)?;
    MarkovChain::new(initial, random_stochastic_matrix(n, rng)?)
}

/// Reversible ergodic chain built by the Metropolis rule.
///
/// A target `π ~ Dirichlet(2, …, 2)` and a random symmetric proposal are
/// combined as `P_ij = W_ij·min(1, π_j/π_i)`; the proposal is scaled so every
/// diagonal entry keeps at least 5% of its row. Returns the chain and `π`.
#[allow(clippy::needless_range_loop)]
pub fn metropolis_chain<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<(StochasticMatrix, ProbabilityVector)> {
    let pi = sample_dirichlet(&vec![2.0; n], rng)?;
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = rng.random_range(0.05..1.0);
            w[i][j] = v;
            w[j][i] = v;
        }
    }
    let max_row = w.iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max);
    let scale = if max_row > 0.0 {
        rng.random_range(0.5..0.95) / max_row
    } else {
        0.0
    };
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut off = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let v = scale * w[i][j] * (pi[j] / pi[i]).min(1.0);
            rows[i][j] = v;
            off += v;
        }
        rows[i][i] = 1.0 - off;
    }
    Ok((StochasticMatrix::from_rows(rows)?, pi))
}
