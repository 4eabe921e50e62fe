use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{check_dim, Error, Result};
use crate::matrix::StochasticMatrix;
use crate::simplex::ProbabilityVector;

fn check_alpha(alpha: &[f64]) -> Result<()> {
    if alpha.is_empty() {
        return Err(Error::Empty);
    }
    match alpha.iter().position(|&a| !(a > 0.0 && a.is_finite())) {
        Some(index) => Err(Error::NonPositiveAlpha {
            index,
            value: alpha[index],
        }),
        None => Ok(()),
    }
}

/// One draw from `Dirichlet(α)`, as normalized independent `Gamma(α_i, 1)` variates.
pub fn sample_dirichlet<R: Rng + ?Sized>(alpha: &[f64], rng: &mut R) -> Result<ProbabilityVector> {
    check_alpha(alpha)?;
    let gammas: Vec<Gamma<f64>> = alpha
        .iter()
        .map(|&a| Gamma::new(a, 1.0).expect("shape checked positive"))
        .collect();
    loop {
        let draws: Vec<f64> = gammas.iter().map(|g| g.sample(rng)).collect();
        let sum: f64 = draws.iter().sum();
        // all-zero draws only happen through underflow at tiny shapes
        if sum > 0.0 {
            return ProbabilityVector::new(draws.into_iter().map(|x| x / sum).collect());
        }
    }
}

/// `n × n` matrix with independent `Dirichlet(α)` rows, `n = α.len()`.
pub fn sample_stochastic_matrix<R: Rng + ?Sized>(
    alpha: &[f64],
    rng: &mut R,
) -> Result<StochasticMatrix> {
    check_alpha(alpha)?;
    let rows = (0..alpha.len())
        .map(|_| sample_dirichlet(alpha, rng))
        .collect::<Result<Vec<_>>>()?;
    StochasticMatrix::from_distributions(rows)
}

/// `(1 − t)·α_k + t·α_0`.
pub fn interpolate_alpha(alpha_k: &[f64], alpha_0: &[f64], t: f64) -> Result<Vec<f64>> {
    check_dim(alpha_k.len(), alpha_0.len())?;
    Ok(alpha_k
        .iter()
        .zip(alpha_0)
        .map(|(a, b)| (1.0 - t) * a + t * b)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SquareMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Empirical mean and variance per component over `draws` samples.
    fn moments(alpha: &[f64], draws: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = alpha.len();
        let mut sum = vec![0.0; k];
        let mut sq = vec![0.0; k];
        for _ in 0..draws {
            let x = sample_dirichlet(alpha, &mut rng).unwrap();
            for i in 0..k {
                sum[i] += x[i];
                sq[i] += x[i] * x[i];
            }
        }
        let n = draws as f64;
        let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
        let var = sq.iter().zip(&mean).map(|(s, m)| s / n - m * m).collect();
        (mean, var)
    }

    fn exact_moments(alpha: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let total: f64 = alpha.iter().sum();
        let mean = alpha.iter().map(|a| a / total).collect();
        let var = alpha
            .iter()
            .map(|a| a * (total - a) / (total * total * (total + 1.0)))
            .collect();
        (mean, var)
    }

    #[test]
    fn means_within_clt_bands() {
        let draws = 100_000;
        for alpha in [[1.0, 1.0, 1.0], [8.0, 2.0, 2.0]] {
            let (mean, _) = moments(&alpha, draws, 7);
            let (expected, var) = exact_moments(&alpha);
            for i in 0..3 {
                let sigma = (var[i] / draws as f64).sqrt();
                assert!((mean[i] - expected[i]).abs() < 3.0 * sigma, "{alpha:?} component {i}");
            }
        }
    }

    #[test]
    fn variance_within_clt_band() {
        let alpha = [8.0, 8.0, 8.0];
        let draws = 100_000;
        let (_, var) = moments(&alpha, draws, 11);
        let (_, expected) = exact_moments(&alpha);
        assert!((expected[0] - 8.0 * 16.0 / (576.0 * 25.0)).abs() < 1e-15);
        // Var(X²) for the sampled component bounds the spread of the variance estimate
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let samples: Vec<f64> = (0..draws)
            .map(|_| sample_dirichlet(&alpha, &mut rng).unwrap()[0])
            .collect();
        let m = samples.iter().sum::<f64>() / draws as f64;
        let fourth = samples.iter().map(|x| (x - m).powi(4)).sum::<f64>() / draws as f64;
        let sigma = ((fourth - expected[0] * expected[0]) / draws as f64).sqrt();
        for v in var {
            assert!((v - expected[0]).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn small_shapes_stay_on_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x = sample_dirichlet(&[0.05, 0.3, 0.01], &mut rng).unwrap();
            assert!((x.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_rows_and_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = sample_stochastic_matrix(&[8.0, 8.0, 8.0], &mut rng).unwrap();
        for i in 0..3 {
            assert!((p.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let draws = 10_000;
        let mut mean = [0.0; 9];
        for _ in 0..draws {
            let p = sample_stochastic_matrix(&[8.0, 2.0, 2.0], &mut rng).unwrap();
            for (m, v) in mean.iter_mut().zip(p.entries()) {
                *m += v / draws as f64;
            }
        }
        for row in mean.chunks(3) {
            assert!((row[0] - 2.0 / 3.0).abs() < 0.01);
            assert!((row[1] - 1.0 / 6.0).abs() < 0.01);
            assert!((row[2] - 1.0 / 6.0).abs() < 0.01);
        }
    }

    #[test]
    fn matrix_sampling_is_deterministic() {
        let a = sample_stochastic_matrix(&[2.0, 3.0], &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_stochastic_matrix(&[2.0, 3.0], &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            sample_dirichlet(&[1.0, 0.0], &mut rng),
            Err(Error::NonPositiveAlpha { index: 1, .. })
        ));
        assert!(sample_stochastic_matrix(&[-1.0, 2.0], &mut rng).is_err());
    }

    #[test]
    fn interpolation() {
        let ak = [8.0, 2.0, 2.0];
        let a0 = [8.0, 8.0, 8.0];
        assert_eq!(interpolate_alpha(&ak, &a0, 0.0).unwrap(), ak.to_vec());
        assert_eq!(interpolate_alpha(&ak, &a0, 1.0).unwrap(), a0.to_vec());
        assert_eq!(interpolate_alpha(&ak, &a0, 0.5).unwrap(), vec![8.0, 5.0, 5.0]);
        assert!(interpolate_alpha(&ak, &[1.0], 0.5).is_err());
    }
}
