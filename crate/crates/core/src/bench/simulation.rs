//! The interpolation benchmark. Every random draw comes from its own
//! ChaCha stream whose seed is a hash of the master seed and the draw's
//! coordinates, so results do not depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ari::{adjusted_rand_index, contingency, trace_form_ari};
use super::dirichlet::{interpolate_alpha, sample_stochastic_matrix};
use super::distance::pairwise_distance_matrix_with;
use super::kmedoids::{k_medoids, DEFAULT_RESTARTS};
use crate::error::{Error, Result};
use crate::matrix::StochasticMatrix;
use crate::matrix_distance::MatrixMetricKind;

pub const DEFAULT_CLUSTER_SIZE: usize = 20;
pub const DEFAULT_REPETITIONS: usize = 50;
pub const DEFAULT_STEPS: usize = 20;

const SAMPLE_STREAM: u64 = 0;
const CLUSTER_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// `α₀` (the reference) followed by `α₁..α_K`.
    pub alphas: Vec<Vec<f64>>,
    /// Number of interpolation steps `T`; the grid is `{0, 1/T, …, 1}`.
    pub steps: usize,
    pub repetitions: usize,
    pub cluster_size: usize,
    pub metrics: Vec<MatrixMetricKind>,
    pub seed: u64,
    pub state_count: usize,
    pub restarts: usize,
    /// Additive smoothing applied before computing distances.
    pub smoothing: Option<f64>,
}

impl SimulationConfig {
    /// Config with default sizes for the given parameters and all metrics.
    pub fn new(alphas: Vec<Vec<f64>>, seed: u64) -> Self {
        let state_count = alphas.first().map_or(0, Vec::len);
        Self {
            alphas,
            steps: DEFAULT_STEPS,
            repetitions: DEFAULT_REPETITIONS,
            cluster_size: DEFAULT_CLUSTER_SIZE,
            metrics: MatrixMetricKind::ALL.to_vec(),
            seed,
            state_count,
            restarts: DEFAULT_RESTARTS,
            smoothing: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.alphas.len() < 2 {
            return bad("need the reference and at least one moving cluster".into());
        }
        for (k, alpha) in self.alphas.iter().enumerate() {
            if alpha.len() != self.state_count {
                return bad(format!(
                    "alpha {k} has {} entries, expected {}",
                    alpha.len(),
                    self.state_count
                ));
            }
            if let Some(i) = alpha.iter().position(|&a| !(a > 0.0 && a.is_finite())) {
                return bad(format!("alpha {k} entry {i} is not strictly positive"));
            }
        }
        if self.state_count == 0 {
            return bad("state_count must be positive".into());
        }
        if self.steps == 0 || self.repetitions == 0 || self.restarts == 0 {
            return bad("steps, repetitions and restarts must be at least 1".into());
        }
        if self.cluster_size < 2 {
            return bad("cluster_size must be at least 2".into());
        }
        if self.metrics.is_empty() {
            return bad("no metrics selected".into());
        }
        if let Some(eps) = self.smoothing {
            if !(eps > 0.0 && eps.is_finite()) {
                return bad("smoothing must be a positive number".into());
            }
        }
        Ok(())
    }

    pub fn clusters(&self) -> usize {
        self.alphas.len()
    }

    pub fn t(&self, step: usize) -> f64 {
        step as f64 / self.steps as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationCell {
    pub step: usize,
    pub t: f64,
    pub metric: MatrixMetricKind,
    pub mean_ari: f64,
    /// Sample standard deviation over repetitions (0 for a single repetition).
    pub std_ari: f64,
    pub reps: usize,
    /// Mean of the trace-form diagnostic over the same repetitions.
    pub mean_trace_form: f64,
}

/// One cell per `(step, metric)`, steps ascending, metrics in config order.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub cells: Vec<SimulationCell>,
}

impl SimulationResult {
    pub fn cell(&self, step: usize, metric: MatrixMetricKind) -> Option<&SimulationCell> {
        self.cells.iter().find(|c| c.step == step && c.metric == metric)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream_seed(master: u64, coordinates: &[u64]) -> u64 {
    coordinates
        .iter()
        .fold(splitmix64(master), |h, &c| splitmix64(h ^ splitmix64(c)))
}

fn stream(master: u64, coordinates: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, coordinates))
}

fn metric_id(metric: MatrixMetricKind) -> u64 {
    MatrixMetricKind::ALL
        .iter()
        .position(|&m| m == metric)
        .expect("metric listed in ALL") as u64
}

/// The matrices and true labels of repetition `rep` at `step`: cluster `k`
/// draws `cluster_size` matrices from the interpolated `α_k`.
pub fn sample_cohort(
    config: &SimulationConfig,
    step: usize,
    rep: usize,
) -> Result<(Vec<StochasticMatrix>, Vec<usize>)> {
    let t = config.t(step);
    let n = config.clusters() * config.cluster_size;
    let mut matrices = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (k, alpha_k) in config.alphas.iter().enumerate() {
        let alpha = interpolate_alpha(alpha_k, &config.alphas[0], t)?;
        for i in 0..config.cluster_size {
            let mut rng = stream(
                config.seed,
                &[SAMPLE_STREAM, step as u64, rep as u64, k as u64, i as u64],
            );
            matrices.push(sample_stochastic_matrix(&alpha, &mut rng)?);
            labels.push(k);
        }
    }
    Ok((matrices, labels))
}

/// `(ARI, trace form)` per metric for one repetition.
fn run_repetition(config: &SimulationConfig, step: usize, rep: usize) -> Result<Vec<(f64, f64)>> {
    let (matrices, truth) = sample_cohort(config, step, rep)?;
    config
        .metrics
        .iter()
        .map(|&metric| {
            let d = pairwise_distance_matrix_with(&matrices, metric, config.smoothing)?;
            let mut rng = stream(
                config.seed,
                &[CLUSTER_STREAM, step as u64, rep as u64, metric_id(metric)],
            );
            let found = k_medoids(&d, config.clusters(), config.restarts, &mut rng)?.labels;
            let table = contingency(&truth, &found)?;
            Ok((adjusted_rand_index(&table)?, trace_form_ari(&table)?))
        })
        .collect()
}

pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationResult> {
    config.validate()?;
    let tasks: Vec<(usize, usize)> = (0..=config.steps)
        .flat_map(|s| (0..config.repetitions).map(move |r| (s, r)))
        .collect();
    let scores = tasks
        .par_iter()
        .map(|&(s, r)| run_repetition(config, s, r))
        .collect::<Result<Vec<_>>>()?;

    let reps = config.repetitions;
    let mut cells = Vec::with_capacity((config.steps + 1) * config.metrics.len());
    for step in 0..=config.steps {
        let block = &scores[step * reps..(step + 1) * reps];
        for (m, &metric) in config.metrics.iter().enumerate() {
            let aris: Vec<f64> = block.iter().map(|v| v[m].0).collect();
            let traces: Vec<f64> = block.iter().map(|v| v[m].1).collect();
            let mean = aris.iter().sum::<f64>() / reps as f64;
            let std = if reps > 1 {
                (aris.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt()
            } else {
                0.0
            };
            cells.push(SimulationCell {
                step,
                t: config.t(step),
                metric,
                mean_ari: mean,
                std_ari: std,
                reps,
                mean_trace_form: traces.iter().sum::<f64>() / reps as f64,
            });
        }
    }
    Ok(SimulationResult { cells })
}
