//! Bhattacharyya-angle geometry for discrete-time Markov chains.
//!
//! The crate covers distances between the `n`-step sequence laws of two
//! chains and their `n → ∞` limit, Bhattacharyya-induced mixing times with
//! spectral bounds for reversible chains, a row-wise product distance on
//! stochastic matrices together with its ergodic limit, and a clustering
//! benchmark that scores these distances on Dirichlet-generated matrices.
//!
//! ```
//! use chaindist::{MarkovChain, ProbabilityVector, StochasticMatrix, sequence_distance};
//!
//! let p = StochasticMatrix::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
//! let q = StochasticMatrix::from_rows(vec![vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
//! let start = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
//! let a = MarkovChain::new(start.clone(), p).unwrap();
//! let b = MarkovChain::new(start, q).unwrap();
//! let d = sequence_distance(&a, &b, 2).unwrap();
//! assert!((d - 0.9272952180016122).abs() < 1e-12);
//! ```

pub mod bench;
pub mod error;
pub mod generate;
pub mod matrix;
pub mod matrix_distance;
pub mod mixing;
pub mod sequence;
pub mod simplex;
pub mod spectral;
pub mod structure;

pub use error::{Error, Result};
pub use matrix::{
    hadamard_geometric_mean_matrix, MarkovChain, NonNegativeMatrix, SquareMatrix,
    StochasticMatrix,
};
pub use matrix_distance::{
    ergodic_distance, l1_matrix_distance, l2_matrix_distance, stochastic_matrix_distance,
    sym_kl_rate, MatrixMetricKind,
};
pub use mixing::{
    distribution_at, mixing_bounds, mixing_time_exact, reversible_spectrum, MixingBounds,
    ReversibleSpectrum,
};
pub use sequence::{
    bhattacharyya_rate, sequence_distance, sequence_distance_bruteforce, sequence_probability,
    RateResult, Word,
};
pub use simplex::{
    bhattacharyya_angle, bhattacharyya_coefficient, hadamard_geometric_mean_vector,
    ProbabilityVector,
};
pub use spectral::{
    classify_rate_case, eigen_decompose, spectral_radius, RateCase, SpectralDecomposition,
};
pub use structure::{
    is_aperiodic, is_ergodic, is_irreducible, is_primitive, is_reversible, period,
    stationary_distribution,
};
