//! Dirichlet-cluster benchmark: sample clusters of stochastic matrices,
//! pull every cluster centre toward a reference, cluster by each matrix
//! distance and score the recovered labels with the adjusted Rand index.

pub mod ari;
pub mod dirichlet;
pub mod distance;
pub mod kmedoids;
pub mod simulation;

pub use ari::{adjusted_rand_index, ari, contingency, trace_form_ari, ContingencyTable, PairCounts};
pub use dirichlet::{interpolate_alpha, sample_dirichlet, sample_stochastic_matrix};
pub use distance::{pairwise_distance_matrix, pairwise_distance_matrix_with, DistanceMatrix};
pub use kmedoids::{cluster_k_medoids, k_medoids, KMedoids};
pub use simulation::{run_simulation, sample_cohort, SimulationCell, SimulationConfig, SimulationResult};
