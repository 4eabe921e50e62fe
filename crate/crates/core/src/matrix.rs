//! Stochastic and nonnegative square matrices, and chains built from them.

use crate::error::{check_dim, Error, Result};
use crate::simplex::{overlap_deficit, ProbabilityVector, SIMPLEX_TOL};

/// Read access shared by the square matrix types. Entries are row-major.
pub trait SquareMatrix {
    fn dim(&self) -> usize;
    fn entries(&self) -> &[f64];

    fn get(&self, i: usize, j: usize) -> f64 {
        self.entries()[i * self.dim() + j]
    }

    fn row(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.entries()[i * n..(i + 1) * n]
    }

    fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.row(i).to_vec()).collect()
    }
}

fn flatten(rows: Vec<Vec<f64>>) -> Result<(usize, Vec<f64>)> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut data = Vec::with_capacity(n * n);
    for row in rows {
        if row.len() != n {
            return Err(Error::NotSquare {
                rows: n,
                cols: row.len(),
            });
        }
        data.extend(row);
    }
    Ok((n, data))
}

/// Square row-stochastic matrix, optionally with state names.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    n: usize,
    data: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl StochasticMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows_with_tol(rows, SIMPLEX_TOL)
    }

    pub fn from_rows_with_tol(rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let (n, mut data) = flatten(rows)?;
        for (row, chunk) in data.chunks_mut(n).enumerate() {
            let pv = ProbabilityVector::with_tolerance(chunk.to_vec(), tol).map_err(|e| {
                Error::InvalidRow {
                    row,
                    source: Box::new(e),
                }
            })?;
            chunk.copy_from_slice(pv.as_slice());
        }
        Ok(Self {
            n,
            data,
            labels: None,
        })
    }

    pub fn from_distributions(rows: Vec<ProbabilityVector>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.dim() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.dim(),
                });
            }
            data.extend(row.into_vec());
        }
        Ok(Self {
            n,
            data,
            labels: None,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            n,
            data,
            labels: None,
        }
    }

    /// Deterministic chain moving state `i` to `perm[i]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut data = vec![0.0; n * n];
        for (i, &j) in perm.iter().enumerate() {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, len: n });
            }
            data[i * n + j] = 1.0;
        }
        Ok(Self {
            n,
            data,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::LabelCount(labels.len(), self.n));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Row vector times matrix: `xᵀ P`.
    pub fn left_mul(&self, x: &[f64]) -> Vec<f64> {
        vec_mat(x, &self.data, self.n)
    }

    pub fn mul(&self, other: &StochasticMatrix) -> Result<StochasticMatrix> {
        check_dim(self.n, other.n)?;
        let rows = (0..self.n)
            .map(|i| other.left_mul(self.row(i)))
            .collect::<Vec<_>>();
        Self::from_rows_with_tol(rows, 1e-8)
    }

    /// `P^k` by repeated squaring; `P^0` is the identity.
    pub fn power(&self, mut k: u64) -> StochasticMatrix {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        base.labels = None;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("closed under products");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("closed under products");
            }
        }
        result
    }
}

impl SquareMatrix for StochasticMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn entries(&self) -> &[f64] {
        &self.data
    }
}

/// Entrywise nonnegative square matrix with row sums at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct NonNegativeMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Row sum slack tolerated above one.
pub const ROW_SUM_SLACK: f64 = 1e-12;

impl NonNegativeMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let (n, data) = flatten(rows)?;
        for (index, &value) in data.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeEntry { index, value });
            }
        }
        for (row, chunk) in data.chunks(n).enumerate() {
            let sum: f64 = chunk.iter().sum();
            if sum > 1.0 + ROW_SUM_SLACK {
                return Err(Error::InvalidRow {
                    row,
                    source: Box::new(Error::SumOutOfTolerance {
                        sum,
                        tol: ROW_SUM_SLACK,
                    }),
                });
            }
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Matrix times column vector: `R x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Row vector times matrix: `xᵀ R`.
    pub fn left_mul(&self, x: &[f64]) -> Vec<f64> {
        vec_mat(x, &self.data, self.n)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.data.chunks(self.n).map(|r| r.iter().sum()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }
}

impl SquareMatrix for NonNegativeMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn entries(&self) -> &[f64] {
        &self.data
    }
}

impl From<&StochasticMatrix> for NonNegativeMatrix {
    fn from(p: &StochasticMatrix) -> Self {
        Self {
            n: p.n,
            data: p.data.clone(),
        }
    }
}

fn vec_mat(x: &[f64], data: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (xi, row) in x.iter().zip(data.chunks(n)) {
        if *xi == 0.0 {
            continue;
        }
        for (o, a) in out.iter_mut().zip(row) {
            *o += xi * a;
        }
    }
    out
}

/// A time-homogeneous chain: initial law plus transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    initial: ProbabilityVector,
    matrix: StochasticMatrix,
}

impl MarkovChain {
    pub fn new(initial: ProbabilityVector, matrix: StochasticMatrix) -> Result<Self> {
        check_dim(matrix.dim(), initial.dim())?;
        Ok(Self { initial, matrix })
    }

    pub fn initial(&self) -> &ProbabilityVector {
        &self.initial
    }

    pub fn matrix(&self) -> &StochasticMatrix {
        &self.matrix
    }

    pub fn state_count(&self) -> usize {
        self.matrix.dim()
    }
}

/// Entrywise geometric mean `R_ij = √(P1_ij P2_ij)`.
pub fn hadamard_geometric_mean_matrix(
    p1: &StochasticMatrix,
    p2: &StochasticMatrix,
) -> Result<NonNegativeMatrix> {
    check_dim(p1.dim(), p2.dim())?;
    let data = p1
        .data
        .iter()
        .zip(&p2.data)
        .map(|(a, b)| (a * b).sqrt())
        .collect();
    Ok(NonNegativeMatrix { n: p1.n, data })
}

/// Per-row `1 − Σ_j R_ij`, evaluated as a sum of squares.
pub(crate) fn row_deficits(p1: &StochasticMatrix, p2: &StochasticMatrix) -> Vec<f64> {
    (0..p1.dim())
        .map(|i| overlap_deficit(p1.row(i), p2.row(i)))
        .collect()
}
