//! Spectral primitives for nonnegative matrices: spectral radius, a full
//! biorthogonal eigendecomposition, the Perron pair, and the classification
//! that decides which closed form of the Bhattacharyya rate applies.

use nalgebra::{linalg::Schur, DMatrix, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{NonNegativeMatrix, SquareMatrix};
use crate::structure::is_primitive;

/// Distance from one below which a spectral radius counts as unit.
pub const UNIT_TOL: f64 = 1e-9;
/// Largest eigenpair residual accepted by [`eigen_decompose`].
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Largest condition number of the eigenvector basis accepted as diagonalisable.
pub const CONDITION_CAP: f64 = 1e8;
/// Imaginary parts below this count as real when classifying spectra.
pub const REAL_TOL: f64 = 1e-8;

const CLUSTER_TOL: f64 = 1e-10;
const NULL_TOL: f64 = 1e-7;

/// `R = Σ λ_i p_i q_iᵀ` with `q_iᵀ p_j = [i = j]`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    /// Right eigenvectors `p_i`, unit 2-norm.
    pub right: Vec<Vec<Complex64>>,
    /// Left eigenvectors `q_i`, scaled so that `q_iᵀ p_i = 1`.
    pub left: Vec<Vec<Complex64>>,
    /// `max_i ‖R p_i − λ_i p_i‖∞`.
    pub residual: f64,
    /// `max_ij |q_iᵀ p_j − [i = j]|`.
    pub biorthogonality: f64,
    /// 2-norm condition number of the right eigenvector basis.
    pub condition: f64,
}

impl SpectralDecomposition {
    /// `Σ λ_i p_i q_iᵀ`, real part, row-major.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.eigenvalues.len();
        let mut out = vec![0.0; n * n];
        for ((lambda, p), q) in self.eigenvalues.iter().zip(&self.right).zip(&self.left) {
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] += (lambda * p[i] * q[j]).re;
                }
            }
        }
        out
    }
}

/// Which closed form of the infinite-run rate applies to `R`.
#[derive(Debug, Clone, PartialEq)]
pub enum RateCase {
    /// Diagonalisable with a real spectrum in `(−1, 1]`; carries the indices
    /// of the unit eigenvalues.
    Type1 { unit_indices: Vec<usize> },
    /// Primitive with unit spectral radius.
    Type2,
    /// Spectral radius strictly below one.
    SubUnit,
    Unsupported { reason: String },
}

fn to_dense(r: &NonNegativeMatrix) -> DMatrix<f64> {
    let n = r.dim();
    DMatrix::from_row_slice(n, n, r.entries())
}

fn dense_eigenvalues(r: &NonNegativeMatrix) -> Result<Vec<Complex64>> {
    let schur = Schur::try_new(to_dense(r), f64::EPSILON, 100_000).ok_or(Error::NotConverged {
        what: "Schur decomposition",
        iterations: 100_000,
    })?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// `ρ(R)`.
///
/// Runs power iteration on `R + I` (whose iterates stay strictly positive)
/// and stops once the Collatz–Wielandt bounds `min/max (Ax)_i / x_i` agree.
/// Reducible inputs whose bounds never close fall back to the dense spectrum.
pub fn spectral_radius(r: &NonNegativeMatrix) -> Result<f64> {
    if r.is_zero() {
        return Ok(0.0);
    }
    const MAX_ITER: usize = 2_000;
    let n = r.dim();
    let mut x = vec![1.0; n];
    for _ in 0..MAX_ITER {
        let rx = r.mul_vec(&x);
        let y: Vec<f64> = rx.iter().zip(&x).map(|(a, b)| a + b).collect();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (yi, xi) in y.iter().zip(&x) {
            let ratio = yi / xi;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        if hi - lo <= 1e-13 * hi {
            return Ok((0.5 * (lo + hi) - 1.0).max(0.0));
        }
        let scale = y.iter().copied().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / scale).collect();
        if x.iter().any(|&v| v < 1e-250) {
            break;
        }
    }
    let eig = dense_eigenvalues(r)?;
    Ok(eig.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

fn null_vectors_real(a: DMatrix<f64>, count: usize, tol: f64) -> Result<Vec<Vec<Complex64>>> {
    let n = a.nrows();
    let svd = SVD::try_new(a, false, true, f64::EPSILON, 100_000).ok_or(Error::NotConverged {
        what: "SVD",
        iterations: 100_000,
    })?;
    let v_t = svd.v_t.expect("requested");
    let mut out = Vec::with_capacity(count);
    for k in (n - count)..n {
        if svd.singular_values[k] > tol {
            return Err(Error::NotDiagonalisable(format!(
                "eigenspace deficient (singular value {:e})",
                svd.singular_values[k]
            )));
        }
        out.push((0..n).map(|j| Complex64::new(v_t[(k, j)], 0.0)).collect());
    }
    Ok(out)
}

fn null_vectors_complex(
    a: DMatrix<Complex64>,
    count: usize,
    tol: f64,
) -> Result<Vec<Vec<Complex64>>> {
    let n = a.nrows();
    let svd = SVD::try_new(a, false, true, f64::EPSILON, 100_000).ok_or(Error::NotConverged {
        what: "SVD",
        iterations: 100_000,
    })?;
    let v_t = svd.v_t.expect("requested");
    let mut out = Vec::with_capacity(count);
    for k in (n - count)..n {
        if svd.singular_values[k] > tol {
            return Err(Error::NotDiagonalisable(format!(
                "eigenspace deficient (singular value {:e})",
                svd.singular_values[k]
            )));
        }
        out.push((0..n).map(|j| v_t[(k, j)].conj()).collect());
    }
    Ok(out)
}

/// Unit 2-norm with the largest-magnitude component made real and positive.
fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
}

/// All eigenpairs of `R` with biorthogonal left and right eigenvectors.
///
/// Eigenvalues come from a real Schur decomposition. Numerically coincident
/// eigenvalues are grouped and each group's eigenspace is read off the null
/// space of `R − λI`; a group whose eigenspace is too small, or a basis whose
/// condition number exceeds [`CONDITION_CAP`], is reported non-diagonalisable.
/// Left eigenvectors are the rows of the inverse of the right basis.
pub fn eigen_decompose(r: &NonNegativeMatrix) -> Result<SpectralDecomposition> {
    let n = r.dim();
    let dense = to_dense(r);
    let eig = dense_eigenvalues(r)?;
    let scale = dense.norm().max(1.0);

    let mut assigned = vec![false; n];
    let mut eigenvalues = Vec::with_capacity(n);
    let mut right: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let members: Vec<usize> = (i..n)
            .filter(|&j| !assigned[j] && (eig[j] - eig[i]).norm() <= CLUSTER_TOL * eig[i].norm().max(1.0))
            .collect();
        members.iter().for_each(|&j| assigned[j] = true);
        let mut lambda = members.iter().map(|&j| eig[j]).sum::<Complex64>() / members.len() as f64;
        let tol = NULL_TOL * scale;
        let vectors = if lambda.im == 0.0 {
            let shifted = &dense - DMatrix::<f64>::identity(n, n) * lambda.re;
            null_vectors_real(shifted, members.len(), tol)?
        } else {
            let shifted = dense.map(|v| Complex64::new(v, 0.0))
                - DMatrix::<Complex64>::identity(n, n) * lambda;
            null_vectors_complex(shifted, members.len(), tol)?
        };
        for mut v in vectors {
            normalize(&mut v);
            if members.len() == 1 {
                // Rayleigh quotient sharpens an isolated eigenvalue
                let rv = complex_mul(&dense, &v);
                lambda = v.iter().zip(&rv).map(|(a, b)| a.conj() * b).sum();
            }
            eigenvalues.push(lambda);
            right.push(v);
        }
    }

    let basis = DMatrix::<Complex64>::from_fn(n, n, |i, k| right[k][i]);
    let singular = basis.singular_values();
    let smax = singular.max();
    let smin = singular.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= CONDITION_CAP) {
        return Err(Error::NotDiagonalisable(format!(
            "eigenvector basis condition number {condition:e} exceeds {CONDITION_CAP:e}"
        )));
    }
    let inverse = basis
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotDiagonalisable("eigenvector basis is singular".into()))?;
    let left: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| inverse[(i, j)]).collect())
        .collect();

    let mut residual = 0.0f64;
    for (lambda, p) in eigenvalues.iter().zip(&right) {
        let rp = complex_mul(&dense, p);
        for (a, b) in rp.iter().zip(p) {
            residual = residual.max((a - lambda * b).norm());
        }
    }
    let product = &inverse * &basis;
    let mut biorthogonality = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            biorthogonality = biorthogonality.max((product[(i, j)] - target).norm());
        }
    }
    if residual > RESIDUAL_TOL || biorthogonality > RESIDUAL_TOL {
        return Err(Error::NotConverged {
            what: "eigendecomposition refinement",
            iterations: 0,
        });
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        right,
        left,
        residual,
        biorthogonality,
        condition,
    })
}

fn complex_mul(a: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    let n = a.nrows();
    (0..n)
        .map(|i| (0..n).map(|j| v[j] * a[(i, j)]).sum())
        .collect()
}

/// Dominant eigenvalue with its right and left eigenvectors, `qᵀp = 1`.
#[derive(Debug, Clone)]
pub struct PerronPair {
    pub value: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub residual: f64,
}

/// Perron pair of a primitive matrix by power iteration, falling back to the
/// dense decomposition when iteration stalls.
pub fn perron_pair(r: &NonNegativeMatrix) -> Result<PerronPair> {
    if let Some(pair) = perron_by_iteration(r) {
        return Ok(pair);
    }
    let dec = eigen_decompose(r)?;
    let k = (0..dec.eigenvalues.len())
        .max_by(|&a, &b| dec.eigenvalues[a].re.total_cmp(&dec.eigenvalues[b].re))
        .ok_or(Error::Empty)?;
    let mut right: Vec<f64> = dec.right[k].iter().map(|z| z.re).collect();
    let mut left: Vec<f64> = dec.left[k].iter().map(|z| z.re).collect();
    if right.iter().sum::<f64>() < 0.0 {
        right.iter_mut().for_each(|v| *v = -*v);
        left.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(PerronPair {
        value: dec.eigenvalues[k].re,
        right,
        left,
        residual: dec.residual,
    })
}

fn dominant_vector(apply: impl Fn(&[f64]) -> Vec<f64>, n: usize) -> Option<(f64, Vec<f64>)> {
    const MAX_ITER: usize = 200_000;
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..MAX_ITER {
        let y = apply(&x);
        let norm: f64 = y.iter().sum();
        if norm <= 0.0 {
            return None;
        }
        let y: Vec<f64> = y.into_iter().map(|v| v / norm).collect();
        let delta = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        if delta <= 1e-15 {
            let ax = apply(&x);
            let lambda = ax.iter().sum::<f64>();
            return Some((lambda, x));
        }
    }
    None
}

fn perron_by_iteration(r: &NonNegativeMatrix) -> Option<PerronPair> {
    let n = r.dim();
    let (value, right) = dominant_vector(|x| r.mul_vec(x), n)?;
    let (_, mut left) = dominant_vector(|x| r.left_mul(x), n)?;
    let dot: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
    if dot <= 0.0 {
        return None;
    }
    left.iter_mut().for_each(|v| *v /= dot);
    let rp = r.mul_vec(&right);
    let residual = rp
        .iter()
        .zip(&right)
        .map(|(a, b)| (a - value * b).abs())
        .fold(0.0, f64::max);
    (residual <= 1e-12).then_some(PerronPair {
        value,
        right,
        left,
        residual,
    })
}

/// Classification plus whatever spectral data it produced along the way.
#[derive(Debug, Clone)]
pub(crate) struct Classification {
    pub case: RateCase,
    pub spectral_radius: f64,
    pub decomposition: Option<SpectralDecomposition>,
}

pub(crate) fn classify(r: &NonNegativeMatrix) -> Result<Classification> {
    let rho = spectral_radius(r)?;
    let done = |case| {
        Ok(Classification {
            case,
            spectral_radius: rho,
            decomposition: None,
        })
    };
    if rho < 1.0 - UNIT_TOL {
        return done(RateCase::SubUnit);
    }
    if is_primitive(r) {
        return done(RateCase::Type2);
    }
    let dec = match eigen_decompose(r) {
        Ok(dec) => dec,
        Err(Error::NotDiagonalisable(reason)) => {
            return done(RateCase::Unsupported {
                reason: format!("not diagonalisable: {reason}"),
            })
        }
        Err(e) => return Err(e),
    };
    if let Some(z) = dec.eigenvalues.iter().find(|z| z.im.abs() > REAL_TOL) {
        return done(RateCase::Unsupported {
            reason: format!("complex eigenvalue {:.6}{:+.6}i", z.re, z.im),
        });
    }
    if let Some(z) = dec.eigenvalues.iter().find(|z| z.re <= -1.0 + UNIT_TOL) {
        return done(RateCase::Unsupported {
            reason: format!("eigenvalue {:.6} is not above -1", z.re),
        });
    }
    let unit_indices: Vec<usize> = dec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, z)| (z.re - 1.0).abs() <= UNIT_TOL)
        .map(|(i, _)| i)
        .collect();
    if unit_indices.is_empty() {
        return done(RateCase::Unsupported {
            reason: "unit spectral radius without a unit eigenvalue".into(),
        });
    }
    Ok(Classification {
        case: RateCase::Type1 { unit_indices },
        spectral_radius: rho,
        decomposition: Some(dec),
    })
}

pub fn classify_rate_case(r: &NonNegativeMatrix) -> Result<RateCase> {
    classify(r).map(|c| c.case)
}
