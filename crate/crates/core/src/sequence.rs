//! Bhattacharyya angle between the laws of length-`n` state sequences and
//! its infinite-run limit.
//!
//! Words of length `n` involve `n − 1` transitions, so the matrix form uses
//! `R^{n−1}`:
//!
//! ```text
//! BC_n = rᵀ R^{n−1} 1,   r = √π1 ∘ √π2,   R = √P1 ∘ √P2.
//! ```
//!
//! Angles are computed from the deficit `1 − BC_n`, propagated as
//! `e_{k+1} = δ + R e_k` with `δ_i = 1 − Σ_j R_ij`. Every term of that
//! recurrence is nonnegative, so nearly identical chains keep full relative
//! precision.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::matrix::{hadamard_geometric_mean_matrix, row_deficits, MarkovChain, NonNegativeMatrix, SquareMatrix};
use crate::simplex::{half_angle_from_deficit, overlap_deficit};
use crate::spectral::{classify, perron_pair, RateCase};

/// Default cap on the number of words the enumeration oracle will visit.
pub const ENUMERATION_CAP: u128 = 10_000_000;

/// A finite trace `x_1 … x_n` of state indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(states: Vec<usize>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self(states))
    }

    pub fn states(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `π(x_1) Π_t P(x_t, x_{t+1})`.
pub fn sequence_probability(chain: &MarkovChain, word: &Word) -> Result<f64> {
    let n = chain.state_count();
    if let Some(&index) = word.states().iter().find(|&&s| s >= n) {
        return Err(Error::IndexOutOfRange { index, len: n });
    }
    let states = word.states();
    let p = chain.matrix();
    Ok(states
        .windows(2)
        .fold(chain.initial()[states[0]], |acc, w| acc * p.get(w[0], w[1])))
}

struct Pair {
    r: Vec<f64>,
    rmat: NonNegativeMatrix,
    initial_deficit: f64,
    row_deficit: Vec<f64>,
}

impl Pair {
    fn new(a: &MarkovChain, b: &MarkovChain) -> Result<Self> {
        check_dim(a.state_count(), b.state_count())?;
        let (pa, pb) = (a.initial().as_slice(), b.initial().as_slice());
        Ok(Self {
            r: pa.iter().zip(pb).map(|(x, y)| (x * y).sqrt()).collect(),
            rmat: hadamard_geometric_mean_matrix(a.matrix(), b.matrix())?,
            initial_deficit: overlap_deficit(pa, pb),
            row_deficit: row_deficits(a.matrix(), b.matrix()),
        })
    }
}

/// Running state of the deficit recurrence, advanced one transition at a time.
struct Deficit<'a> {
    pair: &'a Pair,
    e: Vec<f64>,
    transitions: usize,
}

impl<'a> Deficit<'a> {
    fn new(pair: &'a Pair) -> Self {
        Self {
            pair,
            e: vec![0.0; pair.r.len()],
            transitions: 0,
        }
    }

    fn advance_to(&mut self, transitions: usize) {
        while self.transitions < transitions {
            let re = self.pair.rmat.mul_vec(&self.e);
            self.e = re.iter().zip(&self.pair.row_deficit).map(|(a, d)| a + d).collect();
            self.transitions += 1;
        }
    }

    fn angle(&self) -> f64 {
        let d = self.pair.initial_deficit
            + self.pair.r.iter().zip(&self.e).map(|(a, b)| a * b).sum::<f64>();
        (2.0 * half_angle_from_deficit(d)).clamp(0.0, std::f64::consts::PI)
    }
}

/// Bhattacharyya angle between the length-`n` sequence laws of two chains.
pub fn sequence_distance(a: &MarkovChain, b: &MarkovChain, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::DegenerateInput("word length must be at least 1".into()));
    }
    let pair = Pair::new(a, b)?;
    let mut rec = Deficit::new(&pair);
    rec.advance_to(n - 1);
    Ok(rec.angle())
}

/// The overlap `rᵀ R^{n−1} 1`, by `n − 1` matrix–vector products.
pub fn sequence_overlap(a: &MarkovChain, b: &MarkovChain, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::DegenerateInput("word length must be at least 1".into()));
    }
    let pair = Pair::new(a, b)?;
    let mut v = vec![1.0; pair.r.len()];
    for _ in 1..n {
        v = pair.rmat.mul_vec(&v);
    }
    Ok(pair.r.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>().clamp(0.0, 1.0))
}

/// Doubles `n` from 1 until consecutive sequence distances differ by less
/// than `tol`. Returns the last distance and the `n` it was evaluated at.
pub fn sequence_distance_limit(
    a: &MarkovChain,
    b: &MarkovChain,
    tol: f64,
    max_n: usize,
) -> Result<(f64, usize)> {
    let pair = Pair::new(a, b)?;
    let mut rec = Deficit::new(&pair);
    let mut n = 1;
    let mut prev = rec.angle();
    let mut doublings = 0;
    while n <= max_n {
        n *= 2;
        rec.advance_to(n - 1);
        let cur = rec.angle();
        doublings += 1;
        if (cur - prev).abs() < tol {
            return Ok((cur, n));
        }
        prev = cur;
    }
    Err(Error::NotConverged {
        what: "sequence distance doubling",
        iterations: doublings,
    })
}

/// Enumerates every word of length `n` and sums `√(p1(w) p2(w))` directly.
pub fn sequence_distance_bruteforce(a: &MarkovChain, b: &MarkovChain, n: usize) -> Result<f64> {
    sequence_distance_bruteforce_with_cap(a, b, n, ENUMERATION_CAP)
}

pub fn sequence_distance_bruteforce_with_cap(
    a: &MarkovChain,
    b: &MarkovChain,
    n: usize,
    cap: u128,
) -> Result<f64> {
    check_dim(a.state_count(), b.state_count())?;
    if n == 0 {
        return Err(Error::DegenerateInput("word length must be at least 1".into()));
    }
    let k = a.state_count();
    let words = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if words > cap {
        return Err(Error::EnumerationTooLarge { words, cap });
    }
    let mut word = vec![0usize; n];
    let mut deficit = 0.0;
    for _ in 0..words {
        let w = Word(word.clone());
        let p1 = sequence_probability(a, &w)?;
        let p2 = sequence_probability(b, &w)?;
        let d = p1.sqrt() - p2.sqrt();
        deficit += 0.5 * d * d;
        // odometer increment, last position fastest
        for pos in (0..n).rev() {
            word[pos] += 1;
            if word[pos] < k {
                break;
            }
            word[pos] = 0;
        }
    }
    Ok(2.0 * half_angle_from_deficit(deficit))
}

/// Limit of the sequence distance as the word length grows without bound.
#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub value: f64,
    pub case: RateCase,
    pub spectral_radius: f64,
    /// Closed-form overlap `rᵀ (lim R^n) 1`; zero in the sub-unit case.
    pub overlap: f64,
    /// Residual of the eigenpairs the closed form was built from.
    pub residual: f64,
}

/// Infinite-run Bhattacharyya rate `lim_n d^{(n)}(M1, M2)`.
///
/// With `L = lim R^n` (`Σ_{i∈𝓘} p_i q_iᵀ` or the Perron projector `p qᵀ`), the
/// limit overlap is `rᵀ L 1`. The angle itself is taken from the limit
/// deficit `1 − rᵀ L 1 = 1 − Σr + rᵀ (I − R + L)⁻¹ δ`, the fixed point of the
/// deficit recurrence, which avoids cancellation when the overlap is near one.
pub fn bhattacharyya_rate(a: &MarkovChain, b: &MarkovChain) -> Result<RateResult> {
    let pair = Pair::new(a, b)?;
    let class = classify(&pair.rmat)?;
    let n = pair.r.len();
    let (projector, residual): (Vec<f64>, f64) = match &class.case {
        RateCase::SubUnit => {
            return Ok(RateResult {
                value: std::f64::consts::PI,
                case: RateCase::SubUnit,
                spectral_radius: class.spectral_radius,
                overlap: 0.0,
                residual: 0.0,
            })
        }
        RateCase::Unsupported { reason } => return Err(Error::UnsupportedSpectrum(reason.clone())),
        RateCase::Type2 => {
            let pair_vectors = perron_pair(&pair.rmat)?;
            let mut l = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    l[i * n + j] = pair_vectors.right[i] * pair_vectors.left[j];
                }
            }
            (l, pair_vectors.residual)
        }
        RateCase::Type1 { unit_indices } => {
            let dec = class.decomposition.as_ref().expect("type 1 carries its decomposition");
            let mut l = vec![0.0; n * n];
            for &k in unit_indices {
                for i in 0..n {
                    for j in 0..n {
                        l[i * n + j] += (dec.right[k][i] * dec.left[k][j]).re;
                    }
                }
            }
            (l, dec.residual)
        }
    };

    let l1: Vec<f64> = projector.chunks(n).map(|row| row.iter().sum()).collect();
    let overlap: f64 = pair.r.iter().zip(&l1).map(|(a, b)| a * b).sum();

    let mut m = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] += projector[i * n + j] - pair.rmat.get(i, j);
        }
    }
    let fixed = m
        .lu()
        .solve(&DVector::from_column_slice(&pair.row_deficit))
        .ok_or(Error::SingularSystem)?;
    let deficit = pair.initial_deficit
        + pair.r.iter().zip(fixed.iter()).map(|(a, b)| a * b).sum::<f64>();
    Ok(RateResult {
        value: 2.0 * half_angle_from_deficit(deficit),
        case: class.case,
        spectral_radius: class.spectral_radius,
        overlap,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::StochasticMatrix;
    use crate::simplex::ProbabilityVector;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn chain(init: &[f64], rows: &[&[f64]]) -> MarkovChain {
        MarkovChain::new(
            ProbabilityVector::new(init.to_vec()).unwrap(),
            StochasticMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn probability_examples() {
        let m = chain(&[0.3, 0.7], &[&[0.0, 1.0], &[0.5, 0.5]]);
        assert_eq!(sequence_probability(&m, &Word::new(vec![1]).unwrap()).unwrap(), 0.7);
        assert_eq!(sequence_probability(&m, &Word::new(vec![0, 0, 1]).unwrap()).unwrap(), 0.0);
        let m = chain(&[1.0, 0.0], &[&[0.5, 0.5], &[0.5, 0.5]]);
        assert_eq!(sequence_probability(&m, &Word::new(vec![0, 0]).unwrap()).unwrap(), 0.5);
        assert!(matches!(
            sequence_probability(&m, &Word::new(vec![0, 2]).unwrap()),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
        assert!(Word::new(vec![]).is_err());
    }

    #[test]
    fn distance_examples() {
        let m = chain(&[0.2, 0.8], &[&[0.6, 0.4], &[0.1, 0.9]]);
        for n in [1, 2, 10, 100] {
            assert_eq!(sequence_distance(&m, &m, n).unwrap(), 0.0);
        }
        let a = chain(&[1.0, 0.0], &[&[0.6, 0.4], &[0.1, 0.9]]);
        let b = chain(&[0.0, 1.0], &[&[0.6, 0.4], &[0.1, 0.9]]);
        assert_abs_diff_eq!(sequence_distance(&a, &b, 4).unwrap(), PI, epsilon = 1e-15);

        let a = chain(&[1.0, 0.0], &[&[0.5, 0.5], &[0.5, 0.5]]);
        let b = chain(&[1.0, 0.0], &[&[0.9, 0.1], &[0.1, 0.9]]);
        // four words; only (0,0) and (0,1) carry mass: √0.45 + √0.05
        let expected = 2.0 * (0.45f64.sqrt() + 0.05f64.sqrt()).acos();
        assert_abs_diff_eq!(sequence_distance(&a, &b, 2).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.9272952180016122, epsilon = 1e-12);
        assert_abs_diff_eq!(
            sequence_distance_bruteforce(&a, &b, 2).unwrap(),
            expected,
            epsilon = 1e-12
        );
        assert!(sequence_distance(&a, &b, 0).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        let m = chain(&[0.2, 0.8], &[&[0.6, 0.4], &[0.1, 0.9]]);
        assert_eq!(sequence_distance_bruteforce(&m, &m, 3).unwrap(), 0.0);
        let u = [1.0 / 3.0; 3];
        let rows: [&[f64]; 3] = [&u, &u, &u];
        let a = chain(&[1.0, 0.0, 0.0], &rows);
        let b = chain(&u, &rows);
        assert_abs_diff_eq!(
            sequence_distance_bruteforce(&a, &b, 1).unwrap(),
            2.0 * (1.0f64 / 3.0).sqrt().acos(),
            epsilon = 1e-12
        );
        assert!(matches!(
            sequence_distance_bruteforce_with_cap(&a, &b, 3, 26),
            Err(Error::EnumerationTooLarge { words: 27, cap: 26 })
        ));
    }

    #[test]
    fn overlap_matches_deficit_form() {
        let a = chain(&[0.3, 0.7], &[&[0.6, 0.4], &[0.1, 0.9]]);
        let b = chain(&[0.5, 0.5], &[&[0.2, 0.8], &[0.3, 0.7]]);
        for n in [1, 2, 3, 7, 20] {
            let bc = sequence_overlap(&a, &b, n).unwrap();
            let angle = sequence_distance(&a, &b, n).unwrap();
            assert_abs_diff_eq!((angle / 2.0).cos(), bc, epsilon = 1e-13);
        }
    }

    #[test]
    fn rate_examples() {
        let m = chain(&[0.2, 0.8], &[&[0.6, 0.4], &[0.1, 0.9]]);
        let rate = bhattacharyya_rate(&m, &m).unwrap();
        assert_eq!(rate.case, RateCase::Type2);
        assert_abs_diff_eq!(rate.value, 0.0, epsilon = 1e-12);

        let a = chain(&[0.5, 0.5], &[&[0.0, 1.0], &[1.0, 0.0]]);
        let b = chain(&[0.5, 0.5], &[&[1.0, 0.0], &[0.0, 1.0]]);
        let rate = bhattacharyya_rate(&a, &b).unwrap();
        assert_eq!(rate.case, RateCase::SubUnit);
        assert_eq!(rate.value, PI);

        let a = chain(&[1.0, 0.0], &[&[0.7, 0.3], &[0.3, 0.7]]);
        let b = chain(&[0.5, 0.5], &[&[0.7, 0.3], &[0.3, 0.7]]);
        let rate = bhattacharyya_rate(&a, &b).unwrap();
        assert_eq!(rate.case, RateCase::Type2);
        assert_abs_diff_eq!(rate.value, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(rate.overlap, 0.5f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn rate_type1_with_two_closed_classes() {
        // both chains share the two absorbing states; they differ on the transient one
        let a = chain(&[0.2, 0.3, 0.5], &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.3, 0.3, 0.4]]);
        let b = chain(&[0.4, 0.4, 0.2], &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.1, 0.5, 0.4]]);
        let rate = bhattacharyya_rate(&a, &b).unwrap();
        assert!(matches!(rate.case, RateCase::Type1 { ref unit_indices } if unit_indices.len() == 2));
        let (limit, _) = sequence_distance_limit(&a, &b, 1e-12, 1 << 20).unwrap();
        assert_abs_diff_eq!(rate.value, limit, epsilon = 1e-9);
        assert_abs_diff_eq!((rate.value / 2.0).cos(), rate.overlap, epsilon = 1e-12);
    }

    #[test]
    fn rate_rejects_periodic_products() {
        let a = chain(&[0.5, 0.5], &[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(matches!(bhattacharyya_rate(&a, &a), Err(Error::UnsupportedSpectrum(_))));
    }
}
