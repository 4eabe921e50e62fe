//! Support-graph predicates and the stationary law of a chain.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::matrix::{NonNegativeMatrix, SquareMatrix, StochasticMatrix};
use crate::simplex::ProbabilityVector;

/// Maximum `‖πᵀP − πᵀ‖∞` accepted for a stationary distribution.
pub const STATIONARY_RESIDUAL: f64 = 1e-10;

fn successors<M: SquareMatrix + ?Sized>(m: &M) -> Vec<Vec<usize>> {
    (0..m.dim())
        .map(|i| {
            m.row(i)
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > 0.0)
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

fn reach_all(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// True iff the support digraph is strongly connected.
pub fn is_irreducible<M: SquareMatrix + ?Sized>(m: &M) -> bool {
    let adj = successors(m);
    let mut rev = vec![Vec::new(); adj.len()];
    for (u, out) in adj.iter().enumerate() {
        for &v in out {
            rev[v].push(u);
        }
    }
    reach_all(&adj) && reach_all(&rev)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Gcd of the cycle lengths of the support digraph.
///
/// Uses BFS depths from state 0: the gcd of `depth(u) + 1 − depth(v)` over
/// all edges `u → v`.
pub fn period<M: SquareMatrix + ?Sized>(m: &M) -> Result<usize> {
    if !is_irreducible(m) {
        return Err(Error::NotIrreducible);
    }
    let adj = successors(m);
    let mut depth = vec![usize::MAX; adj.len()];
    depth[0] = 0;
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if depth[v] == usize::MAX {
                depth[v] = depth[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0;
    for (u, out) in adj.iter().enumerate() {
        for &v in out {
            g = gcd(g, (depth[u] + 1).abs_diff(depth[v]));
        }
    }
    Ok(g)
}

pub fn is_aperiodic<M: SquareMatrix + ?Sized>(m: &M) -> Result<bool> {
    Ok(period(m)? == 1)
}

/// Irreducible and aperiodic.
pub fn is_ergodic(p: &StochasticMatrix) -> bool {
    matches!(period(p), Ok(1))
}

/// Detailed balance `π_i P_ij = π_j P_ji` up to `tol`.
pub fn is_reversible(p: &StochasticMatrix, pi: &ProbabilityVector, tol: f64) -> Result<bool> {
    Ok(detailed_balance_gap(p, pi)? <= tol)
}

pub(crate) fn detailed_balance_gap(p: &StochasticMatrix, pi: &ProbabilityVector) -> Result<f64> {
    check_dim(p.dim(), pi.dim())?;
    let n = p.dim();
    let mut gap = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            gap = gap.max((pi[i] * p.get(i, j) - pi[j] * p.get(j, i)).abs());
        }
    }
    Ok(gap)
}

type BitMatrix = Vec<Vec<u64>>;

fn bit_support(m: &NonNegativeMatrix) -> BitMatrix {
    let n = m.dim();
    let words = n.div_ceil(64);
    (0..n)
        .map(|i| {
            let mut row = vec![0u64; words];
            for (j, &v) in m.row(i).iter().enumerate() {
                if v > 0.0 {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect()
}

fn bit_mul(a: &BitMatrix, b: &BitMatrix, n: usize) -> BitMatrix {
    a.iter()
        .map(|row| {
            let mut out = vec![0u64; row.len()];
            for k in 0..n {
                if row[k / 64] >> (k % 64) & 1 == 1 {
                    for (o, w) in out.iter_mut().zip(&b[k]) {
                        *o |= w;
                    }
                }
            }
            out
        })
        .collect()
}

fn bit_full(m: &BitMatrix, n: usize) -> bool {
    let full_words = n / 64;
    let tail = n % 64;
    m.iter().all(|row| {
        row[..full_words].iter().all(|&w| w == u64::MAX)
            && (tail == 0 || row[full_words] == (1u64 << tail) - 1)
    })
}

/// Some power of `R` is strictly positive.
///
/// Evaluates the boolean support raised to the Wielandt exponent
/// `(n − 1)² + 1`, so no floating underflow can hide positivity.
pub fn is_primitive(r: &NonNegativeMatrix) -> bool {
    let n = r.dim();
    let mut exp = (n - 1) * (n - 1) + 1;
    let mut base = bit_support(r);
    let mut acc: Option<BitMatrix> = None;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => bit_mul(&a, &base, n),
            });
        }
        exp >>= 1;
        if exp > 0 {
            base = bit_mul(&base, &base, n);
        }
    }
    bit_full(&acc.expect("exponent is at least one"), n)
}

fn stationary_residual(p: &StochasticMatrix, pi: &[f64]) -> f64 {
    p.left_mul(pi)
        .iter()
        .zip(pi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Solution of `πᵀP = πᵀ`, `Σπ = 1`.
///
/// Solved directly, with one balance equation traded for the normalization
/// constraint. When that system is numerically singular on an irreducible
/// input, falls back to power iteration on the lazy chain `(I + P)/2`.
pub fn stationary_distribution(p: &StochasticMatrix) -> Result<ProbabilityVector> {
    let n = p.dim();
    if n == 1 {
        return ProbabilityVector::new(vec![1.0]);
    }
    let pi = match solve_balance(p) {
        Some(pi) => pi,
        None if is_irreducible(p) => lazy_power_iteration(p)?,
        None => return Err(Error::SingularSystem),
    };
    if pi.iter().any(|&v| v < -1e-10) {
        return Err(Error::SingularSystem);
    }
    let pi = ProbabilityVector::from_iterate(pi.into_iter().map(|v| v.max(0.0)).collect())?;
    if stationary_residual(p, pi.as_slice()) > STATIONARY_RESIDUAL {
        return Err(Error::NotConverged {
            what: "stationary solve",
            iterations: 0,
        });
    }
    Ok(pi)
}

fn solve_balance(p: &StochasticMatrix) -> Option<Vec<f64>> {
    let n = p.dim();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(j, i)] = p.get(i, j);
        }
        a[(i, i)] -= 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;

    let lu = a.full_piv_lu();
    let u = lu.u();
    let diag = u.diagonal();
    let max = diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if max == 0.0 || min <= 1e-12 * max {
        return None;
    }
    let x = lu.solve(&b)?;
    Some(x.iter().copied().collect())
}

fn lazy_power_iteration(p: &StochasticMatrix) -> Result<Vec<f64>> {
    const MAX_ITER: usize = 10_000_000;
    let n = p.dim();
    let mut x = vec![1.0 / n as f64; n];
    for it in 0..MAX_ITER {
        let px = p.left_mul(&x);
        let next: Vec<f64> = x.iter().zip(&px).map(|(a, b)| 0.5 * (a + b)).collect();
        let delta = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = next;
        if delta < 1e-15 && stationary_residual(p, &x) <= STATIONARY_RESIDUAL * 0.1 {
            return Ok(x);
        }
        if it + 1 == MAX_ITER {
            break;
        }
    }
    Err(Error::NotConverged {
        what: "stationary power iteration",
        iterations: MAX_ITER,
    })
}
